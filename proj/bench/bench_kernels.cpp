// Serial vs OpenMP kernels: pair cosines and bootstrap draws.

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "embedgauge/embedspace.hpp"
#include "embedgauge/statkit.hpp"

namespace es = embedgauge::embedspace;
namespace sk = embedgauge::statkit;
using embedgauge::ExecPolicy;

namespace {

struct Corpus {
    std::vector<es::SentencePair> pairs;
    es::EmbeddingCollection embeddings;
};

Corpus make_corpus(std::size_t n_pairs, std::size_t dim) {
    Corpus c{{}, es::EmbeddingCollection(dim)};
    std::mt19937_64 rng(42);
    std::normal_distribution<float> z;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const std::string id = "p" + std::to_string(i);
        c.pairs.push_back({id, "a", "b", static_cast<es::Category>(i % 3)});
        for (const auto& side : {es::side_a_id(id), es::side_b_id(id)}) {
            std::vector<float> v(dim);
            for (auto& x : v) x = z(rng);
            c.embeddings.add({side, std::move(v)});
        }
    }
    return c;
}

void pair_cosines(benchmark::State& state, ExecPolicy policy) {
    const Corpus c = make_corpus(static_cast<std::size_t>(state.range(0)), 768);
    for (auto _ : state) benchmark::DoNotOptimize(es::pair_cosines(c.pairs, c.embeddings, policy));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bootstrap(benchmark::State& state, ExecPolicy policy) {
    const es::CategoryStats sim{es::Category::similar, 0.77, 0.08, 50};
    const es::CategoryStats diff{es::Category::different, 0.26, 0.09, 50};
    sk::BootstrapConfig cfg;
    cfg.resamples = static_cast<std::size_t>(state.range(0));
    cfg.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(sk::bootstrap_separation_ci(sim, diff, cfg, policy));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(pair_cosines, serial, ExecPolicy::serial)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(pair_cosines, parallel, ExecPolicy::parallel)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(bootstrap, serial, ExecPolicy::serial)->Arg(5000);
BENCHMARK_CAPTURE(bootstrap, parallel, ExecPolicy::parallel)->Arg(5000);

BENCHMARK_MAIN();
