#include <doctest.h>

#include <fstream>
#include <numeric>

#include "embedgauge/benchharness.hpp"
#include "embedgauge/errors.hpp"
#include "support.hpp"

using namespace embedgauge;
using namespace embedgauge::bench;
using testing_support::stub_provider;

namespace {

BenchPlan quick_plan() {
    BenchPlan p;
    p.warmup_iters = 3;
    p.timed_iters = 12;
    p.batch_sizes = {1, 4};
    p.payload = {"alpha", "beta", "gamma", "delta", "epsilon"};
    p.seed = 5;
    return p;
}

std::string stub(const std::string& flags = "") { return stub_provider() + " " + flags; }

}  // namespace

TEST_CASE("latency statistics") {
    const auto c = latency_stats(std::vector<double>{5, 5, 5, 5});
    CHECK(c.mean_ms == 5);
    CHECK(c.sd_ms == 0);
    CHECK(c.p50_ms == 5);
    CHECK(c.p95_ms == 5);

    std::vector<double> seq(100);
    std::iota(seq.begin(), seq.end(), 1.0);
    const auto s = latency_stats(seq);
    CHECK(s.p50_ms == doctest::Approx(50.5));
    CHECK(s.p95_ms == doctest::Approx(95.05));
    CHECK(s.samples == 100);

    const auto one = latency_stats(std::vector<double>{7});
    CHECK(one.mean_ms == 7);
    CHECK(one.sd_ms == 0);
    CHECK(one.p50_ms == 7);
    CHECK(one.p95_ms == 7);

    CHECK_THROWS_AS(latency_stats(std::vector<double>{}), EmptySampleError);
}

TEST_CASE("plan validation") {
    auto p = quick_plan();
    CHECK_NOTHROW(p.validate());
    p.timed_iters = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quick_plan();
    p.batch_sizes = {4, 1};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.batch_sizes = {1, 1};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.batch_sizes = {};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quick_plan();
    p.payload.clear();
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("payload sampling depends only on payload and seed") {
    const std::vector<std::string> payload{"a", "b", "c", "d"};
    PayloadSampler s1(payload, 9), s2(payload, 9), s3(payload, 10);
    std::vector<std::string> a, b, c;
    for (int i = 0; i < 50; ++i) {
        a.push_back(s1.next());
        b.push_back(s2.next());
        c.push_back(s3.next());
    }
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("report checks and json round trip") {
    BenchReport r;
    r.model_id = "m";
    r.throughput_by_batch = {{1, 10.0}, {4, 30.0}};
    r.best_throughput = 30.0;
    r.peak_memory_bytes = 240'000'000;
    r.peak_memory_gb = 0.24;
    r.emb_dim = 384;
    CHECK_NOTHROW(check_report(r));
    const auto back = bench_report_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
    r.best_throughput = 20.0;
    CHECK_THROWS_AS(check_report(r), ProtocolError);
    CHECK_THROWS_AS(bench_report_from_json(nlohmann::json{{"model_id", 3}}), ParseError);
}

TEST_CASE("replayed report carries the published small-model figures") {
    std::ifstream in(testing_support::fixtures() / "bench_bge_small_v1.5.json");
    const auto r = bench_report_from_json(nlohmann::json::parse(in));
    CHECK(r.model_id == "BGE-small-v1.5");
    CHECK(r.best_throughput == 467.3);
    CHECK(r.peak_memory_gb == 0.24);
    CHECK(r.emb_dim == 384);
    CHECK_NOTHROW(check_report(r));
}

TEST_CASE("handshake and encode against the stub") {
    auto h = ProviderHandle::launch(stub("--dim 4 --model-id tiny"));
    h.handshake();
    CHECK(h.ready());
    CHECK(h.model_id() == "tiny");
    CHECK(h.dim() == 4);
    const std::vector<std::string> texts{"x", "y", "x", ""};
    const auto v = h.encode(texts);
    REQUIRE(v.size() == 4);
    for (const auto& row : v) CHECK(row.size() == 4);
    CHECK(v[0] == v[2]);
    CHECK(v[0] != v[1]);
    h.echo();
    const auto m1 = h.status();
    const auto m2 = h.status();
    CHECK(m2 >= m1);
    h.shutdown();
}

TEST_CASE("instant stub gives a full report") {
    auto h = ProviderHandle::launch(stub("--dim 4"));
    BenchRunInfo info;
    const auto plan = quick_plan();
    const auto r = run_bench(plan, h, &info);
    CHECK(r.latency.samples == plan.timed_iters);
    CHECK(info.latency_samples_ms.size() == plan.timed_iters);
    CHECK(r.latency.p50_ms <= r.latency.p95_ms);
    CHECK(r.latency.p95_ms - r.latency.p50_ms < 5.0);
    CHECK(r.throughput_by_batch.size() == 2);
    CHECK_NOTHROW(check_report(r));
    CHECK(r.emb_dim == 4);
    for (std::size_t i = 1; i < info.status_trace.size(); ++i) CHECK(info.status_trace[i] >= info.status_trace[i - 1]);
    CHECK(r.peak_memory_bytes == info.status_trace.back());
    CHECK(r.peak_memory_gb == doctest::Approx(static_cast<double>(r.peak_memory_bytes) / 1e9));
    h.shutdown();
}

TEST_CASE("same seed gives the same request stream") {
    testing_support::TempDir dir;
    const auto run = [&](const std::string& log, std::uint64_t seed) {
        auto h = ProviderHandle::launch(stub("--dim 3 --log " + (dir / log).string()));
        auto plan = quick_plan();
        plan.seed = seed;
        (void)run_bench(plan, h);
        h.shutdown();
        std::ifstream in(dir / log);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto a = run("a.log", 42);
    const auto b = run("b.log", 42);
    const auto c = run("c.log", 43);
    CHECK_FALSE(a.empty());
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("warmup requests are sent but not sampled") {
    testing_support::TempDir dir;
    auto h = ProviderHandle::launch(stub("--dim 2 --log " + (dir / "req.log").string()));
    auto plan = quick_plan();
    plan.warmup_iters = 7;
    plan.batch_sizes = {2};
    const auto r = run_bench(plan, h);
    h.shutdown();
    std::ifstream in(dir / "req.log");
    std::size_t encodes = 0;
    for (std::string line; std::getline(in, line);) encodes += line.find("\"encode\"") != std::string::npos;
    // warmup + timed singles + (untimed + timed) batches
    CHECK(encodes == plan.warmup_iters + plan.timed_iters + plan.timed_iters + 1);
    CHECK(r.latency.samples == plan.timed_iters);
}

TEST_CASE("provider death is reported as such") {
    auto h = ProviderHandle::launch(stub("--die-after 5"));
    CHECK_THROWS_AS(run_bench(quick_plan(), h), ProviderDiedError);
}

TEST_CASE("dimension drift is a protocol error") {
    auto h = ProviderHandle::launch(stub("--dim 4 --drift-after 6"));
    CHECK_THROWS_AS(run_bench(quick_plan(), h), ProtocolError);
}

TEST_CASE("malformed responses are protocol errors") {
    auto h = ProviderHandle::launch(stub("--garbage-after 2"));
    CHECK_THROWS_AS(run_bench(quick_plan(), h), ProtocolError);
}

TEST_CASE("decreasing peak memory is a protocol error") {
    auto h = ProviderHandle::launch(stub("--shrink-after 1"));
    CHECK_THROWS_AS(run_bench(quick_plan(), h), ProtocolError);
}

TEST_CASE("a missing provider binary fails cleanly") {
    auto h = ProviderHandle::launch("/nonexistent/provider-binary");
    CHECK_THROWS_AS(h.handshake(), ProviderDiedError);
}

TEST_CASE("error replies surface as protocol errors") {
    ProviderProcess raw(stub());
    const auto reply = nlohmann::json::parse(raw.round_trip(R"({"cmd":"bogus"})"));
    CHECK(reply["ok"] == false);
    CHECK(reply.contains("error"));
}

TEST_CASE("several providers run concurrently") {
    const std::vector<std::string> cmds{stub("--model-id one --dim 3"), stub("--model-id two --dim 5")};
    const auto reports = run_bench_many(quick_plan(), cmds);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].model_id == "one");
    CHECK(reports[0].emb_dim == 3);
    CHECK(reports[1].model_id == "two");
    CHECK(reports[1].emb_dim == 5);
}

TEST_CASE("programmed delay sets latency and batch throughput") {
    auto h = ProviderHandle::launch(stub("--dim 16 --delay-ms 10"));
    BenchPlan plan;
    plan.timed_iters = 30;
    plan.warmup_iters = 3;
    plan.batch_sizes = {1, 32};
    plan.payload = {"a", "b", "c"};
    const auto r = run_bench(plan, h);
    h.shutdown();
    CHECK(std::fabs(r.latency.mean_ms - (10.0 + r.echo_overhead.mean_ms)) < 1.0);
    CHECK(std::fabs(r.throughput_by_batch.at(32) - 3200.0) < 320.0);
    CHECK(r.best_throughput == r.throughput_by_batch.at(32));
}
