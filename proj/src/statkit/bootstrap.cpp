#include <algorithm>
#include <cmath>

#include "embedgauge/errors.hpp"
#include "embedgauge/rng.hpp"
#include "embedgauge/statkit.hpp"

namespace embedgauge::statkit {

void BootstrapConfig::validate() const {
    if (resamples < 1) throw DomainError("bootstrap needs at least one resample");
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0,1)");
    if (pairs_per_category < 1) throw DomainError("pairs_per_category must be positive");
}

namespace {

void check_stats(const CategoryStats& s, const char* which) {
    if (!std::isfinite(s.mean) || !(s.sd >= 0.0) || !std::isfinite(s.sd)) {
        throw DomainError(std::string("invalid summary for ") + which + " pairs");
    }
}

// Mean of `n` draws from N(mean, sd), written as mean + sd * mean(z) so a
// zero sd reproduces the mean exactly.
double sample_mean(NormalStream& rng, double mean, double sd, std::size_t n) {
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k) z += rng.next();
    return mean + sd * (z / static_cast<double>(n));
}

double one_draw(const CategoryStats& similar, const CategoryStats& different, std::size_t per_category,
                std::uint64_t seed, std::size_t index) {
    NormalStream rng(mix64(seed, index));
    const double s = sample_mean(rng, similar.mean, similar.sd, per_category);
    const double d = sample_mean(rng, different.mean, different.sd, per_category);
    return s - d;
}

}  // namespace

std::vector<double> synthetic_separations(const CategoryStats& similar, const CategoryStats& different,
                                          std::size_t pairs_per_category, std::uint64_t seed, std::size_t count,
                                          ExecPolicy policy) {
    check_stats(similar, "similar");
    check_stats(different, "different");
    if (pairs_per_category < 1) throw DomainError("pairs_per_category must be positive");

    std::vector<double> draws(count);
    const auto n = static_cast<std::ptrdiff_t>(count);
    if (policy == ExecPolicy::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) draws[i] = one_draw(similar, different, pairs_per_category, seed, i);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) draws[i] = one_draw(similar, different, pairs_per_category, seed, i);
    }
    return draws;
}

BootstrapResult bootstrap_separation_ci(const CategoryStats& similar, const CategoryStats& different,
                                        const BootstrapConfig& cfg, ExecPolicy policy) {
    cfg.validate();
    std::vector<double> draws =
        synthetic_separations(similar, different, cfg.pairs_per_category, cfg.seed, cfg.resamples, policy);

    BootstrapResult r;
    r.analytic = similar.mean - different.mean;
    std::vector<double> deviations(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) deviations[i] = draws[i] - r.analytic;
    r.point = r.analytic + pairwise_sum(deviations) / static_cast<double>(draws.size());

    std::sort(draws.begin(), draws.end());
    const double alpha = 1.0 - cfg.confidence;
    r.lo = quantile_sorted(draws, alpha / 2.0);
    r.hi = quantile_sorted(draws, 1.0 - alpha / 2.0);
    r.width = r.hi - r.lo;
    return r;
}

std::uint64_t model_seed(std::uint64_t run_seed, std::string_view model_id) noexcept {
    return mix64(run_seed, fnv1a(model_id));
}

std::vector<PairwiseComparison> pairwise_comparisons(std::span<const ModelSummary> models,
                                                     const BootstrapConfig& cfg, std::size_t samples_per_model,
                                                     ExecPolicy policy) {
    cfg.validate();
    if (samples_per_model < 2) throw DomainError("pairwise tests need at least 2 samples per model");

    struct Sample {
        double mean;
        double sd;
    };
    std::vector<Sample> samples;
    samples.reserve(models.size());
    for (const auto& m : models) {
        const auto draws = synthetic_separations(m.similar, m.different, cfg.pairs_per_category,
                                                 model_seed(cfg.seed, m.model_id), samples_per_model, policy);
        const auto s = embedspace::summarize(embedspace::Category::similar, draws);
        samples.push_back({s.mean, s.sd});
    }

    std::vector<PairwiseComparison> out;
    std::vector<double> raw;
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            PairwiseComparison c;
            c.model_a = models[i].model_id;
            c.model_b = models[j].model_id;
            c.mean_a = samples[i].mean;
            c.mean_b = samples[j].mean;
            const auto w = welch_t(samples[i].mean, samples[i].sd, samples_per_model, samples[j].mean, samples[j].sd,
                                   samples_per_model);
            c.t = w.t;
            c.df = w.df;
            c.p = w.p;
            const auto d = cohens_d(samples[i].mean, samples[i].sd, samples_per_model, samples[j].mean,
                                    samples[j].sd, samples_per_model);
            c.d = d.d;
            c.sigma_pooled = d.sigma_pooled;
            c.band = d.band;
            raw.push_back(c.p);
            out.push_back(std::move(c));
        }
    }
    const auto adjusted = holm_adjust(raw);
    for (std::size_t k = 0; k < out.size(); ++k) out[k].p_holm = adjusted[k];
    return out;
}

}  // namespace embedgauge::statkit
