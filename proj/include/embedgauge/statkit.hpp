#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedgauge/embedspace.hpp"
#include "embedgauge/parallel.hpp"
#include "embedgauge/special.hpp"

namespace embedgauge::statkit {

using embedspace::CategoryStats;

// p-values are reported no smaller than this.
inline constexpr double p_floor = 1e-300;

struct BootstrapConfig {
    std::size_t resamples = 5000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
    std::size_t pairs_per_category = 50;

    void validate() const;  // DomainError on resamples == 0 or confidence outside (0,1)
};

struct BootstrapResult {
    double point = 0.0;     // mean of the resampled separations
    double analytic = 0.0;  // similar.mean - different.mean
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;
};

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

enum class EffectBand { negligible, small, medium, large };
std::string_view to_string(EffectBand b) noexcept;
EffectBand effect_band(double d) noexcept;

struct CohensD {
    double d = 0.0;
    double sigma_pooled = 0.0;
    EffectBand band = EffectBand::negligible;
};

struct CorrelationResult {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

// Percentile of sorted data by linear interpolation between order statistics
// (h = (n-1)q). Throws DomainError on empty input or q outside [0,1].
double quantile_sorted(std::span<const double> sorted, double q);

WelchResult welch_t(double mean_a, double sd_a, std::size_t n_a, double mean_b, double sd_b, std::size_t n_b);

CohensD cohens_d(double mean_a, double sd_a, std::size_t n_a, double mean_b, double sd_b, std::size_t n_b);

/// Holm step-down adjustment, returned in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Synthetic separation draws: for draw i, `pairs_per_category` normal
/// similarities per category are generated from (mean, sd) and the mean
/// difference is recorded. Draw i depends only on (seed, i).
std::vector<double> synthetic_separations(const CategoryStats& similar, const CategoryStats& different,
                                          std::size_t pairs_per_category, std::uint64_t seed, std::size_t count,
                                          ExecPolicy policy = ExecPolicy::parallel);

/// Percentile bootstrap interval for the separation score.
BootstrapResult bootstrap_separation_ci(const CategoryStats& similar, const CategoryStats& different,
                                        const BootstrapConfig& cfg, ExecPolicy policy = ExecPolicy::parallel);

// Per-model (mean, sd, n) of similar and different pair cosines.
struct ModelSummary {
    std::string model_id;
    CategoryStats similar;
    CategoryStats different;
};

// Seed for one model's synthetic stream, derived from the run seed and the id.
std::uint64_t model_seed(std::uint64_t run_seed, std::string_view model_id) noexcept;

struct PairwiseComparison {
    std::string model_a;
    std::string model_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    double p_holm = 1.0;
    double d = 0.0;
    double sigma_pooled = 0.0;
    EffectBand band = EffectBand::negligible;
};

// All m(m-1)/2 comparisons over synthetic per-model separation samples
// (`samples_per_model` draws each), Welch-tested and Holm-adjusted jointly.
// Ordering follows the input: (0,1), (0,2), ..., (m-2,m-1).
std::vector<PairwiseComparison> pairwise_comparisons(std::span<const ModelSummary> models,
                                                     const BootstrapConfig& cfg, std::size_t samples_per_model = 50,
                                                     ExecPolicy policy = ExecPolicy::parallel);

}  // namespace embedgauge::statkit
