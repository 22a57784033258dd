#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace embedgauge::tradeoff {

// ---------------------------------------------------------------------------
// Model profiles

enum class ArchClass { encoder_only, decoder_style };
std::string_view to_string(ArchClass a) noexcept;
std::optional<ArchClass> parse_arch_class(std::string_view text);

struct LicenseInfo {
    std::string license_id;
    bool commercial_ok = true;
    bool attribution_required = false;
    bool service_restricted = false;
};

struct ModelProfile {
    std::string name;
    double params_millions = 0.0;
    std::uint32_t emb_dim = 0;
    ArchClass arch_class = ArchClass::encoder_only;
    double separation = 0.0;
    std::optional<double> zero_shot_separation;
    double throughput_eps = 0.0;  // embeddings / second
    double memory_gb = 0.0;
    LicenseInfo license;
};

// Throws ProfileError on a violated invariant (memory <= 0, negative
// throughput, zero dimension, non-positive parameter count).
void validate(const ModelProfile& p);

// "33M", "2.5B", "4B", "340" (bare numbers are millions) -> millions.
// Throws ParseError on anything else.
double parse_param_count(std::string_view text);

// ---------------------------------------------------------------------------
// Tiers

enum class Tier { low, moderate, high };  // ordered
std::string_view to_string(Tier t) noexcept;

struct TierBounds {
    double moderate = 0.25;  // inclusive lower bound of "moderate"
    double high = 0.45;      // inclusive lower bound of "high"
};

Tier classify_tier(double separation, const TierBounds& bounds = {}) noexcept;

// Best and worst model (by separation) within each architecture class.
struct ArchExtremes {
    ArchClass arch_class;
    std::string best;
    std::string worst;
};
std::vector<ArchExtremes> best_worst_by_arch(std::span<const ModelProfile> profiles);

// ---------------------------------------------------------------------------
// Adaptation gains

struct GainRecord {
    std::string name;
    double zero_shot = 0.0;
    double adapted = 0.0;
    double absolute_gain = 0.0;
    std::optional<double> relative_pct;  // empty when zero_shot == 0
    bool improved = false;
};

GainRecord gain(double zero_shot, double adapted, std::string name = {});

struct CohortMedians {
    double median_relative_pct = 0.0;
    double median_zero_shot = 0.0;
    double median_adapted = 0.0;
    std::size_t improved_count = 0;
    std::size_t total_count = 0;
};

// Midpoint rule for even counts. Throws MedianUndefinedError on empty input.
double median(std::vector<double> values);

/// Medians over the improved subset only.
/// Throws MedianUndefinedError when nothing improved.
CohortMedians cohort_medians(std::span<const GainRecord> gains);

// ---------------------------------------------------------------------------
// Pareto frontier over (separation, throughput), both maximized

struct Dominator {
    std::string name;
    std::optional<double> separation_margin_pct;  // relative to the dominated model
    std::optional<double> throughput_margin_pct;
};

struct DominatedModel {
    std::string name;
    std::vector<Dominator> dominators;
};

struct ParetoResult {
    std::vector<ModelProfile> frontier;  // ascending throughput
    std::vector<DominatedModel> dominated;
};

// True when `a` is at least as good on both axes and strictly better on one.
bool dominates(const ModelProfile& a, const ModelProfile& b) noexcept;

ParetoResult pareto_frontier(std::span<const ModelProfile> profiles);

// emb/sec per GB. Throws ProfileError when memory_gb <= 0.
double memory_efficiency(const ModelProfile& profile);

// ---------------------------------------------------------------------------
// Ablation grid: data fraction x loss x rank

enum class DataFraction { p25 = 25, p50 = 50, p100 = 100 };
enum class LossKind { infonce, triplet };
enum class AblationRank { r8 = 8, r16 = 16, r32 = 32 };

inline constexpr std::array<DataFraction, 3> all_fractions{DataFraction::p25, DataFraction::p50, DataFraction::p100};
inline constexpr std::array<LossKind, 2> all_losses{LossKind::infonce, LossKind::triplet};
inline constexpr std::array<AblationRank, 3> all_ranks{AblationRank::r8, AblationRank::r16, AblationRank::r32};

std::string_view to_string(LossKind l) noexcept;
std::optional<LossKind> parse_loss(std::string_view text);
std::optional<DataFraction> parse_fraction(int percent);
std::optional<AblationRank> parse_rank(int rank);

struct AblationCell {
    DataFraction data_fraction = DataFraction::p100;
    LossKind loss = LossKind::infonce;
    AblationRank rank = AblationRank::r16;
    double separation = 0.0;
};

struct AblationGroup {
    DataFraction data_fraction;
    LossKind loss;
    double mean = 0.0;
    double rank_spread = 0.0;          // max - min over the three ranks
    std::array<double, 3> by_rank{};   // r8, r16, r32
};

struct AblationSummary {
    std::vector<AblationGroup> groups;           // fraction-major, InfoNCE first
    std::vector<AblationCell> best_per_fraction; // one per fraction, ascending
    std::map<LossKind, double> mean_by_loss;
    std::map<LossKind, std::size_t> negative_count_by_loss;
    double max_rank_spread = 0.0;
};

/// Throws IncompleteGridError listing missing (or repeated) cells unless the
/// input is exactly the 18-cell grid.
AblationSummary ablation_summary(std::span<const AblationCell> cells);

// ---------------------------------------------------------------------------
// Low-rank adapter accounting: an adapted d x k matrix trains B (d x r) and A (r x k)

struct AdaptedMatrix {
    std::uint64_t rows = 0;  // d
    std::uint64_t cols = 0;  // k
    std::uint64_t count = 1;
};

struct LoraSpec {
    std::uint32_t rank = 16;
    double alpha = 32.0;
    std::vector<AdaptedMatrix> adapted_matrices;

    double scaling() const noexcept { return alpha / static_cast<double>(rank); }
};

struct LoraParamCount {
    std::uint64_t trainable = 0;
    std::vector<std::uint64_t> per_matrix;  // count * r * (d + k) per entry
    double scaling = 0.0;
};

// Throws RankError when r == 0 or r > min(d, k) for any matrix.
LoraParamCount lora_param_count(const LoraSpec& spec);

// ---------------------------------------------------------------------------
// License gate

enum class Deployment { internal, embedding_service };
std::optional<Deployment> parse_deployment(std::string_view text);
std::string_view to_string(Deployment d) noexcept;

struct FlaggedModel {
    std::string name;
    std::string reason;
};

struct LicenseGateResult {
    std::vector<std::string> allowed;
    std::vector<FlaggedModel> flagged;
};

LicenseGateResult license_gate(std::span<const ModelProfile> profiles, Deployment deployment);

}  // namespace embedgauge::tradeoff
