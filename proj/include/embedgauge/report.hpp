#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "embedgauge/benchharness.hpp"
#include "embedgauge/embedspace.hpp"
#include "embedgauge/io.hpp"
#include "embedgauge/statkit.hpp"
#include "embedgauge/tradeoff.hpp"

namespace embedgauge::report {

namespace fs = std::filesystem;

// Decimal rendering of `value` rounded half-to-even at `decimals` places,
// applied to the shortest round-trip representation (the digits a JSON
// emitter writes), so "0.0125" at 3 places is "0.012".
std::string format_fixed(double value, int decimals);
std::string format_signed(double value, int decimals);  // leading '+' for v >= 0

// Display precision.
inline constexpr int separation_decimals = 3;
inline constexpr int throughput_decimals = 1;
inline constexpr int memory_decimals = 2;
inline constexpr int percent_decimals = 0;

struct ReportSettings {
    std::uint64_t seed = 0;
    double utility_threshold = 0.3;
    tradeoff::TierBounds tier_bounds{};
    statkit::BootstrapConfig bootstrap{};
    std::size_t samples_per_model = 50;
};

struct ModelRow {
    tradeoff::ModelProfile profile;
    std::optional<double> sim_similar;
    std::optional<double> sim_different;
    std::optional<double> separation_recomputed;  // sim_similar - sim_different
    tradeoff::Tier tier = tradeoff::Tier::low;
    double memory_efficiency = 0.0;
    bool meets_utility_threshold = false;
};

struct CorrelationSet {
    statkit::CorrelationResult vs_emb_dim;
    statkit::CorrelationResult vs_params;
};

struct BootstrapEntry {
    std::string model_id;
    statkit::BootstrapResult ci;
};

struct AnalysisBundle {
    ReportSettings settings;
    std::vector<ModelRow> models;

    std::vector<tradeoff::GainRecord> gains;
    std::optional<tradeoff::CohortMedians> medians;

    std::optional<tradeoff::ParetoResult> pareto;
    std::optional<CorrelationSet> correlations;

    std::vector<tradeoff::AblationCell> ablation_cells;
    std::optional<tradeoff::AblationSummary> ablation;

    std::optional<tradeoff::LicenseGateResult> gate_internal;
    std::optional<tradeoff::LicenseGateResult> gate_service;
    std::vector<tradeoff::ArchExtremes> arch_extremes;

    std::vector<embedspace::SeparationResult> scores;
    std::vector<BootstrapEntry> bootstrap;
    std::vector<statkit::PairwiseComparison> pairwise;
    std::vector<bench::BenchReport> bench;
};

// Rows for each profile, with tiers, efficiency and threshold flags.
std::vector<ModelRow> model_rows(std::span<const tradeoff::ModelProfile> profiles,
                                 std::span<const io::SeparationRow> separation_table, const ReportSettings& settings);

nlohmann::json to_json(const AnalysisBundle& bundle);
AnalysisBundle bundle_from_json(const nlohmann::json& j);  // ParseError on bad shape

enum class Format { markdown, csv, json };

struct FormatSet {
    bool markdown = true;
    bool csv = true;
    bool json = true;
    static FormatSet parse(std::string_view text);  // "markdown", "csv", "json", "all", or comma list
};

std::string render_markdown(const AnalysisBundle& bundle);

/// Writes the requested formats plus plot-data files under `out_dir`.
/// Returns the paths written. Throws IoError when the directory is unwritable.
std::vector<fs::path> emit_report(const AnalysisBundle& bundle, const fs::path& out_dir, const FormatSet& formats);

}  // namespace embedgauge::report
