#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "embedgauge/report.hpp"

namespace embedgauge::pipeline {

namespace fs = std::filesystem;

enum class Command { score, stats, pareto, ablation, bench, report, all };

struct ModelEmbeddings {
    std::string model_id;
    fs::path path;
};

struct RunConfig {
    Command command = Command::all;
    report::ReportSettings settings;
    fs::path out_dir = "embedgauge-out";
    report::FormatSet formats;
    fs::path fixtures_dir;

    // score
    std::optional<fs::path> pairs_path;
    std::vector<ModelEmbeddings> embeddings;

    // stats
    std::optional<fs::path> summaries_path;

    // bench
    std::vector<std::string> provider_commands;
    std::vector<fs::path> bench_replays;
    bench::BenchPlan bench_plan;

    // report
    std::optional<fs::path> from_json;
};

// Parses argv into a RunConfig. Throws ConfigError describing the problem.
RunConfig parse_args(int argc, const char* const* argv);

// "id=path" or a bare path, whose stem becomes the id.
ModelEmbeddings parse_embeddings_arg(const std::string& text);

// Builds the analysis for `cfg`. Every referenced input is loaded and parsed
// before any statistic is computed.
report::AnalysisBundle run_analysis(const RunConfig& cfg);

// Runs the configured command and writes the report. Returns the exit code.
int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command-line entry point: parse, run, report errors as JSON on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// 0 ok, 1 analysis error, 2 bad input / configuration / I/O, 3 provider failure.
int exit_code_for(const std::exception& e) noexcept;
nlohmann::json error_summary(const std::exception& e);

}  // namespace embedgauge::pipeline
