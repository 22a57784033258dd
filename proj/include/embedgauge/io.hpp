#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedgauge/embedspace.hpp"
#include "embedgauge/statkit.hpp"
#include "embedgauge/tradeoff.hpp"

namespace embedgauge::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// CSV (RFC 4180). Lines starting with '#' outside a quoted field are comments.

using CsvRow = std::vector<std::string>;

struct CsvTable {
    CsvRow header;
    std::vector<CsvRow> rows;
    std::vector<std::size_t> line_numbers;  // source line of each row
};

// Throws ParseError(locus "<source>:<line>") on unbalanced quotes or rows
// whose width differs from the header.
CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const fs::path& path);

std::string csv_escape(std::string_view field);
std::string csv_line(std::span<const std::string> fields);

std::string read_file(const fs::path& path);                        // IoError
void write_file(const fs::path& path, std::string_view contents);   // IoError

// ---------------------------------------------------------------------------
// Sentence pairs: UTF-8 JSON lines {"id","text_a","text_b","category"}.

std::vector<embedspace::SentencePair> parse_pairs(std::string_view text, const std::string& source);
std::vector<embedspace::SentencePair> load_pairs(const fs::path& path);

// ---------------------------------------------------------------------------
// Embedding files: "EMB1", u32 count, u32 dim, then per record u32 id length,
// id bytes, dim float32. All integers and floats little-endian.

inline constexpr std::string_view embedding_magic = "EMB1";

embedspace::EmbeddingCollection parse_embeddings(std::span<const std::uint8_t> bytes, const std::string& source);
embedspace::EmbeddingCollection load_embeddings(const fs::path& path);
std::vector<std::uint8_t> serialize_embeddings(const embedspace::EmbeddingCollection& collection);
void save_embeddings(const fs::path& path, const embedspace::EmbeddingCollection& collection);

// ---------------------------------------------------------------------------
// Summary records: CSV with header model_id,category,mean,sd,n.

struct SummaryRecord {
    std::string model_id;
    embedspace::Category category = embedspace::Category::similar;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

std::vector<SummaryRecord> parse_summaries(std::string_view text, const std::string& source);
std::vector<SummaryRecord> load_summaries(const fs::path& path);
std::string format_summaries(std::span<const SummaryRecord> records);

// Groups records by model (first-appearance order). Throws
// MissingCategoryError when a model lacks similar or different.
std::vector<statkit::ModelSummary> to_model_summaries(std::span<const SummaryRecord> records);

// ---------------------------------------------------------------------------
// Shipped table fixtures

struct SeparationRow {  // Table 1 layout
    std::string model;
    std::string params_text;
    double params_millions = 0.0;
    double sim_similar = 0.0;
    double sim_different = 0.0;
    double separation = 0.0;  // as published
};

struct ThroughputRow {  // Table 2 layout
    std::string model;
    double throughput_eps = 0.0;
    double memory_gb = 0.0;
    std::uint32_t emb_dim = 0;
};

struct GainRow {  // Table 3 layout
    std::string model;
    double zero_shot = 0.0;
    double adapted = 0.0;
    double absolute_gain = 0.0;  // as published
    double relative_pct = 0.0;   // as published
};

struct FixtureBundle {
    std::vector<SeparationRow> separation;
    std::vector<ThroughputRow> throughput;
    std::vector<GainRow> gains;
    std::vector<std::pair<std::string, tradeoff::LicenseInfo>> licenses;
    std::vector<std::pair<std::string, tradeoff::ArchClass>> architectures;
    std::vector<tradeoff::AblationCell> ablation;

    // Join of all tables by model name, in separation-table order. Throws
    // DataError when a model is missing from one of the tables.
    std::vector<tradeoff::ModelProfile> profiles() const;
};

std::vector<SeparationRow> load_separation_table(const fs::path& path);
std::vector<ThroughputRow> load_throughput_table(const fs::path& path);
std::vector<GainRow> load_gain_table(const fs::path& path);
std::vector<std::pair<std::string, tradeoff::LicenseInfo>> load_license_table(const fs::path& path);
std::vector<std::pair<std::string, tradeoff::ArchClass>> load_architecture_table(const fs::path& path);
std::vector<tradeoff::AblationCell> load_ablation_grid(const fs::path& path);

// Loads every table from a fixtures directory (file names as shipped).
FixtureBundle load_fixture_bundle(const fs::path& dir);

// Compiled-in location of the repository fixtures.
fs::path default_fixtures_dir();

}  // namespace embedgauge::io
