#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embedgauge/parallel.hpp"

namespace embedgauge::embedspace {

enum class Category { similar, different, negation };

std::string_view to_string(Category c) noexcept;
// Case-insensitive; returns nullopt for anything outside the closed set.
std::optional<Category> parse_category(std::string_view text);

struct EmbeddingRecord {
    std::string id;
    std::vector<float> vector;
};

// A set of equally-sized embeddings from one model, addressable by id.
class EmbeddingCollection {
  public:
    explicit EmbeddingCollection(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    // Throws DimensionError on a size mismatch, DataError on non-finite
    // components, DuplicateIdError if the id already exists.
    void add(EmbeddingRecord record);

    const EmbeddingRecord* find(std::string_view id) const;
    const std::vector<EmbeddingRecord>& records() const noexcept { return records_; }

  private:
    std::size_t dim_;
    std::vector<EmbeddingRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct SentencePair {
    std::string id;
    std::string text_a;
    std::string text_b;
    Category category = Category::similar;
};

// Embedding ids for each side of a pair: "<pair id>/a" and "<pair id>/b".
std::string side_a_id(std::string_view pair_id);
std::string side_b_id(std::string_view pair_id);

struct CategoryStats {
    Category category = Category::similar;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

using StatsByCategory = std::map<Category, CategoryStats>;

struct SeparationResult {
    std::string model_id;
    double separation = 0.0;
    StatsByCategory stats_by_category;
};

/// Cosine similarity computed in double precision.
/// Throws DimensionError if the sizes differ or are zero, and
/// DegenerateVectorError when either vector has zero norm.
double cosine(std::span<const double> u, std::span<const double> v);
double cosine(std::span<const float> u, std::span<const float> v);

// Cosine of each pair, in input order. The parallel and serial policies
// write identical values.
std::vector<double> pair_cosines(std::span<const SentencePair> pairs, const EmbeddingCollection& embeddings,
                                 ExecPolicy policy = ExecPolicy::parallel);

// Sample statistics (n-1 denominator) over a list of values.
CategoryStats summarize(Category category, std::span<const double> values);

/// Per-category cosine summaries. Categories with no pairs are omitted.
/// Throws MissingEmbeddingError naming the absent embedding id.
StatsByCategory category_stats(std::span<const SentencePair> pairs, const EmbeddingCollection& embeddings,
                               ExecPolicy policy = ExecPolicy::parallel);

/// similar.mean - different.mean; negation stats are carried through.
/// Throws MissingCategoryError when similar or different is absent.
SeparationResult separation(const StatsByCategory& stats, std::string model_id = {});

}  // namespace embedgauge::embedspace
