#include "embedgauge/embedspace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>

#include "embedgauge/errors.hpp"

namespace embedgauge::embedspace {

std::string_view to_string(Category c) noexcept {
    switch (c) {
    case Category::similar:
        return "similar";
    case Category::different:
        return "different";
    case Category::negation:
        return "negation";
    }
    return "unknown";
}

std::optional<Category> parse_category(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "similar") return Category::similar;
    if (lower == "different") return Category::different;
    if (lower == "negation") return Category::negation;
    return std::nullopt;
}

void EmbeddingCollection::add(EmbeddingRecord record) {
    if (record.vector.size() != dim_) {
        throw DimensionError("embedding has dimension " + std::to_string(record.vector.size()) +
                                 ", collection declares " + std::to_string(dim_),
                             record.id);
    }
    for (float x : record.vector) {
        if (!std::isfinite(x)) throw DataError("non-finite component in embedding", record.id);
    }
    if (index_.contains(record.id)) throw DuplicateIdError("duplicate embedding id", record.id);
    index_.emplace(record.id, records_.size());
    records_.push_back(std::move(record));
}

const EmbeddingRecord* EmbeddingCollection::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::string side_a_id(std::string_view pair_id) { return std::string(pair_id) + "/a"; }
std::string side_b_id(std::string_view pair_id) { return std::string(pair_id) + "/b"; }

namespace {

template <typename T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
    if (u.size() != v.size()) {
        throw DimensionError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                             std::to_string(v.size()));
    }
    if (u.empty()) throw DimensionError("cosine of empty vectors");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u[i];
        const double b = v[i];
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if (uu == 0.0 || vv == 0.0) throw DegenerateVectorError("cosine of a zero-norm vector");
    // Clamp rounding excursions past +-1.
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

const EmbeddingRecord& require(const EmbeddingCollection& embeddings, const std::string& id) {
    const EmbeddingRecord* rec = embeddings.find(id);
    if (rec == nullptr) throw MissingEmbeddingError("no embedding for '" + id + "'", id);
    return *rec;
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }
double cosine(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }

std::vector<double> pair_cosines(std::span<const SentencePair> pairs, const EmbeddingCollection& embeddings,
                                 ExecPolicy policy) {
    // Resolve ids up front so lookup errors surface in input order.
    std::vector<std::pair<const EmbeddingRecord*, const EmbeddingRecord*>> sides;
    sides.reserve(pairs.size());
    for (const auto& p : pairs) {
        const EmbeddingRecord& a = require(embeddings, side_a_id(p.id));
        const EmbeddingRecord& b = require(embeddings, side_b_id(p.id));
        sides.emplace_back(&a, &b);
    }

    std::vector<double> out(pairs.size());
    const auto n = static_cast<std::ptrdiff_t>(pairs.size());
    if (policy == ExecPolicy::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[i] = cosine(std::span<const float>(sides[i].first->vector),
                            std::span<const float>(sides[i].second->vector));
        }
        return out;
    }

    // Exceptions may not escape an OpenMP region; keep the first one by index.
    std::vector<std::exception_ptr> errors(pairs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = cosine(std::span<const float>(sides[i].first->vector),
                            std::span<const float>(sides[i].second->vector));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

CategoryStats summarize(Category category, std::span<const double> values) {
    CategoryStats s;
    s.category = category;
    s.n = values.size();
    if (values.empty()) return s;
    s.mean = pairwise_sum(values) / static_cast<double>(values.size());
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - s.mean;
            sq[i] = d * d;
        }
        s.sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size() - 1));
    }
    return s;
}

StatsByCategory category_stats(std::span<const SentencePair> pairs, const EmbeddingCollection& embeddings,
                               ExecPolicy policy) {
    const std::vector<double> cos = pair_cosines(pairs, embeddings, policy);

    // Values within a category are sorted before reduction so the result does
    // not depend on pair order.
    std::map<Category, std::vector<double>> grouped;
    for (std::size_t i = 0; i < pairs.size(); ++i) grouped[pairs[i].category].push_back(cos[i]);

    StatsByCategory result;
    for (auto& [cat, values] : grouped) {
        std::sort(values.begin(), values.end());
        result.emplace(cat, summarize(cat, values));
    }
    return result;
}

SeparationResult separation(const StatsByCategory& stats, std::string model_id) {
    for (Category needed : {Category::similar, Category::different}) {
        if (!stats.contains(needed)) {
            throw MissingCategoryError("missing category '" + std::string(to_string(needed)) + "'",
                                       std::string(to_string(needed)));
        }
    }
    SeparationResult r;
    r.model_id = std::move(model_id);
    r.separation = stats.at(Category::similar).mean - stats.at(Category::different).mean;
    r.stats_by_category = stats;
    return r;
}

}  // namespace embedgauge::embedspace
