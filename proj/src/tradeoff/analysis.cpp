#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "embedgauge/errors.hpp"
#include "embedgauge/tradeoff.hpp"

namespace embedgauge::tradeoff {

GainRecord gain(double zero_shot, double adapted, std::string name) {
    GainRecord g;
    g.name = std::move(name);
    g.zero_shot = zero_shot;
    g.adapted = adapted;
    g.absolute_gain = adapted - zero_shot;
    g.improved = g.absolute_gain > 0.0;
    // |zero_shot| keeps the sign of the relative change equal to the sign of the gain.
    if (zero_shot != 0.0) g.relative_pct = 100.0 * g.absolute_gain / std::fabs(zero_shot);
    return g;
}

double median(std::vector<double> values) {
    if (values.empty()) throw MedianUndefinedError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CohortMedians cohort_medians(std::span<const GainRecord> gains) {
    if (gains.empty()) throw MedianUndefinedError("no gain records");
    std::vector<double> rel, zs, ad;
    for (const auto& g : gains) {
        if (!g.improved) continue;
        zs.push_back(g.zero_shot);
        ad.push_back(g.adapted);
        if (g.relative_pct) rel.push_back(*g.relative_pct);
    }
    if (zs.empty()) throw MedianUndefinedError("no model improved; cohort medians are undefined");

    CohortMedians m;
    m.improved_count = zs.size();
    m.total_count = gains.size();
    m.median_zero_shot = median(zs);
    m.median_adapted = median(ad);
    m.median_relative_pct = rel.empty() ? std::nan("") : median(rel);
    return m;
}

bool dominates(const ModelProfile& a, const ModelProfile& b) noexcept {
    const bool weakly = a.separation >= b.separation && a.throughput_eps >= b.throughput_eps;
    const bool strictly = a.separation > b.separation || a.throughput_eps > b.throughput_eps;
    return weakly && strictly;
}

namespace {

std::optional<double> margin_pct(double better, double base) {
    if (base == 0.0) return std::nullopt;
    return 100.0 * (better - base) / std::fabs(base);
}

}  // namespace

ParetoResult pareto_frontier(std::span<const ModelProfile> profiles) {
    ParetoResult out;
    for (const auto& m : profiles) {
        DominatedModel dm{m.name, {}};
        for (const auto& other : profiles) {
            if (&other == &m || !dominates(other, m)) continue;
            dm.dominators.push_back({other.name, margin_pct(other.separation, m.separation),
                                     margin_pct(other.throughput_eps, m.throughput_eps)});
        }
        if (dm.dominators.empty()) {
            out.frontier.push_back(m);
        } else {
            out.dominated.push_back(std::move(dm));
        }
    }
    std::stable_sort(out.frontier.begin(), out.frontier.end(), [](const ModelProfile& a, const ModelProfile& b) {
        return std::tie(a.throughput_eps, b.separation) < std::tie(b.throughput_eps, a.separation);
    });
    return out;
}

std::string_view to_string(LossKind l) noexcept { return l == LossKind::infonce ? "infonce" : "triplet"; }

std::optional<LossKind> parse_loss(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "infonce" || s == "mnr") return LossKind::infonce;
    if (s == "triplet") return LossKind::triplet;
    return std::nullopt;
}

std::optional<DataFraction> parse_fraction(int percent) {
    switch (percent) {
    case 25:
        return DataFraction::p25;
    case 50:
        return DataFraction::p50;
    case 100:
        return DataFraction::p100;
    default:
        return std::nullopt;
    }
}

std::optional<AblationRank> parse_rank(int rank) {
    switch (rank) {
    case 8:
        return AblationRank::r8;
    case 16:
        return AblationRank::r16;
    case 32:
        return AblationRank::r32;
    default:
        return std::nullopt;
    }
}

namespace {

std::size_t rank_slot(AblationRank r) {
    switch (r) {
    case AblationRank::r8:
        return 0;
    case AblationRank::r16:
        return 1;
    case AblationRank::r32:
        return 2;
    }
    return 0;
}

std::string cell_label(DataFraction f, LossKind l, AblationRank r) {
    return std::to_string(static_cast<int>(f)) + "%/" + std::string(to_string(l)) + "/r=" +
           std::to_string(static_cast<int>(r));
}

}  // namespace

AblationSummary ablation_summary(std::span<const AblationCell> cells) {
    using Key = std::tuple<DataFraction, LossKind, AblationRank>;
    std::map<Key, const AblationCell*> grid;
    std::vector<std::string> repeated;
    for (const auto& c : cells) {
        const Key k{c.data_fraction, c.loss, c.rank};
        if (!grid.emplace(k, &c).second) repeated.push_back(cell_label(c.data_fraction, c.loss, c.rank));
    }
    std::vector<std::string> missing;
    for (auto f : all_fractions) {
        for (auto l : all_losses) {
            for (auto r : all_ranks) {
                if (!grid.contains({f, l, r})) missing.push_back(cell_label(f, l, r));
            }
        }
    }
    if (!missing.empty() || !repeated.empty()) {
        std::string msg = "ablation grid is not the complete 18-cell grid;";
        std::string locus;
        if (!missing.empty()) {
            msg += " missing:";
            for (const auto& m : missing) msg += " " + m;
        }
        if (!repeated.empty()) {
            msg += " repeated:";
            for (const auto& m : repeated) msg += " " + m;
        }
        locus = !missing.empty() ? missing.front() : repeated.front();
        throw IncompleteGridError(msg, locus);
    }

    AblationSummary s;
    std::map<LossKind, std::vector<double>> per_loss;
    for (auto f : all_fractions) {
        const AblationCell* best = nullptr;
        for (auto l : all_losses) {
            AblationGroup g{f, l};
            double lo = 0.0, hi = 0.0;
            for (auto r : all_ranks) {
                const AblationCell* c = grid.at({f, l, r});
                g.by_rank[rank_slot(r)] = c->separation;
                per_loss[l].push_back(c->separation);
                if (c->separation < 0.0) ++s.negative_count_by_loss[l];
                if (best == nullptr || c->separation > best->separation) best = c;
            }
            lo = *std::min_element(g.by_rank.begin(), g.by_rank.end());
            hi = *std::max_element(g.by_rank.begin(), g.by_rank.end());
            g.mean = (g.by_rank[0] + g.by_rank[1] + g.by_rank[2]) / 3.0;
            g.rank_spread = hi - lo;
            s.max_rank_spread = std::max(s.max_rank_spread, g.rank_spread);
            s.groups.push_back(g);
        }
        s.best_per_fraction.push_back(*best);
    }
    for (const auto& [l, values] : per_loss) {
        double sum = 0.0;
        for (double v : values) sum += v;
        s.mean_by_loss[l] = sum / static_cast<double>(values.size());
        s.negative_count_by_loss.try_emplace(l, 0);
    }
    return s;
}

LoraParamCount lora_param_count(const LoraSpec& spec) {
    if (spec.rank == 0) throw RankError("adapter rank must be positive");
    if (!(spec.alpha > 0.0)) throw RankError("adapter alpha must be positive");
    LoraParamCount out;
    out.scaling = spec.scaling();
    for (const auto& m : spec.adapted_matrices) {
        if (spec.rank > std::min(m.rows, m.cols)) {
            throw RankError("rank " + std::to_string(spec.rank) + " exceeds min(d, k) for a " + std::to_string(m.rows) +
                            "x" + std::to_string(m.cols) + " matrix");
        }
        const std::uint64_t n = m.count * spec.rank * (m.rows + m.cols);
        out.per_matrix.push_back(n);
        out.trainable += n;
    }
    return out;
}

}  // namespace embedgauge::tradeoff
