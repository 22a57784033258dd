#include <algorithm>
#include <cmath>
#include <sstream>

#include "embedgauge/errors.hpp"
#include "embedgauge/report.hpp"

namespace embedgauge::report {

using nlohmann::json;
namespace tr = tradeoff;

// ---------------------------------------------------------------------------
// Number formatting

namespace {

// Decimal digits of the JSON rendering of v: digits with an implied decimal
// point after `point` digits (point may be <= 0 or > digits.size()).
struct Decimal {
    bool negative = false;
    std::string digits;
    int point = 0;
};

Decimal to_decimal(double v) {
    std::string s = json(v).dump();
    Decimal d;
    std::size_t i = 0;
    if (s[i] == '-') {
        d.negative = true;
        ++i;
    }
    int exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        exponent = std::stoi(s.substr(e + 1));
        s.resize(e);
    }
    bool seen_point = false;
    int int_digits = 0;
    for (; i < s.size(); ++i) {
        if (s[i] == '.') {
            seen_point = true;
            continue;
        }
        d.digits.push_back(s[i]);
        if (!seen_point) ++int_digits;
    }
    d.point = int_digits + exponent;
    // Strip leading zeros, keeping point consistent.
    std::size_t lead = 0;
    while (lead + 1 < d.digits.size() && d.digits[lead] == '0') ++lead;
    d.digits.erase(0, lead);
    d.point -= static_cast<int>(lead);
    return d;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    Decimal d = to_decimal(value);

    // Digits of integer and kept fraction, as one string, padded to `point + decimals`.
    const int keep = d.point + decimals;
    std::string kept;
    bool round_up = false;
    if (keep < 0) {
        kept = "";
    } else {
        kept = d.digits.substr(0, std::min<std::size_t>(d.digits.size(), static_cast<std::size_t>(keep)));
        while (static_cast<int>(kept.size()) < keep) kept.push_back('0');
    }
    // Remainder after the kept digits decides rounding.
    const std::string rest = keep < 0 ? std::string(static_cast<std::size_t>(-keep), '0') + d.digits
                                      : (static_cast<std::size_t>(keep) < d.digits.size() ? d.digits.substr(keep) : "");
    if (!rest.empty()) {
        const char first = rest.front();
        const bool tail_nonzero = rest.find_first_not_of('0', 1) != std::string::npos;
        if (first > '5' || (first == '5' && tail_nonzero)) {
            round_up = true;
        } else if (first == '5') {
            const int last = kept.empty() ? 0 : kept.back() - '0';
            round_up = (last % 2) == 1;
        }
    }
    if (round_up) {
        int k = static_cast<int>(kept.size()) - 1;
        while (k >= 0 && kept[k] == '9') kept[k--] = '0';
        if (k >= 0) {
            ++kept[k];
        } else {
            kept.insert(kept.begin(), '1');
        }
    }
    // Ensure at least one integer digit.
    while (static_cast<int>(kept.size()) < decimals + 1) kept.insert(kept.begin(), '0');
    const std::size_t int_len = kept.size() - static_cast<std::size_t>(decimals);
    std::string int_part = kept.substr(0, int_len);
    const std::size_t nz = int_part.find_first_not_of('0');
    int_part = nz == std::string::npos ? "0" : int_part.substr(nz);
    std::string out = int_part;
    if (decimals > 0) out += "." + kept.substr(int_len);
    const bool all_zero = out.find_first_not_of("0.") == std::string::npos;
    if (d.negative && !all_zero) out.insert(out.begin(), '-');
    return out;
}

std::string format_signed(double value, int decimals) {
    std::string s = format_fixed(value, decimals);
    if (!s.empty() && s.front() != '-' && s != "nan") s.insert(s.begin(), '+');
    return s;
}

FormatSet FormatSet::parse(std::string_view text) {
    FormatSet f{false, false, false};
    std::string item;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
        if (item == "all") {
            f = FormatSet{};
        } else if (item == "markdown" || item == "md") {
            f.markdown = true;
        } else if (item == "csv") {
            f.csv = true;
        } else if (item == "json") {
            f.json = true;
        } else {
            throw ConfigError("unknown format '" + item + "' (expected markdown, csv, json or all)", item);
        }
    }
    if (!f.markdown && !f.csv && !f.json) throw ConfigError("no output format selected");
    return f;
}

// ---------------------------------------------------------------------------
// Rows

std::vector<ModelRow> model_rows(std::span<const tr::ModelProfile> profiles,
                                 std::span<const io::SeparationRow> separation_table, const ReportSettings& settings) {
    std::vector<ModelRow> rows;
    for (const auto& p : profiles) {
        ModelRow r;
        r.profile = p;
        for (const auto& s : separation_table) {
            if (s.model == p.name) {
                r.sim_similar = s.sim_similar;
                r.sim_different = s.sim_different;
                r.separation_recomputed = s.sim_similar - s.sim_different;
            }
        }
        r.tier = tr::classify_tier(p.separation, settings.tier_bounds);
        r.memory_efficiency = tr::memory_efficiency(p);
        r.meets_utility_threshold = p.separation >= settings.utility_threshold;
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

std::string trim_number(double v) {
    std::string s = json(v).dump();
    if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
    return s;
}

std::string params_text(double millions) {
    if (millions >= 1000.0) return trim_number(millions / 1000.0) + "B";
    return trim_number(millions) + "M";
}

std::string full(double v) { return std::isfinite(v) ? json(v).dump() : ""; }
std::string full(const std::optional<double>& v) { return v ? full(*v) : ""; }

std::string md_row(std::initializer_list<std::string> cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
}

std::string md_rule(std::size_t n) {
    std::string out = "|";
    for (std::size_t i = 0; i < n; ++i) out += "---|";
    return out + "\n";
}

}  // namespace

// ---------------------------------------------------------------------------
// Markdown

std::string render_markdown(const AnalysisBundle& b) {
    std::ostringstream md;
    md << "# Embedding evaluation report\n\n";
    md << "Seed " << b.settings.seed << "; tier bounds moderate >= " << format_fixed(b.settings.tier_bounds.moderate, 2)
       << ", high >= " << format_fixed(b.settings.tier_bounds.high, 2) << "; clinical utility threshold "
       << format_fixed(b.settings.utility_threshold, 2) << ".\n\n";

    md << "## Separation scores\n\n";
    md << md_row({"Model", "Params", "Sim(similar)", "Sim(different)", "Separation"}) << md_rule(5);
    for (const auto& r : b.models) {
        const double sep = r.separation_recomputed.value_or(r.profile.separation);
        md << md_row({r.profile.name, params_text(r.profile.params_millions),
                      r.sim_similar ? format_fixed(*r.sim_similar, separation_decimals) : "-",
                      r.sim_different ? format_fixed(*r.sim_different, separation_decimals) : "-",
                      format_fixed(sep, separation_decimals)});
    }
    md << "\n*Separation = Sim(similar) - Sim(different).*\n\n";

    md << "## Inference throughput and memory\n\n";
    md << md_row({"Model", "Throughput (emb/sec)", "Memory (GB)", "Emb. Dim."}) << md_rule(4);
    std::vector<const ModelRow*> by_tp;
    for (const auto& r : b.models) by_tp.push_back(&r);
    std::stable_sort(by_tp.begin(), by_tp.end(), [](const ModelRow* a, const ModelRow* c) {
        return a->profile.throughput_eps > c->profile.throughput_eps;
    });
    for (const ModelRow* r : by_tp) {
        md << md_row({r->profile.name, format_fixed(r->profile.throughput_eps, throughput_decimals),
                      format_fixed(r->profile.memory_gb, memory_decimals), std::to_string(r->profile.emb_dim)});
    }
    md << "\n";

    if (!b.gains.empty()) {
        md << "## Zero-shot vs adapted separation\n\n";
        md << md_row({"Model", "Zero-Shot Separation", "Adapted Separation", "Absolute Gain (Δ)", "Relative Improvement"})
           << md_rule(5);
        for (const auto& g : b.gains) {
            md << md_row({g.name, format_fixed(g.zero_shot, separation_decimals),
                          format_fixed(g.adapted, separation_decimals),
                          format_signed(g.absolute_gain, separation_decimals),
                          g.relative_pct ? format_signed(*g.relative_pct, percent_decimals) + "%" : "undefined"});
        }
        if (b.medians) {
            md << "\nImproved: " << b.medians->improved_count << " of " << b.medians->total_count
               << ". Medians over improved models: relative " << format_signed(b.medians->median_relative_pct, percent_decimals)
               << "%, zero-shot " << format_fixed(b.medians->median_zero_shot, separation_decimals) << ", adapted "
               << format_fixed(b.medians->median_adapted, separation_decimals) << ".\n";
        }
        md << "\n";
    }

    if (b.ablation) {
        md << "## Ablation grid\n\n";
        md << md_row({"Data", "Loss", "r=8", "r=16", "r=32"}) << md_rule(5);
        for (const auto& g : b.ablation->groups) {
            md << md_row({std::to_string(static_cast<int>(g.data_fraction)) + "%", std::string(tr::to_string(g.loss)),
                          format_fixed(g.by_rank[0], separation_decimals), format_fixed(g.by_rank[1], separation_decimals),
                          format_fixed(g.by_rank[2], separation_decimals)});
        }
        md << "\n" << md_row({"Data", "Loss", "Mean", "Rank spread"}) << md_rule(4);
        for (const auto& g : b.ablation->groups) {
            md << md_row({std::to_string(static_cast<int>(g.data_fraction)) + "%", std::string(tr::to_string(g.loss)),
                          format_fixed(g.mean, separation_decimals), format_fixed(g.rank_spread, separation_decimals)});
        }
        md << "\nBest per data fraction:";
        const char* sep = " ";
        for (const auto& c : b.ablation->best_per_fraction) {
            md << sep << static_cast<int>(c.data_fraction) << "%/" << tr::to_string(c.loss) << "/r="
               << static_cast<int>(c.rank) << " (" << format_fixed(c.separation, separation_decimals) << ")";
            sep = "; ";
        }
        md << ".\n\n";
    }

    md << "## Tiers and efficiency\n\n";
    md << md_row({"Model", "Arch", "Separation", "Tier", "Meets utility threshold", "Memory efficiency (emb/sec/GB)"})
       << md_rule(6);
    for (const auto& r : b.models) {
        md << md_row({r.profile.name, std::string(tr::to_string(r.profile.arch_class)),
                      format_fixed(r.profile.separation, separation_decimals), std::string(tr::to_string(r.tier)),
                      r.meets_utility_threshold ? "yes" : "no", format_fixed(r.memory_efficiency, throughput_decimals)});
    }
    for (const auto& e : b.arch_extremes) {
        md << "\n" << tr::to_string(e.arch_class) << ": best " << e.best << ", worst " << e.worst << ".";
    }
    md << "\n\n";

    if (b.pareto) {
        md << "## Pareto frontier (separation vs throughput)\n\nFrontier, ascending throughput:";
        const char* sep = " ";
        for (const auto& m : b.pareto->frontier) {
            md << sep << m.name;
            sep = ", ";
        }
        md << ".\n\n" << md_row({"Dominated model", "Dominator", "Separation margin", "Throughput margin"}) << md_rule(4);
        for (const auto& d : b.pareto->dominated) {
            for (const auto& x : d.dominators) {
                md << md_row({d.name, x.name,
                              x.separation_margin_pct ? format_signed(*x.separation_margin_pct, 1) + "%" : "-",
                              x.throughput_margin_pct ? format_signed(*x.throughput_margin_pct, 1) + "%" : "-"});
            }
        }
        md << "\n";
    }

    if (b.correlations) {
        md << "## Correlations with separation\n\n" << md_row({"Variable", "r", "p", "n"}) << md_rule(4);
        md << md_row({"embedding dimension", format_fixed(b.correlations->vs_emb_dim.r, 3),
                      format_fixed(b.correlations->vs_emb_dim.p, 3), std::to_string(b.correlations->vs_emb_dim.n)});
        md << md_row({"parameters (millions)", format_fixed(b.correlations->vs_params.r, 3),
                      format_fixed(b.correlations->vs_params.p, 3), std::to_string(b.correlations->vs_params.n)});
        md << "\n";
    }

    const auto gate = [&](const char* title, const std::optional<tr::LicenseGateResult>& g) {
        if (!g) return;
        md << "## License gate: " << title << "\n\nAllowed: " << g->allowed.size() << ". Flagged: " << g->flagged.size()
           << ".\n";
        if (!g->flagged.empty()) md << "\n";
        for (const auto& f : g->flagged) md << "- " << f.name << ": " << f.reason << "\n";
        md << "\n";
    };
    gate("internal deployment", b.gate_internal);
    gate("embedding-service deployment", b.gate_service);

    if (!b.scores.empty()) {
        md << "## Scored embedding runs\n\n"
           << md_row({"Model", "Sim(similar)", "Sim(different)", "Sim(negation)", "Separation"}) << md_rule(5);
        for (const auto& s : b.scores) {
            const auto cell = [&](embedspace::Category c) {
                auto it = s.stats_by_category.find(c);
                if (it == s.stats_by_category.end()) return std::string("-");
                return format_fixed(it->second.mean, separation_decimals) + " ± " +
                       format_fixed(it->second.sd, separation_decimals) + " (n=" + std::to_string(it->second.n) + ")";
            };
            md << md_row({s.model_id, cell(embedspace::Category::similar), cell(embedspace::Category::different),
                          cell(embedspace::Category::negation), format_fixed(s.separation, separation_decimals)});
        }
        md << "\n";
    }

    if (!b.bootstrap.empty()) {
        md << "## Bootstrap confidence intervals (" << b.settings.bootstrap.resamples << " resamples, "
           << format_fixed(100.0 * b.settings.bootstrap.confidence, 1) << "%)\n\n"
           << md_row({"Model", "Separation", "Resample mean", "Lower", "Upper", "Width"}) << md_rule(6);
        for (const auto& e : b.bootstrap) {
            md << md_row({e.model_id, format_fixed(e.ci.analytic, separation_decimals),
                          format_fixed(e.ci.point, separation_decimals), format_fixed(e.ci.lo, separation_decimals),
                          format_fixed(e.ci.hi, separation_decimals), format_fixed(e.ci.width, separation_decimals)});
        }
        md << "\n";
    }

    if (!b.pairwise.empty()) {
        md << "## Pairwise comparisons (Welch, Holm-adjusted; " << b.pairwise.size() << " comparisons)\n\n"
           << md_row({"Model A", "Model B", "t", "df", "p", "p (Holm)", "Cohen's d", "Effect"}) << md_rule(8);
        for (const auto& c : b.pairwise) {
            md << md_row({c.model_a, c.model_b, format_fixed(c.t, 3), format_fixed(c.df, 1), json(c.p).dump(),
                          json(c.p_holm).dump(), format_fixed(c.d, 3), std::string(statkit::to_string(c.band))});
        }
        md << "\n";
    }

    if (!b.bench.empty()) {
        md << "## Inference benchmarks\n\n"
           << md_row({"Model", "Latency mean (ms)", "SD", "p50", "p95", "Echo overhead (ms)", "Best throughput (emb/sec)",
                      "Peak memory (GB)", "Emb. Dim."})
           << md_rule(9);
        for (const auto& r : b.bench) {
            md << md_row({r.model_id, format_fixed(r.latency.mean_ms, 2), format_fixed(r.latency.sd_ms, 2),
                          format_fixed(r.latency.p50_ms, 2), format_fixed(r.latency.p95_ms, 2),
                          format_fixed(r.echo_overhead.mean_ms, 3), format_fixed(r.best_throughput, throughput_decimals),
                          format_fixed(r.peak_memory_gb, memory_decimals), std::to_string(r.emb_dim)});
        }
        md << "\nTimings are end-to-end at the harness.\n";
    }
    return md.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string csv_of(std::initializer_list<std::string> header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::string> h(header);
    std::string out = io::csv_line(h);
    for (const auto& r : rows) out += io::csv_line(r);
    return out;
}

std::vector<std::pair<std::string, std::string>> csv_files(const AnalysisBundle& b) {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::vector<std::string>> rows;

    for (const auto& r : b.models) {
        rows.push_back({r.profile.name, full(r.profile.params_millions), full(r.sim_similar), full(r.sim_different),
                        full(r.separation_recomputed), full(r.profile.separation)});
    }
    files.emplace_back("separation.csv", csv_of({"model", "params_millions", "sim_similar", "sim_different",
                                                 "separation_recomputed", "separation"},
                                                rows));
    rows.clear();
    for (const auto& r : b.models) {
        rows.push_back({r.profile.name, full(r.profile.throughput_eps), full(r.profile.memory_gb),
                        std::to_string(r.profile.emb_dim), full(r.memory_efficiency), std::string(tr::to_string(r.tier)),
                        r.meets_utility_threshold ? "true" : "false", std::string(tr::to_string(r.profile.arch_class))});
    }
    files.emplace_back("models.csv", csv_of({"model", "throughput_eps", "memory_gb", "emb_dim", "memory_efficiency",
                                             "tier", "meets_utility_threshold", "arch_class"},
                                            rows));
    rows.clear();
    for (const auto& g : b.gains) {
        rows.push_back({g.name, full(g.zero_shot), full(g.adapted), full(g.absolute_gain), full(g.relative_pct),
                        g.improved ? "true" : "false"});
    }
    files.emplace_back("gains.csv",
                       csv_of({"model", "zero_shot", "adapted", "absolute_gain", "relative_pct", "improved"}, rows));
    rows.clear();
    for (const auto& c : b.ablation_cells) {
        rows.push_back({std::to_string(static_cast<int>(c.data_fraction)), std::string(tr::to_string(c.loss)),
                        std::to_string(static_cast<int>(c.rank)), full(c.separation)});
    }
    files.emplace_back("ablation.csv", csv_of({"data_fraction", "loss", "rank", "separation"}, rows));
    rows.clear();
    if (b.pareto) {
        for (const auto& m : b.pareto->frontier) rows.push_back({m.name, "frontier", "", "", ""});
        for (const auto& d : b.pareto->dominated) {
            for (const auto& x : d.dominators) {
                rows.push_back({d.name, "dominated", x.name, full(x.separation_margin_pct), full(x.throughput_margin_pct)});
            }
        }
    }
    files.emplace_back("pareto.csv",
                       csv_of({"model", "status", "dominator", "separation_margin_pct", "throughput_margin_pct"}, rows));
    rows.clear();
    if (b.correlations) {
        rows.push_back({"emb_dim", full(b.correlations->vs_emb_dim.r), full(b.correlations->vs_emb_dim.p),
                        std::to_string(b.correlations->vs_emb_dim.n)});
        rows.push_back({"params_millions", full(b.correlations->vs_params.r), full(b.correlations->vs_params.p),
                        std::to_string(b.correlations->vs_params.n)});
    }
    files.emplace_back("correlations.csv", csv_of({"variable", "r", "p", "n"}, rows));
    rows.clear();
    for (const auto* g : {&b.gate_internal, &b.gate_service}) {
        if (!*g) continue;
        const std::string dep = g == &b.gate_internal ? "internal" : "embedding_service";
        for (const auto& a : (*g)->allowed) rows.push_back({dep, a, "allowed", ""});
        for (const auto& f : (*g)->flagged) rows.push_back({dep, f.name, "flagged", f.reason});
    }
    files.emplace_back("license_gate.csv", csv_of({"deployment", "model", "status", "reason"}, rows));
    rows.clear();
    for (const auto& s : b.scores) {
        for (const auto& [c, cs] : s.stats_by_category) {
            rows.push_back({s.model_id, std::string(embedspace::to_string(c)), full(cs.mean), full(cs.sd),
                            std::to_string(cs.n), full(s.separation)});
        }
    }
    files.emplace_back("scores.csv", csv_of({"model_id", "category", "mean", "sd", "n", "separation"}, rows));
    rows.clear();
    for (const auto& e : b.bootstrap) {
        rows.push_back({e.model_id, full(e.ci.analytic), full(e.ci.point), full(e.ci.lo), full(e.ci.hi), full(e.ci.width)});
    }
    files.emplace_back("bootstrap.csv", csv_of({"model_id", "separation", "point", "lo", "hi", "width"}, rows));
    rows.clear();
    for (const auto& c : b.pairwise) {
        rows.push_back({c.model_a, c.model_b, full(c.mean_a), full(c.mean_b), full(c.t), full(c.df), full(c.p),
                        full(c.p_holm), full(c.d), full(c.sigma_pooled), std::string(statkit::to_string(c.band))});
    }
    files.emplace_back("pairwise.csv", csv_of({"model_a", "model_b", "mean_a", "mean_b", "t", "df", "p", "p_holm", "d",
                                               "sigma_pooled", "effect"},
                                              rows));
    rows.clear();
    for (const auto& r : b.bench) {
        for (const auto& [bs, tp] : r.throughput_by_batch) {
            rows.push_back({r.model_id, std::to_string(bs), full(tp), full(r.best_throughput), full(r.latency.mean_ms),
                            full(r.latency.sd_ms), full(r.latency.p50_ms), full(r.latency.p95_ms),
                            full(r.echo_overhead.mean_ms), full(r.peak_memory_gb), std::to_string(r.emb_dim)});
        }
    }
    files.emplace_back("bench.csv", csv_of({"model_id", "batch_size", "throughput_eps", "best_throughput", "latency_mean_ms",
                                            "latency_sd_ms", "latency_p50_ms", "latency_p95_ms", "echo_mean_ms",
                                            "peak_memory_gb", "emb_dim"},
                                           rows));
    return files;
}

// ---------------------------------------------------------------------------
// Plot data

std::vector<std::pair<std::string, json>> plot_files(const AnalysisBundle& b) {
    std::vector<std::pair<std::string, json>> plots;

    std::vector<const ModelRow*> ranked;
    for (const auto& r : b.models) ranked.push_back(&r);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ModelRow* a, const ModelRow* c) { return a->profile.separation > c->profile.separation; });
    json bars = json::array();
    for (const ModelRow* r : ranked) {
        bars.push_back({{"label", r->profile.name},
                        {"value", r->profile.separation},
                        {"arch_class", tr::to_string(r->profile.arch_class)},
                        {"tier", tr::to_string(r->tier)}});
    }
    plots.emplace_back("separation_ranking.json",
                       json{{"kind", "bar"},
                            {"x_label", "Model"},
                            {"y_label", "Separation score"},
                            {"reference_lines", {{{"label", "clinical utility threshold"}, {"y", b.settings.utility_threshold}}}},
                            {"bars", bars}});

    json scatter = json::array();
    for (const auto& r : b.models) {
        scatter.push_back({{"label", r.profile.name},
                           {"x", r.profile.throughput_eps},
                           {"y", r.profile.separation},
                           {"size", 1.0 / r.profile.memory_gb},
                           {"tier", tr::to_string(r.tier)}});
    }
    plots.emplace_back("tradeoff_scatter.json", json{{"kind", "scatter"},
                                                     {"x_label", "Throughput (emb/sec)"},
                                                     {"y_label", "Separation score"},
                                                     {"size_label", "1 / memory (1/GB)"},
                                                     {"points", scatter}});

    json pm = json::array();
    for (const auto& r : b.models) {
        pm.push_back({{"label", r.profile.name},
                      {"x", r.profile.params_millions},
                      {"y", r.profile.memory_gb},
                      {"tier", tr::to_string(r.tier)}});
    }
    plots.emplace_back("params_memory.json", json{{"kind", "scatter"},
                                                  {"x_label", "Parameters (millions)"},
                                                  {"y_label", "Peak memory (GB)"},
                                                  {"points", pm}});

    if (b.pareto) {
        json pts = json::array();
        for (const auto& r : b.models) {
            bool on_front = false;
            for (const auto& f : b.pareto->frontier) on_front = on_front || f.name == r.profile.name;
            pts.push_back({{"label", r.profile.name},
                           {"x", r.profile.throughput_eps},
                           {"y", r.profile.separation},
                           {"frontier", on_front}});
        }
        json line = json::array();
        for (const auto& f : b.pareto->frontier) line.push_back({{"label", f.name}, {"x", f.throughput_eps}, {"y", f.separation}});
        plots.emplace_back("pareto_frontier.json", json{{"kind", "scatter+polyline"},
                                                       {"x_label", "Throughput (emb/sec)"},
                                                       {"y_label", "Separation score"},
                                                       {"points", pts},
                                                       {"polyline", line}});
    }

    std::vector<const ModelRow*> eff;
    for (const auto& r : b.models) eff.push_back(&r);
    std::stable_sort(eff.begin(), eff.end(),
                     [](const ModelRow* a, const ModelRow* c) { return a->memory_efficiency > c->memory_efficiency; });
    json ebars = json::array();
    for (const ModelRow* r : eff) {
        ebars.push_back({{"label", r->profile.name}, {"value", r->memory_efficiency}, {"tier", tr::to_string(r->tier)}});
    }
    plots.emplace_back("memory_efficiency.json", json{{"kind", "bar"},
                                                      {"x_label", "Model"},
                                                      {"y_label", "Memory efficiency (emb/sec/GB)"},
                                                      {"bars", ebars}});
    return plots;
}

}  // namespace

std::vector<fs::path> emit_report(const AnalysisBundle& b, const fs::path& out_dir, const FormatSet& formats) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir.string() + "'", out_dir.string());

    std::vector<fs::path> written;
    const auto put = [&](const fs::path& p, std::string_view contents) {
        io::write_file(p, contents);
        written.push_back(p);
    };
    if (formats.markdown) put(out_dir / "report.md", render_markdown(b));
    if (formats.csv) {
        for (const auto& [name, body] : csv_files(b)) put(out_dir / "csv" / name, body);
    }
    if (formats.json) put(out_dir / "report.json", to_json(b).dump(2) + "\n");
    for (const auto& [name, body] : plot_files(b)) put(out_dir / "plots" / name, body.dump(2) + "\n");
    return written;
}

}  // namespace embedgauge::report
