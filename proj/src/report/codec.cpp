// JSON encoding of the analysis bundle. Decoding must reproduce every field
// so that a re-emitted report is byte-identical.

#include <cmath>
#include <limits>

#include "embedgauge/errors.hpp"
#include "embedgauge/report.hpp"

namespace embedgauge::report {

using nlohmann::json;
namespace eb = embedspace;
namespace st = statkit;
namespace tr = tradeoff;

namespace {

// NaN and absent values are both encoded as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }
double get_num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }
std::optional<double> get_opt(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

template <typename E, typename F>
E parse_enum(const json& j, F parser, const char* what) {
    const auto v = parser(j.get<std::string>());
    if (!v) throw ParseError(std::string("unknown ") + what + " '" + j.get<std::string>() + "'");
    return *v;
}

std::optional<tr::Tier> parse_tier(std::string_view s) {
    if (s == "low") return tr::Tier::low;
    if (s == "moderate") return tr::Tier::moderate;
    if (s == "high") return tr::Tier::high;
    return std::nullopt;
}

std::optional<st::EffectBand> parse_band(std::string_view s) {
    for (auto b : {st::EffectBand::negligible, st::EffectBand::small, st::EffectBand::medium, st::EffectBand::large}) {
        if (st::to_string(b) == s) return b;
    }
    return std::nullopt;
}

// --- profiles ---------------------------------------------------------------

json encode(const tr::ModelProfile& p) {
    return {{"name", p.name},
            {"params_millions", num(p.params_millions)},
            {"emb_dim", p.emb_dim},
            {"arch_class", tr::to_string(p.arch_class)},
            {"separation", num(p.separation)},
            {"zero_shot_separation", opt(p.zero_shot_separation)},
            {"throughput_eps", num(p.throughput_eps)},
            {"memory_gb", num(p.memory_gb)},
            {"license",
             {{"license_id", p.license.license_id},
              {"commercial_ok", p.license.commercial_ok},
              {"attribution_required", p.license.attribution_required},
              {"service_restricted", p.license.service_restricted}}}};
}

tr::ModelProfile decode_profile(const json& j) {
    tr::ModelProfile p;
    p.name = j.at("name").get<std::string>();
    p.params_millions = get_num(j.at("params_millions"));
    p.emb_dim = j.at("emb_dim").get<std::uint32_t>();
    p.arch_class = parse_enum<tr::ArchClass>(j.at("arch_class"), tr::parse_arch_class, "arch_class");
    p.separation = get_num(j.at("separation"));
    p.zero_shot_separation = get_opt(j.at("zero_shot_separation"));
    p.throughput_eps = get_num(j.at("throughput_eps"));
    p.memory_gb = get_num(j.at("memory_gb"));
    const auto& l = j.at("license");
    p.license.license_id = l.at("license_id").get<std::string>();
    p.license.commercial_ok = l.at("commercial_ok").get<bool>();
    p.license.attribution_required = l.at("attribution_required").get<bool>();
    p.license.service_restricted = l.at("service_restricted").get<bool>();
    return p;
}

json encode(const ModelRow& r) {
    return {{"profile", encode(r.profile)},
            {"sim_similar", opt(r.sim_similar)},
            {"sim_different", opt(r.sim_different)},
            {"separation_recomputed", opt(r.separation_recomputed)},
            {"tier", tr::to_string(r.tier)},
            {"memory_efficiency", num(r.memory_efficiency)},
            {"meets_utility_threshold", r.meets_utility_threshold}};
}

ModelRow decode_row(const json& j) {
    ModelRow r;
    r.profile = decode_profile(j.at("profile"));
    r.sim_similar = get_opt(j.at("sim_similar"));
    r.sim_different = get_opt(j.at("sim_different"));
    r.separation_recomputed = get_opt(j.at("separation_recomputed"));
    r.tier = parse_enum<tr::Tier>(j.at("tier"), parse_tier, "tier");
    r.memory_efficiency = get_num(j.at("memory_efficiency"));
    r.meets_utility_threshold = j.at("meets_utility_threshold").get<bool>();
    return r;
}

// --- gains / pareto / ablation / license ------------------------------------

json encode(const tr::GainRecord& g) {
    return {{"name", g.name},         {"zero_shot", num(g.zero_shot)},         {"adapted", num(g.adapted)},
            {"absolute_gain", num(g.absolute_gain)}, {"relative_pct", opt(g.relative_pct)}, {"improved", g.improved}};
}

tr::GainRecord decode_gain(const json& j) {
    tr::GainRecord g;
    g.name = j.at("name").get<std::string>();
    g.zero_shot = get_num(j.at("zero_shot"));
    g.adapted = get_num(j.at("adapted"));
    g.absolute_gain = get_num(j.at("absolute_gain"));
    g.relative_pct = get_opt(j.at("relative_pct"));
    g.improved = j.at("improved").get<bool>();
    return g;
}

json encode(const tr::CohortMedians& m) {
    return {{"median_relative_pct", num(m.median_relative_pct)},
            {"median_zero_shot", num(m.median_zero_shot)},
            {"median_adapted", num(m.median_adapted)},
            {"improved_count", m.improved_count},
            {"total_count", m.total_count}};
}

tr::CohortMedians decode_medians(const json& j) {
    tr::CohortMedians m;
    m.median_relative_pct = get_num(j.at("median_relative_pct"));
    m.median_zero_shot = get_num(j.at("median_zero_shot"));
    m.median_adapted = get_num(j.at("median_adapted"));
    m.improved_count = j.at("improved_count").get<std::size_t>();
    m.total_count = j.at("total_count").get<std::size_t>();
    return m;
}

json encode(const tr::ParetoResult& p) {
    json frontier = json::array();
    for (const auto& m : p.frontier) frontier.push_back(m.name);
    json dominated = json::array();
    for (const auto& d : p.dominated) {
        json doms = json::array();
        for (const auto& x : d.dominators) {
            doms.push_back({{"name", x.name},
                            {"separation_margin_pct", opt(x.separation_margin_pct)},
                            {"throughput_margin_pct", opt(x.throughput_margin_pct)}});
        }
        dominated.push_back({{"name", d.name}, {"dominators", doms}});
    }
    return {{"frontier", frontier}, {"dominated", dominated}};
}

tr::ParetoResult decode_pareto(const json& j, const std::vector<ModelRow>& rows) {
    tr::ParetoResult p;
    for (const auto& name : j.at("frontier")) {
        const auto n = name.get<std::string>();
        bool found = false;
        for (const auto& r : rows) {
            if (r.profile.name == n) {
                p.frontier.push_back(r.profile);
                found = true;
                break;
            }
        }
        if (!found) throw ParseError("frontier names unknown model '" + n + "'");
    }
    for (const auto& d : j.at("dominated")) {
        tr::DominatedModel dm;
        dm.name = d.at("name").get<std::string>();
        for (const auto& x : d.at("dominators")) {
            dm.dominators.push_back({x.at("name").get<std::string>(), get_opt(x.at("separation_margin_pct")),
                                     get_opt(x.at("throughput_margin_pct"))});
        }
        p.dominated.push_back(std::move(dm));
    }
    return p;
}

json encode(const st::CorrelationResult& c) { return {{"r", num(c.r)}, {"p", num(c.p)}, {"n", c.n}}; }

st::CorrelationResult decode_corr(const json& j) {
    return {get_num(j.at("r")), get_num(j.at("p")), j.at("n").get<std::size_t>()};
}

json encode(const tr::AblationCell& c) {
    return {{"data_fraction", static_cast<int>(c.data_fraction)},
            {"loss", tr::to_string(c.loss)},
            {"rank", static_cast<int>(c.rank)},
            {"separation", num(c.separation)}};
}

tr::AblationCell decode_cell(const json& j) {
    tr::AblationCell c;
    const auto f = tr::parse_fraction(j.at("data_fraction").get<int>());
    const auto r = tr::parse_rank(j.at("rank").get<int>());
    if (!f || !r) throw ParseError("bad ablation cell");
    c.data_fraction = *f;
    c.rank = *r;
    c.loss = parse_enum<tr::LossKind>(j.at("loss"), tr::parse_loss, "loss");
    c.separation = get_num(j.at("separation"));
    return c;
}

json encode(const tr::AblationSummary& s) {
    json groups = json::array();
    for (const auto& g : s.groups) {
        groups.push_back({{"data_fraction", static_cast<int>(g.data_fraction)},
                          {"loss", tr::to_string(g.loss)},
                          {"mean", num(g.mean)},
                          {"rank_spread", num(g.rank_spread)},
                          {"by_rank", {num(g.by_rank[0]), num(g.by_rank[1]), num(g.by_rank[2])}}});
    }
    json best = json::array();
    for (const auto& c : s.best_per_fraction) best.push_back(encode(c));
    json by_loss = json::object();
    json negatives = json::object();
    for (const auto& [l, v] : s.mean_by_loss) by_loss[std::string(tr::to_string(l))] = num(v);
    for (const auto& [l, v] : s.negative_count_by_loss) negatives[std::string(tr::to_string(l))] = v;
    return {{"groups", groups},
            {"best_per_fraction", best},
            {"mean_by_loss", by_loss},
            {"negative_count_by_loss", negatives},
            {"max_rank_spread", num(s.max_rank_spread)}};
}

tr::AblationSummary decode_ablation(const json& j) {
    tr::AblationSummary s;
    for (const auto& g : j.at("groups")) {
        const auto f = tr::parse_fraction(g.at("data_fraction").get<int>());
        if (!f) throw ParseError("bad ablation group");
        tr::AblationGroup ag{*f, parse_enum<tr::LossKind>(g.at("loss"), tr::parse_loss, "loss")};
        ag.mean = get_num(g.at("mean"));
        ag.rank_spread = get_num(g.at("rank_spread"));
        for (std::size_t k = 0; k < 3; ++k) ag.by_rank[k] = get_num(g.at("by_rank").at(k));
        s.groups.push_back(ag);
    }
    for (const auto& c : j.at("best_per_fraction")) s.best_per_fraction.push_back(decode_cell(c));
    for (const auto& [k, v] : j.at("mean_by_loss").items()) {
        s.mean_by_loss[parse_enum<tr::LossKind>(json(k), tr::parse_loss, "loss")] = get_num(v);
    }
    for (const auto& [k, v] : j.at("negative_count_by_loss").items()) {
        s.negative_count_by_loss[parse_enum<tr::LossKind>(json(k), tr::parse_loss, "loss")] = v.get<std::size_t>();
    }
    s.max_rank_spread = get_num(j.at("max_rank_spread"));
    return s;
}

json encode(const tr::LicenseGateResult& g) {
    json flagged = json::array();
    for (const auto& f : g.flagged) flagged.push_back({{"name", f.name}, {"reason", f.reason}});
    return {{"allowed", g.allowed}, {"flagged", flagged}};
}

tr::LicenseGateResult decode_gate(const json& j) {
    tr::LicenseGateResult g;
    g.allowed = j.at("allowed").get<std::vector<std::string>>();
    for (const auto& f : j.at("flagged")) g.flagged.push_back({f.at("name").get<std::string>(), f.at("reason").get<std::string>()});
    return g;
}

// --- statistics -------------------------------------------------------------

json encode(const eb::CategoryStats& s) {
    return {{"category", eb::to_string(s.category)}, {"mean", num(s.mean)}, {"sd", num(s.sd)}, {"n", s.n}};
}

eb::CategoryStats decode_stats(const json& j) {
    eb::CategoryStats s;
    s.category = parse_enum<eb::Category>(j.at("category"), eb::parse_category, "category");
    s.mean = get_num(j.at("mean"));
    s.sd = get_num(j.at("sd"));
    s.n = j.at("n").get<std::size_t>();
    return s;
}

json encode(const eb::SeparationResult& r) {
    json stats = json::array();
    for (const auto& [c, s] : r.stats_by_category) stats.push_back(encode(s));
    return {{"model_id", r.model_id}, {"separation", num(r.separation)}, {"stats_by_category", stats}};
}

eb::SeparationResult decode_score(const json& j) {
    eb::SeparationResult r;
    r.model_id = j.at("model_id").get<std::string>();
    r.separation = get_num(j.at("separation"));
    for (const auto& s : j.at("stats_by_category")) {
        auto cs = decode_stats(s);
        r.stats_by_category[cs.category] = cs;
    }
    return r;
}

json encode(const BootstrapEntry& b) {
    return {{"model_id", b.model_id},   {"point", num(b.ci.point)}, {"analytic", num(b.ci.analytic)},
            {"lo", num(b.ci.lo)},       {"hi", num(b.ci.hi)},       {"width", num(b.ci.width)}};
}

BootstrapEntry decode_bootstrap(const json& j) {
    BootstrapEntry b;
    b.model_id = j.at("model_id").get<std::string>();
    b.ci.point = get_num(j.at("point"));
    b.ci.analytic = get_num(j.at("analytic"));
    b.ci.lo = get_num(j.at("lo"));
    b.ci.hi = get_num(j.at("hi"));
    b.ci.width = get_num(j.at("width"));
    return b;
}

json encode(const st::PairwiseComparison& c) {
    return {{"model_a", c.model_a}, {"model_b", c.model_b}, {"mean_a", num(c.mean_a)}, {"mean_b", num(c.mean_b)},
            {"t", num(c.t)},         {"df", num(c.df)},       {"p", num(c.p)},           {"p_holm", num(c.p_holm)},
            {"d", num(c.d)},         {"sigma_pooled", num(c.sigma_pooled)},              {"band", st::to_string(c.band)}};
}

st::PairwiseComparison decode_pairwise(const json& j) {
    st::PairwiseComparison c;
    c.model_a = j.at("model_a").get<std::string>();
    c.model_b = j.at("model_b").get<std::string>();
    c.mean_a = get_num(j.at("mean_a"));
    c.mean_b = get_num(j.at("mean_b"));
    c.t = get_num(j.at("t"));
    c.df = get_num(j.at("df"));
    c.p = get_num(j.at("p"));
    c.p_holm = get_num(j.at("p_holm"));
    c.d = get_num(j.at("d"));
    c.sigma_pooled = get_num(j.at("sigma_pooled"));
    c.band = parse_enum<st::EffectBand>(j.at("band"), parse_band, "effect band");
    return c;
}

}  // namespace

json to_json(const AnalysisBundle& b) {
    json j;
    j["format"] = "embedgauge-report/1";
    j["settings"] = {{"seed", b.settings.seed},
                     {"utility_threshold", num(b.settings.utility_threshold)},
                     {"tier_bounds", {num(b.settings.tier_bounds.moderate), num(b.settings.tier_bounds.high)}},
                     {"bootstrap",
                      {{"resamples", b.settings.bootstrap.resamples},
                       {"confidence", num(b.settings.bootstrap.confidence)},
                       {"seed", b.settings.bootstrap.seed},
                       {"pairs_per_category", b.settings.bootstrap.pairs_per_category}}},
                     {"samples_per_model", b.settings.samples_per_model}};

    const auto list = [](const auto& items) {
        json a = json::array();
        for (const auto& x : items) a.push_back(encode(x));
        return a;
    };
    j["models"] = list(b.models);
    j["gains"] = list(b.gains);
    j["medians"] = b.medians ? encode(*b.medians) : json(nullptr);
    j["pareto"] = b.pareto ? encode(*b.pareto) : json(nullptr);
    j["correlations"] = b.correlations ? json{{"vs_emb_dim", encode(b.correlations->vs_emb_dim)},
                                              {"vs_params", encode(b.correlations->vs_params)}}
                                       : json(nullptr);
    j["ablation_cells"] = list(b.ablation_cells);
    j["ablation"] = b.ablation ? encode(*b.ablation) : json(nullptr);
    j["license_gate"] = {{"internal", b.gate_internal ? encode(*b.gate_internal) : json(nullptr)},
                         {"embedding_service", b.gate_service ? encode(*b.gate_service) : json(nullptr)}};
    json extremes = json::array();
    for (const auto& e : b.arch_extremes) {
        extremes.push_back({{"arch_class", tr::to_string(e.arch_class)}, {"best", e.best}, {"worst", e.worst}});
    }
    j["arch_extremes"] = extremes;
    j["scores"] = list(b.scores);
    j["bootstrap"] = list(b.bootstrap);
    j["pairwise"] = list(b.pairwise);
    json benches = json::array();
    for (const auto& r : b.bench) benches.push_back(bench::to_json(r));
    j["bench"] = benches;
    return j;
}

AnalysisBundle bundle_from_json(const json& j) {
    try {
        if (j.value("format", std::string{}) != "embedgauge-report/1") throw ParseError("not an embedgauge report");
        AnalysisBundle b;
        const auto& s = j.at("settings");
        b.settings.seed = s.at("seed").get<std::uint64_t>();
        b.settings.utility_threshold = get_num(s.at("utility_threshold"));
        b.settings.tier_bounds.moderate = get_num(s.at("tier_bounds").at(0));
        b.settings.tier_bounds.high = get_num(s.at("tier_bounds").at(1));
        const auto& bs = s.at("bootstrap");
        b.settings.bootstrap.resamples = bs.at("resamples").get<std::size_t>();
        b.settings.bootstrap.confidence = get_num(bs.at("confidence"));
        b.settings.bootstrap.seed = bs.at("seed").get<std::uint64_t>();
        b.settings.bootstrap.pairs_per_category = bs.at("pairs_per_category").get<std::size_t>();
        b.settings.samples_per_model = s.at("samples_per_model").get<std::size_t>();

        for (const auto& r : j.at("models")) b.models.push_back(decode_row(r));
        for (const auto& g : j.at("gains")) b.gains.push_back(decode_gain(g));
        if (!j.at("medians").is_null()) b.medians = decode_medians(j.at("medians"));
        if (!j.at("pareto").is_null()) b.pareto = decode_pareto(j.at("pareto"), b.models);
        if (!j.at("correlations").is_null()) {
            b.correlations = CorrelationSet{decode_corr(j.at("correlations").at("vs_emb_dim")),
                                            decode_corr(j.at("correlations").at("vs_params"))};
        }
        for (const auto& c : j.at("ablation_cells")) b.ablation_cells.push_back(decode_cell(c));
        if (!j.at("ablation").is_null()) b.ablation = decode_ablation(j.at("ablation"));
        const auto& gate = j.at("license_gate");
        if (!gate.at("internal").is_null()) b.gate_internal = decode_gate(gate.at("internal"));
        if (!gate.at("embedding_service").is_null()) b.gate_service = decode_gate(gate.at("embedding_service"));
        for (const auto& e : j.at("arch_extremes")) {
            b.arch_extremes.push_back({parse_enum<tr::ArchClass>(e.at("arch_class"), tr::parse_arch_class, "arch_class"),
                                       e.at("best").get<std::string>(), e.at("worst").get<std::string>()});
        }
        for (const auto& x : j.at("scores")) b.scores.push_back(decode_score(x));
        for (const auto& x : j.at("bootstrap")) b.bootstrap.push_back(decode_bootstrap(x));
        for (const auto& x : j.at("pairwise")) b.pairwise.push_back(decode_pairwise(x));
        for (const auto& x : j.at("bench")) b.bench.push_back(bench::bench_report_from_json(x));
        return b;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report JSON: ") + e.what());
    }
}

}  // namespace embedgauge::report
