#include "embedgauge/pipeline.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "embedgauge/errors.hpp"

namespace embedgauge::pipeline {

using nlohmann::json;
namespace tr = tradeoff;

namespace {

// Used when `bench` is given no payload file.
const std::vector<std::string> default_payload{
    "Patient reports chest pain radiating to the left arm.",
    "Echocardiogram shows a mildly reduced ejection fraction.",
    "No evidence of pericardial effusion on imaging.",
    "Blood pressure remained stable throughout the admission.",
    "The ECG demonstrates sinus rhythm with occasional premature beats.",
    "Troponin levels were within the normal range.",
    "Started on a beta blocker after the second visit.",
    "Follow-up stress test scheduled in six weeks.",
};

std::vector<double> split_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ConfigError(std::string("bad number '") + item + "' in " + what, what);
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> split_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : split_doubles(text, "--batch-sizes")) {
        if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ConfigError("batch sizes must be positive integers", "--batch-sizes");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

Command parse_command(const std::string& name) {
    if (name == "score") return Command::score;
    if (name == "stats") return Command::stats;
    if (name == "pareto") return Command::pareto;
    if (name == "ablation") return Command::ablation;
    if (name == "bench") return Command::bench;
    if (name == "report") return Command::report;
    return Command::all;
}

struct ParseOutcome {
    RunConfig cfg;
    std::optional<std::string> help;
};

ParseOutcome parse_impl(int argc, const char* const* argv) {
    ParseOutcome outcome;
    RunConfig& cfg = outcome.cfg;
    cfg.fixtures_dir = io::default_fixtures_dir();

    CLI::App app{"Embedding model evaluation toolkit"};
    app.name("embedgauge");
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "all";
    std::string tier_bounds = "0.25,0.45";
    app.add_option("--seed", cfg.settings.seed, "Seed for every random stream");
    app.add_option("--out", cfg.out_dir, "Output directory");
    app.add_option("--format", format, "markdown, csv, json, all, or a comma list");
    app.add_option("--threshold-utility", cfg.settings.utility_threshold, "Clinical utility separation threshold");
    app.add_option("--tier-bounds", tier_bounds, "Moderate and high tier lower bounds");
    app.add_option("--fixtures", cfg.fixtures_dir, "Directory of table fixtures");

    std::optional<std::string> pairs;
    std::vector<std::string> embeddings;
    std::optional<std::string> summaries;
    std::optional<std::string> payload;
    std::optional<std::string> from_json;
    std::vector<std::string> replays;
    std::string batch_sizes = "1,4,16,32";

    const auto add_score_opts = [&](CLI::App* sc) {
        sc->add_option("--pairs", pairs, "Sentence pairs (JSON lines)");
        sc->add_option("--embeddings", embeddings, "Embedding file per model, as id=path or path")->take_all();
    };
    const auto add_stats_opts = [&](CLI::App* sc) {
        sc->add_option("--summaries", summaries, "Per-model category summaries (CSV)");
        sc->add_option("--resamples", cfg.settings.bootstrap.resamples, "Bootstrap resamples");
        sc->add_option("--confidence", cfg.settings.bootstrap.confidence, "Interval confidence level");
        sc->add_option("--pairs-per-category", cfg.settings.bootstrap.pairs_per_category, "Synthetic pairs per draw");
        sc->add_option("--samples-per-model", cfg.settings.samples_per_model, "Synthetic separations per model");
    };
    const auto add_bench_opts = [&](CLI::App* sc) {
        sc->add_option("--provider", cfg.provider_commands, "Provider launch command (repeatable)");
        sc->add_option("--replay", replays, "Saved bench report JSON to include (repeatable)");
        sc->add_option("--payload", payload, "Pairs file whose texts form the payload");
        sc->add_option("--warmup", cfg.bench_plan.warmup_iters, "Discarded warmup encodes");
        sc->add_option("--iters", cfg.bench_plan.timed_iters, "Timed iterations");
        sc->add_option("--batch-sizes", batch_sizes, "Comma list of batch sizes");
    };

    CLI::App* score = app.add_subcommand("score", "Separation scores from pairs and embeddings");
    add_score_opts(score);
    CLI::App* stats = app.add_subcommand("stats", "Correlations, bootstrap intervals and pairwise tests");
    add_stats_opts(stats);
    app.add_subcommand("pareto", "Tiers, Pareto frontier, efficiency and license gate");
    app.add_subcommand("ablation", "Ablation grid and adaptation gains");
    CLI::App* bench_cmd = app.add_subcommand("bench", "Benchmark providers over the wire protocol");
    add_bench_opts(bench_cmd);
    CLI::App* report_cmd = app.add_subcommand("report", "Render every fixture table, or re-render a saved report");
    report_cmd->add_option("--from-json", from_json, "A report.json written earlier");
    CLI::App* all = app.add_subcommand("all", "Run the whole pipeline");
    add_score_opts(all);
    add_stats_opts(all);
    add_bench_opts(all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        outcome.help = app.help();
        return outcome;
    } catch (const CLI::CallForAllHelp&) {
        outcome.help = app.help("", CLI::AppFormatMode::All);
        return outcome;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    for (CLI::App* sc : app.get_subcommands()) {
        if (sc->get_help_ptr() != nullptr && sc->get_help_ptr()->count() > 0) {
            outcome.help = sc->help();
            return outcome;
        }
        cfg.command = parse_command(sc->get_name());
    }

    cfg.formats = report::FormatSet::parse(format);
    const auto bounds = split_doubles(tier_bounds, "--tier-bounds");
    if (bounds.size() != 2 || !(bounds[0] < bounds[1])) {
        throw ConfigError("--tier-bounds needs two increasing values, e.g. 0.25,0.45", tier_bounds);
    }
    cfg.settings.tier_bounds = {bounds[0], bounds[1]};
    cfg.settings.bootstrap.seed = cfg.settings.seed;
    try {
        cfg.settings.bootstrap.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (cfg.settings.samples_per_model < 2) throw ConfigError("--samples-per-model must be at least 2");

    if (pairs) cfg.pairs_path = *pairs;
    for (const auto& e : embeddings) cfg.embeddings.push_back(parse_embeddings_arg(e));
    if (summaries) cfg.summaries_path = *summaries;
    if (from_json) cfg.from_json = *from_json;
    for (const auto& r : replays) cfg.bench_replays.emplace_back(r);

    if (cfg.command == Command::score && (!cfg.pairs_path || cfg.embeddings.empty())) {
        throw ConfigError("score needs --pairs and at least one --embeddings");
    }
    if (cfg.pairs_path.has_value() != !cfg.embeddings.empty()) {
        throw ConfigError("--pairs and --embeddings must be given together");
    }
    if (cfg.command == Command::bench || cfg.command == Command::all) {
        if (cfg.provider_commands.empty()) {
            if (const char* env = std::getenv("EMBEDGAUGE_PROVIDER"); env != nullptr && *env != '\0') {
                cfg.provider_commands.emplace_back(env);
            }
        }
        if (cfg.command == Command::bench && cfg.provider_commands.empty() && cfg.bench_replays.empty()) {
            throw ConfigError("bench needs --provider, EMBEDGAUGE_PROVIDER or --replay");
        }
        cfg.bench_plan.batch_sizes = split_sizes(batch_sizes);
        cfg.bench_plan.seed = cfg.settings.seed;
        if (payload) {
            for (const auto& p : io::load_pairs(*payload)) {
                cfg.bench_plan.payload.push_back(p.text_a);
                cfg.bench_plan.payload.push_back(p.text_b);
            }
        } else {
            cfg.bench_plan.payload = default_payload;
        }
        cfg.bench_plan.validate();
    }
    return outcome;
}

bool wants(Command c, std::initializer_list<Command> sections) {
    if (c == Command::all) return true;
    for (Command s : sections) {
        if (s == c) return true;
    }
    return false;
}

// Everything read from disk, loaded before any analysis.
struct Inputs {
    std::optional<io::FixtureBundle> fixtures;
    std::vector<tr::ModelProfile> profiles;
    std::vector<embedspace::SentencePair> pairs;
    std::vector<std::pair<std::string, embedspace::EmbeddingCollection>> embeddings;
    std::vector<io::SummaryRecord> summaries;
    std::vector<bench::BenchReport> replays;
};

Inputs load_inputs(const RunConfig& cfg) {
    Inputs in;
    const Command c = cfg.command;
    if (wants(c, {Command::stats, Command::pareto, Command::ablation, Command::report})) {
        in.fixtures = io::load_fixture_bundle(cfg.fixtures_dir);
        in.profiles = in.fixtures->profiles();
    }
    if (cfg.pairs_path) in.pairs = io::load_pairs(*cfg.pairs_path);
    for (const auto& e : cfg.embeddings) in.embeddings.emplace_back(e.model_id, io::load_embeddings(e.path));
    if (cfg.summaries_path) in.summaries = io::load_summaries(*cfg.summaries_path);
    for (const auto& r : cfg.bench_replays) {
        const std::string text = io::read_file(r);
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError("bench replay is not JSON: " + std::string(e.what()), r.string());
        }
        in.replays.push_back(bench::bench_report_from_json(j));
    }
    return in;
}

std::vector<statkit::ModelSummary> summaries_from_scores(const std::vector<embedspace::SeparationResult>& scores) {
    std::vector<io::SummaryRecord> records;
    for (const auto& s : scores) {
        for (const auto& [cat, cs] : s.stats_by_category) records.push_back({s.model_id, cat, cs.mean, cs.sd, cs.n});
    }
    return io::to_model_summaries(records);
}

}  // namespace

ModelEmbeddings parse_embeddings_arg(const std::string& text) {
    if (text.empty()) throw ConfigError("empty --embeddings value");
    if (const auto eq = text.find('='); eq != std::string::npos) {
        if (eq == 0 || eq + 1 == text.size()) throw ConfigError("--embeddings expects id=path", text);
        return {text.substr(0, eq), fs::path(text.substr(eq + 1))};
    }
    const fs::path p(text);
    return {p.stem().string(), p};
}

RunConfig parse_args(int argc, const char* const* argv) {
    auto outcome = parse_impl(argc, argv);
    if (outcome.help) throw ConfigError("help requested");
    return outcome.cfg;
}

report::AnalysisBundle run_analysis(const RunConfig& cfg) {
    report::AnalysisBundle b;
    b.settings = cfg.settings;
    if (cfg.from_json) {
        const fs::path& p = *cfg.from_json;
        json j;
        try {
            j = json::parse(io::read_file(p));
        } catch (const json::parse_error& e) {
            throw ParseError("report is not JSON: " + std::string(e.what()), p.string());
        }
        return report::bundle_from_json(j);
    }

    const Inputs in = load_inputs(cfg);
    const Command c = cfg.command;
    const auto& s = cfg.settings;

    if (in.fixtures) {
        b.models = report::model_rows(in.profiles, in.fixtures->separation, s);
    }
    if (in.fixtures && wants(c, {Command::ablation, Command::report})) {
        for (const auto& g : in.fixtures->gains) b.gains.push_back(tr::gain(g.zero_shot, g.adapted, g.model));
        if (!b.gains.empty()) b.medians = tr::cohort_medians(b.gains);
        b.ablation_cells = in.fixtures->ablation;
        if (!b.ablation_cells.empty()) b.ablation = tr::ablation_summary(b.ablation_cells);
    }
    if (in.fixtures && wants(c, {Command::pareto, Command::report})) {
        b.pareto = tr::pareto_frontier(in.profiles);
        b.arch_extremes = tr::best_worst_by_arch(in.profiles);
        b.gate_internal = tr::license_gate(in.profiles, tr::Deployment::internal);
        b.gate_service = tr::license_gate(in.profiles, tr::Deployment::embedding_service);
    }
    if (in.fixtures && wants(c, {Command::stats, Command::report}) && in.profiles.size() >= 3) {
        std::vector<double> sep, dim, params;
        for (const auto& p : in.profiles) {
            sep.push_back(p.separation);
            dim.push_back(static_cast<double>(p.emb_dim));
            params.push_back(p.params_millions);
        }
        b.correlations = report::CorrelationSet{statkit::pearson(sep, dim), statkit::pearson(sep, params)};
    }

    for (const auto& [id, collection] : in.embeddings) {
        b.scores.push_back(embedspace::separation(embedspace::category_stats(in.pairs, collection), id));
    }

    if (wants(c, {Command::stats})) {
        std::vector<statkit::ModelSummary> models;
        if (!in.summaries.empty()) {
            models = io::to_model_summaries(in.summaries);
        } else if (!b.scores.empty()) {
            models = summaries_from_scores(b.scores);
        }
        for (const auto& m : models) {
            statkit::BootstrapConfig bc = s.bootstrap;
            bc.seed = statkit::model_seed(s.seed, m.model_id);
            b.bootstrap.push_back({m.model_id, statkit::bootstrap_separation_ci(m.similar, m.different, bc)});
        }
        if (models.size() >= 2) {
            statkit::BootstrapConfig bc = s.bootstrap;
            bc.seed = s.seed;
            b.pairwise = statkit::pairwise_comparisons(models, bc, s.samples_per_model);
        }
    }

    if (wants(c, {Command::bench})) {
        b.bench = in.replays;
        if (!cfg.provider_commands.empty()) {
            auto live = bench::run_bench_many(cfg.bench_plan, cfg.provider_commands);
            b.bench.insert(b.bench.end(), live.begin(), live.end());
        }
    }
    return b;
}

int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const report::AnalysisBundle bundle = run_analysis(cfg);
        auto written = report::emit_report(bundle, cfg.out_dir, cfg.formats);
        if (!bundle.scores.empty() && cfg.formats.csv) {
            std::vector<io::SummaryRecord> records;
            for (const auto& sc : bundle.scores) {
                for (const auto& [cat, cs] : sc.stats_by_category) records.push_back({sc.model_id, cat, cs.mean, cs.sd, cs.n});
            }
            const fs::path p = cfg.out_dir / "summaries.csv";
            io::write_file(p, io::format_summaries(records));
            written.push_back(p);
        }
        for (const auto& r : bundle.bench) {
            const fs::path p = cfg.out_dir / "bench" / (r.model_id + ".json");
            io::write_file(p, bench::to_json(r).dump(2) + "\n");
            written.push_back(p);
        }
        json ok{{"ok", true}, {"written", json::array()}};
        for (const auto& p : written) ok["written"].push_back(p.string());
        out << ok.dump() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << error_summary(e).dump() << "\n";
        return exit_code_for(e);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    ParseOutcome outcome;
    try {
        outcome = parse_impl(argc, argv);
    } catch (const std::exception& e) {
        err << error_summary(e).dump() << "\n";
        return exit_code_for(e);
    }
    if (outcome.help) {
        out << *outcome.help;
        return 0;
    }
    return run_pipeline(outcome.cfg, out, err);
}

int exit_code_for(const std::exception& e) noexcept {
    const auto* ee = dynamic_cast<const Error*>(&e);
    if (ee == nullptr) return 1;
    if (ee->module() == "cli-report") return 2;
    if (ee->module() == "benchharness") return 3;
    return 1;
}

json error_summary(const std::exception& e) {
    json err{{"message", e.what()}};
    if (const auto* ee = dynamic_cast<const Error*>(&e)) {
        err["kind"] = ee->kind();
        err["module"] = ee->module();
        err["locus"] = ee->locus();
    } else {
        err["kind"] = "InternalError";
        err["module"] = "";
        err["locus"] = "";
    }
    return json{{"ok", false}, {"exit_code", exit_code_for(e)}, {"error", err}};
}

}  // namespace embedgauge::pipeline
