#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "embedgauge/errors.hpp"
#include "embedgauge/io.hpp"
#include "embedgauge/pipeline.hpp"
#include "support.hpp"

using namespace embedgauge;
using namespace embedgauge::pipeline;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "embedgauge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return io::read_file(p); }

// Pair file plus a matching embedding file with the given similar/different cosines.
void write_scored_inputs(const testing_support::TempDir& dir, double sim_cos, double diff_cos) {
    std::ostringstream pairs;
    embedspace::EmbeddingCollection emb(2);
    int id = 0;
    for (auto [cat, c] : {std::pair{"similar", sim_cos}, {"similar", sim_cos - 0.1}, {"different", diff_cos},
                          {"different", diff_cos + 0.1}, {"negation", 0.9}}) {
        const std::string pid = "p" + std::to_string(id++);
        pairs << json{{"id", pid}, {"text_a", "a" + pid}, {"text_b", "b" + pid}, {"category", cat}}.dump() << "\n";
        const double th = std::acos(c);
        emb.add({embedspace::side_a_id(pid), {1.0f, 0.0f}});
        emb.add({embedspace::side_b_id(pid), {static_cast<float>(std::cos(th)), static_cast<float>(std::sin(th))}});
    }
    io::write_file(dir / "pairs.jsonl", pairs.str());
    io::save_embeddings(dir / "m.emb", emb);
}

const std::string summaries_csv =
    "model_id,category,mean,sd,n\n"
    "A,similar,0.772,0.12,50\nA,different,0.263,0.13,50\n"
    "B,similar,0.674,0.11,50\nB,different,0.288,0.12,50\n"
    "C,similar,0.696,0.10,50\nC,different,0.446,0.10,50\n";

}  // namespace

TEST_CASE("full fixture run writes every golden table") {
    testing_support::TempDir dir;
    const auto r = cli({"report", "--out", dir.path().string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto ok = json::parse(r.out);
    CHECK(ok["ok"] == true);
    const auto md = slurp(dir / "report.md");
    for (const char* section : {"## Separation scores", "## Inference throughput and memory", "## Zero-shot vs adapted",
                                "## Ablation grid", "## Pareto frontier", "## Correlations", "## License gate"}) {
        CHECK_MESSAGE(md.find(section) != std::string::npos, section);
    }
    CHECK(fs::exists(dir / "csv/separation.csv"));
    CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("re-rendering a saved report is byte identical") {
    testing_support::TempDir a, b;
    REQUIRE(cli({"report", "--out", a.path().string()}).code == 0);
    const auto r = cli({"report", "--from-json", (a / "report.json").string(), "--out", b.path().string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "report.md") == slurp(b / "report.md"));
    CHECK(slurp(a / "csv/pareto.csv") == slurp(b / "csv/pareto.csv"));
}

TEST_CASE("missing summary file exits 2 and names the path") {
    testing_support::TempDir dir;
    const std::string missing = (dir / "no-such-summaries.csv").string();
    const auto r = cli({"stats", "--summaries", missing, "--out", dir.path().string()});
    CHECK(r.code == 2);
    const auto e = json::parse(r.err);
    CHECK(e["ok"] == false);
    CHECK(e["error"]["locus"] == missing);
    CHECK(e["error"]["module"] == "cli-report");
    CHECK(e["error"]["kind"] == "IoError");
}

TEST_CASE("same seed gives identical bootstrap outputs") {
    testing_support::TempDir dir;
    io::write_file(dir / "s.csv", summaries_csv);
    const auto run = [&](const std::string& seed, const std::string& out) {
        const auto r = cli({"stats", "--seed", seed, "--summaries", (dir / "s.csv").string(), "--resamples", "1000",
                            "--out", (dir / out).string()});
        REQUIRE_MESSAGE(r.code == 0, r.err);
        return slurp(dir / out / "csv/bootstrap.csv") + slurp(dir / out / "csv/pairwise.csv");
    };
    const auto a = run("7", "a");
    const auto b = run("7", "b");
    const auto c = run("8", "c");
    CHECK(a == b);
    CHECK(a != c);
    const auto j = json::parse(slurp(dir / "a/report.json"));
    CHECK(j["bootstrap"].size() == 3);
    CHECK(j["pairwise"].size() == 3);
}

TEST_CASE("score feeds stats within one run") {
    testing_support::TempDir dir;
    write_scored_inputs(dir, 0.9, 0.2);
    const auto r = cli({"all", "--pairs", (dir / "pairs.jsonl").string(), "--embeddings",
                        "toy=" + (dir / "m.emb").string(), "--resamples", "200", "--out", (dir / "out").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = json::parse(slurp(dir / "out/report.json"));
    REQUIRE(j["scores"].size() == 1);
    CHECK(j["scores"][0]["model_id"] == "toy");
    CHECK(j["scores"][0]["separation"].get<double>() == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(j["bootstrap"].size() == 1);
    const auto summaries = io::load_summaries(dir / "out/summaries.csv");
    CHECK(summaries.size() == 3);
}

TEST_CASE("score rejects a bad embedding file before computing") {
    testing_support::TempDir dir;
    write_scored_inputs(dir, 0.9, 0.2);
    io::write_file(dir / "bad.emb", "EMB2");
    const auto r = cli({"score", "--pairs", (dir / "pairs.jsonl").string(), "--embeddings", (dir / "m.emb").string(),
                        "--embeddings", (dir / "bad.emb").string(), "--out", (dir / "out").string()});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"]["kind"] == "FormatError");
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("a missing embedding id is a located analysis error") {
    testing_support::TempDir dir;
    write_scored_inputs(dir, 0.9, 0.2);
    std::ofstream(dir / "pairs.jsonl", std::ios::app)
        << R"({"id":"extra","text_a":"x","text_b":"y","category":"similar"})" << "\n";
    const auto r = cli({"score", "--pairs", (dir / "pairs.jsonl").string(), "--embeddings", (dir / "m.emb").string(),
                        "--out", (dir / "out").string()});
    CHECK(r.code == 1);
    const auto e = json::parse(r.err);
    CHECK(e["error"]["module"] == "embedspace");
    CHECK(e["error"]["locus"] == "extra/a");
}

TEST_CASE("bench through the cli with a stub and a replay") {
    testing_support::TempDir dir;
    const auto r = cli({"bench", "--provider", testing_support::stub_provider() + " --dim 8 --model-id live",
                        "--replay", (testing_support::fixtures() / "bench_bge_small_v1.5.json").string(), "--iters",
                        "5", "--warmup", "1", "--batch-sizes", "1,2", "--out", dir.path().string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto md = slurp(dir / "report.md");
    CHECK(md.find("| BGE-small-v1.5 |") != std::string::npos);
    CHECK(md.find("467.3") != std::string::npos);
    CHECK(md.find("| live |") != std::string::npos);
    CHECK(fs::exists(dir / "bench/live.json"));
}

TEST_CASE("provider failures exit 3") {
    testing_support::TempDir dir;
    const auto r = cli({"bench", "--provider", testing_support::stub_provider() + " --die-after 2", "--iters", "5",
                        "--out", dir.path().string()});
    CHECK(r.code == 3);
    CHECK(json::parse(r.err)["error"]["kind"] == "ProviderDiedError");
}

TEST_CASE("provider command from the environment") {
    testing_support::TempDir dir;
    const std::string cmd = testing_support::stub_provider() + " --model-id from-env";
    ::setenv("EMBEDGAUGE_PROVIDER", cmd.c_str(), 1);
    const auto r = cli({"bench", "--iters", "3", "--warmup", "0", "--batch-sizes", "1", "--out", dir.path().string()});
    ::unsetenv("EMBEDGAUGE_PROVIDER");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir / "bench/from-env.json"));
}

TEST_CASE("configuration errors exit 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"report", "--tier-bounds", "0.5,0.2"}).code == 2);
    CHECK(cli({"report", "--tier-bounds", "abc"}).code == 2);
    CHECK(cli({"report", "--format", "pdf"}).code == 2);
    CHECK(cli({"score"}).code == 2);
    CHECK(cli({"bench"}).code == 2);
    CHECK(cli({"stats", "--confidence", "1.5"}).code == 2);
    CHECK(cli({"bench", "--provider", "x", "--batch-sizes", "4,2"}).code == 2);
    const auto r = cli({"report", "--fixtures", "/nonexistent/dir"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"]["locus"] == "/nonexistent/dir");
}

TEST_CASE("help exits 0") {
    const auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("score") != std::string::npos);
}

TEST_CASE("thresholds flow into the report") {
    testing_support::TempDir dir;
    REQUIRE(cli({"pareto", "--threshold-utility", "0.25", "--tier-bounds", "0.3,0.5", "--out", dir.path().string()})
                .code == 0);
    const auto j = json::parse(slurp(dir / "report.json"));
    CHECK(j["settings"]["utility_threshold"] == 0.25);
    for (const auto& m : j["models"]) {
        const double s = m["profile"]["separation"].get<double>();
        CHECK(m["meets_utility_threshold"].get<bool>() == (s >= 0.25));
        const std::string tier = s >= 0.5 ? "high" : s >= 0.3 ? "moderate" : "low";
        CHECK(m["tier"] == tier);
    }
}

TEST_CASE("embedding argument parsing") {
    CHECK(parse_embeddings_arg("m=path/x.emb").model_id == "m");
    CHECK(parse_embeddings_arg("dir/bge.emb").model_id == "bge");
    CHECK_THROWS_AS(parse_embeddings_arg("=x"), ConfigError);
    CHECK_THROWS_AS(parse_embeddings_arg(""), ConfigError);
}

TEST_CASE("error summaries and exit codes") {
    CHECK(exit_code_for(ParseError("x")) == 2);
    CHECK(exit_code_for(ProtocolError("x")) == 3);
    CHECK(exit_code_for(DomainError("x")) == 1);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
    const auto j = error_summary(DataError("bad", "f.csv:3"));
    CHECK(j["error"]["locus"] == "f.csv:3");
    CHECK(j["exit_code"] == 2);
}
