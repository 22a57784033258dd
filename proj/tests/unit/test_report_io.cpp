#include <doctest.h>

#include <cstring>
#include <random>

#include "embedgauge/errors.hpp"
#include "embedgauge/io.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace embedgauge;
using namespace embedgauge::io;
using embedspace::Category;

namespace {

template <class E>
std::string locus_of_throw(auto&& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.locus();
    }
    return "<no throw>";
}

}  // namespace

TEST_CASE("csv parsing") {
    const auto t = parse_csv("# comment\na,b,c\n1,\"x, y\",3\n\"q\"\"uote\",,\"multi\nline\"\r\n", "t.csv");
    CHECK(t.header == CsvRow{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == CsvRow{"1", "x, y", "3"});
    CHECK(t.rows[1] == CsvRow{"q\"uote", "", "multi\nline"});
    CHECK(t.line_numbers[0] == 3);
    CHECK(t.line_numbers[1] == 4);

    CHECK(locus_of_throw<ParseError>([] { parse_csv("a,b\n1,2,3\n", "w.csv"); }) == "w.csv:2");
    CHECK(locus_of_throw<ParseError>([] { parse_csv("a,b\n\"1,2\n", "q.csv"); }) == "q.csv:2");
    CHECK_THROWS_AS(parse_csv("", "e.csv"), ParseError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,x\"y\n", "e.csv"), ParseError);
}

TEST_CASE("csv escaping round trips") {
    const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "line\nbreak", "#hash", ""};
    const std::string line = csv_line(fields);
    const auto t = parse_csv(csv_line(std::vector<std::string>{"a", "b", "c", "d", "e", "f"}) + line, "rt");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == fields);
}

TEST_CASE("pairs parsing") {
    const std::string text = R"({"id":"1","text_a":"a","text_b":"b","category":"similar"}
{"id":"2","text_a":"a","text_b":"c","category":"Different"}

{"id":"3","text_a":"a","text_b":"not a","category":"NEGATION"}
)";
    const auto p = parse_pairs(text, "p.jsonl");
    REQUIRE(p.size() == 3);
    CHECK(p[1].category == Category::different);
    CHECK(p[2].category == Category::negation);

    CHECK(locus_of_throw<ParseError>([] {
              parse_pairs("{\"id\":\"1\",\"text_a\":\"a\",\"text_b\":\"b\",\"category\":\"synonym\"}\n", "s.jsonl");
          }) == "s.jsonl:1");
    CHECK(locus_of_throw<DuplicateIdError>([] {
              parse_pairs("{\"id\":\"1\",\"text_a\":\"a\",\"text_b\":\"b\",\"category\":\"similar\"}\n"
                          "{\"id\":\"1\",\"text_a\":\"c\",\"text_b\":\"d\",\"category\":\"similar\"}\n",
                          "d.jsonl");
          }) == "d.jsonl:2");
    CHECK_THROWS_AS(parse_pairs("not json\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_pairs("{\"id\":\"1\",\"text_a\":\"a\",\"category\":\"similar\"}\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_pairs("{\"id\":\"1\",\"text_a\":\"a\",\"text_b\":\"a\",\"category\":\"similar\"}\n", "x"),
                    ParseError);
}

TEST_CASE("shipped sample pairs parse") {
    const auto p = load_pairs(fs::path(EMBEDGAUGE_TEST_DATA) / "sample_pairs.jsonl");
    CHECK(p.size() >= 3);
}

TEST_CASE("embedding file from hand-assembled bytes") {
    const auto bytes = oracle::emb1_two_records();
    const auto c = parse_embeddings(bytes, "hand.emb");
    CHECK(c.dim() == 3);
    REQUIRE(c.size() == 2);
    CHECK(c.records()[0].id == "a");
    CHECK(c.records()[0].vector == std::vector<float>{1.0f, -2.5f, 0.125f});
    CHECK(c.records()[1].id == "bc");
    CHECK(c.records()[1].vector == std::vector<float>{0.0f, 3.0f, -0.0625f});
    CHECK(serialize_embeddings(c) == bytes);
}

TEST_CASE("embedding file errors") {
    std::vector<std::uint8_t> empty{'E', 'M', 'B', '1', 0, 0, 0, 0, 3, 0, 0, 0};
    CHECK(parse_embeddings(empty, "e").empty());

    auto bytes = oracle::emb1_two_records();
    auto bad_magic = bytes;
    bad_magic[3] = '2';
    CHECK_THROWS_AS(parse_embeddings(bad_magic, "m"), FormatError);

    // Declared dim 3, second record carries only 2 floats.
    auto truncated = bytes;
    truncated.resize(truncated.size() - 4);
    CHECK_THROWS_AS(parse_embeddings(truncated, "t"), FormatError);

    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(parse_embeddings(trailing, "t"), FormatError);

    auto nan = bytes;
    const float q = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(&nan[17], &q, 4);
    CHECK_THROWS_AS(parse_embeddings(nan, "n"), DataError);

    CHECK_THROWS_AS(load_embeddings("/nonexistent/file.emb"), IoError);
}

TEST_CASE("embedding ingestion is total on corrupted input") {
    std::mt19937_64 rng(8);
    const auto good = oracle::emb1_two_records();
    for (int trial = 0; trial < 2000; ++trial) {
        auto b = good;
        const int edits = 1 + trial % 4;
        for (int k = 0; k < edits; ++k) {
            switch (rng() % 3) {
            case 0:
                b[rng() % b.size()] = static_cast<std::uint8_t>(rng());
                break;
            case 1:
                b.resize(rng() % (b.size() + 1));
                break;
            default:
                b.push_back(static_cast<std::uint8_t>(rng()));
            }
            if (b.empty()) break;
        }
        try {
            const auto c = parse_embeddings(b, "fuzz");
            CHECK(serialize_embeddings(c) == b);
        } catch (const Error& e) {
            CHECK_FALSE(e.locus().empty());
        }
    }
}

TEST_CASE("embedding save and load") {
    testing_support::TempDir dir;
    embedspace::EmbeddingCollection c(2);
    c.add({"x/a", {0.5f, 1.5f}});
    c.add({"x/b", {-1.0f, 2.0f}});
    save_embeddings(dir / "sub/e.emb", c);
    const auto back = load_embeddings(dir / "sub/e.emb");
    CHECK(serialize_embeddings(back) == serialize_embeddings(c));
}

TEST_CASE("summary records") {
    const std::string text =
        "model_id,category,mean,sd,n\n"
        "# comment line\n"
        "m1,similar,0.77,0.1,50\n"
        "m1,different,0.26,0.12,50\n"
        "\"m,2\",Similar,0.5,0.2,40\n"
        "\"m,2\",different,0.4,0.2,40\n";
    const auto recs = parse_summaries(text, "s.csv");
    REQUIRE(recs.size() == 4);
    CHECK(recs[2].model_id == "m,2");
    const auto models = to_model_summaries(recs);
    REQUIRE(models.size() == 2);
    CHECK(models[0].similar.mean == 0.77);
    CHECK(models[1].different.n == 40);

    CHECK(parse_summaries(format_summaries(recs), "rt").size() == 4);
    CHECK(format_summaries(parse_summaries(format_summaries(recs), "rt")) == format_summaries(recs));

    const std::string head = "model_id,category,mean,sd,n\n";
    CHECK(locus_of_throw<DataError>([&] { parse_summaries(head + "m,similar,1.5,0.1,5\n", "r.csv"); }) == "r.csv:2");
    CHECK_THROWS_AS(parse_summaries(head + "m,similar,0.5,-0.1,5\n", "r"), DataError);
    CHECK_THROWS_AS(parse_summaries(head + "m,similar,0.5,0.1,0\n", "r"), DataError);
    CHECK_THROWS_AS(parse_summaries(head + "m,similar,abc,0.1,5\n", "r"), ParseError);
    CHECK_THROWS_AS(parse_summaries(head + "m,synonym,0.5,0.1,5\n", "r"), ParseError);
    CHECK_THROWS_AS(parse_summaries(head + "m,similar,0.5,0.1,5\nm,similar,0.5,0.1,5\n", "r"), DuplicateIdError);
    CHECK_THROWS_AS(parse_summaries("model_id,category,mean\n", "r"), ParseError);

    const auto lonely = parse_summaries(head + "m,similar,0.5,0.1,5\n", "r");
    CHECK_THROWS_AS(to_model_summaries(lonely), MissingCategoryError);
}

TEST_CASE("fixture bundle joins every table") {
    const auto b = load_fixture_bundle(testing_support::fixtures());
    CHECK(b.separation.size() == 10);
    CHECK(b.throughput.size() == 10);
    CHECK(b.gains.size() == 10);
    CHECK(b.licenses.size() == 10);
    CHECK(b.ablation.size() == 18);
    const auto p = b.profiles();
    REQUIRE(p.size() == 10);
    CHECK(p[0].name == "BioLinkBERT");
    CHECK(p[0].params_millions == 340);
    CHECK(p[0].emb_dim == 1024);
    CHECK(p[1].params_millions == 2500);
    for (const auto& m : p) CHECK(m.zero_shot_separation.has_value());

    auto broken = b;
    broken.throughput.pop_back();
    CHECK_THROWS_AS(broken.profiles(), DataError);
    CHECK_THROWS_AS(load_fixture_bundle("/nonexistent/fixtures"), IoError);
}

TEST_CASE("published separation column matches recomputation") {
    for (const auto& r : load_separation_table(testing_support::fixtures() / "table1_separation.csv")) {
        CHECK(std::fabs((r.sim_similar - r.sim_different) - r.separation) <= 0.002);
    }
}
