#include "embedgauge/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "embedgauge/errors.hpp"

#ifndef EMBEDGAUGE_FIXTURES_DIR
#define EMBEDGAUGE_FIXTURES_DIR "fixtures"
#endif

namespace embedgauge::io {

using embedspace::Category;
using embedspace::EmbeddingCollection;
using embedspace::SentencePair;

// ---------------------------------------------------------------------------
// Files

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'", path.string());
    return std::move(ss).str();
}

void write_file(const fs::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'", path.string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'", path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + path.string() + "'", path.string());
}

// ---------------------------------------------------------------------------
// CSV

CsvTable parse_csv(std::string_view text, const std::string& source) {
    CsvTable table;
    std::vector<CsvRow> rows;
    std::vector<std::size_t> lines;

    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const std::size_t row_line = line;
        // Comment or blank line.
        if (text[i] == '#' || text[i] == '\n' || (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n')) {
            while (i < n && text[i] != '\n') ++i;
            ++i;
            ++line;
            continue;
        }
        CsvRow row;
        std::string field;
        bool in_quotes = false;
        bool was_quoted = false;
        for (;;) {
            if (i >= n) {
                if (in_quotes) throw ParseError("unterminated quoted field", source + ":" + std::to_string(row_line));
                row.push_back(std::move(field));
                break;
            }
            const char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                continue;
            }
            if (c == '"') {
                if (!field.empty() || was_quoted) {
                    throw ParseError("quote inside unquoted field", source + ":" + std::to_string(line));
                }
                in_quotes = true;
                was_quoted = true;
                ++i;
            } else if (c == ',') {
                row.push_back(std::move(field));
                field.clear();
                was_quoted = false;
                ++i;
            } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
                row.push_back(std::move(field));
                i += 2;
                ++line;
                break;
            } else if (c == '\n') {
                row.push_back(std::move(field));
                ++i;
                ++line;
                break;
            } else {
                if (was_quoted) throw ParseError("text after closing quote", source + ":" + std::to_string(line));
                field.push_back(c);
                ++i;
            }
        }
        rows.push_back(std::move(row));
        lines.push_back(row_line);
    }

    if (rows.empty()) throw ParseError("missing CSV header", source + ":1");
    table.header = std::move(rows.front());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != table.header.size()) {
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(rows[r].size()),
                             source + ":" + std::to_string(lines[r]));
        }
        table.rows.push_back(std::move(rows[r]));
        table.line_numbers.push_back(lines[r]);
    }
    return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path), path.string()); }

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos && (field.empty() || field.front() != '#')) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_line(std::span<const std::string> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

namespace {

double parse_number(std::string_view s, const std::string& locus) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("not a number: '" + std::string(s) + "'", locus);
    }
    if (!std::isfinite(v)) throw DataError("non-finite value", locus);
    return v;
}

std::uint64_t parse_count(std::string_view s, const std::string& locus) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("not a non-negative integer: '" + std::string(s) + "'", locus);
    }
    return v;
}

// Column index by header name; throws ParseError naming the missing column.
class Columns {
  public:
    Columns(const CsvTable& t, std::string source) : source_(std::move(source)) {
        for (std::size_t i = 0; i < t.header.size(); ++i) index_[t.header[i]] = i;
    }
    std::size_t operator[](const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ParseError("missing column '" + name + "'", source_ + ":1");
        return it->second;
    }

  private:
    std::string source_;
    std::map<std::string, std::size_t> index_;
};

std::string locus_of(const std::string& source, const CsvTable& t, std::size_t r) {
    return source + ":" + std::to_string(t.line_numbers[r]);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairs

std::vector<SentencePair> parse_pairs(std::string_view text, const std::string& source) {
    std::vector<SentencePair> pairs;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        const std::string locus = source + ":" + std::to_string(line_no);

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw ParseError("invalid JSON", locus);
        }
        const auto field = [&](const char* name) {
            if (!j.is_object() || !j.contains(name) || !j[name].is_string()) {
                throw ParseError(std::string("missing or non-string field '") + name + "'", locus);
            }
            return j[name].get<std::string>();
        };
        SentencePair p;
        p.id = field("id");
        p.text_a = field("text_a");
        p.text_b = field("text_b");
        const std::string cat = field("category");
        const auto parsed = embedspace::parse_category(cat);
        if (!parsed) throw ParseError("unknown category '" + cat + "'", locus);
        p.category = *parsed;
        if (p.id.empty()) throw ParseError("empty pair id", locus);
        if (p.category != Category::negation && p.text_a == p.text_b) {
            throw ParseError("text_a equals text_b in a " + std::string(embedspace::to_string(p.category)) + " pair",
                             locus);
        }
        if (!seen.insert(p.id).second) throw DuplicateIdError("duplicate pair id '" + p.id + "'", locus);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<SentencePair> load_pairs(const fs::path& path) { return parse_pairs(read_file(path), path.string()); }

// ---------------------------------------------------------------------------
// Embeddings

namespace {

class ByteReader {
  public:
    ByteReader(std::span<const std::uint8_t> bytes, const std::string& source) : bytes_(bytes), source_(source) {}

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) | (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    std::string str(std::size_t len, const char* what) {
        need(len, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    std::string locus() const { return source_ + "@" + std::to_string(pos_); }

  private:
    void need(std::size_t n, const char* what) {
        if (remaining() < n) throw FormatError(std::string("truncated file while reading ") + what, locus());
    }
    std::span<const std::uint8_t> bytes_;
    const std::string& source_;
    std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

}  // namespace

EmbeddingCollection parse_embeddings(std::span<const std::uint8_t> bytes, const std::string& source) {
    ByteReader in(bytes, source);
    if (in.str(4, "magic") != embedding_magic) throw FormatError("bad magic (expected EMB1)", source + "@0");
    const std::uint32_t count = in.u32("record count");
    const std::uint32_t dim = in.u32("dimension");
    if (count > 0 && dim == 0) throw FormatError("zero dimension with non-empty collection", source + "@8");
    // Each record needs at least an id length and dim floats.
    const std::uint64_t min_record = 4 + 4 * static_cast<std::uint64_t>(dim);
    if (count > 0 && static_cast<std::uint64_t>(count) * min_record > in.remaining()) {
        throw FormatError("declared " + std::to_string(count) + " records of dimension " + std::to_string(dim) +
                              " exceed the " + std::to_string(in.remaining()) + " remaining bytes",
                          source + "@4");
    }

    EmbeddingCollection coll(dim);
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::string at = in.locus();
        const std::uint32_t id_len = in.u32("id length");
        embedspace::EmbeddingRecord rec;
        rec.id = in.str(id_len, "id");
        rec.vector.resize(dim);
        for (std::uint32_t k = 0; k < dim; ++k) {
            rec.vector[k] = in.f32("vector component");
            if (!std::isfinite(rec.vector[k])) throw DataError("non-finite float in record '" + rec.id + "'", at);
        }
        try {
            coll.add(std::move(rec));
        } catch (const DuplicateIdError& e) {
            throw DuplicateIdError(e.what(), at);
        }
    }
    if (in.remaining() != 0) {
        throw FormatError(std::to_string(in.remaining()) + " trailing bytes after last record", in.locus());
    }
    return coll;
}

EmbeddingCollection load_embeddings(const fs::path& path) {
    const std::string data = read_file(path);
    return parse_embeddings(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()), path.string());
}

std::vector<std::uint8_t> serialize_embeddings(const EmbeddingCollection& collection) {
    std::vector<std::uint8_t> out(embedding_magic.begin(), embedding_magic.end());
    put_u32(out, static_cast<std::uint32_t>(collection.size()));
    put_u32(out, static_cast<std::uint32_t>(collection.dim()));
    for (const auto& rec : collection.records()) {
        put_u32(out, static_cast<std::uint32_t>(rec.id.size()));
        out.insert(out.end(), rec.id.begin(), rec.id.end());
        for (float x : rec.vector) put_u32(out, std::bit_cast<std::uint32_t>(x));
    }
    return out;
}

void save_embeddings(const fs::path& path, const EmbeddingCollection& collection) {
    const auto bytes = serialize_embeddings(collection);
    write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

// ---------------------------------------------------------------------------
// Summary records

std::vector<SummaryRecord> parse_summaries(std::string_view text, const std::string& source) {
    const CsvTable t = parse_csv(text, source);
    const Columns col(t, source);
    const std::size_t c_model = col["model_id"], c_cat = col["category"], c_mean = col["mean"], c_sd = col["sd"],
                      c_n = col["n"];
    std::vector<SummaryRecord> out;
    std::set<std::pair<std::string, Category>> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string locus = locus_of(source, t, r);
        SummaryRecord s;
        s.model_id = row[c_model];
        if (s.model_id.empty()) throw ParseError("empty model_id", locus);
        const auto cat = embedspace::parse_category(row[c_cat]);
        if (!cat) throw ParseError("unknown category '" + row[c_cat] + "'", locus);
        s.category = *cat;
        s.mean = parse_number(row[c_mean], locus);
        s.sd = parse_number(row[c_sd], locus);
        s.n = parse_count(row[c_n], locus);
        if (s.mean < -1.0 || s.mean > 1.0) throw DataError("mean outside [-1,1]", locus);
        if (s.sd < 0.0) throw DataError("negative sd", locus);
        if (s.n < 1) throw DataError("n must be positive", locus);
        if (!seen.emplace(s.model_id, s.category).second) {
            throw DuplicateIdError("duplicate (model, category) record for '" + s.model_id + "'", locus);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SummaryRecord> load_summaries(const fs::path& path) {
    return parse_summaries(read_file(path), path.string());
}

std::string format_summaries(std::span<const SummaryRecord> records) {
    std::string out = "model_id,category,mean,sd,n\n";
    for (const auto& r : records) {
        const std::string fields[] = {r.model_id, std::string(embedspace::to_string(r.category)),
                                      nlohmann::json(r.mean).dump(), nlohmann::json(r.sd).dump(), std::to_string(r.n)};
        out += csv_line(fields);
    }
    return out;
}

std::vector<statkit::ModelSummary> to_model_summaries(std::span<const SummaryRecord> records) {
    std::vector<statkit::ModelSummary> out;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::set<Category>> have;
    for (const auto& r : records) {
        auto [it, inserted] = index.emplace(r.model_id, out.size());
        if (inserted) {
            statkit::ModelSummary m;
            m.model_id = r.model_id;
            out.push_back(std::move(m));
        }
        auto& m = out[it->second];
        const embedspace::CategoryStats cs{r.category, r.mean, r.sd, r.n};
        if (r.category == Category::similar) m.similar = cs;
        if (r.category == Category::different) m.different = cs;
        have[r.model_id].insert(r.category);
    }
    for (const auto& m : out) {
        for (Category c : {Category::similar, Category::different}) {
            if (!have[m.model_id].contains(c)) {
                throw MissingCategoryError("model '" + m.model_id + "' has no " + std::string(embedspace::to_string(c)) +
                                               " summary",
                                           m.model_id);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixtures

std::vector<SeparationRow> load_separation_table(const fs::path& path) {
    const std::string src = path.string();
    const CsvTable t = read_csv(path);
    const Columns col(t, src);
    std::vector<SeparationRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string locus = locus_of(src, t, r);
        SeparationRow s;
        s.model = row[col["model"]];
        s.params_text = row[col["params"]];
        try {
            s.params_millions = tradeoff::parse_param_count(s.params_text);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), locus);
        }
        s.sim_similar = parse_number(row[col["sim_similar"]], locus);
        s.sim_different = parse_number(row[col["sim_different"]], locus);
        s.separation = parse_number(row[col["separation"]], locus);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ThroughputRow> load_throughput_table(const fs::path& path) {
    const std::string src = path.string();
    const CsvTable t = read_csv(path);
    const Columns col(t, src);
    std::vector<ThroughputRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string locus = locus_of(src, t, r);
        ThroughputRow s;
        s.model = row[col["model"]];
        s.throughput_eps = parse_number(row[col["throughput_eps"]], locus);
        s.memory_gb = parse_number(row[col["memory_gb"]], locus);
        s.emb_dim = static_cast<std::uint32_t>(parse_count(row[col["emb_dim"]], locus));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<GainRow> load_gain_table(const fs::path& path) {
    const std::string src = path.string();
    const CsvTable t = read_csv(path);
    const Columns col(t, src);
    std::vector<GainRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string locus = locus_of(src, t, r);
        GainRow g;
        g.model = row[col["model"]];
        g.zero_shot = parse_number(row[col["zero_shot"]], locus);
        g.adapted = parse_number(row[col["adapted"]], locus);
        g.absolute_gain = parse_number(row[col["absolute_gain"]], locus);
        g.relative_pct = parse_number(row[col["relative_pct"]], locus);
        out.push_back(std::move(g));
    }
    return out;
}

namespace {

bool parse_flag(const std::string& text, const std::string& locus, std::initializer_list<const char*> yes,
                std::initializer_list<const char*> no) {
    const std::string s = lower(text);
    for (const char* y : yes) {
        if (s == y) return true;
    }
    for (const char* n : no) {
        if (s == n) return false;
    }
    throw ParseError("unrecognized value '" + text + "'", locus);
}

}  // namespace

std::vector<std::pair<std::string, tradeoff::LicenseInfo>> load_license_table(const fs::path& path) {
    const std::string src = path.string();
    const CsvTable t = read_csv(path);
    const Columns col(t, src);
    std::vector<std::pair<std::string, tradeoff::LicenseInfo>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string locus = locus_of(src, t, r);
        tradeoff::LicenseInfo lic;
        lic.license_id = row[col["license"]];
        lic.commercial_ok = parse_flag(row[col["commercial"]], locus, {"yes", "yes-restricted", "true"}, {"no", "false"});
        lic.attribution_required = parse_flag(row[col["attribution"]], locus, {"required", "yes", "true"},
                                              {"none", "no", "false"});
        lic.service_restricted = parse_flag(row[col["restrictions"]], locus, {"service"}, {"none"});
        out.emplace_back(row[col["model"]], std::move(lic));
    }
    return out;
}

std::vector<std::pair<std::string, tradeoff::ArchClass>> load_architecture_table(const fs::path& path) {
    const std::string src = path.string();
    const CsvTable t = read_csv(path);
    const Columns col(t, src);
    std::vector<std::pair<std::string, tradeoff::ArchClass>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto arch = tradeoff::parse_arch_class(row[col["arch_class"]]);
        if (!arch) throw ParseError("unknown arch_class '" + row[col["arch_class"]] + "'", locus_of(src, t, r));
        out.emplace_back(row[col["model"]], *arch);
    }
    return out;
}

std::vector<tradeoff::AblationCell> load_ablation_grid(const fs::path& path) {
    const std::string src = path.string();
    const CsvTable t = read_csv(path);
    const Columns col(t, src);
    std::vector<tradeoff::AblationCell> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string locus = locus_of(src, t, r);
        tradeoff::AblationCell c;
        std::string frac_text = row[col["data_fraction"]];
        if (!frac_text.empty() && frac_text.back() == '%') frac_text.pop_back();
        const auto frac = tradeoff::parse_fraction(static_cast<int>(parse_count(frac_text, locus)));
        const auto loss = tradeoff::parse_loss(row[col["loss"]]);
        const auto rank = tradeoff::parse_rank(static_cast<int>(parse_count(row[col["rank"]], locus)));
        if (!frac) throw ParseError("data_fraction must be 25, 50 or 100", locus);
        if (!loss) throw ParseError("loss must be infonce or triplet", locus);
        if (!rank) throw ParseError("rank must be 8, 16 or 32", locus);
        c.data_fraction = *frac;
        c.loss = *loss;
        c.rank = *rank;
        c.separation = parse_number(row[col["separation"]], locus);
        out.push_back(c);
    }
    return out;
}

FixtureBundle load_fixture_bundle(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("fixtures directory '" + dir.string() + "' does not exist", dir.string());
    FixtureBundle b;
    b.separation = load_separation_table(dir / "table1_separation.csv");
    b.throughput = load_throughput_table(dir / "table2_throughput.csv");
    b.gains = load_gain_table(dir / "table3_zero_shot.csv");
    b.licenses = load_license_table(dir / "table4_licenses.csv");
    b.ablation = load_ablation_grid(dir / "table5_ablation.csv");
    b.architectures = load_architecture_table(dir / "architectures.csv");
    return b;
}

std::vector<tradeoff::ModelProfile> FixtureBundle::profiles() const {
    const auto find = [](const auto& rows, const std::string& model, const char* table) -> const auto& {
        for (const auto& r : rows) {
            if constexpr (requires { r.model; }) {
                if (r.model == model) return r;
            } else {
                if (r.first == model) return r;
            }
        }
        throw DataError("model '" + model + "' missing from " + table, model);
    };
    std::vector<tradeoff::ModelProfile> out;
    for (const auto& s : separation) {
        tradeoff::ModelProfile p;
        p.name = s.model;
        p.params_millions = s.params_millions;
        p.separation = s.separation;
        const auto& tp = find(throughput, s.model, "throughput table");
        p.throughput_eps = tp.throughput_eps;
        p.memory_gb = tp.memory_gb;
        p.emb_dim = tp.emb_dim;
        if (!gains.empty()) p.zero_shot_separation = find(gains, s.model, "gain table").zero_shot;
        p.license = find(licenses, s.model, "license table").second;
        p.arch_class = find(architectures, s.model, "architecture table").second;
        tradeoff::validate(p);
        out.push_back(std::move(p));
    }
    return out;
}

fs::path default_fixtures_dir() { return fs::path(EMBEDGAUGE_FIXTURES_DIR); }

}  // namespace embedgauge::io
