#include <algorithm>
#include <cmath>
#include <future>

#include "embedgauge/benchharness.hpp"
#include "embedgauge/errors.hpp"
#include "embedgauge/statkit.hpp"

namespace embedgauge::bench {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void BenchPlan::validate() const {
    if (timed_iters < 1) throw ConfigError("timed_iters must be at least 1");
    if (batch_sizes.empty()) throw ConfigError("batch_sizes must not be empty");
    for (std::size_t i = 0; i < batch_sizes.size(); ++i) {
        if (batch_sizes[i] < 1) throw ConfigError("batch sizes must be positive");
        if (i > 0 && batch_sizes[i] <= batch_sizes[i - 1]) throw ConfigError("batch sizes must be strictly increasing");
    }
    if (payload.empty()) throw ConfigError("bench payload is empty");
}

LatencyStats latency_stats(std::span<const double> samples_ms) {
    if (samples_ms.empty()) throw EmptySampleError("no latency samples");
    std::vector<double> sorted(samples_ms.begin(), samples_ms.end());
    std::sort(sorted.begin(), sorted.end());
    const auto summary = embedspace::summarize(embedspace::Category::similar, sorted);

    LatencyStats s;
    s.samples = sorted.size();
    s.mean_ms = summary.mean;
    s.sd_ms = summary.sd;
    s.p50_ms = statkit::quantile_sorted(sorted, 0.50);
    s.p95_ms = statkit::quantile_sorted(sorted, 0.95);
    return s;
}

void check_report(const BenchReport& report) {
    if (report.throughput_by_batch.empty()) throw ProtocolError("report has no throughput measurements");
    double best = 0.0;
    for (const auto& [b, tp] : report.throughput_by_batch) best = std::max(best, tp);
    if (best != report.best_throughput) throw ProtocolError("best_throughput is not the per-batch maximum");
}

namespace {

json latency_json(const LatencyStats& s) {
    return {{"mean_ms", s.mean_ms}, {"sd_ms", s.sd_ms}, {"p50_ms", s.p50_ms}, {"p95_ms", s.p95_ms},
            {"samples", s.samples}};
}

LatencyStats latency_from_json(const json& j) {
    LatencyStats s;
    s.mean_ms = j.at("mean_ms").get<double>();
    s.sd_ms = j.at("sd_ms").get<double>();
    s.p50_ms = j.at("p50_ms").get<double>();
    s.p95_ms = j.at("p95_ms").get<double>();
    s.samples = j.at("samples").get<std::size_t>();
    return s;
}

}  // namespace

json to_json(const BenchReport& r) {
    json tp = json::object();
    for (const auto& [b, v] : r.throughput_by_batch) tp[std::to_string(b)] = v;
    return {{"model_id", r.model_id},
            {"latency", latency_json(r.latency)},
            {"echo_overhead", latency_json(r.echo_overhead)},
            {"throughput_by_batch", tp},
            {"best_throughput", r.best_throughput},
            {"peak_memory_bytes", r.peak_memory_bytes},
            {"peak_memory_gb", r.peak_memory_gb},
            {"emb_dim", r.emb_dim},
            {"timing_note", r.timing_note}};
}

BenchReport bench_report_from_json(const json& j) {
    try {
        BenchReport r;
        r.model_id = j.at("model_id").get<std::string>();
        r.latency = latency_from_json(j.at("latency"));
        if (j.contains("echo_overhead")) r.echo_overhead = latency_from_json(j.at("echo_overhead"));
        for (const auto& [k, v] : j.at("throughput_by_batch").items()) {
            r.throughput_by_batch[std::stoul(k)] = v.get<double>();
        }
        r.best_throughput = j.at("best_throughput").get<double>();
        r.peak_memory_bytes = j.value("peak_memory_bytes", std::uint64_t{0});
        r.peak_memory_gb = j.at("peak_memory_gb").get<double>();
        r.emb_dim = j.at("emb_dim").get<std::uint32_t>();
        r.timing_note = j.value("timing_note", std::string{});
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bench report: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ParseError(std::string("bench report: ") + e.what());
    }
}

PayloadSampler::PayloadSampler(std::span<const std::string> payload, std::uint64_t seed)
    : payload_(payload), engine_(seed) {
    if (payload_.empty()) throw ConfigError("payload is empty");
}

const std::string& PayloadSampler::next() {
    std::uniform_int_distribution<std::size_t> pick(0, payload_.size() - 1);
    return payload_[pick(engine_)];
}

ProviderHandle::ProviderHandle(std::unique_ptr<ProviderProcess> process) : process_(std::move(process)) {}

ProviderHandle ProviderHandle::launch(const std::string& command, std::chrono::milliseconds timeout) {
    return ProviderHandle(std::make_unique<ProviderProcess>(command, timeout));
}

json ProviderHandle::call(const std::string& line) {
    const std::string reply = process_->round_trip(line);
    json j;
    try {
        j = json::parse(reply);
    } catch (const json::parse_error&) {
        throw ProtocolError("malformed provider response", reply.substr(0, 120));
    }
    if (!j.is_object() || !j.contains("ok") || !j["ok"].is_boolean()) {
        throw ProtocolError("provider response lacks boolean 'ok'", reply.substr(0, 120));
    }
    if (!j["ok"].get<bool>()) {
        const auto err = j.contains("error") && j["error"].is_string() ? j["error"].get<std::string>() : "unspecified";
        throw ProtocolError("provider reported an error: " + err);
    }
    return j;
}

void ProviderHandle::handshake() {
    const json j = call(R"({"cmd":"hello"})");
    if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<std::int64_t>() < 1) {
        throw ProtocolError("hello response lacks a positive integer 'dim'");
    }
    dim_ = j["dim"].get<std::uint32_t>();
    model_id_ = j.contains("model_id") && j["model_id"].is_string() ? j["model_id"].get<std::string>() : "unknown";
}

std::string ProviderHandle::encode_request(std::span<const std::string> texts) {
    json req = {{"cmd", "encode"}, {"texts", json::array()}};
    for (const auto& t : texts) req["texts"].push_back(t);
    return req.dump();
}

void ProviderHandle::check_vectors(const json& response, std::size_t expected) const {
    if (!response.contains("vectors") || !response["vectors"].is_array()) {
        throw ProtocolError("encode response lacks 'vectors'");
    }
    const auto& vecs = response["vectors"];
    if (vecs.size() != expected) {
        throw ProtocolError("encode returned " + std::to_string(vecs.size()) + " vectors for " +
                            std::to_string(expected) + " texts");
    }
    for (const auto& v : vecs) {
        if (!v.is_array()) throw ProtocolError("vector is not an array");
        if (v.size() != dim_) {
            throw ProtocolError("dimension drift: got " + std::to_string(v.size()) + ", handshake declared " +
                                std::to_string(dim_));
        }
        for (const auto& x : v) {
            if (!x.is_number()) throw ProtocolError("vector component is not a number");
        }
    }
}

std::vector<std::vector<float>> ProviderHandle::encode(std::span<const std::string> texts) {
    if (!ready()) throw ProtocolError("encode before handshake");
    const json j = call(encode_request(texts));
    check_vectors(j, texts.size());
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& v : j["vectors"]) out.push_back(v.get<std::vector<float>>());
    return out;
}

void ProviderHandle::encode_raw(const std::string& request_line, std::size_t expected) {
    check_vectors(call(request_line), expected);
}

void ProviderHandle::echo() { call(R"({"cmd":"echo"})"); }

std::uint64_t ProviderHandle::status() {
    const json j = call(R"({"cmd":"status"})");
    if (!j.contains("peak_mem_bytes") || !j["peak_mem_bytes"].is_number_integer() ||
        j["peak_mem_bytes"].get<std::int64_t>() < 0) {
        throw ProtocolError("status response lacks a non-negative integer 'peak_mem_bytes'");
    }
    return j["peak_mem_bytes"].get<std::uint64_t>();
}

void ProviderHandle::shutdown() { call(R"({"cmd":"shutdown"})"); }

namespace {

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

BenchReport run_bench(const BenchPlan& plan, ProviderHandle& provider, BenchRunInfo* info) {
    plan.validate();
    if (!provider.ready()) provider.handshake();

    BenchRunInfo local;
    BenchRunInfo& trace = info != nullptr ? *info : local;
    trace = {};

    const auto record_status = [&] {
        const std::uint64_t peak = provider.status();
        if (!trace.status_trace.empty() && peak < trace.status_trace.back()) {
            throw ProtocolError("provider peak memory decreased mid-run");
        }
        trace.status_trace.push_back(peak);
    };

    PayloadSampler sampler(plan.payload, plan.seed);
    const auto single_request = [&] {
        const std::string text = sampler.next();
        return ProviderHandle::encode_request(std::span<const std::string>(&text, 1));
    };

    record_status();
    for (std::size_t i = 0; i < plan.warmup_iters; ++i) provider.encode_raw(single_request(), 1);

    trace.latency_samples_ms.reserve(plan.timed_iters);
    for (std::size_t i = 0; i < plan.timed_iters; ++i) {
        const std::string req = single_request();
        const auto t0 = Clock::now();
        provider.encode_raw(req, 1);
        const auto t1 = Clock::now();
        trace.latency_samples_ms.push_back(elapsed_ms(t0, t1));
    }

    std::vector<double> echo_ms;
    echo_ms.reserve(plan.timed_iters);
    for (std::size_t i = 0; i < plan.timed_iters; ++i) {
        const auto t0 = Clock::now();
        provider.echo();
        echo_ms.push_back(elapsed_ms(t0, Clock::now()));
    }
    record_status();

    BenchReport report;
    report.model_id = provider.model_id();
    report.emb_dim = provider.dim();
    report.latency = latency_stats(trace.latency_samples_ms);
    report.echo_overhead = latency_stats(echo_ms);

    for (std::size_t b : plan.batch_sizes) {
        // First batch of each size is untimed; request bodies are built before
        // the clock starts.
        std::vector<std::string> requests;
        requests.reserve(plan.timed_iters + 1);
        for (std::size_t k = 0; k < plan.timed_iters + 1; ++k) {
            std::vector<std::string> texts;
            texts.reserve(b);
            for (std::size_t t = 0; t < b; ++t) texts.push_back(sampler.next());
            requests.push_back(ProviderHandle::encode_request(texts));
        }
        provider.encode_raw(requests.front(), b);
        const auto t0 = Clock::now();
        for (std::size_t k = 1; k < requests.size(); ++k) provider.encode_raw(requests[k], b);
        const double seconds = elapsed_ms(t0, Clock::now()) / 1000.0;
        report.throughput_by_batch[b] = static_cast<double>(b * plan.timed_iters) / seconds;
        record_status();
    }

    for (const auto& [b, tp] : report.throughput_by_batch) report.best_throughput = std::max(report.best_throughput, tp);
    report.peak_memory_bytes = trace.status_trace.back();
    report.peak_memory_gb = static_cast<double>(report.peak_memory_bytes) / 1e9;
    report.timing_note =
        "end-to-end wall clock at the harness (includes serialization and tokenization); first batch per size "
        "excluded; subtract echo_overhead for protocol cost";
    check_report(report);
    return report;
}

std::vector<BenchReport> run_bench_many(const BenchPlan& plan, std::span<const std::string> commands) {
    std::vector<std::future<BenchReport>> jobs;
    jobs.reserve(commands.size());
    for (const auto& cmd : commands) {
        jobs.push_back(std::async(std::launch::async, [&plan, cmd] {
            auto provider = ProviderHandle::launch(cmd);
            provider.handshake();
            BenchReport r = run_bench(plan, provider);
            provider.shutdown();
            return r;
        }));
    }
    std::vector<BenchReport> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace embedgauge::bench
