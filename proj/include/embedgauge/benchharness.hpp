#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace embedgauge::bench {

struct BenchPlan {
    std::size_t warmup_iters = 10;
    std::size_t timed_iters = 100;
    std::vector<std::size_t> batch_sizes{1, 4, 16, 32};
    std::vector<std::string> payload;
    std::uint64_t seed = 0;

    void validate() const;  // ConfigError on a violated invariant
};

struct LatencyStats {
    double mean_ms = 0.0;
    double sd_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    std::size_t samples = 0;
};

/// Mean, sample sd and interpolated percentiles. Throws EmptySampleError.
LatencyStats latency_stats(std::span<const double> samples_ms);

struct BenchReport {
    std::string model_id;
    LatencyStats latency;
    LatencyStats echo_overhead;  // protocol round-trip with no model work
    std::map<std::size_t, double> throughput_by_batch;
    double best_throughput = 0.0;
    std::uint64_t peak_memory_bytes = 0;
    double peak_memory_gb = 0.0;  // decimal GB
    std::uint32_t emb_dim = 0;
    std::string timing_note;
};

// Throws ProtocolError if best_throughput is not the per-batch maximum.
void check_report(const BenchReport& report);

nlohmann::json to_json(const BenchReport& report);
BenchReport bench_report_from_json(const nlohmann::json& j);  // ParseError on bad shape

// Texts drawn with replacement from the plan payload; the sequence depends
// only on (payload, seed).
class PayloadSampler {
  public:
    PayloadSampler(std::span<const std::string> payload, std::uint64_t seed);
    const std::string& next();

  private:
    std::span<const std::string> payload_;
    std::mt19937_64 engine_;
};

// A provider child process. Built from a shell command line; spoken to over
// its stdin/stdout one JSON object per line.
class ProviderProcess {
  public:
    explicit ProviderProcess(const std::string& command, std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~ProviderProcess();
    ProviderProcess(const ProviderProcess&) = delete;
    ProviderProcess& operator=(const ProviderProcess&) = delete;

    // Sends one line, returns one line (without the newline). Throws
    // ProviderDiedError on EOF / broken pipe and ProtocolError on timeout.
    std::string round_trip(const std::string& line);

    // True while the child has not been reaped.
    bool running();
    int pid() const noexcept { return pid_; }

  private:
    void write_all(const std::string& data);
    std::string read_line();
    void reap(bool force);

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::chrono::milliseconds timeout_;
    bool reaped_ = false;
};

// Typed wrapper over the wire protocol.
class ProviderHandle {
  public:
    explicit ProviderHandle(std::unique_ptr<ProviderProcess> process);
    static ProviderHandle launch(const std::string& command,
                                 std::chrono::milliseconds timeout = std::chrono::seconds(60));

    // hello: records model id and dimension.
    void handshake();
    bool ready() const noexcept { return dim_ > 0; }
    const std::string& model_id() const noexcept { return model_id_; }
    std::uint32_t dim() const noexcept { return dim_; }

    std::vector<std::vector<float>> encode(std::span<const std::string> texts);
    // Pre-serialized encode request; used inside timed loops.
    void encode_raw(const std::string& request_line, std::size_t expected);
    void echo();
    std::uint64_t status();
    void shutdown();

    static std::string encode_request(std::span<const std::string> texts);

  private:
    nlohmann::json call(const std::string& line);
    void check_vectors(const nlohmann::json& response, std::size_t expected) const;

    std::unique_ptr<ProviderProcess> process_;
    std::string model_id_;
    std::uint32_t dim_ = 0;
};

struct BenchRunInfo {
    std::vector<std::uint64_t> status_trace;  // every status reading, in order
    std::vector<double> latency_samples_ms;
};

/// Runs the full plan: warmup, single-sample latency, echo overhead, and a
/// batch-size sweep. The first batch of each size is untimed. The partial
/// report is discarded if the provider dies.
BenchReport run_bench(const BenchPlan& plan, ProviderHandle& provider, BenchRunInfo* info = nullptr);

// One provider process per command, benchmarked concurrently.
std::vector<BenchReport> run_bench_many(const BenchPlan& plan, std::span<const std::string> commands);

}  // namespace embedgauge::bench
