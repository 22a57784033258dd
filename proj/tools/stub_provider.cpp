// Deterministic embedding provider for exercising the bench harness without
// any model stack. Vectors are a hash of the text; every encode request
// sleeps for a fixed delay.

#include <chrono>
#include <fstream>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "embedgauge/rng.hpp"

using nlohmann::json;

namespace {

std::vector<float> stub_vector(const std::string& text, int dim) {
    std::vector<float> v(static_cast<std::size_t>(dim));
    const std::uint64_t h = embedgauge::fnv1a(text);
    for (int i = 0; i < dim; ++i) {
        const std::uint64_t bits = embedgauge::mix64(h, static_cast<std::uint64_t>(i));
        v[static_cast<std::size_t>(i)] = static_cast<float>(static_cast<double>(bits >> 11) * 0x1.0p-53 * 2.0 - 1.0);
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic stub embedding provider"};
    int dim = 16;
    double delay_ms = 0.0;
    std::string model_id = "stub";
    std::uint64_t base_mem = 100'000'000;
    std::uint64_t mem_per_text = 1'000'000;
    long die_after = -1;
    long drift_after = -1;
    long garbage_after = -1;
    long shrink_after = -1;
    std::string log_path;
    app.add_option("--dim", dim, "Embedding dimension")->check(CLI::PositiveNumber);
    app.add_option("--delay-ms", delay_ms, "Sleep per encode request");
    app.add_option("--model-id", model_id);
    app.add_option("--base-mem", base_mem, "Reported peak memory floor (bytes)");
    app.add_option("--mem-per-text", mem_per_text, "Extra bytes per text in the largest batch seen");
    app.add_option("--die-after", die_after, "Exit without replying after N encode requests");
    app.add_option("--drift-after", drift_after, "Return dim+1 vectors after N encode requests");
    app.add_option("--garbage-after", garbage_after, "Reply with non-JSON after N encode requests");
    app.add_option("--shrink-after", shrink_after, "Report decreasing peak memory after N status requests");
    app.add_option("--log", log_path, "Append every request line to this file");
    CLI11_PARSE(app, argc, argv);

    std::ofstream log;
    if (!log_path.empty()) log.open(log_path, std::ios::app);

    std::ios::sync_with_stdio(false);
    std::uint64_t peak = base_mem;
    long encodes = 0;
    long statuses = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (log.is_open()) log << line << '\n' << std::flush;
        json reply;
        try {
            const json req = json::parse(line);
            const std::string cmd = req.at("cmd").get<std::string>();
            if (cmd == "hello") {
                reply = {{"ok", true}, {"model_id", model_id}, {"dim", dim}};
            } else if (cmd == "encode") {
                if (die_after >= 0 && encodes >= die_after) return 3;
                if (garbage_after >= 0 && encodes >= garbage_after) {
                    std::cout << "not json at all" << std::endl;
                    ++encodes;
                    continue;
                }
                const int out_dim = drift_after >= 0 && encodes >= drift_after ? dim + 1 : dim;
                ++encodes;
                if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
                json vectors = json::array();
                const auto& texts = req.at("texts");
                for (const auto& t : texts) vectors.push_back(stub_vector(t.get<std::string>(), out_dim));
                peak = std::max<std::uint64_t>(peak, base_mem + mem_per_text * texts.size());
                reply = {{"ok", true}, {"vectors", vectors}};
            } else if (cmd == "echo") {
                reply = {{"ok", true}};
            } else if (cmd == "status") {
                ++statuses;
                const bool shrink = shrink_after >= 0 && statuses > shrink_after;
                reply = {{"ok", true}, {"peak_mem_bytes", shrink ? peak / 2 : peak}};
            } else if (cmd == "shutdown") {
                std::cout << json{{"ok", true}}.dump() << std::endl;
                return 0;
            } else {
                reply = {{"ok", false}, {"error", "unknown command: " + cmd}};
            }
        } catch (const std::exception& e) {
            reply = {{"ok", false}, {"error", e.what()}};
        }
        std::cout << reply.dump() << std::endl;
    }
    return 0;
}
