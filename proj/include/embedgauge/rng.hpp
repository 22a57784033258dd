#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace embedgauge {

// splitmix64 finalizer over (seed, stream). Used to derive one independent
// engine seed per resample so the draw for index i never depends on which
// thread (or in what order) it was produced.
constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// FNV-1a, for deriving per-model streams from model ids.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Standard-normal deviates from a mt19937_64 stream. The transform is done
// here rather than with std::normal_distribution, whose algorithm differs
// between standard libraries.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform_open() noexcept {
        // 53 random bits, shifted into (0, 1).
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 2.0 * std::numbers::pi * uniform_open();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace embedgauge
