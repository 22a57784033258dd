#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "embedgauge/errors.hpp"
#include "embedgauge/tradeoff.hpp"

namespace embedgauge::tradeoff {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view to_string(ArchClass a) noexcept {
    return a == ArchClass::encoder_only ? "encoder_only" : "decoder_style";
}

std::optional<ArchClass> parse_arch_class(std::string_view text) {
    const auto s = lowercase(text);
    if (s == "encoder_only" || s == "encoder-only" || s == "encoder") return ArchClass::encoder_only;
    if (s == "decoder_style" || s == "decoder-style" || s == "decoder") return ArchClass::decoder_style;
    return std::nullopt;
}

void validate(const ModelProfile& p) {
    if (!(p.params_millions > 0.0)) throw ProfileError("parameter count must be positive", p.name);
    if (p.emb_dim < 1) throw ProfileError("embedding dimension must be at least 1", p.name);
    if (!(p.throughput_eps >= 0.0) || !std::isfinite(p.throughput_eps)) {
        throw ProfileError("throughput must be finite and non-negative", p.name);
    }
    if (!(p.memory_gb > 0.0) || !std::isfinite(p.memory_gb)) throw ProfileError("memory must be positive", p.name);
    if (!std::isfinite(p.separation)) throw ProfileError("separation must be finite", p.name);
}

double parse_param_count(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    double scale = 1.0;
    if (!s.empty()) {
        const char suffix = static_cast<char>(std::toupper(static_cast<unsigned char>(s.back())));
        if (suffix == 'M') {
            s.remove_suffix(1);
        } else if (suffix == 'B') {
            scale = 1000.0;
            s.remove_suffix(1);
        } else if (suffix == 'K') {
            scale = 1e-3;
            s.remove_suffix(1);
        }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !(value > 0.0)) {
        throw ParseError("unrecognized parameter count '" + std::string(text) + "'", std::string(text));
    }
    return value * scale;
}

std::string_view to_string(Tier t) noexcept {
    switch (t) {
    case Tier::low:
        return "low";
    case Tier::moderate:
        return "moderate";
    case Tier::high:
        return "high";
    }
    return "unknown";
}

Tier classify_tier(double separation, const TierBounds& bounds) noexcept {
    if (separation >= bounds.high) return Tier::high;
    if (separation >= bounds.moderate) return Tier::moderate;
    return Tier::low;
}

std::vector<ArchExtremes> best_worst_by_arch(std::span<const ModelProfile> profiles) {
    std::vector<ArchExtremes> out;
    for (ArchClass arch : {ArchClass::encoder_only, ArchClass::decoder_style}) {
        const ModelProfile* best = nullptr;
        const ModelProfile* worst = nullptr;
        for (const auto& p : profiles) {
            if (p.arch_class != arch) continue;
            if (best == nullptr || p.separation > best->separation) best = &p;
            if (worst == nullptr || p.separation < worst->separation) worst = &p;
        }
        if (best != nullptr) out.push_back({arch, best->name, worst->name});
    }
    return out;
}

double memory_efficiency(const ModelProfile& profile) {
    if (!(profile.memory_gb > 0.0)) throw ProfileError("memory efficiency needs memory_gb > 0", profile.name);
    return profile.throughput_eps / profile.memory_gb;
}

std::optional<Deployment> parse_deployment(std::string_view text) {
    const auto s = lowercase(text);
    if (s == "internal") return Deployment::internal;
    if (s == "embedding_service" || s == "embedding-service" || s == "service") return Deployment::embedding_service;
    return std::nullopt;
}

std::string_view to_string(Deployment d) noexcept {
    return d == Deployment::internal ? "internal" : "embedding_service";
}

LicenseGateResult license_gate(std::span<const ModelProfile> profiles, Deployment deployment) {
    LicenseGateResult out;
    for (const auto& p : profiles) {
        const auto& lic = p.license;
        if (!lic.commercial_ok) {
            out.flagged.push_back({p.name, lic.license_id + ": commercial use not permitted"});
        } else if (deployment == Deployment::embedding_service && lic.service_restricted) {
            out.flagged.push_back({p.name, lic.license_id + ": prohibits offering the model as an embedding service"});
        } else {
            out.allowed.push_back(p.name);
        }
    }
    return out;
}

}  // namespace embedgauge::tradeoff
