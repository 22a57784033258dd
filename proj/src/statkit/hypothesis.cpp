#include <algorithm>
#include <cmath>
#include <numeric>

#include "embedgauge/errors.hpp"
#include "embedgauge/statkit.hpp"

namespace embedgauge::statkit {

std::string_view to_string(EffectBand b) noexcept {
    switch (b) {
    case EffectBand::negligible:
        return "negligible";
    case EffectBand::small:
        return "small";
    case EffectBand::medium:
        return "medium";
    case EffectBand::large:
        return "large";
    }
    return "unknown";
}

EffectBand effect_band(double d) noexcept {
    const double a = std::fabs(d);
    if (a >= 0.8) return EffectBand::large;
    if (a >= 0.5) return EffectBand::medium;
    if (a >= 0.2) return EffectBand::small;
    return EffectBand::negligible;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

void check_group(double sd, std::size_t n, std::size_t min_n, const char* which) {
    if (!(sd >= 0.0) || !std::isfinite(sd)) throw DomainError(std::string("negative or non-finite sd for ") + which);
    if (n < min_n) {
        throw DomainError(std::string("group ") + which + " needs at least " + std::to_string(min_n) +
                          " observations");
    }
}

}  // namespace

WelchResult welch_t(double mean_a, double sd_a, std::size_t n_a, double mean_b, double sd_b, std::size_t n_b) {
    check_group(sd_a, n_a, 2, "a");
    check_group(sd_b, n_b, 2, "b");
    if (sd_a == 0.0 && sd_b == 0.0) throw DegenerateVarianceError("Welch test with zero variance in both groups");

    const double va = sd_a * sd_a / static_cast<double>(n_a);
    const double vb = sd_b * sd_b / static_cast<double>(n_b);
    const double se2 = va + vb;

    WelchResult r;
    r.t = (mean_a - mean_b) / std::sqrt(se2);
    r.df = se2 * se2 / (va * va / static_cast<double>(n_a - 1) + vb * vb / static_cast<double>(n_b - 1));
    r.p = std::max(student_t_sf(r.t, r.df), p_floor);
    return r;
}

CohensD cohens_d(double mean_a, double sd_a, std::size_t n_a, double mean_b, double sd_b, std::size_t n_b) {
    check_group(sd_a, n_a, 1, "a");
    check_group(sd_b, n_b, 1, "b");
    if (n_a + n_b <= 2) throw DomainError("Cohen's d needs n_a + n_b > 2");

    const double pooled_var = (static_cast<double>(n_a - 1) * sd_a * sd_a + static_cast<double>(n_b - 1) * sd_b * sd_b) /
                              static_cast<double>(n_a + n_b - 2);
    if (!(pooled_var > 0.0)) throw DegenerateVarianceError("Cohen's d with zero pooled variance");

    CohensD out;
    out.sigma_pooled = std::sqrt(pooled_var);
    out.d = (mean_a - mean_b) / out.sigma_pooled;
    out.band = effect_band(out.d);
    return out;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-value outside [0,1]: " + std::to_string(p));
    }
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        const std::size_t i = order[rank];
        const double scaled = std::min(1.0, static_cast<double>(m - rank) * p_values[i]);
        running = std::max(running, scaled);
        adjusted[i] = running;
    }
    return adjusted;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("pearson over series of lengths " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    }
    const std::size_t n = x.size();
    if (n < 3) throw DomainError("pearson needs at least 3 observations");

    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateVarianceError("pearson over a constant series");

    CorrelationResult out;
    out.n = n;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    const double one_minus_r2 = 1.0 - out.r * out.r;
    if (one_minus_r2 <= 0.0) {
        out.p = p_floor;
    } else {
        const double t = out.r * std::sqrt(df / one_minus_r2);
        out.p = std::max(student_t_sf(t, df), p_floor);
    }
    return out;
}

}  // namespace embedgauge::statkit
