#include "embedgauge/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "embedgauge/errors.hpp"

namespace embedgauge::statkit {

namespace {

// Continued fraction for I_x(a,b) * B(a,b) / (x^a (1-x)^b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 20000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) return h;
    }
    return h;
}

// I_x(a,b) given both x and y = 1 - x, so callers holding an accurate small
// y (e.g. t^2/(df+t^2)) do not lose it to cancellation.
double incbeta(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    // log1p(-x) loses accuracy when x is near 1; use log(y) there.
    const double log_front_y =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
    const double front = std::exp(x > 0.5 ? log_front_y : log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("incomplete beta requires a, b > 0 (got a=" + std::to_string(a) +
                          ", b=" + std::to_string(b) + ")");
    }
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires 0 <= x <= 1");
    return incbeta(a, b, x, 1.0 - x);
}

double student_t_sf(double t, double df) {
    if (!(df > 0.0) || !std::isfinite(df)) throw DomainError("Student t requires df > 0");
    if (std::isnan(t)) throw DomainError("Student t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    const double t2 = t * t;
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    return incbeta(df / 2.0, 0.5, x, y);
}

}  // namespace embedgauge::statkit
