#include <doctest.h>

#include <cmath>
#include <random>

#include "embedgauge/errors.hpp"
#include "embedgauge/statkit.hpp"
#include "oracles/oracles.hpp"

using namespace embedgauge;
using namespace embedgauge::statkit;
using embedspace::Category;

namespace {

CategoryStats stats(Category c, double mean, double sd, std::size_t n = 50) { return {c, mean, sd, n}; }

}  // namespace

TEST_CASE("incomplete beta boundaries and closed forms") {
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.5) == doctest::Approx(0.6875).epsilon(1e-14));
    for (double x = 0.05; x < 1.0; x += 0.05) {
        CHECK(regularized_incomplete_beta(2.0, 3.0, x) == doctest::Approx(oracle::incbeta_2_3(x)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(regularized_incomplete_beta(1.0, -1.0, 0.5), DomainError);
    CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("student t two-sided tail") {
    CHECK(student_t_sf(0.0, 3.0) == doctest::Approx(1.0));
    CHECK(student_t_sf(0.0, 250.0) == doctest::Approx(1.0));
    CHECK(student_t_sf(1.0, 1.0) == doctest::Approx(2.0 * (1.0 - (0.5 + std::atan(1.0) / M_PI))).epsilon(1e-13));
    CHECK(student_t_sf(1.457, 8.0) == doctest::Approx(0.183).epsilon(0.005));
    CHECK(student_t_sf(-1.457, 8.0) == student_t_sf(1.457, 8.0));
    CHECK_THROWS_AS(student_t_sf(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(student_t_sf(1.0, -2.0), DomainError);
}

TEST_CASE("welch t") {
    const auto same = welch_t(0.4, 0.1, 20, 0.4, 0.1, 20);
    CHECK(same.t == 0.0);
    CHECK(same.p == doctest::Approx(1.0));

    const auto w = welch_t(0.510, 0.15, 50, 0.386, 0.18, 50);
    CHECK(w.t == doctest::Approx(3.743).epsilon(2e-4));
    CHECK(w.df == doctest::Approx(94.9).epsilon(1e-3));
    const auto o = oracle::welch(0.510, 0.15, 50, 0.386, 0.18, 50);
    CHECK(w.p == doctest::Approx(o.p).epsilon(1e-8));
    CHECK(w.p > 2.5e-4);
    CHECK(w.p < 3.5e-4);

    CHECK_THROWS_AS(welch_t(0.5, 0.0, 10, 0.3, 0.0, 10), DegenerateVarianceError);
    CHECK_THROWS_AS(welch_t(0.5, -0.1, 10, 0.3, 0.1, 10), DomainError);
    CHECK_THROWS_AS(welch_t(0.5, 0.1, 1, 0.3, 0.1, 10), DomainError);
}

TEST_CASE("welch p floors instead of reaching zero") {
    const auto w = welch_t(1.0, 1e-6, 50, -1.0, 1e-6, 50);
    CHECK(w.p >= p_floor);
    CHECK(w.p > 0.0);
}

TEST_CASE("welch p decreases in |t| at fixed df") {
    double prev = 1.1;
    for (double diff = 0.0; diff < 0.3; diff += 0.01) {
        const auto w = welch_t(0.4 + diff, 0.1, 30, 0.4, 0.1, 30);
        CHECK(w.p > 0.0);
        CHECK(w.p <= 1.0);
        CHECK(w.p <= prev);
        prev = w.p;
    }
}

TEST_CASE("cohen's d") {
    CHECK(cohens_d(0.4, 0.1, 20, 0.4, 0.2, 20).d == 0.0);
    const auto d = cohens_d(0.510, 0.15, 50, 0.386, 0.18, 50);
    CHECK(d.sigma_pooled == doctest::Approx(std::sqrt((49 * 0.0225 + 49 * 0.0324) / 98.0)).epsilon(1e-14));
    CHECK(d.sigma_pooled == doctest::Approx(0.16568).epsilon(1e-4));
    CHECK(d.d == doctest::Approx(0.748).epsilon(1e-3));
    CHECK(d.band == EffectBand::medium);
    CHECK_THROWS_AS(cohens_d(0.5, 0.0, 10, 0.3, 0.0, 10), DegenerateVarianceError);
}

TEST_CASE("effect bands") {
    CHECK(effect_band(0.0) == EffectBand::negligible);
    CHECK(effect_band(0.19) == EffectBand::negligible);
    CHECK(effect_band(0.2) == EffectBand::small);
    CHECK(effect_band(-0.5) == EffectBand::medium);
    CHECK(effect_band(0.79) == EffectBand::medium);
    CHECK(effect_band(0.8) == EffectBand::large);
    CHECK(effect_band(1.28) == EffectBand::large);
}

TEST_CASE("cohen's d is location invariant") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1), s(0.01, 0.5);
    for (int i = 0; i < 100; ++i) {
        const double ma = u(rng), mb = u(rng), sa = s(rng), sb = s(rng), shift = u(rng);
        const auto a = cohens_d(ma, sa, 30, mb, sb, 40);
        const auto b = cohens_d(ma + shift, sa, 30, mb + shift, sb, 40);
        CHECK(a.d == doctest::Approx(b.d).epsilon(1e-9));
        CHECK(a.sigma_pooled == b.sigma_pooled);
    }
}

TEST_CASE("holm adjustment") {
    CHECK(holm_adjust(std::vector<double>{0.04}) == std::vector<double>{0.04});
    const auto h = holm_adjust(std::vector<double>{0.01, 0.04, 0.02});
    REQUIRE(h.size() == 3);
    CHECK(h[0] == doctest::Approx(0.03));
    CHECK(h[1] == doctest::Approx(0.04));
    CHECK(h[2] == doctest::Approx(0.04));
    CHECK(holm_adjust(std::vector<double>{1.0, 1.0, 1.0}) == std::vector<double>(3, 1.0));
    CHECK(holm_adjust(std::vector<double>{}).empty());
    CHECK_THROWS_AS(holm_adjust(std::vector<double>{0.5, 1.5}), DomainError);
    CHECK_THROWS_AS(holm_adjust(std::vector<double>{-0.1}), DomainError);
    CHECK_THROWS_AS(holm_adjust(std::vector<double>{NAN}), DomainError);
}

TEST_CASE("pearson") {
    std::vector<double> x{1, 2, 3, 4, 5, 9};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    CHECK(pearson(x, y).r == doctest::Approx(1.0));
    CHECK(pearson(x, y).p >= p_floor);

    const std::vector<double> sep{0.510, 0.455, 0.446, 0.386, 0.327, 0.313, 0.283, 0.250, 0.209, -0.175};
    const std::vector<double> dim{1024, 2304, 2560, 768, 896, 1024, 1024, 384, 1024, 768};
    const std::vector<double> params{340, 2500, 4000, 109, 494, 335, 335, 33, 568, 137};
    const auto rd = pearson(sep, dim);
    CHECK(rd.r == doctest::Approx(0.458).epsilon(0.005 / 0.458));
    CHECK(std::fabs(rd.p - 0.183) < 0.01);
    CHECK(rd.n == 10);
    const auto rp = pearson(sep, params);
    CHECK(std::fabs(rp.r - 0.416) < 0.005);
    CHECK(std::fabs(rp.p - 0.232) < 0.01);

    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), DimensionError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateVarianceError);
}

TEST_CASE("quantile interpolates order statistics") {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(quantile_sorted(v, 0.5) == doctest::Approx(50.5));
    CHECK(quantile_sorted(v, 0.95) == doctest::Approx(95.05));
    CHECK(quantile_sorted(v, 0.0) == 1.0);
    CHECK(quantile_sorted(v, 1.0) == 100.0);
    CHECK_THROWS_AS(quantile_sorted(std::vector<double>{}, 0.5), DomainError);
    CHECK_THROWS_AS(quantile_sorted(v, 1.2), DomainError);
}

TEST_CASE("bootstrap with zero variance collapses to the mean difference") {
    BootstrapConfig cfg;
    cfg.resamples = 500;
    const auto r = bootstrap_separation_ci(stats(Category::similar, 0.772, 0.0), stats(Category::different, 0.263, 0.0), cfg);
    CHECK(r.lo == r.hi);
    CHECK(r.point == r.analytic);
    CHECK(r.width == 0.0);
    CHECK(r.lo == doctest::Approx(0.509).epsilon(1e-12));
}

TEST_CASE("bootstrap width matches normal theory") {
    BootstrapConfig cfg;
    cfg.seed = 11;
    const auto r = bootstrap_separation_ci(stats(Category::similar, 0.772, 0.10), stats(Category::different, 0.263, 0.10), cfg);
    const double expected = 2.0 * 1.96 * std::sqrt(2.0 * 0.01 / 50.0);
    CHECK(std::fabs(r.width - expected) < 0.01);
    CHECK(r.lo < r.analytic);
    CHECK(r.hi > r.analytic);
    CHECK(std::fabs(r.point - r.analytic) < 0.005);
}

TEST_CASE("bootstrap determinism and confidence widening") {
    BootstrapConfig cfg;
    cfg.seed = 2024;
    cfg.resamples = 2000;
    const auto sim = stats(Category::similar, 0.7, 0.12);
    const auto dif = stats(Category::different, 0.3, 0.09);
    const auto a = bootstrap_separation_ci(sim, dif, cfg, ExecPolicy::serial);
    const auto b = bootstrap_separation_ci(sim, dif, cfg, ExecPolicy::parallel);
    const auto c = bootstrap_separation_ci(sim, dif, cfg, ExecPolicy::serial);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.point == b.point);
    CHECK(a.lo == c.lo);
    CHECK(a.hi == c.hi);

    cfg.confidence = 0.99;
    const auto wide = bootstrap_separation_ci(sim, dif, cfg);
    CHECK(wide.width > a.width);
    CHECK(wide.lo <= a.lo);
    CHECK(wide.hi >= a.hi);
}

TEST_CASE("bootstrap config is validated") {
    BootstrapConfig cfg;
    cfg.resamples = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.resamples = 10;
    cfg.confidence = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.confidence = 0.95;
    CHECK_THROWS_AS(bootstrap_separation_ci(stats(Category::similar, 0.5, -1.0), stats(Category::different, 0.3, 0.1), cfg),
                    DomainError);
}

TEST_CASE("synthetic draw i depends only on seed and index") {
    const auto sim = stats(Category::similar, 0.7, 0.1);
    const auto dif = stats(Category::different, 0.3, 0.1);
    const auto ten = synthetic_separations(sim, dif, 50, 99, 10, ExecPolicy::serial);
    const auto hundred = synthetic_separations(sim, dif, 50, 99, 100, ExecPolicy::parallel);
    for (std::size_t i = 0; i < ten.size(); ++i) CHECK(ten[i] == hundred[i]);
    const auto other = synthetic_separations(sim, dif, 50, 100, 10, ExecPolicy::serial);
    CHECK(other != ten);
}

TEST_CASE("pairwise suite over ten models") {
    const std::vector<double> sim{0.772, 0.812, 0.812, 0.674, 0.643, 0.778, 0.752, 0.696, 0.713, 0.210};
    const std::vector<double> dif{0.263, 0.357, 0.366, 0.288, 0.316, 0.465, 0.469, 0.446, 0.504, 0.386};
    std::vector<ModelSummary> models;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        models.push_back({"m" + std::to_string(i), stats(Category::similar, sim[i], 0.12),
                          stats(Category::different, dif[i], 0.14)});
    }
    BootstrapConfig cfg;
    cfg.seed = 7;
    const auto cmp = pairwise_comparisons(models, cfg);
    REQUIRE(cmp.size() == 45);
    CHECK(cmp.front().model_a == "m0");
    CHECK(cmp.front().model_b == "m1");
    CHECK(cmp.back().model_a == "m8");
    CHECK(cmp.back().model_b == "m9");
    std::vector<double> raw;
    for (const auto& c : cmp) {
        raw.push_back(c.p);
        CHECK(c.p_holm >= c.p);
        CHECK(c.p > 0.0);
        CHECK(c.p_holm <= 1.0);
        CHECK(c.df > 0.0);
        CHECK(c.band == effect_band(c.d));
    }
    const auto expected = oracle::holm(raw);
    for (std::size_t k = 0; k < cmp.size(); ++k) CHECK(cmp[k].p_holm == doctest::Approx(expected[k]).epsilon(1e-15));

    const auto again = pairwise_comparisons(models, cfg, 50, ExecPolicy::serial);
    for (std::size_t k = 0; k < cmp.size(); ++k) {
        CHECK(again[k].t == cmp[k].t);
        CHECK(again[k].p_holm == cmp[k].p_holm);
    }
}

TEST_CASE("model seeds differ per model and per run seed") {
    CHECK(model_seed(7, "a") != model_seed(7, "b"));
    CHECK(model_seed(7, "a") != model_seed(8, "a"));
    CHECK(model_seed(7, "a") == model_seed(7, "a"));
}
