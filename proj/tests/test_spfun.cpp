#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fracpme/spfun.hpp"

using namespace fracpme;
using namespace fracpme::spfun;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gamma_fn basic values") {
    CHECK(gamma_fn(1.0) == 1.0);
    CHECK_THAT(gamma_fn(0.5), WithinRel(std::sqrt(std::numbers::pi), 1e-13));
    // high-precision oracle (Spouge/series, 30 digits)
    CHECK_THAT(gamma_fn(3.25), WithinRel(2.5492569667185292818262630002, 1e-13));
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("beta_fn basic values") {
    CHECK_THAT(beta_fn(1.0, 2.0), WithinRel(0.5, 1e-13));
    CHECK_THAT(beta_fn(1.0, 1.0), WithinRel(1.0, 1e-13));
    // quadrature oracle for ∫₀¹ t^{1/2}(1-t)^{3/4} dt
    CHECK_THAT(beta_fn(1.5, 1.75), WithinRel(0.3195040625961579219839793313, 1e-13));
    CHECK_THROWS_AS(beta_fn(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(beta_fn(1.0, -2.0), std::domain_error);
}

TEST_CASE("inc_beta values and monotonicity") {
    for (double z : {0.0, 0.25, 0.5, 0.9, 1.0})
        CHECK_THAT(inc_beta(1.0, 1.0, z), WithinAbs(z, 1e-14));
    CHECK_THAT(inc_beta(2.0, 1.0, 0.5), WithinRel(0.125, 1e-13));
    // reflection identity Γ(0.3)Γ(0.7) = π / sin(0.3π)
    CHECK_THAT(inc_beta(0.3, 0.7, 1.0),
               WithinRel(std::numbers::pi / std::sin(0.3 * std::numbers::pi), 1e-13));
    CHECK_THROWS_AS(inc_beta(0.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(inc_beta(1.0, 1.0, 1.5), std::domain_error);

    for (double a : {0.3, 1.0, 2.0, 5.0}) {
        for (double b : {0.3, 1.0, 2.0, 5.0}) {
            double prev = 0.0;
            for (int i = 0; i <= 50; ++i) {
                const double z = i / 50.0;
                const double val = inc_beta(a, b, z);
                CHECK(val >= prev - 1e-14);
                prev = val;
            }
            CHECK_THAT(inc_beta(a, b, 1.0) - beta_fn(a, b), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("adaptive_quad smooth and singular integrands") {
    QuadConfig cfg;
    CHECK_THAT(adaptive_quad([](double s) { return std::sqrt(s); }, 0.0, 1.0, cfg),
               WithinAbs(2.0 / 3.0, 1e-12));
    // integrable endpoint singularity
    CHECK_THAT(adaptive_quad([](double s) { return 1.0 / std::sqrt(1.0 - s); }, 0.0, 1.0, cfg),
               WithinAbs(2.0, 1e-10));
    // ∫₀¹ (1-s)^{-1/2} s^{1/4} ds = β(5/4, 1/2)
    CHECK_THAT(adaptive_quad([](double s) { return std::pow(1.0 - s, -0.5) * std::pow(s, 0.25); },
                             0.0, 1.0, cfg),
               WithinAbs(1.7480383695280798736432263933, 1e-10));
    CHECK(adaptive_quad([](double s) { return s; }, 0.3, 0.3, cfg) == 0.0);
}

TEST_CASE("adaptive_quad exact on low-degree polynomials") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::array<double, 7> c;
        for (auto& ci : c) ci = coef(rng);
        auto poly = [&](double s) {
            double acc = 0.0;
            for (int k = 6; k >= 0; --k) acc = acc * s + c[k];
            return acc;
        };
        double exact = 0.0;
        for (int k = 0; k <= 6; ++k) exact += c[k] / (k + 1.0);
        CHECK_THAT(adaptive_quad(poly, 0.0, 1.0), WithinAbs(exact, 1e-12));
    }
}

TEST_CASE("adaptive_quad reports tolerance failure with best estimate") {
    QuadConfig cfg;
    cfg.abs_tol = 1e-15;
    cfg.rel_tol = 0.0;
    cfg.max_subdivisions = 4;
    try {
        adaptive_quad([](double s) { return std::pow(1.0 - s, -0.9); }, 0.0, 1.0, cfg);
        FAIL("expected quad_error");
    } catch (const quad_error& e) {
        CHECK(std::isfinite(e.estimate));
        CHECK(e.error_bound > cfg.abs_tol);
    }
}

TEST_CASE("newton_root_power") {
    CHECK_THAT(newton_root_power(1.0, 0.0, 1.0, 1.0, 0.5, 1e-14), WithinAbs(1.0, 1e-12));
    CHECK_THAT(newton_root_power(1.0, 2.0, 4.0, 2.0, 1.0, 1e-12), WithinAbs(2.0, 1e-10));
    CHECK_THROWS_AS(newton_root_power(1.0, 0.0, 0.0, 2.0, 1.0, 1e-12), std::domain_error);

    // residual contract against a bisection oracle
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.1, 4.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double a = dist(rng), b = dist(rng), c = dist(rng), m = dist(rng);
        const double x = newton_root_power(a, b, c, m, 1.0, 1e-12);
        const double res = a * std::pow(x, m + 1.0) - b * x - c;
        CHECK(std::abs(res) <= 1e-12);

        double lo = 1e-9, hi = 1e9;
        auto f = [&](double t) { return a * std::pow(t, m + 1.0) - b * t - c; };
        REQUIRE(f(lo) < 0.0);
        REQUIRE(f(hi) > 0.0);
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        CHECK_THAT(x, WithinRel(0.5 * (lo + hi), 1e-6));
    }
}
