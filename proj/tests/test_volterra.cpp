#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fracpme/volterra.hpp"

using namespace fracpme;
using namespace fracpme::volterra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

KernelSpec power_kernel(double k_plus, double gamma) {
    KernelSpec k;
    k.gamma = gamma;
    k.k_minus = k_plus;
    k.k_plus = k_plus;
    k.eval = [k_plus, gamma](double z, double s) { return k_plus * std::pow(z - s, gamma); };
    return k;
}

KernelSpec sqrt_kernel() {
    // √(z-s)/(1+sin²s), the §4.2-style benchmark kernel
    KernelSpec k;
    k.gamma = 0.5;
    k.k_minus = 0.5;
    k.k_plus = 1.0;
    k.eval = [](double z, double s) {
        const double sn = std::sin(s);
        return std::sqrt(z - s) / (1.0 + sn * sn);
    };
    return k;
}

}  // namespace

TEST_CASE("constant_solution") {
    CHECK_THAT(constant_solution(1.0, 0.0, 1.0), WithinRel(0.5, 1e-13));
    CHECK_THAT(constant_solution(2.0, 0.0, 1.0), WithinRel(1.0, 1e-13));
    CHECK_THAT(constant_solution(1.0, 0.5, 2.0),
               WithinRel(0.5652469041013474865257360333, 1e-13));
}

TEST_CASE("weights_rectangle") {
    VolterraProblem prob{1.0, power_kernel(1.0, 0.0)};  // K ≡ 1, p = 1
    const int N = 8;
    auto w = weights_rectangle(5, prob, N, {});
    for (int i = 0; i < 5; ++i) {
        const double zi = i / 8.0, zj = (i + 1) / 8.0;
        CHECK_THAT(w[i], WithinAbs((zj * zj - zi * zi) / 2.0, 1e-13));
    }

    // m → large: integrand s^{(γ+1)/m} → 1, so w_i → h
    VolterraProblem big{1e7, power_kernel(1.0, 0.0)};
    auto wb = weights_rectangle(4, big, N, {});
    for (int i = 1; i < 4; ++i) CHECK_THAT(wb[i], WithinRel(1.0 / N, 1e-4));

    // frozen quadrature oracle: K=(z-s)^{1/2}, m=2, N=4, row n=4, i=1
    VolterraProblem sq{2.0, power_kernel(1.0, 0.5)};
    auto ws = weights_rectangle(4, sq, 4, {});
    CHECK_THAT(ws[1], WithinAbs(0.0934249321075858723772900324, 1e-12));
}

TEST_CASE("weights_trapezoid layouts") {
    VolterraProblem prob{1.0, power_kernel(1.0, 0.0)};  // K ≡ 1, p = 1
    const int N = 8;

    SECTION("n = 2: hats sum to the panel integral") {
        auto w = weights_trapezoid(2, prob, N, {});
        REQUIRE(w.size() == 2);
        const double z2 = 2.0 / N;
        CHECK_THAT(w[0] + w[1], WithinAbs(z2 * z2 / 2.0, 1e-13));
    }

    SECTION("n = 3: odd layout support") {
        auto w = weights_trapezoid(3, prob, N, {});
        REQUIRE(w.size() == 3);
        const double h = 1.0 / N;
        // w0 comes from [0, z1] only
        const double w0 = spfun::adaptive_quad(
            [&](double s) { return s * (1.0 - s / h); }, 0.0, h, {});
        CHECK_THAT(w[0], WithinAbs(w0, 1e-13));
        // w1 collects [0,z1] and [z1,z3]
        const double w1a = spfun::adaptive_quad([&](double s) { return s * (s / h); }, 0.0, h, {});
        const double w1b = spfun::adaptive_quad(
            [&](double s) { return s * (1.0 - (s - h) / h); }, h, 3.0 * h, {});
        CHECK_THAT(w[1], WithinAbs(w1a + w1b, 1e-13));
    }

    SECTION("partition of unity against the direct integral") {
        VolterraProblem sq{3.0, sqrt_kernel()};
        for (int n : {4, 5, 7, 8}) {
            auto w = weights_trapezoid(n, sq, N, {});
            double sum = 0.0;
            for (double wi : w) sum += wi;
            const double zn = static_cast<double>(n) / N;
            const double direct = spfun::adaptive_quad(
                [&](double s) { return sq.kernel.eval(zn, s) * std::pow(s, 0.5); }, 0.0, zn, {});
            CHECK_THAT(sum, WithinAbs(direct, 1e-11));
        }
    }

    SECTION("frozen oracle value w_{4,1}") {
        VolterraProblem sq{2.0, power_kernel(1.0, 0.5)};
        auto w = weights_trapezoid(4, sq, 4, {});
        CHECK_THAT(w[1], WithinAbs(0.1715447971382958531551787910, 1e-12));
    }
}

TEST_CASE("initial values") {
    SECTION("constant kernel makes v0 h-independent") {
        VolterraProblem prob{2.0, power_kernel(1.5, 0.7)};
        const double cs = constant_solution(1.5, 0.7, 2.0);
        CHECK_THAT(initial_v0(prob, 0.1), WithinRel(cs, 1e-11));
        CHECK_THAT(initial_v0(prob, 0.01), WithinRel(cs, 1e-11));
    }
    SECTION("zero kernel gives the trivial start") {
        VolterraProblem prob{1.0, power_kernel(1.0, 0.0)};
        prob.kernel.eval = [](double, double) { return 0.0; };
        CHECK(initial_v0(prob, 0.1) == 0.0);
    }
    SECTION("constant kernel: v1 equals v0") {
        VolterraProblem prob{3.0, power_kernel(2.0, 0.3)};
        const double v0 = initial_v0(prob, 0.05);
        CHECK_THAT(initial_v1(prob, 0.05, v0), WithinRel(v0, 1e-11));
    }
    SECTION("sqrt kernel starting pair, frozen oracle") {
        VolterraProblem prob{1.0, sqrt_kernel()};
        const double v0 = initial_v0(prob, 0.01);
        CHECK_THAT(v0, WithinRel(0.1963409512318428218920141377, 1e-10));
        CHECK_THAT(initial_v1(prob, 0.01, v0), WithinRel(0.1963409512318428218920141377, 1e-9));
    }
    SECTION("v0 = 0 is rejected") {
        VolterraProblem prob{1.0, power_kernel(1.0, 0.0)};
        CHECK_THROWS_AS(initial_v1(prob, 0.1, 0.0), numerical_error);
    }
}

TEST_CASE("solve reproduces the constant solution") {
    SECTION("gamma = 0, m = 1 is exact to rounding") {
        VolterraProblem prob{1.0, power_kernel(1.0, 0.0)};
        SolverConfig cfg;
        cfg.n_steps = 10;
        auto sol = solve(prob, cfg);
        for (double v : sol.v) CHECK_THAT(v, WithinAbs(0.5, 5e-15));
    }
    SECTION("fractional gamma") {
        VolterraProblem prob{2.0, power_kernel(1.0, 0.5)};
        SolverConfig cfg;
        cfg.n_steps = 10;
        auto sol = solve(prob, cfg);
        const double cs = constant_solution(1.0, 0.5, 2.0);
        for (double v : sol.v) CHECK_THAT(v, WithinAbs(cs, 1e-9));
        CHECK(sol.y[0] == 0.0);
        CHECK_THAT(sol.y.back(), WithinAbs(cs, 1e-9));
    }
}

TEST_CASE("solve is explicit: v_n determined by v_0..v_{n-1}") {
    VolterraProblem prob{2.0, sqrt_kernel()};
    SolverConfig cfg;
    cfg.n_steps = 12;
    auto sol = solve(prob, cfg);
    const int n = 12;
    auto w = weights_trapezoid(n, prob, cfg.n_steps, cfg.quad);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += w[i] * sol.v[i];
    const double ex = (prob.m + 1.0) * (prob.kernel.gamma + 1.0) / prob.m;
    const double vn = std::exp((std::log(sum) - ex * std::log(1.0)) / (prob.m + 1.0));
    CHECK_THAT(sol.v[n], WithinRel(vn, 1e-14));
}

TEST_CASE("solve self-converges at second order on the sqrt kernel") {
    VolterraProblem prob{5.0, sqrt_kernel()};
    auto terminal = [&](int n) {
        SolverConfig cfg;
        cfg.n_steps = n;
        return solve(prob, cfg).v.back();
    };
    const double ref = terminal(640);
    const double e40 = std::abs(terminal(40) - ref);
    const double e80 = std::abs(terminal(80) - ref);
    CHECK(e40 / e80 > 3.2);
    CHECK(e40 / e80 < 4.8);
}

TEST_CASE("naive lower-terminal rectangle is not exact for constants") {
    // Eq.-(50)-style weights w_{n,i} = h K(z_n, z_i) z_i^{(γ+1)/m} fail to keep
    // a constant profile constant once γ > 0.
    const double gamma = 1.0, m = 1.0, k_plus = 1.0;
    const int N = 10;
    const double h = 1.0 / N;
    const double C = std::pow(k_plus, 1.0 / m);  // value kept by steps n <= 2
    const double p = (gamma + 1.0) / m;
    const double ex = (m + 1.0) * (gamma + 1.0) / m;
    const int n = 3;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double zi = i * h, zn = n * h;
        sum += h * k_plus * std::pow(zn - zi, gamma) * std::pow(zi, p) * C;
    }
    const double v3 = std::pow(std::pow(n * h, -ex) * sum, 1.0 / (m + 1.0));
    CHECK(std::abs(v3 - C) > 1e-2);

    // while the product-integration rectangle rule (Eq. 56) stays exact
    VolterraProblem prob{m, power_kernel(k_plus, gamma)};
    SolverConfig cfg;
    cfg.n_steps = N;
    cfg.method = Method::rectangle;
    auto sol = solve(prob, cfg);
    for (double v : sol.v) CHECK_THAT(v, WithinAbs(constant_solution(k_plus, gamma, m), 1e-9));
}

TEST_CASE("zero kernel collapses to the trivial solution") {
    VolterraProblem prob{1.0, power_kernel(1.0, 0.0)};
    prob.kernel.eval = [](double, double) { return 0.0; };
    SolverConfig cfg;
    cfg.n_steps = 4;
    CHECK_THROWS_AS(solve(prob, cfg), collapse_error);
}
