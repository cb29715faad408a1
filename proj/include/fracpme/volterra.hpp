#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fracpme/errors.hpp"
#include "fracpme/parallel.hpp"
#include "fracpme/spfun.hpp"

namespace fracpme::volterra {

/// Weakly singular kernel K(z,s) on 0 <= s <= z <= 1 together with its power
/// exponent gamma and the sandwich constants K- (z-s)^gamma <= K <= K+ (z-s)^gamma.
struct KernelSpec {
    double gamma = 0.0;
    double k_minus = 1.0;
    double k_plus = 1.0;
    std::function<double(double, double)> eval;
};

/// y^{m+1} = ∫₀^z K(z,s) y(s) ds with nonlinearity power m > 0.
struct VolterraProblem {
    double m = 1.0;
    KernelSpec kernel;
};

enum class Method { rectangle, trapezoid };

struct SolverConfig {
    int n_steps = 10;
    Method method = Method::trapezoid;
    spfun::QuadConfig quad;
    double newton_tol = 1e-12;  // relative residual tolerance for the v1 solve
};

/// Nodal values of the peeled unknown v and the reconstructed y = z^{(γ+1)/m} v.
struct GridSolution {
    int n_steps = 0;
    double gamma = 0.0;
    double m = 1.0;
    std::vector<double> v;
    std::vector<double> y;

    double z(int n) const { return static_cast<double>(n) / n_steps; }
};

/// v ≡ (K+ β(γ+1, (γ+1)/m + 1))^{1/m}, the exact solution for K = K+ (z-s)^γ.
inline double constant_solution(double k_plus, double gamma, double m) {
    if (!(k_plus > 0.0)) throw std::domain_error("constant_solution: requires k_plus > 0");
    if (gamma < 0.0 || !(m > 0.0)) throw std::domain_error("constant_solution: bad gamma or m");
    const double b = spfun::beta_fn(gamma + 1.0, (gamma + 1.0) / m + 1.0);
    return std::exp((std::log(k_plus) + std::log(b)) / m);
}

namespace detail {

inline double peel_power(const VolterraProblem& p) { return (p.kernel.gamma + 1.0) / p.m; }
inline double node_exponent(const VolterraProblem& p) {
    return (p.m + 1.0) * (p.kernel.gamma + 1.0) / p.m;
}

template <typename F>
double quad_with_context(const F& f, double lo, double hi, const spfun::QuadConfig& cfg,
                         int n, int i) {
    try {
        return spfun::adaptive_quad(f, lo, hi, cfg);
    } catch (const quad_error& e) {
        throw quad_error("weight integral (n=" + std::to_string(n) + ", i=" +
                             std::to_string(i) + "): " + e.what(),
                         e.estimate, e.error_bound);
    }
}

}  // namespace detail

/// Rectangle weights w_{n,i} = ∫_{z_i}^{z_{i+1}} K(z_n, s) s^{(γ+1)/m} ds, i < n.
inline std::vector<double> weights_rectangle(int n, const VolterraProblem& problem, int n_steps,
                                             const spfun::QuadConfig& quad) {
    if (n < 1 || n > n_steps) throw std::domain_error("weights_rectangle: n out of range");
    const double h = 1.0 / n_steps;
    const double zn = static_cast<double>(n) / n_steps;
    const double p = detail::peel_power(problem);
    const auto& K = problem.kernel.eval;
    std::vector<double> w(n);
    fracpme::detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const double a = i * h, b = (i + 1) * h;
        w[i] = detail::quad_with_context(
            [&](double s) { return K(zn, s) * std::pow(s, p); }, a, b, quad, n, static_cast<int>(i));
    });
    return w;
}

/// Trapezoid (linear-reconstruction) weights. For even n the unknown is
/// interpolated through the first two nodes of every panel [z_{2j}, z_{2j+2}];
/// for odd n a single panel [0, z_1] precedes panels [z_{2j-1}, z_{2j+1}].
/// Node z_n itself never receives a weight: the scheme stays explicit.
inline std::vector<double> weights_trapezoid(int n, const VolterraProblem& problem, int n_steps,
                                             const spfun::QuadConfig& quad) {
    if (n < 1 || n > n_steps) throw std::domain_error("weights_trapezoid: n out of range");
    const double h = 1.0 / n_steps;
    const double zn = static_cast<double>(n) / n_steps;
    const double p = detail::peel_power(problem);
    const auto& K = problem.kernel.eval;
    auto node = [&](int i) { return static_cast<double>(i) / n_steps; };

    std::vector<double> w(n, 0.0);
    if (n % 2 == 0) {
        const std::size_t panels = n / 2;
        fracpme::detail::parallel_for(panels, [&](std::size_t j) {
            const double za = node(2 * j), zb = node(2 * j + 2);
            w[2 * j] = detail::quad_with_context(
                [&](double s) { return K(zn, s) * std::pow(s, p) * (1.0 - (s - za) / h); }, za, zb,
                quad, n, static_cast<int>(2 * j));
            w[2 * j + 1] = detail::quad_with_context(
                [&](double s) { return K(zn, s) * std::pow(s, p) * ((s - za) / h); }, za, zb, quad,
                n, static_cast<int>(2 * j + 1));
        });
    } else {
        w[0] = detail::quad_with_context(
            [&](double s) { return K(zn, s) * std::pow(s, p) * (1.0 - s / h); }, 0.0, node(1), quad,
            n, 0);
        if (n >= 3) {
            w[1] = detail::quad_with_context(
                       [&](double s) { return K(zn, s) * std::pow(s, p) * (s / h); }, 0.0, node(1),
                       quad, n, 1) +
                   detail::quad_with_context(
                       [&](double s) {
                           return K(zn, s) * std::pow(s, p) * (1.0 - (s - node(1)) / h);
                       },
                       node(1), node(3), quad, n, 1);
            fracpme::detail::parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t k) {
                const int i = static_cast<int>(k) + 2;
                if (i % 2 == 0) {
                    const double za = node(i - 1), zb = node(i + 1);
                    w[i] = detail::quad_with_context(
                        [&](double s) { return K(zn, s) * std::pow(s, p) * ((s - za) / h); }, za,
                        zb, quad, n, i);
                } else {
                    const double za = node(i), zb = node(i + 2);
                    w[i] = detail::quad_with_context(
                        [&](double s) { return K(zn, s) * std::pow(s, p) * (1.0 - (s - za) / h); },
                        za, zb, quad, n, i);
                }
            });
        }
    }
    return w;
}

/// Starting value v₀ = (h^{−γ} ∫₀¹ K(h, hσ) σ^{(γ+1)/m} dσ)^{1/m}, evaluated at
/// the finite method step h.
inline double initial_v0(const VolterraProblem& problem, double h,
                         const spfun::QuadConfig& quad = {}) {
    if (!(h > 0.0)) throw std::domain_error("initial_v0: requires h > 0");
    const double p = detail::peel_power(problem);
    const auto& K = problem.kernel.eval;
    const double integral = spfun::adaptive_quad(
        [&](double sigma) { return K(h, h * sigma) * std::pow(sigma, p); }, 0.0, 1.0, quad);
    const double scaled = std::pow(h, -problem.kernel.gamma) * integral;
    if (!std::isfinite(scaled))
        throw numerical_error("initial_v0: nonfinite starting integral");
    if (scaled < 0.0) throw numerical_error("initial_v0: negative starting integral");
    if (scaled == 0.0) return 0.0;  // trivial solution; solve() rejects it
    return std::pow(scaled, 1.0 / problem.m);
}

/// Second starting value: positive root of
///   h^{(m+1)(γ+1)/m} v₁^{m+1} − (∫₀^h K(h,s)s^{(γ+1)/m}(s/h)ds) v₁
///     − (∫₀^h K(h,s)s^{(γ+1)/m}(1−s/h)ds) v₀ = 0,
/// solved by Newton seeded at v₀.
inline double initial_v1(const VolterraProblem& problem, double h, double v0,
                         const spfun::QuadConfig& quad = {}, double newton_tol = 1e-12) {
    if (!(h > 0.0)) throw std::domain_error("initial_v1: requires h > 0");
    if (!(v0 > 0.0))
        throw numerical_error("initial_v1: v0 = 0 would select the trivial solution");
    const double p = detail::peel_power(problem);
    const auto& K = problem.kernel.eval;
    const double a_coef = std::pow(h, detail::node_exponent(problem));
    const double b_coef = spfun::adaptive_quad(
        [&](double s) { return K(h, s) * std::pow(s, p) * (s / h); }, 0.0, h, quad);
    const double c_coef =
        spfun::adaptive_quad(
            [&](double s) { return K(h, s) * std::pow(s, p) * (1.0 - s / h); }, 0.0, h, quad) *
        v0;
    const double scale =
        a_coef * std::pow(v0, problem.m + 1.0) + b_coef * v0 + c_coef;
    return spfun::newton_root_power(a_coef, b_coef, c_coef, problem.m, v0,
                                    newton_tol * std::max(scale, 1e-300));
}

/// Runs the explicit product-integration scheme
///   vₙ^{m+1} = zₙ^{−(m+1)(γ+1)/m} Σ_{i<n} w_{n,i} v_i
/// and reconstructs y. Every vₙ must stay positive.
inline GridSolution solve(const VolterraProblem& problem, const SolverConfig& cfg) {
    if (cfg.n_steps < 2) throw std::domain_error("solve: requires n_steps >= 2");
    if (!(problem.m > 0.0)) throw std::domain_error("solve: requires m > 0");
    const int N = cfg.n_steps;
    const double h = 1.0 / N;
    const double m = problem.m;
    const double ex = detail::node_exponent(problem);
    const double p = detail::peel_power(problem);

    GridSolution sol;
    sol.n_steps = N;
    sol.gamma = problem.kernel.gamma;
    sol.m = m;
    sol.v.assign(N + 1, 0.0);

    sol.v[0] = initial_v0(problem, h, cfg.quad);
    if (sol.v[0] <= 0.0)
        throw collapse_error("solve: v0 = 0, collapse to trivial solution", 0);

    int first = 2;
    if (cfg.method == Method::trapezoid) {
        sol.v[1] = initial_v1(problem, h, sol.v[0], cfg.quad, cfg.newton_tol);
    } else {
        first = 1;
    }

    for (int n = first; n <= N; ++n) {
        const std::vector<double> w = cfg.method == Method::trapezoid
                                          ? weights_trapezoid(n, problem, N, cfg.quad)
                                          : weights_rectangle(n, problem, N, cfg.quad);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += w[i] * sol.v[i];
        if (!(sum > 0.0) || !std::isfinite(sum))
            throw collapse_error("solve: nonpositive bracket, collapse to trivial solution at n=" +
                                     std::to_string(n),
                                 n);
        const double zn = static_cast<double>(n) / N;
        // (m+1)-th root in log space; for very large m a direct pow underflows.
        sol.v[n] = std::exp((std::log(sum) - ex * std::log(zn)) / (m + 1.0));
    }

    sol.y.assign(N + 1, 0.0);
    for (int n = 1; n <= N; ++n)
        sol.y[n] = std::pow(static_cast<double>(n) / N, p) * sol.v[n];
    return sol;
}

}  // namespace fracpme::volterra
