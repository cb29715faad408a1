#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fracpme/errors.hpp"
#include "fracpme/parallel.hpp"
#include "fracpme/spfun.hpp"
#include "fracpme/volterra.hpp"

namespace fracpme::diffusion {

enum class BoundaryCondition { dirichlet, neumann, robin };

inline const char* to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::dirichlet: return "dirichlet";
        case BoundaryCondition::neumann: return "neumann";
        case BoundaryCondition::robin: return "robin";
    }
    return "?";
}

/// Similarity exponents and kernel constants for u(x,t) = t^a U(x t^{-b}).
/// Consistency: 2b − m·a = α and A = 1 − α + a, B = b.
struct SelfSimilarParams {
    double alpha = 0.5;
    double m = 2.0;
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    double a = 0.0;
    double b = 0.25;
    double A = 0.5;
    double B = 0.25;
    double gamma = 0.5;  // kernel exponent 1 - alpha

    // alpha value used inside kernel formulas; keeps Γ(1−α) finite in the
    // classical limit α = 1.
    double alpha_eff() const { return std::min(alpha, 1.0 - 1e-12); }
};

/// Wetting front η* and the scaling constant C = (η*)^{2/m}.
struct FrontResult {
    double eta_star = 0.0;
    double c_scale = 0.0;
    double y_at_1 = 0.0;
    double deriv_used = 0.0;
};

/// Solution sandwich constants: C± for y, U± (Dirichlet) for u.
struct SolutionBounds {
    double c_minus = 0.0;
    double c_plus = 0.0;
    double u_minus = 0.0;              // Dirichlet only, else 0
    double u_plus = 0.0;               // Dirichlet only, else 0
    bool y_sandwich_ok = false;        // nodal check with 5% slack
    std::string diagnostic;
};

/// Table-row constants for the requested boundary condition.
///
/// The Neumann A follows the derivation A = 1 − α + a; the literal printed
/// table value 1 − (m+1)/(m+2) is available behind the switch.
inline SelfSimilarParams params_from_bc(double alpha, double m, BoundaryCondition bc,
                                        bool printed_neumann_A = false) {
    if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("params_from_bc: alpha in (0,1]");
    if (!(m > 1.0)) throw std::domain_error("params_from_bc: requires m > 1");
    SelfSimilarParams p;
    p.alpha = alpha;
    p.m = m;
    p.bc = bc;
    switch (bc) {
        case BoundaryCondition::dirichlet:
            p.a = 0.0;
            p.b = alpha / 2.0;
            break;
        case BoundaryCondition::neumann:
            p.a = alpha / (m + 2.0);
            p.b = (m + 1.0) * alpha / (m + 2.0);
            break;
        case BoundaryCondition::robin:
            p.a = alpha / m;
            p.b = alpha;
            break;
    }
    p.A = 1.0 - alpha + p.a;
    if (bc == BoundaryCondition::neumann && printed_neumann_A)
        p.A = 1.0 - (m + 1.0) / (m + 2.0);
    p.B = p.b;
    p.gamma = 1.0 - alpha;
    return p;
}

/// Kernel by direct quadrature:
///   K(z,u) = (m+1)/Γ(1−α) ∫_{((1−z)/(1−u))^{1/b}}^{1}
///              [B(1−σ) + (A+B)(z−σ)] (1−s)^{−α} s^{a+b} ds,  σ = 1 − s^b(1−u).
inline double kernel_direct(double z, double u, const SelfSimilarParams& p,
                            const spfun::QuadConfig& quad = {}) {
    if (u < 0.0 || z > 1.0 || u > z) throw std::domain_error("kernel_direct: needs 0 <= u <= z <= 1");
    if (u >= z) return 0.0;
    const double al = p.alpha_eff();
    if (1.0 - u <= 0.0) return 0.0;
    const double lo = std::pow((1.0 - z) / (1.0 - u), 1.0 / p.b);
    // substitution q = (1-s)^{1-α} absorbs the endpoint singularity:
    //   ∫_lo^1 G(s)(1-s)^{-α} ds = (1-α)^{-1} ∫_0^{(1-lo)^{1-α}} G(1-q^{1/(1-α)}) dq
    const double e = 1.0 - al;
    const double q_hi = std::pow(1.0 - lo, e);
    const double integral = spfun::adaptive_quad(
        [&](double q) {
            const double s = 1.0 - std::pow(q, 1.0 / e);
            const double sigma = 1.0 - std::pow(s, p.b) * (1.0 - u);
            const double f = p.B * (1.0 - sigma) + (p.A + p.B) * (z - sigma);
            return f * std::pow(s, p.a + p.b);
        },
        0.0, q_hi, quad) / e;
    return (p.m + 1.0) / spfun::gamma_fn(1.0 - al) * integral;
}

/// Same kernel through incomplete beta functions, with
/// w = ((1−z)/(1−u))^{1/b}:
///   K(z,u) = (m+1)/Γ(1−α) [ B(1−u) β(1−α, a+2b+1, 1−w)
///          + (A+B)((1−u) β(1−α, a+2b+1, 1−w) − (1−z) β(1−α, a+b+1, 1−w)) ].
inline double kernel_incbeta(double z, double u, const SelfSimilarParams& p) {
    if (u < 0.0 || z > 1.0 || u > z) throw std::domain_error("kernel_incbeta: needs 0 <= u <= z <= 1");
    if (u >= z) return 0.0;
    const double al = p.alpha_eff();
    const double one_minus_u = 1.0 - u;
    if (one_minus_u <= 0.0) return 0.0;
    const double w = std::pow((1.0 - z) / one_minus_u, 1.0 / p.b);
    const double x = 1.0 - w;
    if (x <= 0.0) return 0.0;
    const double b1 = spfun::inc_beta(1.0 - al, p.a + 2.0 * p.b + 1.0, x);
    const double b2 = spfun::inc_beta(1.0 - al, p.a + p.b + 1.0, x);
    const double val = p.B * one_minus_u * b1 +
                       (p.A + p.B) * (one_minus_u * b1 - (1.0 - z) * b2);
    return (p.m + 1.0) / spfun::gamma_fn(1.0 - al) * std::max(val, 0.0);
}

/// Empirical sandwich constants: min and max of K(z,u)/(z−u)^γ over the
/// sampled simplex {0 <= u < z <= 1}, skipping z−u < 1/grid_n².
template <typename Kernel>
std::pair<double, double> kernel_bounds_empirical(const Kernel& kernel, double gamma,
                                                  int grid_n) {
    if (grid_n < 16) throw std::domain_error("kernel_bounds_empirical: grid_n >= 16");
    const double cut = 1.0 / (static_cast<double>(grid_n) * grid_n);
    std::vector<double> row_min(grid_n, std::numeric_limits<double>::infinity());
    std::vector<double> row_max(grid_n, -std::numeric_limits<double>::infinity());
    fracpme::detail::parallel_for(static_cast<std::size_t>(grid_n), [&](std::size_t k) {
        const int i = static_cast<int>(k) + 1;
        const double z = static_cast<double>(i) / grid_n;
        for (int j = 0; j < grid_n; ++j) {
            const double u = z * j / grid_n;
            if (z - u < cut) continue;
            const double r = kernel(z, u) / std::pow(z - u, gamma);
            row_min[k] = std::min(row_min[k], r);
            row_max[k] = std::max(row_max[k], r);
        }
    });
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid_n; ++k) {
        lo = std::min(lo, row_min[k]);
        hi = std::max(hi, row_max[k]);
    }
    return {lo, hi};
}

inline std::pair<double, double> kernel_bounds_empirical(const SelfSimilarParams& p, int grid_n) {
    return kernel_bounds_empirical(
        [&](double z, double u) { return kernel_incbeta(z, u, p); }, 1.0 - p.alpha, grid_n);
}

/// Packages the diffusion kernel as a general Volterra problem with
/// γ = 1 − α and empirical sandwich constants.
inline volterra::VolterraProblem build_problem(const SelfSimilarParams& p,
                                               const spfun::QuadConfig& quad = {},
                                               int bounds_grid = 64) {
    (void)quad;  // kernel_incbeta needs no quadrature; kept for the fallback path
    volterra::VolterraProblem problem;
    problem.m = p.m;
    problem.kernel.gamma = 1.0 - p.alpha;
    auto [lo, hi] = kernel_bounds_empirical(p, bounds_grid);
    problem.kernel.k_minus = lo;
    problem.kernel.k_plus = hi;
    problem.kernel.eval = [p](double z, double u) { return kernel_incbeta(z, u, p); };
    return problem;
}

namespace detail {

// Second-order one-sided 3-point derivative at the last node.
inline double one_sided_derivative(double f0, double f1, double f2, double h) {
    // nodes z_N, z_{N-1}, z_{N-2}
    return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
}

}  // namespace detail

/// Wetting front from the solved profile:
///   Dirichlet: η* = y(1)^{−m/2},
///   Neumann:   η* = ((m+1)/(y^{m+1})'(1))^{m/(m+2)},
///   Robin:     η* = m/(y^m)'(1).
/// Boundary derivatives use second-order one-sided differences at z = 1.
inline FrontResult wetting_front(const volterra::GridSolution& sol, const SelfSimilarParams& p) {
    const int N = sol.n_steps;
    if (N < 4) throw std::domain_error("wetting_front: requires N >= 4");
    const double h = 1.0 / N;
    const double m = p.m;
    auto y_pow = [&](int n, double q) {
        // y_n^q in log space; safe for very large m
        return std::exp(q * std::log(sol.y[n]));
    };

    FrontResult fr;
    fr.y_at_1 = sol.y[N];
    switch (p.bc) {
        case BoundaryCondition::dirichlet: {
            fr.deriv_used = 0.0;
            fr.eta_star = std::exp(-0.5 * m * std::log(sol.y[N]));
            break;
        }
        case BoundaryCondition::neumann: {
            const double d = detail::one_sided_derivative(
                y_pow(N, m + 1.0), y_pow(N - 1, m + 1.0), y_pow(N - 2, m + 1.0), h);
            if (!(d > 0.0)) throw front_error("wetting_front: nonpositive (y^{m+1})'(1)");
            fr.deriv_used = d;
            fr.eta_star = std::pow((m + 1.0) / d, m / (m + 2.0));
            break;
        }
        case BoundaryCondition::robin: {
            const double d = detail::one_sided_derivative(y_pow(N, m), y_pow(N - 1, m),
                                                          y_pow(N - 2, m), h);
            if (!(d > 0.0)) throw front_error("wetting_front: nonpositive (y^m)'(1)");
            fr.deriv_used = d;
            fr.eta_star = m / d;
            break;
        }
    }
    if (!(fr.eta_star > 0.0) || !std::isfinite(fr.eta_star))
        throw front_error("wetting_front: front undefined");
    fr.c_scale = std::pow(fr.eta_star, 2.0 / m);
    return fr;
}

/// Physical solution u(x,t) = (η*)^{2/m} t^a y(1 − x/(η* t^b)); zero beyond the
/// front, linear interpolation of y between nodes.
inline double reconstruct_u(double x, double t, const volterra::GridSolution& sol,
                            const FrontResult& front, const SelfSimilarParams& p) {
    if (x < 0.0 || !(t > 0.0)) throw std::domain_error("reconstruct_u: needs x >= 0, t > 0");
    const double reach = front.eta_star * std::pow(t, p.b);
    if (x >= reach) return 0.0;
    const double z = 1.0 - x / reach;
    const int N = sol.n_steps;
    const double pos = z * N;
    const int k = std::min(static_cast<int>(pos), N - 1);
    const double frac = pos - k;
    const double yz = (1.0 - frac) * sol.y[k] + frac * sol.y[k + 1];
    return front.c_scale * std::pow(t, p.a) * yz;
}

/// Sandwich constants C± = K± β(2−α, 1+(2−α)/m); for Dirichlet additionally
/// U± = C±^{1/m}/y(1). Checks the nodal bound
/// C−^{1/m} z^{(2−α)/m} <= y <= C+^{1/m} z^{(2−α)/m} with 5% slack.
inline SolutionBounds solution_bounds(const SelfSimilarParams& p,
                                      const volterra::GridSolution& sol,
                                      std::pair<double, double> kb) {
    SolutionBounds out;
    const double be = spfun::beta_fn(2.0 - p.alpha, 1.0 + (2.0 - p.alpha) / p.m);
    out.c_minus = kb.first * be;
    out.c_plus = kb.second * be;
    if (p.bc == BoundaryCondition::dirichlet) {
        out.u_minus = std::pow(out.c_minus, 1.0 / p.m) / sol.y[sol.n_steps];
        out.u_plus = std::pow(out.c_plus, 1.0 / p.m) / sol.y[sol.n_steps];
    }
    const double q = (2.0 - p.alpha) / p.m;
    const double slack = 1.05;
    out.y_sandwich_ok = true;
    for (int n = 1; n <= sol.n_steps; ++n) {
        const double z = sol.z(n);
        const double lo = std::pow(out.c_minus, 1.0 / p.m) * std::pow(z, q) / slack;
        const double hi = std::pow(out.c_plus, 1.0 / p.m) * std::pow(z, q) * slack;
        if (sol.y[n] < lo || sol.y[n] > hi) {
            out.y_sandwich_ok = false;
            out.diagnostic = "node " + std::to_string(n) + ": y=" + std::to_string(sol.y[n]) +
                             " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
            break;
        }
    }
    return out;
}

}  // namespace fracpme::diffusion
