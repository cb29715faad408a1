#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracpme/diffusion.hpp"
#include "fracpme/errors.hpp"
#include "fracpme/spfun.hpp"
#include "fracpme/volterra.hpp"

namespace fracpme::analysis {

/// Aitken order estimate from terminal values at N, 2N, 4N.
struct OrderEstimate {
    int base_n = 0;
    double value = 0.0;
    std::array<double, 3> triple{};
};

/// Theorem constants: μ_m = 4 K₊ / ((m+1) V₋) and the guaranteed order
/// min{2, 3 − μ_m}.
struct MuReport {
    double alpha = 0.0;
    double m = 0.0;
    double k_plus = 0.0;
    double v_minus = 0.0;
    double mu_m = 0.0;
    double guaranteed_order = 0.0;
};

/// order ≈ log₂(|v_{2N} − v_N| / |v_{4N} − v_{2N}|), all evaluated at z = 1.
inline OrderEstimate aitken_order(const std::function<double(int)>& solve_at_n, int base_n) {
    if (base_n < 10 || base_n % 2 != 0)
        throw std::domain_error("aitken_order: base_n must be even and >= 10");
    OrderEstimate est;
    est.base_n = base_n;
    est.triple = {solve_at_n(base_n), solve_at_n(2 * base_n), solve_at_n(4 * base_n)};
    const double d1 = est.triple[1] - est.triple[0];
    const double d2 = est.triple[2] - est.triple[1];
    if (d2 == 0.0 || !std::isfinite(d1 / d2))
        throw numerical_error("aitken_order: estimate unstable (zero denominator)");
    est.value = std::log2(std::abs(d1 / d2));
    return est;
}

/// Grönwall dominating sequence, closed form
///   f_n = (Γ(n+μ)/n!) Σ_{k=0}^{n−1} k!/Γ(k+1+μ),
/// evaluated through log-gamma to avoid overflow.
inline double gronwall_f(long n, double mu) {
    if (n < 1 || !(mu > 0.0)) throw std::domain_error("gronwall_f: requires n >= 1, mu > 0");
    using spfun::detail::log_gamma_pos;
    double sum = 0.0;
    for (long k = 0; k < n; ++k)
        sum += std::exp(log_gamma_pos(k + 1.0) - log_gamma_pos(k + 1.0 + mu));
    return std::exp(log_gamma_pos(n + mu) - log_gamma_pos(n + 1.0)) * sum;
}

/// f_1..f_nmax in one sweep (the running-sum form of the closed formula).
inline std::vector<double> gronwall_f_seq(long n_max, double mu) {
    if (n_max < 1 || !(mu > 0.0)) throw std::domain_error("gronwall_f_seq: bad arguments");
    using spfun::detail::log_gamma_pos;
    std::vector<double> f(n_max);
    double sum = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        sum += std::exp(log_gamma_pos(n) - log_gamma_pos(n + mu));
        f[n - 1] = std::exp(log_gamma_pos(n + mu) - log_gamma_pos(n + 1.0)) * sum;
    }
    return f;
}

/// μ_m from empirical kernel bounds (200×200 simplex sample) and
/// V₋ = K₋ (β(γ+1, (γ+1)/m + 1) − ε).
inline MuReport mu_report(double alpha, double m, diffusion::BoundaryCondition bc,
                          double eps = 0.0, int bounds_grid = 200) {
    const auto p = diffusion::params_from_bc(alpha, m, bc);
    const double g = 1.0 - alpha;
    const double be = spfun::beta_fn(g + 1.0, (g + 1.0) / m + 1.0);
    if (eps < 0.0 || eps >= 0.5 * be) throw std::domain_error("mu_report: eps out of range");
    auto [k_minus, k_plus] = diffusion::kernel_bounds_empirical(p, bounds_grid);
    MuReport r;
    r.alpha = alpha;
    r.m = m;
    r.k_plus = k_plus;
    r.v_minus = k_minus * (be - eps);
    r.mu_m = 4.0 * k_plus / ((m + 1.0) * r.v_minus);
    r.guaranteed_order = std::min(2.0, 3.0 - r.mu_m);
    return r;
}

/// Critical m where μ_m = 3, bisected on m ∈ [1, 10] with ε = 0.
inline double m0_of_alpha(double alpha, diffusion::BoundaryCondition bc, int bounds_grid = 200) {
    if (!(alpha > 0.0) || alpha > 0.99)
        throw std::domain_error("m0_of_alpha: requires alpha in (0, 0.99]");
    auto mu = [&](double m) { return mu_report(alpha, m, bc, 0.0, bounds_grid).mu_m; };
    double lo = 1.0 + 1e-9, hi = 10.0;
    double flo = mu(lo) - 3.0, fhi = mu(hi) - 3.0;
    if (flo * fhi > 0.0)
        throw bracket_error("m0_of_alpha: no critical m in bracket [1, 10] (mu(1)-3=" +
                            std::to_string(flo) + ", mu(10)-3=" + std::to_string(fhi) + ")");
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mu(mid) - 3.0;
        if (std::abs(fm) <= 1e-3) return mid;
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// One Aitken estimate per (α, m) cell of the diffusion problem. Cell
/// failures are recorded, not fatal.
struct OrderTable {
    std::vector<double> alphas;
    std::vector<double> ms;
    std::vector<std::vector<std::optional<OrderEstimate>>> cells;
    std::vector<std::vector<std::string>> errors;
};

inline OrderTable order_table_diffusion(const std::vector<double>& alphas,
                                        const std::vector<double>& ms,
                                        diffusion::BoundaryCondition bc, int base_n,
                                        const spfun::QuadConfig& quad = {}) {
    OrderTable table;
    table.alphas = alphas;
    table.ms = ms;
    table.cells.assign(alphas.size(), std::vector<std::optional<OrderEstimate>>(ms.size()));
    table.errors.assign(alphas.size(), std::vector<std::string>(ms.size()));
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        for (std::size_t j = 0; j < ms.size(); ++j) {
            try {
                const auto p = diffusion::params_from_bc(alphas[i], ms[j], bc);
                volterra::VolterraProblem problem;
                problem.m = p.m;
                problem.kernel.gamma = 1.0 - p.alpha;
                problem.kernel.eval = [p](double z, double u) {
                    return diffusion::kernel_incbeta(z, u, p);
                };
                auto runner = [&](int n) {
                    volterra::SolverConfig cfg;
                    cfg.n_steps = n;
                    cfg.method = volterra::Method::trapezoid;
                    cfg.quad = quad;
                    return volterra::solve(problem, cfg).v.back();
                };
                table.cells[i][j] = aitken_order(runner, base_n);
            } catch (const std::exception& e) {
                table.errors[i][j] = e.what();
            }
        }
    }
    return table;
}

}  // namespace fracpme::analysis
