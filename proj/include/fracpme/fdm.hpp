#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "fracpme/diffusion.hpp"
#include "fracpme/errors.hpp"
#include "fracpme/spfun.hpp"
#include "fracpme/volterra.hpp"

namespace fracpme::fdm {

struct FdConfig {
    double theta = 1.0;  // 1 = fully implicit
    double dt = 0.01;
    double dx = 0.02;
    double t_final = 1.0;
    double x_max = 2.0;
    double zero_threshold = 1e-10;
};

/// Space-time field u[i][j] ~ u(j·dx, i·dt). Rows are immutable once written.
struct FdField {
    std::vector<std::vector<double>> u;
    double dt = 0.0;
    double dx = 0.0;
    int n_space() const { return u.empty() ? 0 : static_cast<int>(u[0].size()); }
    int n_time() const { return static_cast<int>(u.size()) - 1; }
};

/// L1 history weights a_{k,i} = (i−k+2)^{1−α} − 2(i−k+1)^{1−α} + (i−k)^{1−α},
/// returned for k = 1..i (index k-1).
inline std::vector<double> l1_weights(int i, double alpha) {
    if (i < 1 || !(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("l1_weights: requires i >= 1, 0 < alpha < 1");
    const double e = 1.0 - alpha;
    std::vector<double> a(i);
    for (int k = 1; k <= i; ++k) {
        const double j = static_cast<double>(i - k);
        a[k - 1] = std::pow(j + 2.0, e) - 2.0 * std::pow(j + 1.0, e) + std::pow(j, e);
    }
    return a;
}

namespace detail {

// Extrapolated nodal diffusivity u^m + m u^{m-1}(u^i - u^{i-1}); for i = 0
// there is no history and the plain u^m is used.
inline double extrapolated_um(const FdField& field, int i, int j, double m) {
    const double u = field.u[i][j];
    if (u <= 0.0) return 0.0;
    double d = std::pow(u, m);
    if (i >= 1) d += m * std::pow(u, m - 1.0) * (u - field.u[i - 1][j]);
    return d;
}

}  // namespace detail

/// Linearized diffusion coefficient at the cell face j+side/2, side = ±1:
/// the arithmetic average of the extrapolated nodal diffusivities on the two
/// sides of that face, clamped at zero. One value per face keeps the flux
/// form conservative, which the degenerate front requires (the literal
/// per-row averaging of Eq.-(80) type produces a non-conservative scheme
/// whose front converges to the wrong position; see tests).
inline double linearized_diffusivity(const FdField& field, int i, int j, double m, int side) {
    if (side != 1 && side != -1) throw std::domain_error("linearized_diffusivity: side is +1/-1");
    const int jn = j + side;
    if (jn < 0 || jn >= field.n_space())
        throw std::domain_error("linearized_diffusivity: face outside the grid");
    const double d =
        0.5 * (detail::extrapolated_um(field, i, j, m) + detail::extrapolated_um(field, i, jn, m));
    return d > 0.0 ? d : 0.0;
}

namespace detail {

struct Tridiag {
    std::vector<double> lo, di, up, rhs;
};

inline std::vector<double> thomas_solve(Tridiag& t) {
    const int n = static_cast<int>(t.di.size());
    std::vector<double> x(n);
    for (int i = 1; i < n; ++i) {
        if (t.di[i - 1] == 0.0) throw numerical_error("thomas_solve: zero pivot at row " +
                                                      std::to_string(i - 1));
        const double w = t.lo[i] / t.di[i - 1];
        t.di[i] -= w * t.up[i - 1];
        t.rhs[i] -= w * t.rhs[i - 1];
    }
    if (t.di[n - 1] == 0.0) throw numerical_error("thomas_solve: zero pivot at last row");
    x[n - 1] = t.rhs[n - 1] / t.di[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (t.rhs[i] - t.up[i] * x[i + 1]) / t.di[i];
    return x;
}

}  // namespace detail

/// Advances the field one step: one tridiagonal solve for row i+1 with the L1
/// history on the right-hand side. Dirichlet pins u(0)=1; Neumann/Robin impose
/// the flux condition through the half-cell (ghost-eliminated) form.
inline std::vector<double> step(const FdField& field, int i, const FdConfig& cfg,
                                diffusion::BoundaryCondition bc, double m, double alpha) {
    const int J = field.n_space();
    const double r = spfun::gamma_fn(2.0 - alpha) * std::pow(cfg.dt, alpha) / (cfg.dx * cfg.dx);
    const double th = cfg.theta;

    // history sum  -sum_{k=1}^{i} a_{k,i} u^k_j
    std::vector<double> hist(J, 0.0);
    if (i >= 1) {
        const auto a = l1_weights(i, alpha);
        for (int k = 1; k <= i; ++k) {
            const double ak = a[k - 1];
            const auto& row = field.u[k];
            for (int j = 0; j < J; ++j) hist[j] -= ak * row[j];
        }
    }

    // face diffusivities, one value per face j+1/2 (j = 0..J-2)
    std::vector<double> face(J - 1);
    for (int j = 0; j < J - 1; ++j) face[j] = linearized_diffusivity(field, i, j, m, +1);

    auto flux_at = [&](const std::vector<double>& row, int j) {
        return face[j - 1] * row[j - 1] - (face[j - 1] + face[j]) * row[j] + face[j] * row[j + 1];
    };

    detail::Tridiag t;
    t.lo.assign(J, 0.0);
    t.di.assign(J, 1.0);
    t.up.assign(J, 0.0);
    t.rhs = hist;
    for (int j = 1; j < J - 1; ++j) {
        t.lo[j] = -th * r * face[j - 1];
        t.di[j] = 1.0 + th * r * (face[j - 1] + face[j]);
        t.up[j] = -th * r * face[j];
        if (th < 1.0) t.rhs[j] += (1.0 - th) * r * flux_at(field.u[i], j);
    }

    switch (bc) {
        case diffusion::BoundaryCondition::dirichlet:
            t.di[0] = 1.0;
            t.up[0] = 0.0;
            t.rhs[0] = 1.0;
            break;
        case diffusion::BoundaryCondition::neumann: {
            // half-cell balance with imposed influx q = 1 at x = 0
            const double c = 2.0 * r;
            t.di[0] = 1.0 + th * c * face[0];
            t.up[0] = -th * c * face[0];
            t.rhs[0] = hist[0] + 2.0 * r * cfg.dx;
            if (th < 1.0)
                t.rhs[0] += (1.0 - th) * c * face[0] * (field.u[i][1] - field.u[i][0]);
            break;
        }
        case diffusion::BoundaryCondition::robin: {
            // influx q = u(0): implicit part moves onto the diagonal
            const double c = 2.0 * r;
            t.di[0] = 1.0 + th * c * face[0] - th * 2.0 * r * cfg.dx;
            t.up[0] = -th * c * face[0];
            t.rhs[0] = hist[0];
            if (th < 1.0)
                t.rhs[0] += (1.0 - th) *
                            (c * face[0] * (field.u[i][1] - field.u[i][0]) +
                             2.0 * r * cfg.dx * field.u[i][0]);
            break;
        }
    }
    // dry far field
    t.lo[J - 1] = 0.0;
    t.di[J - 1] = 1.0;
    t.rhs[J - 1] = 0.0;

    auto next = detail::thomas_solve(t);
    for (double& v : next)
        if (v < 0.0) v = 0.0;  // undershoot clamp
    if (next[J - 2] > cfg.zero_threshold)
        throw front_error("step: wetting front reached the right boundary; enlarge x_max");
    return next;
}

/// Runs the scheme from the dry initial state to t_final.
inline FdField run(double alpha, double m, diffusion::BoundaryCondition bc, const FdConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.dx > 0.0)) throw std::domain_error("fdm::run: dt, dx > 0");
    if (cfg.theta < 0.0 || cfg.theta > 1.0) throw std::domain_error("fdm::run: theta in [0,1]");
    const int steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    const int J = static_cast<int>(std::llround(cfg.x_max / cfg.dx)) + 1;
    FdField field;
    field.dt = cfg.dt;
    field.dx = cfg.dx;
    field.u.reserve(steps + 1);
    field.u.emplace_back(J, 0.0);
    if (bc == diffusion::BoundaryCondition::dirichlet) field.u[0][0] = 1.0;
    for (int i = 0; i < steps; ++i) field.u.push_back(step(field, i, cfg, bc, m, alpha));
    return field;
}

/// Front position x_{j*}: the rightmost node of the final row whose value
/// exceeds zero_threshold.
inline double wetting_front_fd(const FdField& field, const FdConfig& cfg) {
    const auto& row = field.u.back();
    const int J = static_cast<int>(row.size());
    int jstar = -1;
    for (int j = J - 1; j >= 0; --j) {
        if (row[j] > cfg.zero_threshold) {
            jstar = j;
            break;
        }
    }
    if (jstar < 0) return 0.0;
    if (jstar >= J - 1) throw front_error("wetting_front_fd: front at the domain edge");
    return jstar * field.dx;
}

// ---------------------------------------------------------------------------
// temporal-complexity benchmark: Volterra scheme vs finite differences
// ---------------------------------------------------------------------------

struct BenchCell {
    double eps = 0.0;
    double seconds = 0.0;
    double ops = 0.0;     // kernel evaluations (Volterra) / flop estimate (FD)
    double achieved = 0.0;
    long resolution = 0;  // N (Volterra) or time steps (FD)
    bool censored = false;
};

struct BenchReport {
    double eta_reference = 0.0;
    std::vector<BenchCell> volterra;
    std::vector<BenchCell> fd;
    double volterra_slope = 0.0;  // d log(ops) / d log(1/eps), scaling cells only
    double fd_slope = 0.0;
};

namespace detail {

inline double slope_loglog(const std::vector<BenchCell>& cells, long floor_resolution) {
    std::vector<double> xs, ys;
    for (const auto& c : cells) {
        if (c.censored || c.resolution <= floor_resolution) continue;
        xs.push_back(std::log(1.0 / c.eps));
        ys.push_back(std::log(c.ops));
    }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// For each tolerance ε: the cost (wall time and operation count) each method
/// needs to place the Dirichlet wetting front within ε of the reference.
/// Cells whose ladder search exceeds the per-cell budget are censored.
inline BenchReport complexity_benchmark(const std::vector<double>& tolerances, double alpha,
                                        double m, double cell_timeout_seconds = 60.0) {
    if (tolerances.size() < 3) throw std::domain_error("complexity_benchmark: >= 3 tolerances");
    for (std::size_t i = 1; i < tolerances.size(); ++i)
        if (!(tolerances[i] < tolerances[i - 1]))
            throw std::domain_error("complexity_benchmark: tolerances must decrease");

    using clock = std::chrono::steady_clock;
    const auto p = diffusion::params_from_bc(alpha, m, diffusion::BoundaryCondition::dirichlet);

    std::atomic<long> kernel_evals{0};
    volterra::VolterraProblem problem;
    problem.m = p.m;
    problem.kernel.gamma = 1.0 - p.alpha;
    problem.kernel.eval = [p, &kernel_evals](double z, double u) {
        kernel_evals.fetch_add(1, std::memory_order_relaxed);
        return diffusion::kernel_incbeta(z, u, p);
    };

    auto eta_at = [&](int n) {
        volterra::SolverConfig cfg;
        cfg.n_steps = n;
        const auto sol = volterra::solve(problem, cfg);
        return diffusion::wetting_front(sol, p).eta_star;
    };

    BenchReport report;
    report.eta_reference = eta_at(640);

    const std::vector<int> n_ladder = {4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384};
    for (double eps : tolerances) {
        BenchCell cell;
        cell.eps = eps;
        cell.censored = true;
        const auto t0 = clock::now();
        for (int n : n_ladder) {
            kernel_evals.store(0);
            const auto r0 = clock::now();
            const double eta = eta_at(n);
            const double err = std::abs(eta - report.eta_reference);
            if (err <= eps) {
                cell.seconds = std::chrono::duration<double>(clock::now() - r0).count();
                cell.ops = static_cast<double>(kernel_evals.load());
                cell.achieved = err;
                cell.resolution = n;
                cell.censored = false;
                break;
            }
            if (std::chrono::duration<double>(clock::now() - t0).count() > cell_timeout_seconds)
                break;
        }
        report.volterra.push_back(cell);
    }

    const std::vector<double> dx_ladder = {0.08, 0.04, 0.02, 0.01, 0.005, 0.0025, 0.00125};
    for (double eps : tolerances) {
        BenchCell cell;
        cell.eps = eps;
        cell.censored = true;
        const auto t0 = clock::now();
        double prev_err = std::numeric_limits<double>::infinity();
        for (double dx : dx_ladder) {
            FdConfig cfg;
            cfg.dx = dx;
            cfg.dt = dx / 2.0;
            cfg.t_final = 1.0;
            cfg.x_max = report.eta_reference * 1.8;
            const auto r0 = clock::now();
            const auto field = run(alpha, m, diffusion::BoundaryCondition::dirichlet, cfg);
            const double front = wetting_front_fd(field, cfg);
            const double err = std::abs(front - report.eta_reference);
            const long nt = field.n_time(), nx = field.n_space();
            // Accept only on a converged grid: the coarser level must already
            // obey the convergence law, so an isolated lucky hit of the front
            // quantization does not count.
            if (err <= eps && prev_err <= 6.0 * eps) {
                cell.seconds = std::chrono::duration<double>(clock::now() - r0).count();
                cell.ops = 0.5 * static_cast<double>(nt) * nt * nx + 8.0 * nt * nx;
                cell.achieved = err;
                cell.resolution = nt;
                cell.censored = false;
                break;
            }
            prev_err = err;
            if (std::chrono::duration<double>(clock::now() - t0).count() > cell_timeout_seconds)
                break;
        }
        report.fd.push_back(cell);
    }

    report.volterra_slope = detail::slope_loglog(report.volterra, n_ladder.front());
    report.fd_slope = detail::slope_loglog(report.fd, 0);
    return report;
}

}  // namespace fracpme::fdm
