#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "fracpme/errors.hpp"

namespace fracpme::spfun {

struct QuadConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
};

namespace detail {

// lgamma without the signgam data race; arguments here are always positive.
inline double log_gamma_pos(double x) {
#ifdef __GLIBC__
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// 15-point Kronrod rule with embedded 7-point Gauss (QUADPACK dqk15).
// Positive abscissae only; even indices are Kronrod-only nodes.
inline constexpr std::array<double, 8> gk_x = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr std::array<double, 8> gk_wk = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr std::array<double, 4> gk_wg = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct GkResult {
    double integral;
    double error;
};

// One GK15 panel on [a,b]. Endpoints are never evaluated, so integrable
// endpoint singularities pose no evaluation hazard.
template <typename F>
GkResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    double kron = gk_wk[7] * (fv[7] = f(c));
    double gauss = gk_wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * gk_x[i];
        const double f1 = f(c - dx), f2 = f(c + dx);
        fv[i] = f1;
        fv[14 - i] = f2;
        kron += gk_wk[i] * (f1 + f2);
        if (i % 2 == 1) gauss += gk_wg[i / 2] * (f1 + f2);
    }
    kron *= half;
    gauss *= half;
    // QUADPACK-style rescaled error estimate
    const double mean = kron / (b - a);
    double resasc = gk_wk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += gk_wk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    resasc *= std::abs(half);
    double err = std::abs(kron - gauss);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {kron, err};
}

struct Segment {
    double a, b, integral, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Analytic tail for a thin endpoint-touching segment. Fits the local power
// law f ~ c d^{-β} (d = distance to the singular endpoint) from three nested
// samples and integrates it exactly; for algebraic singularities the fit is
// exact up to the O(width) variation of the smooth cofactor.
template <typename F>
bool power_tail(const F& f, const Segment& seg, bool at_upper, GkResult& out) {
    const double w = seg.b - seg.a;
    const double end = at_upper ? seg.b : seg.a;
    auto sample = [&](double d) { return f(at_upper ? end - d : end + d); };
    const double f1 = sample(0.5 * w), f2 = sample(0.25 * w), f3 = sample(0.125 * w);
    if (!std::isfinite(f1) || !std::isfinite(f2) || !std::isfinite(f3)) return false;
    if (f1 == 0.0 || f2 == 0.0 || f3 == 0.0 || (f1 > 0) != (f2 > 0) || (f2 > 0) != (f3 > 0))
        return false;
    const double beta1 = std::log2(std::abs(f2 / f1));
    const double beta2 = std::log2(std::abs(f3 / f2));
    if (!(beta1 < 1.0) || !(beta2 < 1.0) || std::abs(beta1 - beta2) > 0.01) return false;
    const double beta = 0.5 * (beta1 + beta2);
    const double c = f1 * std::pow(0.5 * w, beta);
    out.integral = c * std::pow(w, 1.0 - beta) / (1.0 - beta);
    out.error = std::abs(out.integral) * (10.0 * std::abs(beta1 - beta2) + 1e-12);
    return true;
}

}  // namespace detail

/// Γ(x) for x > 0, relative error ≤ 1e-13.
inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
    return std::tgamma(x);
}

/// Euler beta Γ(a)Γ(b)/Γ(a+b), a, b > 0. Evaluated in log space so large
/// arguments do not overflow prematurely.
inline double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_fn: requires a, b > 0");
    using detail::log_gamma_pos;
    return std::exp(log_gamma_pos(a) + log_gamma_pos(b) - log_gamma_pos(a + b));
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Non-regularized lower incomplete beta  β(a,b,z) = ∫₀^z t^{a−1}(1−t)^{b−1} dt.
inline double inc_beta(double a, double b, double z) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("inc_beta: requires a, b > 0");
    if (!(z >= 0.0) || !(z <= 1.0)) throw std::domain_error("inc_beta: requires z in [0,1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return beta_fn(a, b);
    const double front = std::exp(a * std::log(z) + b * std::log1p(-z));
    if (z < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_cf(a, b, z) / a;
    return beta_fn(a, b) - front * detail::beta_cf(b, a, 1.0 - z) / b;
}

/// Adaptive Gauss-Kronrod integration of f over [lo, hi].
///
/// Refinement always bisects the segment with the largest error estimate, so
/// integrable endpoint singularities of the type (hi−s)^{−α}, α < 1, are
/// resolved by geometric subdivision toward the endpoint. Throws quad_error
/// (carrying the best estimate and its bound) once max_subdivisions is spent.
template <typename F>
double adaptive_quad(const F& f, double lo, double hi, const QuadConfig& cfg = {}) {
    if (!(cfg.abs_tol > 0.0) || cfg.rel_tol < 0.0 || cfg.max_subdivisions < 1)
        throw std::domain_error("adaptive_quad: invalid QuadConfig");
    if (lo == hi) return 0.0;
    if (!(lo < hi)) throw std::domain_error("adaptive_quad: requires lo <= hi");

    std::priority_queue<detail::Segment> queue;
    auto first = detail::gk15(f, lo, hi);
    queue.push({lo, hi, first.integral, first.error});
    double total = first.integral;
    double total_err = first.error;
    const double width_floor = 1e-13 * (hi - lo);

    for (int split = 0; split < cfg.max_subdivisions; ++split) {
        if (total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)))
            return total;
        detail::Segment worst = queue.top();
        if (!std::isfinite(total)) break;
        queue.pop();
        // A dominant endpoint-touching segment this thin signals an algebraic
        // singularity that bisection cannot chase further in double
        // precision; switch to the analytic power-law tail.
        if (worst.b - worst.a < width_floor && (worst.a == lo || worst.b == hi)) {
            detail::GkResult tail;
            if (detail::power_tail(f, worst, worst.b == hi, tail)) {
                total += tail.integral - worst.integral;
                total_err += tail.error - worst.error;
                continue;  // segment settled analytically, not re-queued
            }
        }
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            total_err -= worst.error;  // narrower than machine resolution
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        queue.push({worst.a, mid, left.integral, left.error});
        queue.push({mid, worst.b, right.integral, right.error});
    }
    if (total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)))
        return total;
    throw quad_error("adaptive_quad: tolerance not reached after " +
                         std::to_string(cfg.max_subdivisions) + " subdivisions",
                     total, total_err);
}

/// Positive root of  a·x^{m+1} − b·x − c = 0  by Newton's method seeded at x0,
/// with a bisection fallback on [x0/10, 10·x0]. Convergence means the residual
/// magnitude drops to tol.
inline double newton_root_power(double a_coef, double b_coef, double c_coef, double m,
                                double x0, double tol) {
    if (!(a_coef > 0.0) || b_coef < 0.0 || c_coef < 0.0 || !(x0 > 0.0))
        throw std::domain_error("newton_root_power: invalid coefficients or seed");
    if (b_coef == 0.0 && c_coef == 0.0)
        throw std::domain_error("newton_root_power: b and c both zero");

    auto residual = [&](double x) { return a_coef * std::pow(x, m + 1.0) - b_coef * x - c_coef; };

    double x = x0;
    for (int it = 0; it < 100; ++it) {
        const double f = residual(x);
        if (std::abs(f) <= tol) return x;
        const double df = a_coef * (m + 1.0) * std::pow(x, m) - b_coef;
        const double next = x - f / df;
        if (!std::isfinite(next) || next <= 0.0) break;
        x = next;
    }
    if (std::abs(residual(x)) <= tol) return x;

    // Newton stalled or escaped; bisect around the seed.
    double lo = x0 / 10.0, hi = x0 * 10.0;
    double flo = residual(lo), fhi = residual(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw newton_error("newton_root_power: no convergence and no bisection bracket", x, 100);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (std::abs(fm) <= tol) return mid;
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    throw newton_error("newton_root_power: bisection fallback did not converge",
                       0.5 * (lo + hi), 300);
}

}  // namespace fracpme::spfun
