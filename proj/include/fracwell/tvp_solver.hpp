#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fracwell/detail/quadrature.hpp"
#include "fracwell/errors.hpp"
#include "fracwell/ivp_solver.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/special_functions.hpp"

namespace fracwell {

/// Point query of the two-branch Fredholm kernel G(t, s).
struct KernelQuery {
    double t = 0.0;
    double s = 0.0;
    double T = 1.0;
    double alpha = 0.5;
};

/// G(t,s) = -(T-s)^(alpha-1) for s > t, (t-s)^(alpha-1) - (T-s)^(alpha-1)
/// for s <= t.  The s = t and s = T diagonals are integrable singularities;
/// callers integrate across them analytically and may not sample them.
inline double green_kernel(const KernelQuery& q) {
    if (!std::isfinite(q.alpha) || q.alpha <= 0.0 || q.alpha >= 1.0)
        throw domain_error("green_kernel: requires 0 < alpha < 1");
    if (!std::isfinite(q.t) || !std::isfinite(q.s) || !std::isfinite(q.T))
        throw domain_error("green_kernel: arguments must be finite");
    if (!(q.s < q.T))
        throw domain_error("green_kernel: singular at s = T; requires s < T");
    if (q.s == q.t)
        throw domain_error("green_kernel: singular on the diagonal s = t");
    const double terminal = std::pow(q.T - q.s, q.alpha - 1.0);
    if (q.s > q.t) return -terminal;
    return std::pow(q.t - q.s, q.alpha - 1.0) - terminal;
}

enum class TvpMethod { fredholm, shooting };

inline const char* to_string(TvpMethod m) {
    return m == TvpMethod::fredholm ? "fredholm" : "shooting";
}

struct TvpSolution {
    Trajectory traj;
    double recovered_initial = 0.0;
    TvpMethod method = TvpMethod::fredholm;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Solve the TVP by damped Picard iteration on the discretized Fredholm
/// equation y(t) = y* + (1/Gamma(alpha)) integral_a^T G(t,s) f(s, y(s)) ds.
///
/// Both kernel branches are integrated with the same product-trapezoidal
/// weights as the IVP solver, so the discrete Fredholm and Volterra systems
/// are algebraically consistent.  The damping factor is 0.5; the iteration
/// stops when the undamped fixed-point residual drops below a tenth of
/// tol_residual, and reports the last contraction ratio on failure.
inline TvpSolution solve_tvp_fredholm(const FractionalTVP& p, const SolverConfig& cfg) {
    validate(p);
    validate(cfg);

    const std::size_t n = cfg.n_steps;
    const double h = (p.T - p.a) / static_cast<double>(n);
    const auto w = detail::make_weight_table(p.alpha, h, n);
    const double inv_gamma = 1.0 / gamma_fn(p.alpha);
    const auto nodes = make_uniform_grid(p.a, p.T, n);

    constexpr double theta = 0.5;
    constexpr std::size_t max_iterations = 500;

    std::vector<double> y(n + 1, p.y_star);  // matches the f == 0 solution
    std::vector<double> fv(n + 1, 0.0), mapped(n + 1, 0.0);

    double prev_residual = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i <= n; ++i) fv[i] = rhs_eval(p.rhs, nodes[i], y[i]);
        const double full = detail::convolve_trapezoid(w, fv.data(), n);
        double residual = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double partial =
                i == 0 ? 0.0
                       : (i == n ? full : detail::convolve_trapezoid(w, fv.data(), i));
            mapped[i] = p.y_star + inv_gamma * (partial - full);
            residual = std::fmax(residual, std::fabs(mapped[i] - y[i]));
            if (!std::isfinite(mapped[i]) || std::fabs(mapped[i]) > detail::blow_up_limit)
                throw convergence_error(
                    "solve_tvp_fredholm: iterates blew up at node " + std::to_string(i) +
                        " after " + std::to_string(it) +
                        " iterations (last contraction ratio " + std::to_string(ratio) +
                        "); the Picard map is not contractive for this (L, T-a, alpha)",
                    it, ratio);
        }
        if (std::isfinite(prev_residual) && prev_residual > 0.0)
            ratio = residual / prev_residual;
        if (residual <= 0.1 * cfg.tol_residual) {
            TvpSolution sol;
            sol.traj.nodes = nodes;
            sol.traj.values = y;
            sol.recovered_initial = y.front();
            sol.method = TvpMethod::fredholm;
            sol.iterations = it;
            sol.residual = residual;
            return sol;
        }
        for (std::size_t i = 0; i <= n; ++i)
            y[i] = (1.0 - theta) * y[i] + theta * mapped[i];
        prev_residual = residual;
    }
    throw convergence_error(
        "solve_tvp_fredholm: no convergence after " + std::to_string(max_iterations) +
            " iterations (last contraction ratio " + std::to_string(ratio) +
            "); the Picard map appears non-contractive for this (L, T-a, alpha)",
        max_iterations, ratio);
}

namespace detail {

struct ShotResult {
    double mismatch = 0.0;
    Trajectory traj;
};

}  // namespace detail

/// Solve the TVP by shooting: find the initial value c whose forward IVP
/// solve lands on y* at T.  Geometric bracket expansion around c = y*, then
/// hybrid bisection/secant driven to a 1e-10 terminal residual (or
/// tol_residual if that is tighter).
inline TvpSolution solve_tvp_shooting(const FractionalTVP& p, const SolverConfig& cfg) {
    validate(p);
    validate(cfg);

    FractionalIVP ivp;
    ivp.alpha = p.alpha;
    ivp.a = p.a;
    ivp.T = p.T;
    ivp.rhs = p.rhs;
    ivp.init = {0.0};

    std::size_t evals = 0;
    auto shoot = [&](double c) {
        ivp.init[0] = c;
        detail::ShotResult r;
        r.traj = solve_ivp(ivp, cfg);
        r.mismatch = r.traj.values.back() - p.y_star;
        ++evals;
        return r;
    };

    const double target = std::fmin(1e-10, cfg.tol_residual);
    auto finish = [&](double c, detail::ShotResult&& shot) {
        if (std::fabs(shot.mismatch) > cfg.tol_residual)
            throw convergence_error("solve_tvp_shooting: terminal residual " +
                                        std::to_string(std::fabs(shot.mismatch)) +
                                        " exceeds tol_residual",
                                    evals, std::numeric_limits<double>::quiet_NaN());
        TvpSolution sol;
        sol.traj = std::move(shot.traj);
        sol.recovered_initial = c;
        sol.method = TvpMethod::shooting;
        sol.iterations = evals;
        sol.residual = std::fabs(shot.mismatch);
        return sol;
    };

    double c0 = p.y_star;
    auto shot0 = shoot(c0);
    if (std::fabs(shot0.mismatch) <= target) return finish(c0, std::move(shot0));

    // Bracket expansion.
    double lo = c0, hi = c0, flo = shot0.mismatch, fhi = shot0.mismatch;
    double step = 0.5 * std::fmax(1.0, std::fabs(p.y_star));
    bool bracketed = false;
    for (int k = 0; k < 60 && !bracketed; ++k) {
        const double cand_lo = c0 - step;
        const double cand_hi = c0 + step;
        const auto slo = shoot(cand_lo);
        if (slo.mismatch == 0.0) return finish(cand_lo, shoot(cand_lo));
        if ((slo.mismatch < 0.0) != (shot0.mismatch < 0.0)) {
            lo = cand_lo;
            flo = slo.mismatch;
            hi = c0;
            fhi = shot0.mismatch;
            bracketed = true;
            break;
        }
        const auto shi = shoot(cand_hi);
        if (shi.mismatch == 0.0) return finish(cand_hi, shoot(cand_hi));
        if ((shi.mismatch < 0.0) != (shot0.mismatch < 0.0)) {
            lo = c0;
            flo = shot0.mismatch;
            hi = cand_hi;
            fhi = shi.mismatch;
            bracketed = true;
            break;
        }
        step *= 2.0;
    }
    if (!bracketed)
        throw convergence_error(
            "solve_tvp_shooting: no sign change in [" + std::to_string(c0 - step) + ", " +
                std::to_string(c0 + step) + "] after bracket expansion",
            evals, std::numeric_limits<double>::quiet_NaN());
    if (lo > hi) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }

    // Hybrid bisection/secant inside the bracket.
    double best_c = std::fabs(flo) < std::fabs(fhi) ? lo : hi;
    for (int k = 0; k < 200; ++k) {
        double c = 0.5 * (lo + hi);
        if (fhi != flo) {
            const double secant = hi - fhi * (hi - lo) / (fhi - flo);
            if (secant > lo && secant < hi) c = secant;
        }
        auto shot = shoot(c);
        if (std::fabs(shot.mismatch) <= target) return finish(c, std::move(shot));
        if ((shot.mismatch < 0.0) == (flo < 0.0)) {
            lo = c;
            flo = shot.mismatch;
        } else {
            hi = c;
            fhi = shot.mismatch;
        }
        best_c = std::fabs(flo) < std::fabs(fhi) ? lo : hi;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                           (std::fabs(lo) + std::fabs(hi) + 1.0))
            break;  // bracket exhausted; verify best candidate below
    }
    return finish(best_c, shoot(best_c));
}

inline TvpSolution solve_tvp(const FractionalTVP& p, const SolverConfig& cfg,
                             TvpMethod method) {
    return method == TvpMethod::fredholm ? solve_tvp_fredholm(p, cfg)
                                         : solve_tvp_shooting(p, cfg);
}

}  // namespace fracwell
