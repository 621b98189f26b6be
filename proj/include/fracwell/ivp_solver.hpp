#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fracwell/detail/quadrature.hpp"
#include "fracwell/errors.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/special_functions.hpp"

namespace fracwell {

struct SolverConfig {
    std::size_t n_steps = 1024;
    std::size_t corrector_iterations = 1;
    double tol_residual = 1e-8;
};

inline void validate(const SolverConfig& cfg) {
    if (cfg.n_steps < 1) throw domain_error("solver: n_steps must be >= 1");
    if (cfg.corrector_iterations < 1)
        throw domain_error("solver: corrector_iterations must be >= 1");
    if (!std::isfinite(cfg.tol_residual) || cfg.tol_residual <= 0.0)
        throw domain_error("solver: tol_residual must be positive");
}

namespace detail {

constexpr double blow_up_limit = 1e12;

/// Taylor head sum_k y_k (t-a)^k / k! carried by the Caputo operator.
inline double initial_tail(const FractionalIVP& p, double t) {
    double acc = 0.0;
    double pow_term = 1.0;  // (t-a)^k / k!
    for (std::size_t k = 0; k < p.init.size(); ++k) {
        if (k > 0) pow_term *= (t - p.a) / static_cast<double>(k);
        acc += p.init[k] * pow_term;
    }
    return acc;
}

}  // namespace detail

/// Right-hand side of the equivalent Volterra equation at time t, with the
/// memory integral taken product-trapezoidally over the trajectory's own
/// nodes (exact for a piecewise-linear integrand factor).  Works for any t
/// covered by the trajectory, not just grid nodes.
inline double volterra_rhs(const FractionalIVP& p, const Trajectory& traj, double t) {
    validate(p);
    if (traj.nodes.empty() || traj.nodes.front() != p.a)
        throw coverage_error("volterra_rhs: trajectory must start exactly at a");
    if (t < p.a || t > p.T)
        throw domain_error("volterra_rhs: t outside [a, T]");
    if (traj.nodes.back() < t)
        throw coverage_error("volterra_rhs: trajectory does not cover [a, t]");

    double integral = 0.0;
    if (t > p.a) {
        const auto& x = traj.nodes;
        for (std::size_t j = 0; j + 1 < x.size() && x[j] < t; ++j) {
            const double u = x[j];
            const double v = std::min(x[j + 1], t);
            if (v <= u) break;
            const double gu = rhs_eval(p.rhs, u, traj.values[j]);
            const double gv = rhs_eval(p.rhs, v, v == x[j + 1]
                                                     ? traj.values[j + 1]
                                                     : trajectory_eval(traj, v));
            integral += detail::singular_panel(p.alpha, t - u, t - v, gu, gv, v - u);
        }
    }
    return detail::initial_tail(p, t) + integral / gamma_fn(p.alpha);
}

/// Solve the IVP with a product-integration predictor-corrector on a uniform
/// grid: one product-rectangle predictor, then corrector passes until the
/// node's fixed-point defect is inside the residual budget (at least
/// cfg.corrector_iterations of them).
inline Trajectory solve_ivp(const FractionalIVP& p, const SolverConfig& cfg) {
    validate(p);
    validate(cfg);

    const std::size_t n = cfg.n_steps;
    Trajectory traj;
    traj.nodes = make_uniform_grid(p.a, p.T, n);
    traj.values.assign(n + 1, 0.0);
    traj.values[0] = p.init[0];

    const double h = (p.T - p.a) / static_cast<double>(n);
    const auto w = detail::make_weight_table(p.alpha, h, n);
    const double inv_gamma = 1.0 / gamma_fn(p.alpha);

    std::vector<double> fv(n + 1, 0.0);
    fv[0] = rhs_eval(p.rhs, traj.nodes[0], traj.values[0]);

    const double defect_goal = 0.45 * cfg.tol_residual;
    constexpr std::size_t hard_cap = 200;

    for (std::size_t i = 1; i <= n; ++i) {
        const double t = traj.nodes[i];
        const double tail = detail::initial_tail(p, t);
        double diag = 0.0;
        const double hist = detail::convolve_history(w, fv.data(), i, &diag);
        const double pred = tail + inv_gamma * detail::convolve_rectangle(w, fv.data(), i);

        double y = pred;
        double prev_defect = std::numeric_limits<double>::infinity();
        std::size_t it = 0;
        for (;; ++it) {
            const double y_next = tail + inv_gamma * (hist + diag * rhs_eval(p.rhs, t, y));
            const double defect = std::fabs(y_next - y);
            y = y_next;
            if (!std::isfinite(y))
                throw blow_up_error("solve_ivp: non-finite value at node " +
                                        std::to_string(i),
                                    i, y);
            const double noise_floor =
                4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(y) + 1.0);
            if (it + 1 >= cfg.corrector_iterations &&
                (defect <= defect_goal || defect <= noise_floor))
                break;
            if (it + 1 >= hard_cap)
                throw convergence_error(
                    "solve_ivp: corrector stalled at node " + std::to_string(i), it + 1,
                    defect / prev_defect);
            prev_defect = defect;
        }
        if (std::fabs(y) > detail::blow_up_limit)
            throw blow_up_error("solve_ivp: |y| exceeded 1e12 at node " + std::to_string(i),
                                i, y);
        traj.values[i] = y;
        fv[i] = rhs_eval(p.rhs, t, y);
    }
    return traj;
}

/// Closed-form solution of D^alpha y = lambda y, y(a) = y0 (higher initial
/// derivatives zero): y0 * E_alpha(lambda (t-a)^alpha).
inline double ml_linear_solution(double alpha, double a, double y0, double lambda,
                                 double t) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw domain_error("ml_linear_solution: alpha must lie in (0, 2]");
    if (!(t >= a)) throw domain_error("ml_linear_solution: requires t >= a");
    return y0 * mittag_leffler(alpha, lambda * std::pow(t - a, alpha));
}

/// Max over the trajectory's nodes of the Volterra fixed-point defect.
inline double residual_check(const FractionalIVP& p, const Trajectory& traj) {
    validate(p);
    if (traj.nodes.empty() || traj.nodes.front() != p.a || traj.nodes.back() < p.T)
        throw coverage_error("residual_check: trajectory must span [a, T]");
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.nodes.size(); ++i) {
        const double r = std::fabs(traj.values[i] - volterra_rhs(p, traj, traj.nodes[i]));
        worst = std::fmax(worst, r);
    }
    return worst;
}

}  // namespace fracwell
