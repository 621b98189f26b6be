#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "fracwell/bounds.hpp"
#include "fracwell/errors.hpp"
#include "fracwell/ivp_solver.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/tvp_solver.hpp"

namespace fracwell {

enum class SweepMode {
    start_shift,      // IVP, a~ = a + delta, compare on [a~, T]
    terminal_shift,   // TVP, T~ = T + delta, compare on [a, T]
    tvp_start_shift,  // TVP, a~ = a + delta, compare on [a~, T]
    alpha_shift,      // IVP, alpha~ = alpha - delta (ceiling preserved)
    init_shift,       // IVP, y_0~ = y_0 + delta
    rhs_scale,        // IVP, f~ = f + delta (exact sup-norm perturbation)
};

inline const char* to_string(SweepMode m) {
    switch (m) {
        case SweepMode::start_shift: return "start_shift";
        case SweepMode::terminal_shift: return "terminal_shift";
        case SweepMode::tvp_start_shift: return "tvp_start_shift";
        case SweepMode::alpha_shift: return "alpha_shift";
        case SweepMode::init_shift: return "init_shift";
        case SweepMode::rhs_scale: return "rhs_scale";
    }
    return "?";
}

inline std::optional<SweepMode> sweep_mode_from_string(const std::string& s) {
    if (s == "start_shift") return SweepMode::start_shift;
    if (s == "terminal_shift") return SweepMode::terminal_shift;
    if (s == "tvp_start_shift") return SweepMode::tvp_start_shift;
    if (s == "alpha_shift") return SweepMode::alpha_shift;
    if (s == "init_shift") return SweepMode::init_shift;
    if (s == "rhs_scale") return SweepMode::rhs_scale;
    return std::nullopt;
}

struct SweepPlan {
    std::variant<FractionalIVP, FractionalTVP> base;
    SweepMode mode = SweepMode::start_shift;
    std::vector<double> deltas;  // strictly decreasing, > 0
    SolverConfig solver;
};

struct SweepRow {
    double delta = 0.0;
    double sup_diff = 0.0;
    std::optional<double> bound_d1, bound_d2, bound_envelope, lower_bound;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SweepReport {
    SweepMode mode = SweepMode::start_shift;
    std::vector<SweepRow> rows;
    double fitted_exponent = 0.0;
    double fit_r2 = 0.0;
    double predicted_exponent = 0.0;
    std::pair<double, double> comparison_interval{0.0, 0.0};
    double solver_error_estimate = 0.0;
    std::vector<std::string> warnings;
};

/// Max of |y(t) - y~(t)| over the union of both node sets restricted to
/// [lo, hi], with each trajectory read through its own interpolant.
inline double sup_diff(const Trajectory& y, const Trajectory& y_tilde, double lo,
                       double hi) {
    if (!(lo <= hi)) throw domain_error("sup_diff: requires lo <= hi");
    for (const Trajectory* tr : {&y, &y_tilde})
        if (tr->nodes.empty() || tr->nodes.front() > lo || tr->nodes.back() < hi)
            throw coverage_error("sup_diff: trajectory does not cover [lo, hi]");
    double worst = 0.0;
    auto scan = [&](const std::vector<double>& nodes) {
        auto first = std::lower_bound(nodes.begin(), nodes.end(), lo);
        for (auto it = first; it != nodes.end() && *it <= hi; ++it) {
            const double d = std::fabs(trajectory_eval(y, *it) - trajectory_eval(y_tilde, *it));
            worst = std::fmax(worst, d);
        }
    };
    scan(y.nodes);
    scan(y_tilde.nodes);
    return worst;
}

struct FitResult {
    double slope = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares of log(diff) against log(delta).
inline FitResult fit_exponent(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 4)
        throw domain_error("fit_exponent: needs at least 4 points, got " +
                           std::to_string(pairs.size()));
    std::vector<double> xs, ys;
    xs.reserve(pairs.size());
    ys.reserve(pairs.size());
    for (const auto& [delta, diff] : pairs) {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw domain_error("fit_exponent: deltas must be positive");
        if (!std::isfinite(diff) || diff < 0.0)
            throw domain_error("fit_exponent: diffs must be finite and >= 0");
        if (diff == 0.0)
            throw domain_error("fit_exponent: degenerate zero difference at delta = " +
                               std::to_string(delta));
        xs.push_back(std::log(delta));
        ys.push_back(std::log(diff));
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[i] == xs[j])
                throw domain_error("fit_exponent: deltas must be distinct");

    const double n = static_cast<double>(xs.size());
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
        syy += (ys[i] - ym) * (ys[i] - ym);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    if (syy == 0.0) {
        fit.r2 = 1.0;  // all points on a horizontal line, which the fit hits
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return fit;
}

inline void validate(const SweepPlan& plan) {
    std::visit([](const auto& p) { validate(p); }, plan.base);
    validate(plan.solver);
    if (plan.deltas.size() < 4)
        throw domain_error("sweep: needs at least 4 deltas");
    for (std::size_t i = 0; i < plan.deltas.size(); ++i) {
        if (!(plan.deltas[i] > 0.0) || !std::isfinite(plan.deltas[i]))
            throw domain_error("sweep: deltas must be positive and finite");
        if (i > 0 && !(plan.deltas[i] < plan.deltas[i - 1]))
            throw domain_error("sweep: deltas must be strictly decreasing");
    }
    if (plan.deltas.front() / plan.deltas.back() < 4.0)
        throw domain_error("sweep: deltas must span at least two dyadic decades");

    const bool tvp_mode = plan.mode == SweepMode::terminal_shift ||
                          plan.mode == SweepMode::tvp_start_shift;
    const bool have_tvp = std::holds_alternative<FractionalTVP>(plan.base);
    if (tvp_mode != have_tvp)
        throw domain_error(std::string("sweep: mode ") + to_string(plan.mode) +
                           (tvp_mode ? " requires a terminal value problem"
                                     : " requires an initial value problem"));

    const double delta_max = plan.deltas.front();
    if (const auto* ivp = std::get_if<FractionalIVP>(&plan.base)) {
        if (plan.mode == SweepMode::start_shift && !(delta_max < ivp->T - ivp->a))
            throw domain_error("sweep: largest delta must keep a + delta < T");
        if (plan.mode == SweepMode::alpha_shift) {
            const double smallest_alpha = ivp->alpha - delta_max;
            if (!(smallest_alpha > 0.0) ||
                ceil_order(smallest_alpha) != ceil_order(ivp->alpha))
                throw domain_error(
                    "sweep: alpha_shift deltas must keep ceil(alpha) constant");
        }
    }
    if (const auto* tvp = std::get_if<FractionalTVP>(&plan.base)) {
        if (plan.mode == SweepMode::tvp_start_shift && !(delta_max < tvp->T - tvp->a))
            throw domain_error("sweep: largest delta must keep a + delta < T");
    }
}

namespace detail {

struct SweepContext {
    const SweepPlan* plan = nullptr;
    Trajectory base_traj;        // base solution on its own grid
    double error_estimate = 0.0; // sup gap between base at n' and n'/2
};

inline std::size_t refined_steps(double full, double reduced, std::size_t n) {
    // Base grid step must not exceed the perturbed grid step.
    const double scaled = std::ceil(static_cast<double>(n) * full / reduced);
    return static_cast<std::size_t>(std::fmax(scaled, static_cast<double>(n)));
}

inline Trajectory solve_tvp_for_sweep(const FractionalTVP& p, SolverConfig cfg) {
    return solve_tvp_fredholm(p, cfg).traj;
}

inline SweepContext prepare_context(const SweepPlan& plan) {
    SweepContext ctx;
    ctx.plan = &plan;
    const double delta_max = plan.deltas.front();

    SolverConfig half = plan.solver;
    if (const auto* ivp = std::get_if<FractionalIVP>(&plan.base)) {
        SolverConfig cfg = plan.solver;
        if (plan.mode == SweepMode::start_shift)
            cfg.n_steps = refined_steps(ivp->T - ivp->a, ivp->T - ivp->a - delta_max,
                                        plan.solver.n_steps);
        ctx.base_traj = solve_ivp(*ivp, cfg);
        half.n_steps = std::max<std::size_t>(1, cfg.n_steps / 2);
        const Trajectory coarse = solve_ivp(*ivp, half);
        ctx.error_estimate = sup_diff(ctx.base_traj, coarse, ivp->a, ivp->T);
    } else {
        const auto& tvp = std::get<FractionalTVP>(plan.base);
        SolverConfig cfg = plan.solver;
        if (plan.mode == SweepMode::tvp_start_shift)
            cfg.n_steps = refined_steps(tvp.T - tvp.a, tvp.T - tvp.a - delta_max,
                                        plan.solver.n_steps);
        ctx.base_traj = solve_tvp_for_sweep(tvp, cfg);
        half.n_steps = std::max<std::size_t>(1, cfg.n_steps / 2);
        const Trajectory coarse = solve_tvp_for_sweep(tvp, half);
        ctx.error_estimate = sup_diff(ctx.base_traj, coarse, tvp.a, tvp.T);
    }
    return ctx;
}

inline void attach_start_shift_bounds(const FractionalIVP& base, double delta,
                                      const Trajectory& base_traj,
                                      const Trajectory& pert_traj, SweepRow& row) {
    ShiftBoundInputs in;
    in.alpha = base.alpha;
    in.a = base.a;
    in.a_tilde = base.a + delta;
    in.T = base.T;
    in.L = base.rhs.lipschitz_L;
    in.init = base.init;
    if (base.rhs.bound_M) {
        in.M = *base.rhs.bound_M;
    } else {
        double y_max = 0.0;
        for (double v : base_traj.values) y_max = std::fmax(y_max, std::fabs(v));
        for (double v : pert_traj.values) y_max = std::fmax(y_max, std::fabs(v));
        y_max *= 1.2;  // empirical working rectangle, 20% margin
        in.M = rhs_sup_on_rectangle(base.rhs, base.a, base.T, y_max);
    }
    row.bound_d1 = d1_bound(in);
    row.bound_d2 = d2_bound(in);
    row.bound_envelope = gronwall_envelope(in);
    row.lower_bound = base.alpha <= 1.0
                          ? example1_lower_bound(base.alpha, delta)
                          : example2_lower_bound(base.alpha, delta, base.T, in.a_tilde);
}

inline SweepRow measure_row(const SweepContext& ctx, double delta) {
    const SweepPlan& plan = *ctx.plan;
    SweepRow row;
    row.delta = delta;
    switch (plan.mode) {
        case SweepMode::start_shift: {
            const auto& base = std::get<FractionalIVP>(plan.base);
            FractionalIVP pert = base;
            pert.a = base.a + delta;
            const Trajectory pt = solve_ivp(pert, plan.solver);
            row.sup_diff = sup_diff(ctx.base_traj, pt, pert.a, base.T);
            attach_start_shift_bounds(base, delta, ctx.base_traj, pt, row);
            break;
        }
        case SweepMode::terminal_shift: {
            const auto& base = std::get<FractionalTVP>(plan.base);
            FractionalTVP pert = base;
            pert.T = base.T + delta;
            const Trajectory pt = solve_tvp_for_sweep(pert, plan.solver);
            row.sup_diff = sup_diff(ctx.base_traj, pt, base.a, base.T);
            break;
        }
        case SweepMode::tvp_start_shift: {
            const auto& base = std::get<FractionalTVP>(plan.base);
            FractionalTVP pert = base;
            pert.a = base.a + delta;
            const Trajectory pt = solve_tvp_for_sweep(pert, plan.solver);
            row.sup_diff = sup_diff(ctx.base_traj, pt, pert.a, base.T);
            break;
        }
        case SweepMode::alpha_shift: {
            const auto& base = std::get<FractionalIVP>(plan.base);
            FractionalIVP pert = base;
            pert.alpha = base.alpha - delta;  // downward keeps the ceiling
            const Trajectory pt = solve_ivp(pert, plan.solver);
            row.sup_diff = sup_diff(ctx.base_traj, pt, base.a, base.T);
            break;
        }
        case SweepMode::init_shift: {
            const auto& base = std::get<FractionalIVP>(plan.base);
            FractionalIVP pert = base;
            pert.init[0] = base.init[0] + delta;
            const Trajectory pt = solve_ivp(pert, plan.solver);
            row.sup_diff = sup_diff(ctx.base_traj, pt, base.a, base.T);
            break;
        }
        case SweepMode::rhs_scale: {
            const auto& base = std::get<FractionalIVP>(plan.base);
            FractionalIVP pert = base;
            pert.rhs.params["offset"] =
                detail::rhs_offset(base.rhs) + delta;  // ||f - f~||_inf = delta exactly
            const Trajectory pt = solve_ivp(pert, plan.solver);
            row.sup_diff = sup_diff(ctx.base_traj, pt, base.a, base.T);
            break;
        }
    }
    return row;
}

}  // namespace detail

/// Run the perturbation experiment.  Rows are independent and may execute on
/// up to `threads` workers (0 = hardware concurrency); results are assembled
/// in delta order, so the report does not depend on the execution schedule.
inline SweepReport run_sweep(const SweepPlan& plan, unsigned threads = 1) {
    validate(plan);
    const auto ctx = detail::prepare_context(plan);

    SweepReport report;
    report.mode = plan.mode;
    report.solver_error_estimate = ctx.error_estimate;
    report.rows.assign(plan.deltas.size(), SweepRow{});

    const double alpha = std::visit([](const auto& p) { return p.alpha; }, plan.base);
    switch (plan.mode) {
        case SweepMode::start_shift:
            report.predicted_exponent = std::fmin(alpha, 1.0);
            break;
        case SweepMode::terminal_shift:
        case SweepMode::tvp_start_shift:
            report.predicted_exponent = alpha;
            break;
        default:
            report.predicted_exponent = 1.0;
    }
    {
        const double a = std::visit([](const auto& p) { return p.a; }, plan.base);
        const double T = std::visit([](const auto& p) { return p.T; }, plan.base);
        const bool shifted_start = plan.mode == SweepMode::start_shift ||
                                   plan.mode == SweepMode::tvp_start_shift;
        report.comparison_interval = {shifted_start ? a + plan.deltas.front() : a, T};
    }

    auto work = [&](std::size_t i) {
        try {
            report.rows[i] = detail::measure_row(ctx, plan.deltas[i]);
        } catch (const std::exception& e) {
            report.rows[i].delta = plan.deltas[i];
            report.rows[i].status = e.what();
        }
    };

    unsigned n_threads = threads == 0 ? std::thread::hardware_concurrency() : threads;
    n_threads = std::max(1u, std::min<unsigned>(n_threads, plan.deltas.size()));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < plan.deltas.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < plan.deltas.size();
                     i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<std::pair<double, double>> fit_pairs;
    for (auto& row : report.rows) {
        if (row.ok() && row.sup_diff == 0.0)
            row.status = "degenerate: zero difference";
        if (row.ok()) fit_pairs.emplace_back(row.delta, row.sup_diff);
    }
    if (fit_pairs.size() < 4)
        throw convergence_error("sweep: only " + std::to_string(fit_pairs.size()) +
                                    " of " + std::to_string(report.rows.size()) +
                                    " rows survived; need at least 4 for the fit",
                                fit_pairs.size(),
                                std::numeric_limits<double>::quiet_NaN());
    const FitResult fit = fit_exponent(fit_pairs);
    report.fitted_exponent = fit.slope;
    report.fit_r2 = fit.r2;

    for (std::size_t i = 0; i + 1 < fit_pairs.size(); ++i)
        if (fit_pairs[i + 1].second > fit_pairs[i].second) {
            report.warnings.push_back(
                "sup_diff is not monotone across deltas (delta = " +
                std::to_string(fit_pairs[i + 1].first) + ")");
        }
    return report;
}

}  // namespace fracwell
