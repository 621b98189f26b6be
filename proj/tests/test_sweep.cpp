#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fracwell/sweep.hpp"
#include "oracle_values.hpp"

using namespace fracwell;

namespace {

FractionalIVP example1_ivp(double alpha) {
    FractionalIVP p;
    p.alpha = alpha;
    p.a = 0.0;
    p.T = 1.0;
    p.init.assign(ceil_order(alpha), 0.0);
    p.init[0] = 1.0;
    p.rhs = make_rhs("linear", {{"lambda", 1.0}}, 1.0, std::nullopt);
    return p;
}

std::vector<double> dyadic_deltas(int hi, int lo) {  // 2^-hi .. 2^-lo
    std::vector<double> d;
    for (int k = hi; k <= lo; ++k) d.push_back(std::pow(2.0, -k));
    return d;
}

Trajectory sampled(const std::vector<double>& nodes, double (*f)(double)) {
    Trajectory t;
    t.nodes = nodes;
    t.values.reserve(nodes.size());
    for (double x : nodes) t.values.push_back(f(x));
    return t;
}

}  // namespace

TEST_CASE("sup_diff basics") {
    const auto grid = make_uniform_grid(0.0, 1.0, 512);
    const auto zero = sampled(grid, +[](double) { return 0.0; });
    const auto c = sampled(grid, +[](double) { return -2.5; });
    CHECK(sup_diff(zero, zero, 0.0, 1.0) == 0.0);
    CHECK(sup_diff(zero, c, 0.0, 1.0) == 2.5);

    const auto lin = sampled(make_uniform_grid(0.0, 1.0, 4096),
                             +[](double t) { return t; });
    const auto sq = sampled(make_uniform_grid(0.0, 1.0, 3000),
                            +[](double t) { return t * t; });
    CHECK(std::fabs(sup_diff(lin, sq, 0.0, 1.0) - 0.25) < 1e-6);

    // restriction to [lo, hi] matters; 0.75 is a node of the 4096 grid
    CHECK(std::fabs(sup_diff(lin, sq, 0.75, 1.0) - (0.75 - 0.5625)) < 1e-6);

    CHECK_THROWS_AS(sup_diff(lin, sq, -0.5, 1.0), coverage_error);
    CHECK_THROWS_AS(sup_diff(lin, sq, 0.0, 1.5), coverage_error);
    CHECK_THROWS_AS(sup_diff(lin, sq, 0.9, 0.1), domain_error);
}

TEST_CASE("fit_exponent on exact power laws") {
    std::vector<std::pair<double, double>> quad, root;
    for (double d : {1.0, 0.5, 0.25, 0.125}) {
        quad.emplace_back(d, d * d);
        root.emplace_back(d, 3.0 * std::sqrt(d));
    }
    const auto f1 = fit_exponent(quad);
    CHECK(std::fabs(f1.slope - 2.0) < 1e-12);
    CHECK(std::fabs(f1.r2 - 1.0) < 1e-12);
    const auto f2 = fit_exponent(root);
    CHECK(std::fabs(f2.slope - 0.5) < 1e-12);
    CHECK(std::fabs(f2.r2 - 1.0) < 1e-12);
}

TEST_CASE("fit_exponent under 1% multiplicative noise") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    const double truth = 0.7;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, double>> pairs;
        for (double d : dyadic_deltas(3, 8))
            pairs.emplace_back(d, 2.0 * std::pow(d, truth) * (1.0 + noise(rng)));
        const auto fit = fit_exponent(pairs);
        REQUIRE(std::fabs(fit.slope - truth) < 0.05);
    }
}

TEST_CASE("fit_exponent degenerate inputs") {
    std::vector<std::pair<double, double>> three = {{1.0, 1.0}, {0.5, 0.5}, {0.25, 0.25}};
    CHECK_THROWS_AS(fit_exponent(three), domain_error);
    std::vector<std::pair<double, double>> zero_diff = {
        {1.0, 1.0}, {0.5, 0.5}, {0.25, 0.0}, {0.125, 0.125}};
    CHECK_THROWS_AS(fit_exponent(zero_diff), domain_error);
    std::vector<std::pair<double, double>> dup = {
        {1.0, 1.0}, {0.5, 0.5}, {0.5, 0.4}, {0.125, 0.125}};
    CHECK_THROWS_AS(fit_exponent(dup), domain_error);
    std::vector<std::pair<double, double>> neg = {
        {1.0, 1.0}, {0.5, 0.5}, {-0.25, 0.3}, {0.125, 0.125}};
    CHECK_THROWS_AS(fit_exponent(neg), domain_error);
}

TEST_CASE("plan validation") {
    SweepPlan plan;
    plan.base = example1_ivp(0.5);
    plan.mode = SweepMode::start_shift;
    plan.deltas = dyadic_deltas(3, 6);
    plan.solver.n_steps = 64;
    CHECK_NOTHROW(validate(plan));

    SweepPlan bad = plan;
    bad.deltas = {0.25, 0.125, 0.125, 0.0625};
    CHECK_THROWS_AS(validate(bad), domain_error);
    bad.deltas = {0.25, 0.125};
    CHECK_THROWS_AS(validate(bad), domain_error);
    bad.deltas = {0.25, 0.2, 0.15, 0.125};  // spans less than two dyadic decades
    CHECK_THROWS_AS(validate(bad), domain_error);

    SweepPlan tvp_mode = plan;
    tvp_mode.mode = SweepMode::terminal_shift;  // with an IVP base
    CHECK_THROWS_AS(validate(tvp_mode), domain_error);

    SweepPlan ceiling = plan;
    ceiling.base = example1_ivp(1.2);
    ceiling.mode = SweepMode::alpha_shift;
    ceiling.deltas = {0.25, 0.125, 0.0625, 0.03125};  // 1.2 - 0.25 crosses ceil
    CHECK_THROWS_AS(validate(ceiling), domain_error);

    SweepPlan wide = plan;
    wide.deltas = {1.5, 0.75, 0.1, 0.05};  // a + delta beyond T
    CHECK_THROWS_AS(validate(wide), domain_error);
}

TEST_CASE("zero shift reproduces the base solve exactly") {
    SolverConfig cfg;
    cfg.n_steps = 128;
    const auto p = example1_ivp(0.5);
    const auto one = solve_ivp(p, cfg);
    const auto two = solve_ivp(p, cfg);
    CHECK(sup_diff(one, two, p.a, p.T) <= 2.0 * cfg.tol_residual);

    FractionalTVP q;
    q.alpha = 0.5;
    q.a = 0.0;
    q.T = 1.0;
    q.y_star = 2.0;
    q.rhs = p.rhs;
    const auto f1 = solve_tvp_fredholm(q, cfg);
    const auto f2 = solve_tvp_fredholm(q, cfg);
    CHECK(sup_diff(f1.traj, f2.traj, q.a, q.T) <= 2.0 * cfg.tol_residual);
}

TEST_CASE("start_shift sweep on the alpha > 1 linear problem") {
    SweepPlan plan;
    plan.base = example1_ivp(1.5);
    plan.mode = SweepMode::start_shift;
    plan.deltas = dyadic_deltas(3, 6);
    plan.solver.n_steps = 256;
    const auto report = run_sweep(plan);

    CHECK(report.predicted_exponent == 1.0);
    CHECK(std::fabs(report.fitted_exponent - 1.0) <= 0.1);
    CHECK(report.fit_r2 >= 0.99);
    CHECK(report.comparison_interval.first == 0.125);
    CHECK(report.comparison_interval.second == 1.0);
    CHECK(report.solver_error_estimate < 1e-3);
    for (const auto& row : report.rows) {
        REQUIRE(row.ok());
        REQUIRE(row.bound_d1.has_value());
        REQUIRE(row.bound_envelope.has_value());
        REQUIRE(row.lower_bound.has_value());
        CHECK(*row.bound_d1 == 0.0);  // y_1 = 0 kills the Taylor-head term
        CHECK(row.sup_diff <= *row.bound_envelope + 10.0 * report.solver_error_estimate);
        CHECK(row.sup_diff >= *row.lower_bound - 10.0 * report.solver_error_estimate);
    }
    // decreasing deltas give decreasing differences on this problem
    CHECK(report.warnings.empty());
}

TEST_CASE("start_shift bound sandwich on the alpha <= 1 linear problem") {
    SweepPlan plan;
    plan.base = example1_ivp(0.5);
    plan.mode = SweepMode::start_shift;
    plan.deltas = dyadic_deltas(3, 6);
    plan.solver.n_steps = 512;
    const auto report = run_sweep(plan);
    CHECK(report.predicted_exponent == 0.5);
    for (const auto& row : report.rows) {
        REQUIRE(row.ok());
        CHECK(row.sup_diff <= *row.bound_envelope + 10.0 * report.solver_error_estimate);
        CHECK(row.sup_diff >= *row.lower_bound - 10.0 * report.solver_error_estimate);
        CHECK(*row.bound_d2 <= *row.bound_envelope);
    }
}

TEST_CASE("init_shift recovers exponent one almost exactly") {
    SweepPlan plan;
    plan.base = example1_ivp(0.5);
    plan.mode = SweepMode::init_shift;
    plan.deltas = dyadic_deltas(3, 6);
    plan.solver.n_steps = 256;
    const auto report = run_sweep(plan);
    CHECK(report.predicted_exponent == 1.0);
    CHECK(std::fabs(report.fitted_exponent - 1.0) < 1e-3);
    CHECK(report.fit_r2 > 0.999999);
    CHECK(report.comparison_interval.first == 0.0);
}

TEST_CASE("rhs_scale realizes an exact sup-norm perturbation") {
    SweepPlan plan;
    plan.base = example1_ivp(0.5);
    plan.mode = SweepMode::rhs_scale;
    plan.deltas = dyadic_deltas(3, 6);
    plan.solver.n_steps = 256;
    const auto report = run_sweep(plan);
    // superposition: the difference solves the same linear equation with
    // constant forcing, so the decay is exactly linear in delta
    CHECK(std::fabs(report.fitted_exponent - 1.0) < 1e-3);
    CHECK(report.fit_r2 > 0.999999);
}

TEST_CASE("failed rows are recorded and excluded from the fit") {
    // The damped Fredholm iteration for lambda = 2 stops contracting near
    // T = 2, so only the widest terminal shift fails.
    SweepPlan plan;
    FractionalTVP base;
    base.alpha = 0.5;
    base.a = 0.0;
    base.T = 1.5;
    base.y_star = 1.0;
    base.rhs = make_rhs("linear", {{"lambda", 2.0}}, 2.0, std::nullopt);
    plan.base = base;
    plan.mode = SweepMode::terminal_shift;
    plan.deltas = {0.5, 0.25, 0.125, 0.0625, 0.03125};
    plan.solver.n_steps = 256;

    const auto report = run_sweep(plan);
    REQUIRE(report.rows.size() == 5);
    CHECK_FALSE(report.rows[0].ok());
    CHECK(report.rows[0].status.find("contractive") != std::string::npos);
    for (std::size_t i = 1; i < 5; ++i) REQUIRE(report.rows[i].ok());
    CHECK(std::isfinite(report.fitted_exponent));

    // Fewer than four survivors is a hard error.
    SweepPlan doomed = plan;
    doomed.base = base;
    std::get<FractionalTVP>(doomed.base).T = 1.6;
    doomed.deltas = {0.8, 0.6, 0.5, 0.45, 0.2};
    CHECK_THROWS_AS(run_sweep(doomed), convergence_error);
}

TEST_CASE("sweep reports are independent of the thread count") {
    SweepPlan plan;
    plan.base = example1_ivp(0.8);
    plan.mode = SweepMode::start_shift;
    plan.deltas = dyadic_deltas(3, 7);
    plan.solver.n_steps = 128;
    const auto seq = run_sweep(plan, 1);
    const auto par = run_sweep(plan, 4);
    REQUIRE(seq.rows.size() == par.rows.size());
    for (std::size_t i = 0; i < seq.rows.size(); ++i) {
        CHECK(seq.rows[i].sup_diff == par.rows[i].sup_diff);
        CHECK(seq.rows[i].delta == par.rows[i].delta);
        CHECK(*seq.rows[i].bound_envelope == *par.rows[i].bound_envelope);
    }
    CHECK(seq.fitted_exponent == par.fitted_exponent);
    CHECK(seq.fit_r2 == par.fit_r2);
}

TEST_CASE("perturbed trajectories are never evaluated left of their start") {
    // The interpolation guard is the instrument: a perturbed solve only
    // covers [a~, T], so any sup_diff evaluation left of a~ would throw.
    SolverConfig cfg;
    cfg.n_steps = 64;
    auto p = example1_ivp(0.5);
    p.a = 0.25;
    const auto pert = solve_ivp(p, cfg);
    CHECK_THROWS_AS(trajectory_eval(pert, 0.2499999), coverage_error);

    SweepPlan plan;
    plan.base = example1_ivp(0.5);
    plan.mode = SweepMode::start_shift;
    plan.deltas = dyadic_deltas(2, 5);
    plan.solver.n_steps = 64;
    CHECK_NOTHROW(run_sweep(plan));
}
