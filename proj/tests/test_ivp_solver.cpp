#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fracwell/ivp_solver.hpp"
#include "oracle_values.hpp"

using namespace fracwell;

namespace {

FractionalIVP linear_problem(double alpha, double lambda = 1.0, double y0 = 1.0) {
    FractionalIVP p;
    p.alpha = alpha;
    p.a = 0.0;
    p.T = 1.0;
    p.init.assign(ceil_order(alpha), 0.0);
    p.init[0] = y0;
    p.rhs = make_rhs("linear", {{"lambda", lambda}}, std::fabs(lambda), std::nullopt);
    return p;
}

FractionalIVP manufactured_problem(double alpha) {
    FractionalIVP p;
    p.alpha = alpha;
    p.a = 0.0;
    p.T = 1.0;
    p.init.assign(ceil_order(alpha), 0.0);
    p.rhs = make_rhs("manufactured_quadratic", {{"alpha", alpha}, {"a", 0.0}}, 0.0,
                     std::nullopt);
    return p;
}

double manufactured_sup_error(double alpha, std::size_t n) {
    SolverConfig cfg;
    cfg.n_steps = n;
    const auto p = manufactured_problem(alpha);
    const auto traj = solve_ivp(p, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.nodes.size(); ++i) {
        const double exact = traj.nodes[i] * traj.nodes[i];
        worst = std::fmax(worst, std::fabs(traj.values[i] - exact));
    }
    return worst;
}

Trajectory sample_ml_solution(double alpha, std::size_t n) {
    Trajectory traj;
    traj.nodes = make_uniform_grid(0.0, 1.0, n);
    traj.values.resize(traj.nodes.size());
    for (std::size_t i = 0; i < traj.nodes.size(); ++i)
        traj.values[i] = ml_linear_solution(alpha, 0.0, 1.0, 1.0, traj.nodes[i]);
    return traj;
}

}  // namespace

TEST_CASE("volterra_rhs closed forms") {
    Trajectory traj;
    traj.nodes = make_uniform_grid(0.0, 1.0, 64);
    traj.values.assign(traj.nodes.size(), 0.0);

    FractionalIVP p;
    p.a = 0.0;
    p.T = 1.0;

    // f == 0: only the initial tail survives
    p.alpha = 0.5;
    p.init = {3.0};
    p.rhs = make_rhs("constant", {{"c", 0.0}}, 0.0, 0.0);
    CHECK(volterra_rhs(p, traj, 0.37) == 3.0);
    CHECK(volterra_rhs(p, traj, 1.0) == 3.0);

    // f == 1, alpha = 1: the plain integral
    p.alpha = 1.0;
    p.init = {0.0};
    p.rhs = make_rhs("constant", {{"c", 1.0}}, 0.0, 1.0);
    CHECK(std::fabs(volterra_rhs(p, traj, 1.0) - 1.0) < 1e-14);

    // f == 1, alpha = 1/2: (t-a)^alpha / Gamma(alpha+1)
    p.alpha = 0.5;
    CHECK(std::fabs(volterra_rhs(p, traj, 1.0) - oracle::inv_gamma_1_5) < 1e-13);

    // between-node targets integrate the partial panel exactly too
    CHECK(std::fabs(volterra_rhs(p, traj, 0.7031) - std::pow(0.7031, 0.5) / oracle::gamma_1_5) <
          1e-13);

    Trajectory shifted = traj;
    for (auto& x : shifted.nodes) x += 0.5;
    CHECK_THROWS_AS(volterra_rhs(p, shifted, 0.9), coverage_error);
    Trajectory shorty;
    shorty.nodes = make_uniform_grid(0.0, 0.5, 8);
    shorty.values.assign(9, 0.0);
    CHECK_THROWS_AS(volterra_rhs(p, shorty, 0.9), coverage_error);
}

TEST_CASE("solve_ivp reproduces classical and fractional closed forms") {
    SolverConfig cfg;
    cfg.n_steps = 1024;

    const auto p1 = linear_problem(1.0);
    const auto t1 = solve_ivp(p1, cfg);
    CHECK(std::fabs(t1.values.back() - std::exp(1.0)) < 5e-3);

    const auto p_half = linear_problem(0.5);
    const auto t_half = solve_ivp(p_half, cfg);
    CHECK(std::fabs(t_half.values.back() - mittag_leffler(0.5, 1.0)) < 2e-2);

    CHECK(manufactured_sup_error(0.5, 1024) < 1e-4);
}

TEST_CASE("initial condition is exact and node count matches") {
    SolverConfig cfg;
    cfg.n_steps = 37;
    const auto p = linear_problem(0.7, 1.0, 0.8125);
    const auto traj = solve_ivp(p, cfg);
    REQUIRE(traj.nodes.size() == 38);
    CHECK(traj.values[0] == 0.8125);
    CHECK(traj.nodes.front() == 0.0);
    CHECK(traj.nodes.back() == 1.0);
}

TEST_CASE("empirical convergence order on the manufactured problem") {
    // For alpha < 1 the scheme converges at essentially second order here.
    for (double alpha : {0.3, 0.5, 0.8}) {
        const double e1 = manufactured_sup_error(alpha, 128);
        const double e2 = manufactured_sup_error(alpha, 256);
        const double e3 = manufactured_sup_error(alpha, 512);
        const double eoc1 = std::log2(e1 / e2);
        const double eoc2 = std::log2(e2 / e3);
        const double need = std::min(1.0 + alpha, 2.0) - 0.25;
        CHECK(eoc1 >= need);
        CHECK(eoc2 >= need);
    }
    // For alpha > 1 the forcing 2 t^(2-alpha) has an unbounded second
    // derivative at the start, which caps the product-trapezoidal rate at
    // h^(3-alpha); measure that honestly.
    const double e1 = manufactured_sup_error(1.5, 128);
    const double e2 = manufactured_sup_error(1.5, 256);
    const double eoc = std::log2(e1 / e2);
    CHECK(eoc >= 1.35);
    CHECK(eoc <= 1.65);
}

TEST_CASE("alpha = 1 agrees with the classical trapezoidal rule for constant f") {
    SolverConfig cfg;
    cfg.n_steps = 256;
    FractionalIVP p;
    p.alpha = 1.0;
    p.a = 0.0;
    p.T = 1.0;
    p.init = {0.25};
    p.rhs = make_rhs("constant", {{"c", 0.75}}, 0.0, 0.75);
    const auto traj = solve_ivp(p, cfg);
    const double h = 1.0 / 256.0;
    double classical = 0.25;
    for (std::size_t i = 1; i < traj.nodes.size(); ++i) {
        classical += h * 0.75;  // trapezoid of a constant
        CHECK(std::fabs(traj.values[i] - classical) < 1e-10);
    }
}

TEST_CASE("discrete first derivative converges to y_1 for alpha > 1") {
    FractionalIVP p = linear_problem(1.5);
    p.init = {1.0, 0.5};
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {256u, 1024u, 4096u}) {
        SolverConfig cfg;
        cfg.n_steps = n;
        const auto traj = solve_ivp(p, cfg);
        const double h = 1.0 / static_cast<double>(n);
        const double dq = (traj.values[1] - traj.values[0]) / h;
        const double err = std::fabs(dq - 0.5);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("fixed-point residual of solver output stays inside tolerance") {
    SolverConfig cfg;
    cfg.n_steps = 256;
    for (double alpha : {0.5, 1.0, 1.5}) {
        const auto p = linear_problem(alpha);
        const auto traj = solve_ivp(p, cfg);
        CHECK(residual_check(p, traj) <= cfg.tol_residual);
    }
    const auto pm = manufactured_problem(0.8);
    CHECK(residual_check(pm, solve_ivp(pm, cfg)) <= cfg.tol_residual);
}

TEST_CASE("residual of the sampled closed form halves with the step") {
    const auto p = linear_problem(0.5);
    const double r1 = residual_check(p, sample_ml_solution(0.5, 256));
    const double r2 = residual_check(p, sample_ml_solution(0.5, 512));
    CHECK(r2 <= 0.6 * r1);
}

TEST_CASE("a unit perturbation of one node is visible in the residual") {
    SolverConfig cfg;
    cfg.n_steps = 64;
    const auto p = linear_problem(0.5);
    auto traj = solve_ivp(p, cfg);
    traj.values[32] += 1.0;
    CHECK(residual_check(p, traj) >= 0.5);
}

TEST_CASE("divergent problems fail loudly with the node location") {
    SolverConfig cfg;
    cfg.n_steps = 512;
    FractionalIVP p;
    p.alpha = 1.0;
    p.a = 0.0;
    p.T = 10.0;
    p.init = {1.0};
    p.rhs = make_rhs("linear", {{"lambda", 30.0}}, 30.0, std::nullopt);
    try {
        solve_ivp(p, cfg);
        FAIL("expected blow_up_error");
    } catch (const blow_up_error& e) {
        CHECK(e.node_index > 0);
        CHECK(e.node_index <= 512);
    }
}

TEST_CASE("ml_linear_solution pinned values") {
    CHECK(ml_linear_solution(0.5, 0.0, 1.0, 1.0, 0.0) == 1.0);
    CHECK(std::fabs(ml_linear_solution(1.0, 0.0, 1.0, 1.0, 1.0) - std::exp(1.0)) < 1e-12);
    CHECK(ml_linear_solution(0.5, 0.25, 1.0, 1.0, 1.0) ==
          mittag_leffler(0.5, std::pow(0.75, 0.5)));
    CHECK_THROWS_AS(ml_linear_solution(0.5, 1.0, 1.0, 1.0, 0.5), domain_error);
}
