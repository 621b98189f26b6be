#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracwell/errors.hpp"
#include "fracwell/special_functions.hpp"

namespace fracwell {

/// Number of initial conditions a Caputo operator of this order carries.
inline std::size_t ceil_order(double alpha) {
    return static_cast<std::size_t>(std::ceil(alpha));
}

enum class RhsKind {
    constant,                // f = c
    linear,                  // f = lambda * y
    logistic,                // f = r * y * (1 - y)
    cos_forced,              // f = cos(t) - y
    manufactured_quadratic,  // f = 2 (t-a)^(2-alpha) / Gamma(3-alpha), t-only
};

inline const std::vector<std::string>& rhs_registry_names() {
    static const std::vector<std::string> names = {
        "constant", "linear", "logistic", "cos_forced", "manufactured_quadratic"};
    return names;
}

/// A named right-hand side f(t, y) from the fixed registry, plus the declared
/// Lipschitz constant and sup bound the theory consumes.  bound_M empty means
/// "unbounded"; consumers then fall back to an empirical rectangle bound.
struct RhsSpec {
    std::string name;
    std::map<std::string, double> params;
    double lipschitz_L = 0.0;
    std::optional<double> bound_M;  // nullopt = unbounded

    RhsKind kind = RhsKind::constant;
};

namespace detail {

inline double rhs_param(const RhsSpec& rhs, const std::string& key) {
    auto it = rhs.params.find(key);
    if (it == rhs.params.end())
        throw domain_error("rhs '" + rhs.name + "': missing parameter '" + key + "'");
    return it->second;
}

inline double rhs_offset(const RhsSpec& rhs) {
    auto it = rhs.params.find("offset");
    return it == rhs.params.end() ? 0.0 : it->second;
}

}  // namespace detail

/// Resolve a registry name into a validated RhsSpec.
///
/// Every kind accepts an optional "offset" parameter realizing f + offset;
/// sweeps use it to perturb the right-hand side by an exactly known amount.
inline RhsSpec make_rhs(const std::string& name, std::map<std::string, double> params,
                        double lipschitz_L, std::optional<double> bound_M) {
    RhsSpec rhs;
    rhs.name = name;
    rhs.params = std::move(params);
    rhs.lipschitz_L = lipschitz_L;
    rhs.bound_M = bound_M;

    std::vector<std::string> required;
    if (name == "constant") {
        rhs.kind = RhsKind::constant;
        required = {"c"};
    } else if (name == "linear") {
        rhs.kind = RhsKind::linear;
        required = {"lambda"};
    } else if (name == "logistic") {
        rhs.kind = RhsKind::logistic;
        required = {"r"};
    } else if (name == "cos_forced") {
        rhs.kind = RhsKind::cos_forced;
    } else if (name == "manufactured_quadratic") {
        rhs.kind = RhsKind::manufactured_quadratic;
        required = {"alpha", "a"};
    } else {
        std::string msg = "unknown rhs name '" + name + "'; registry:";
        for (const auto& n : rhs_registry_names()) msg += " " + n;
        throw domain_error(msg);
    }

    for (const auto& key : required)
        if (!rhs.params.count(key))
            throw domain_error("rhs '" + name + "': missing parameter '" + key + "'");
    for (const auto& [key, value] : rhs.params) {
        const bool known = key == "offset" ||
                           std::find(required.begin(), required.end(), key) != required.end();
        if (!known)
            throw domain_error("rhs '" + name + "': unknown parameter '" + key + "'");
        if (!std::isfinite(value))
            throw domain_error("rhs '" + name + "': parameter '" + key + "' is not finite");
    }
    if (rhs.kind == RhsKind::manufactured_quadratic) {
        const double al = rhs.params.at("alpha");
        if (al <= 0.0 || al >= 2.0)
            throw domain_error("rhs 'manufactured_quadratic': alpha parameter must lie in (0, 2)");
    }
    if (!std::isfinite(lipschitz_L) || lipschitz_L < 0.0)
        throw domain_error("rhs '" + name + "': lipschitz_L must be finite and >= 0");
    if (bound_M && (!std::isfinite(*bound_M) || *bound_M < 0.0))
        throw domain_error("rhs '" + name + "': bound_M must be finite and >= 0");
    return rhs;
}

/// Evaluate f(t, y).
inline double rhs_eval(const RhsSpec& rhs, double t, double y) {
    double v = 0.0;
    switch (rhs.kind) {
        case RhsKind::constant:
            v = detail::rhs_param(rhs, "c");
            break;
        case RhsKind::linear:
            v = detail::rhs_param(rhs, "lambda") * y;
            break;
        case RhsKind::logistic:
            v = detail::rhs_param(rhs, "r") * y * (1.0 - y);
            break;
        case RhsKind::cos_forced:
            v = std::cos(t) - y;
            break;
        case RhsKind::manufactured_quadratic: {
            const double al = detail::rhs_param(rhs, "alpha");
            const double a = detail::rhs_param(rhs, "a");
            v = 2.0 * std::pow(t - a, 2.0 - al) / gamma_fn(3.0 - al);
            break;
        }
    }
    v += detail::rhs_offset(rhs);
    if (!std::isfinite(v))
        throw domain_error("rhs '" + rhs.name + "': non-finite value at t = " +
                           std::to_string(t) + ", y = " + std::to_string(y));
    return v;
}

/// Sup of |f| over [t_lo, t_hi] x [-y_max, y_max], evaluated analytically per
/// registry entry.  This is the empirical stand-in for M when the declared
/// bound is "unbounded".
inline double rhs_sup_on_rectangle(const RhsSpec& rhs, double t_lo, double t_hi,
                                   double y_max) {
    double v = 0.0;
    switch (rhs.kind) {
        case RhsKind::constant:
            v = std::fabs(detail::rhs_param(rhs, "c"));
            break;
        case RhsKind::linear:
            v = std::fabs(detail::rhs_param(rhs, "lambda")) * y_max;
            break;
        case RhsKind::logistic:
            // |y(1-y)| on [-Y, Y] peaks at y = -Y for Y > 0.
            v = std::fabs(detail::rhs_param(rhs, "r")) * y_max * (1.0 + y_max);
            break;
        case RhsKind::cos_forced:
            v = 1.0 + y_max;
            break;
        case RhsKind::manufactured_quadratic: {
            const double al = detail::rhs_param(rhs, "alpha");
            const double a = detail::rhs_param(rhs, "a");
            const double reach = std::max(0.0, t_hi - a);
            v = 2.0 * std::pow(reach, 2.0 - al) / gamma_fn(3.0 - al);
            break;
        }
    }
    (void)t_lo;
    return v + std::fabs(detail::rhs_offset(rhs));
}

/// A Caputo initial value problem on [a, T].
struct FractionalIVP {
    double alpha = 0.5;
    double a = 0.0;
    double T = 1.0;
    std::vector<double> init;  // y^(k)(a), k = 0 .. ceil(alpha)-1
    RhsSpec rhs;
};

inline void validate(const FractionalIVP& p) {
    if (!std::isfinite(p.alpha) || p.alpha <= 0.0)
        throw domain_error("ivp: alpha must be positive and finite");
    if (!std::isfinite(p.a) || !std::isfinite(p.T) || !(p.a < p.T))
        throw domain_error("ivp: requires a < T, both finite");
    if (p.init.size() != ceil_order(p.alpha))
        throw domain_error("ivp: init length must equal ceil(alpha)=" +
                           std::to_string(ceil_order(p.alpha)));
    for (double v : p.init)
        if (!std::isfinite(v)) throw domain_error("ivp: initial values must be finite");
}

/// A terminal value problem, restricted to 0 < alpha < 1.
struct FractionalTVP {
    double alpha = 0.5;
    double a = 0.0;
    double T = 1.0;
    double y_star = 0.0;
    RhsSpec rhs;
};

inline void validate(const FractionalTVP& p) {
    if (!std::isfinite(p.alpha) || p.alpha <= 0.0 || p.alpha >= 1.0)
        throw domain_error("tvp: requires 0 < alpha < 1");
    if (!std::isfinite(p.a) || !std::isfinite(p.T) || !(p.a < p.T))
        throw domain_error("tvp: requires a < T, both finite");
    if (!std::isfinite(p.y_star)) throw domain_error("tvp: y_star must be finite");
}

enum class Interp { piecewise_linear };

/// Time grid plus solution values; evaluation between nodes is piecewise
/// linear, node hits are exact.
struct Trajectory {
    std::vector<double> nodes;
    std::vector<double> values;
    Interp interp = Interp::piecewise_linear;
};

inline void validate(const Trajectory& traj) {
    if (traj.nodes.size() != traj.values.size() || traj.nodes.size() < 2)
        throw domain_error("trajectory: nodes/values must have equal length >= 2");
    for (std::size_t i = 0; i + 1 < traj.nodes.size(); ++i)
        if (!(traj.nodes[i] < traj.nodes[i + 1]))
            throw domain_error("trajectory: nodes must be strictly increasing");
    for (double v : traj.values)
        if (!std::isfinite(v)) throw domain_error("trajectory: values must be finite");
}

/// n+1 equispaced nodes from a to T; the endpoints are exact.
inline std::vector<double> make_uniform_grid(double a, double T, std::size_t n) {
    if (!std::isfinite(a) || !std::isfinite(T) || !(a < T))
        throw domain_error("make_uniform_grid: degenerate interval, requires a < T");
    if (n < 1) throw domain_error("make_uniform_grid: n must be >= 1");
    std::vector<double> nodes(n + 1);
    const double h = (T - a) / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) nodes[i] = a + h * static_cast<double>(i);
    nodes[0] = a;
    nodes[n] = T;
    return nodes;
}

/// Piecewise-linear interpolation; exact at nodes, error outside coverage.
inline double trajectory_eval(const Trajectory& traj, double t) {
    const auto& x = traj.nodes;
    const auto& y = traj.values;
    if (x.empty()) throw coverage_error("trajectory_eval: empty trajectory");
    if (t < x.front() || t > x.back())
        throw coverage_error("trajectory_eval: t = " + std::to_string(t) +
                             " outside [" + std::to_string(x.front()) + ", " +
                             std::to_string(x.back()) + "]");
    auto it = std::lower_bound(x.begin(), x.end(), t);
    if (it != x.end() && *it == t)
        return y[static_cast<std::size_t>(it - x.begin())];
    const std::size_t hi = static_cast<std::size_t>(it - x.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + w * (y[hi] - y[lo]);
}

}  // namespace fracwell
