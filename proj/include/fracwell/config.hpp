#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracwell/errors.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/special_functions.hpp"
#include "fracwell/sweep.hpp"

namespace fracwell {

enum class Command { ml, solve_ivp, solve_tvp, sweep };

inline const char* to_string(Command c) {
    switch (c) {
        case Command::ml: return "ml";
        case Command::solve_ivp: return "solve-ivp";
        case Command::solve_tvp: return "solve-tvp";
        case Command::sweep: return "sweep";
    }
    return "?";
}

inline std::optional<Command> command_from_string(const std::string& s) {
    if (s == "ml") return Command::ml;
    if (s == "solve-ivp") return Command::solve_ivp;
    if (s == "solve-tvp") return Command::solve_tvp;
    if (s == "sweep") return Command::sweep;
    return std::nullopt;
}

enum class OutputFormat { csv, json, both };

inline std::optional<OutputFormat> format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "both") return OutputFormat::both;
    return std::nullopt;
}

enum class TvpMethodChoice { fredholm, shooting, both };

inline std::optional<TvpMethodChoice> tvp_method_from_string(const std::string& s) {
    if (s == "fredholm") return TvpMethodChoice::fredholm;
    if (s == "shooting") return TvpMethodChoice::shooting;
    if (s == "both") return TvpMethodChoice::both;
    return std::nullopt;
}

/// Fully validated run description.  The JSON document supplies the command
/// and problem data; output path, format and TVP method arrive as flags.
struct RunConfig {
    Command command = Command::ml;
    std::optional<FractionalIVP> ivp;
    std::optional<FractionalTVP> tvp;
    SolverConfig solver;
    std::optional<SweepMode> sweep_mode;
    std::vector<double> sweep_deltas;
    std::optional<MLQuery> ml_query;
    unsigned long seed = 0;  // reserved

    std::string output_path;
    OutputFormat format = OutputFormat::both;
    TvpMethodChoice tvp_method = TvpMethodChoice::both;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed,
                                std::vector<std::string>& violations) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            violations.push_back("unknown field '" + where + item.key() + "'");
    }
}

inline std::optional<double> take_number(const json& obj, const std::string& where,
                                         const char* key, bool required,
                                         std::vector<std::string>& violations) {
    if (!obj.contains(key)) {
        if (required) violations.push_back("missing field '" + where + key + "'");
        return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        violations.push_back("field '" + where + key + "' must be a number");
        return std::nullopt;
    }
    return v.get<double>();
}

inline std::optional<RhsSpec> parse_rhs(const json& j, std::vector<std::string>& violations) {
    if (!j.is_object()) {
        violations.push_back("field 'problem.rhs' must be an object");
        return std::nullopt;
    }
    reject_unknown_keys(j, "problem.rhs.", {"name", "params", "lipschitz_L", "bound_M"},
                        violations);
    if (!j.contains("name") || !j.at("name").is_string()) {
        violations.push_back("field 'problem.rhs.name' must be a string");
        return std::nullopt;
    }
    std::map<std::string, double> params;
    if (j.contains("params")) {
        if (!j.at("params").is_object()) {
            violations.push_back("field 'problem.rhs.params' must be an object");
            return std::nullopt;
        }
        for (const auto& item : j.at("params").items()) {
            if (!item.value().is_number()) {
                violations.push_back("field 'problem.rhs.params." + item.key() +
                                     "' must be a number");
                return std::nullopt;
            }
            params[item.key()] = item.value().get<double>();
        }
    }
    double lipschitz = 0.0;
    if (auto v = take_number(j, "problem.rhs.", "lipschitz_L", false, violations))
        lipschitz = *v;
    std::optional<double> bound;
    if (j.contains("bound_M")) {
        const auto& b = j.at("bound_M");
        if (b.is_string() && b.get<std::string>() == "unbounded") {
            bound = std::nullopt;
        } else if (b.is_number()) {
            bound = b.get<double>();
        } else {
            violations.push_back(
                "field 'problem.rhs.bound_M' must be a number or \"unbounded\"");
            return std::nullopt;
        }
    }
    try {
        return make_rhs(j.at("name").get<std::string>(), std::move(params), lipschitz,
                        bound);
    } catch (const error& e) {
        violations.push_back(e.what());
        return std::nullopt;
    }
}

}  // namespace detail

/// Parse and validate a config document.  Throws schema_error carrying every
/// violation found, not just the first.
inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    std::vector<std::string> violations;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw schema_error({std::string("invalid JSON: ") + e.what()});
    }
    if (!doc.is_object()) throw schema_error({"config must be a JSON object"});

    RunConfig cfg;
    detail::reject_unknown_keys(doc, "", {"command", "problem", "solver", "sweep", "ml", "seed"},
                                violations);

    if (!doc.contains("command") || !doc.at("command").is_string()) {
        violations.push_back("field 'command' must be one of ml, solve-ivp, solve-tvp, sweep");
        throw schema_error(std::move(violations));
    }
    const auto cmd = command_from_string(doc.at("command").get<std::string>());
    if (!cmd) {
        violations.push_back("unknown command '" + doc.at("command").get<std::string>() +
                             "'; expected ml, solve-ivp, solve-tvp or sweep");
        throw schema_error(std::move(violations));
    }
    cfg.command = *cmd;

    if (doc.contains("seed")) {
        const auto& s = doc.at("seed");
        if (!s.is_number_unsigned())
            violations.push_back("field 'seed' must be an unsigned integer");
        else
            cfg.seed = s.get<unsigned long>();
    }

    // solver block (optional, defaults apply)
    if (doc.contains("solver")) {
        const auto& s = doc.at("solver");
        if (!s.is_object()) {
            violations.push_back("field 'solver' must be an object");
        } else {
            detail::reject_unknown_keys(
                s, "solver.", {"n_steps", "corrector_iterations", "tol_residual"}, violations);
            if (s.contains("n_steps")) {
                if (!s.at("n_steps").is_number_unsigned() || s.at("n_steps").get<std::size_t>() < 1)
                    violations.push_back("field 'solver.n_steps' must be a positive integer");
                else
                    cfg.solver.n_steps = s.at("n_steps").get<std::size_t>();
            }
            if (s.contains("corrector_iterations")) {
                if (!s.at("corrector_iterations").is_number_unsigned() ||
                    s.at("corrector_iterations").get<std::size_t>() < 1)
                    violations.push_back(
                        "field 'solver.corrector_iterations' must be a positive integer");
                else
                    cfg.solver.corrector_iterations =
                        s.at("corrector_iterations").get<std::size_t>();
            }
            if (auto v = detail::take_number(s, "solver.", "tol_residual", false, violations)) {
                if (!(*v > 0.0) || !std::isfinite(*v))
                    violations.push_back("field 'solver.tol_residual' must be positive");
                else
                    cfg.solver.tol_residual = *v;
            }
        }
    }

    // sweep block
    std::optional<SweepMode> mode;
    if (cfg.command == Command::sweep) {
        if (!doc.contains("sweep") || !doc.at("sweep").is_object()) {
            violations.push_back("command 'sweep' requires a 'sweep' object");
        } else {
            const auto& sw = doc.at("sweep");
            detail::reject_unknown_keys(sw, "sweep.", {"mode", "deltas"}, violations);
            if (!sw.contains("mode") || !sw.at("mode").is_string()) {
                violations.push_back("field 'sweep.mode' must be a string");
            } else {
                mode = sweep_mode_from_string(sw.at("mode").get<std::string>());
                if (!mode)
                    violations.push_back(
                        "unknown sweep mode '" + sw.at("mode").get<std::string>() +
                        "'; expected start_shift, terminal_shift, tvp_start_shift, "
                        "alpha_shift, init_shift or rhs_scale");
            }
            if (!sw.contains("deltas") || !sw.at("deltas").is_array()) {
                violations.push_back("field 'sweep.deltas' must be an array of numbers");
            } else {
                for (const auto& d : sw.at("deltas")) {
                    if (!d.is_number()) {
                        violations.push_back("field 'sweep.deltas' must contain only numbers");
                        cfg.sweep_deltas.clear();
                        break;
                    }
                    cfg.sweep_deltas.push_back(d.get<double>());
                }
            }
        }
        cfg.sweep_mode = mode;
    } else if (doc.contains("sweep")) {
        violations.push_back("field 'sweep' is only valid for command 'sweep'");
    }

    // ml block
    if (cfg.command == Command::ml) {
        if (!doc.contains("ml") || !doc.at("ml").is_object()) {
            violations.push_back("command 'ml' requires an 'ml' object with alpha and z");
        } else {
            const auto& m = doc.at("ml");
            detail::reject_unknown_keys(m, "ml.", {"alpha", "z"}, violations);
            const auto alpha = detail::take_number(m, "ml.", "alpha", true, violations);
            const auto z = detail::take_number(m, "ml.", "z", true, violations);
            if (alpha && z) cfg.ml_query = MLQuery{*alpha, *z};
        }
    } else if (doc.contains("ml")) {
        violations.push_back("field 'ml' is only valid for command 'ml'");
    }

    // problem block
    const bool needs_tvp = cfg.command == Command::solve_tvp ||
                           (cfg.command == Command::sweep && mode &&
                            (*mode == SweepMode::terminal_shift ||
                             *mode == SweepMode::tvp_start_shift));
    const bool needs_problem = cfg.command != Command::ml;
    if (needs_problem) {
        if (!doc.contains("problem") || !doc.at("problem").is_object()) {
            violations.push_back("command '" + std::string(to_string(cfg.command)) +
                                 "' requires a 'problem' object");
        } else {
            const auto& pr = doc.at("problem");
            detail::reject_unknown_keys(pr, "problem.",
                                        {"alpha", "a", "T", "init", "y_star", "rhs"},
                                        violations);
            const auto alpha = detail::take_number(pr, "problem.", "alpha", true, violations);
            const auto a = detail::take_number(pr, "problem.", "a", true, violations);
            const auto T = detail::take_number(pr, "problem.", "T", true, violations);

            std::optional<RhsSpec> rhs;
            if (!pr.contains("rhs"))
                violations.push_back("missing field 'problem.rhs'");
            else
                rhs = detail::parse_rhs(pr.at("rhs"), violations);

            if (needs_tvp) {
                if (pr.contains("init"))
                    violations.push_back(
                        "field 'problem.init' is only valid for initial value problems");
                const auto y_star = detail::take_number(pr, "problem.", "y_star", true, violations);
                if (alpha && a && T && y_star && rhs) {
                    FractionalTVP p;
                    p.alpha = *alpha;
                    p.a = *a;
                    p.T = *T;
                    p.y_star = *y_star;
                    p.rhs = *rhs;
                    try {
                        validate(p);
                        cfg.tvp = std::move(p);
                    } catch (const error& e) {
                        violations.push_back(e.what());
                    }
                }
            } else {
                if (pr.contains("y_star"))
                    violations.push_back(
                        "field 'problem.y_star' is only valid for terminal value problems");
                std::optional<std::vector<double>> init;
                if (!pr.contains("init") || !pr.at("init").is_array()) {
                    violations.push_back("field 'problem.init' must be an array of numbers");
                } else {
                    std::vector<double> vals;
                    bool ok = true;
                    for (const auto& v : pr.at("init")) {
                        if (!v.is_number()) {
                            violations.push_back("field 'problem.init' must contain only numbers");
                            ok = false;
                            break;
                        }
                        vals.push_back(v.get<double>());
                    }
                    if (ok) init = std::move(vals);
                }
                if (alpha && a && T && init && rhs) {
                    FractionalIVP p;
                    p.alpha = *alpha;
                    p.a = *a;
                    p.T = *T;
                    p.init = std::move(*init);
                    p.rhs = *rhs;
                    try {
                        validate(p);
                        cfg.ivp = std::move(p);
                    } catch (const error& e) {
                        violations.push_back(e.what());
                    }
                }
            }
        }
    } else if (doc.contains("problem")) {
        violations.push_back("field 'problem' is only valid for solve/sweep commands");
    }

    // Whole-plan validation for sweeps, so bad plans fail as config errors.
    if (cfg.command == Command::sweep && violations.empty()) {
        SweepPlan plan;
        plan.mode = *cfg.sweep_mode;
        plan.deltas = cfg.sweep_deltas;
        plan.solver = cfg.solver;
        if (needs_tvp)
            plan.base = *cfg.tvp;
        else
            plan.base = *cfg.ivp;
        try {
            validate(plan);
        } catch (const error& e) {
            violations.push_back(e.what());
        }
    }

    if (!violations.empty()) throw schema_error(std::move(violations));
    return cfg;
}

}  // namespace fracwell
