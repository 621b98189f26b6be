#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracwell/config.hpp"
#include "fracwell/errors.hpp"
#include "fracwell/ivp_solver.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/special_functions.hpp"
#include "fracwell/sweep.hpp"
#include "fracwell/tvp_solver.hpp"

namespace fracwell {

namespace detail {

/// 17 significant digits: enough for a lossless double round trip.
inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

/// Write-temp-then-rename so a partially written artifact is never visible
/// at the destination path.
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,y\n";
    for (std::size_t i = 0; i < traj.nodes.size(); ++i)
        out += num17(traj.nodes[i]) + "," + num17(traj.values[i]) + "\n";
    return out;
}

inline std::string sweep_csv(const SweepReport& report) {
    std::string out = "delta,sup_diff,bound_d1,bound_d2,bound_envelope,lower_bound,status\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? num17(*v) : std::string();
    };
    for (const auto& row : report.rows) {
        out += num17(row.delta) + ",";
        out += (row.ok() ? num17(row.sup_diff) : std::string()) + ",";
        out += cell(row.bound_d1) + "," + cell(row.bound_d2) + "," +
               cell(row.bound_envelope) + "," + cell(row.lower_bound) + ",";
        out += csv_escape(row.status) + "\n";
    }
    return out;
}

inline std::string sweep_json(const SweepReport& report) {
    std::string out = "{";
    out += "\"mode\":\"" + std::string(to_string(report.mode)) + "\",";
    out += "\"predicted_exponent\":" + num17(report.predicted_exponent) + ",";
    out += "\"fitted_exponent\":" + num17(report.fitted_exponent) + ",";
    out += "\"fit_r2\":" + num17(report.fit_r2) + ",";
    out += "\"comparison_interval\":[" + num17(report.comparison_interval.first) + "," +
           num17(report.comparison_interval.second) + "]";
    out += "}";
    return out;
}

inline std::string tvp_summary_json(const TvpSolution& sol) {
    std::string out = "{";
    out += "\"recovered_initial\":" + num17(sol.recovered_initial) + ",";
    out += "\"iterations\":" + std::to_string(sol.iterations) + ",";
    out += "\"method\":\"" + std::string(to_string(sol.method)) + "\",";
    out += "\"residual\":" + num17(sol.residual);
    out += "}";
    return out;
}

inline unsigned sweep_threads_from_env() {
    const char* env = std::getenv("FRACWELL_THREADS");
    if (env == nullptr || *env == '\0') return 0;  // auto
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v > 1024)
        throw domain_error("FRACWELL_THREADS must be an integer in [0, 1024], got '" +
                           std::string(env) + "'");
    return static_cast<unsigned>(v);
}

struct Artifacts {
    std::string csv;
    std::string json;
};

inline Artifacts execute(const RunConfig& cfg, std::ostream& diag) {
    Artifacts art;
    switch (cfg.command) {
        case Command::ml: {
            const double value = mittag_leffler(*cfg.ml_query);
            art.csv = "alpha,z,value\n" + num17(cfg.ml_query->alpha) + "," +
                      num17(cfg.ml_query->z) + "," + num17(value) + "\n";
            art.json = "{\"alpha\":" + num17(cfg.ml_query->alpha) +
                       ",\"z\":" + num17(cfg.ml_query->z) +
                       ",\"value\":" + num17(value) + "}";
            break;
        }
        case Command::solve_ivp: {
            const Trajectory traj = solve_ivp(*cfg.ivp, cfg.solver);
            art.csv = trajectory_csv(traj);
            art.json = "{\"command\":\"solve-ivp\",\"alpha\":" + num17(cfg.ivp->alpha) +
                       ",\"a\":" + num17(cfg.ivp->a) + ",\"T\":" + num17(cfg.ivp->T) +
                       ",\"n_steps\":" + std::to_string(cfg.solver.n_steps) +
                       ",\"y_final\":" + num17(traj.values.back()) + "}";
            break;
        }
        case Command::solve_tvp: {
            if (cfg.tvp_method == TvpMethodChoice::both) {
                const TvpSolution fred = solve_tvp_fredholm(*cfg.tvp, cfg.solver);
                const TvpSolution shot = solve_tvp_shooting(*cfg.tvp, cfg.solver);
                const double gap =
                    sup_diff(fred.traj, shot.traj, cfg.tvp->a, cfg.tvp->T);
                art.csv = "t,y_fredholm,y_shooting\n";
                for (std::size_t i = 0; i < fred.traj.nodes.size(); ++i)
                    art.csv += num17(fred.traj.nodes[i]) + "," +
                               num17(fred.traj.values[i]) + "," +
                               num17(shot.traj.values[i]) + "\n";
                art.json = "{\"method\":\"both\",\"fredholm\":" + tvp_summary_json(fred) +
                           ",\"shooting\":" + tvp_summary_json(shot) +
                           ",\"cross_sup_diff\":" + num17(gap) + "}";
            } else {
                const TvpSolution sol =
                    solve_tvp(*cfg.tvp, cfg.solver,
                              cfg.tvp_method == TvpMethodChoice::fredholm
                                  ? TvpMethod::fredholm
                                  : TvpMethod::shooting);
                art.csv = trajectory_csv(sol.traj);
                art.json = tvp_summary_json(sol);
            }
            break;
        }
        case Command::sweep: {
            SweepPlan plan;
            plan.mode = *cfg.sweep_mode;
            plan.deltas = cfg.sweep_deltas;
            plan.solver = cfg.solver;
            if (cfg.tvp)
                plan.base = *cfg.tvp;
            else
                plan.base = *cfg.ivp;
            const SweepReport report = run_sweep(plan, sweep_threads_from_env());
            for (const auto& w : report.warnings) diag << "warning: " << w << "\n";
            for (const auto& row : report.rows)
                if (!row.ok())
                    diag << "warning: row delta=" << num17(row.delta)
                         << " failed: " << row.status << "\n";
            art.csv = sweep_csv(report);
            art.json = sweep_json(report);
            break;
        }
    }
    return art;
}

}  // namespace detail

/// Execute a validated config: write artifacts atomically, print the JSON
/// summary to `out` when the format includes JSON, diagnostics to `err`.
/// Returns the process exit status (0 ok, 1 config/environment, 2 solver).
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const bool want_csv =
            cfg.format == OutputFormat::csv || cfg.format == OutputFormat::both;
        const bool want_json =
            cfg.format == OutputFormat::json || cfg.format == OutputFormat::both;
        if (want_csv && cfg.output_path.empty())
            throw domain_error("csv output requires --out <path>");

        const detail::Artifacts art = detail::execute(cfg, err);

        if (want_csv) detail::write_atomic(cfg.output_path, art.csv);
        if (want_json && !cfg.output_path.empty()) {
            const std::string json_path = cfg.format == OutputFormat::both
                                              ? cfg.output_path + ".json"
                                              : cfg.output_path;
            detail::write_atomic(json_path, art.json + "\n");
        }
        if (want_json) out << art.json << "\n";
        return 0;
    } catch (const schema_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const convergence_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const blow_up_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fracwell
