#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracwell {

/// Base class for everything this library throws.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or evaluation outside a documented domain.
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

/// An iteration (series, Picard sweep, root bracket) failed to converge.
class convergence_error : public error {
public:
    convergence_error(const std::string& msg, std::size_t iterations,
                      double last_ratio)
        : error(msg), iterations(iterations), last_ratio(last_ratio) {}

    std::size_t iterations;
    double last_ratio;  // NaN when no ratio is meaningful
};

/// A solution value left the representable regime.
class blow_up_error : public error {
public:
    blow_up_error(const std::string& msg, std::size_t node_index, double value)
        : error(msg), node_index(node_index), value(value) {}

    std::size_t node_index;
    double value;
};

/// A trajectory does not span the requested interval.
class coverage_error : public error {
public:
    explicit coverage_error(const std::string& msg) : error(msg) {}
};

/// Config validation problems; carries every violation, not just the first.
class schema_error : public error {
public:
    explicit schema_error(std::vector<std::string> violations)
        : error(join(violations)), violations(std::move(violations)) {}

    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "config schema violations:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
};

}  // namespace fracwell
