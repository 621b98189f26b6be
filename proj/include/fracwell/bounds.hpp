#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fracwell/errors.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/special_functions.hpp"

namespace fracwell {

/// Everything the starting-point shift estimates consume: the problem data,
/// the shift, and the declared-or-empirical Lipschitz constant L and sup
/// bound M of the right-hand side.
struct ShiftBoundInputs {
    double alpha = 0.5;
    double a = 0.0;
    double a_tilde = 0.0;
    double T = 1.0;
    double L = 0.0;
    double M = 0.0;
    std::vector<double> init;
};

inline void validate(const ShiftBoundInputs& in) {
    if (!std::isfinite(in.alpha) || in.alpha <= 0.0)
        throw domain_error("bounds: alpha must be positive and finite");
    if (!(in.a <= in.a_tilde) || !(in.a_tilde < in.T))
        throw domain_error("bounds: requires a <= a_tilde < T");
    if (!std::isfinite(in.L) || in.L < 0.0 || !std::isfinite(in.M) || in.M < 0.0)
        throw domain_error("bounds: L and M must be finite and >= 0");
    if (in.init.size() != ceil_order(in.alpha))
        throw domain_error("bounds: init length must equal ceil(alpha)");
}

/// Shift sensitivity of the Taylor head.  Zero for alpha <= 1; otherwise
/// |a~ - a| sum_{k>=1} |y_k| (T-a)^(k-1) / (k-1)!.
inline double d1_bound(const ShiftBoundInputs& in) {
    validate(in);
    if (in.alpha <= 1.0) return 0.0;
    const double shift = in.a_tilde - in.a;
    double acc = 0.0;
    double pow_term = 1.0;  // (T-a)^(k-1) / (k-1)!
    for (std::size_t k = 1; k < in.init.size(); ++k) {
        if (k > 1) pow_term *= (in.T - in.a) / static_cast<double>(k - 1);
        acc += std::fabs(in.init[k]) * pow_term;
    }
    return shift * acc;
}

/// Memory-gap term: M (a~-a)^alpha / Gamma(alpha+1) for alpha <= 1,
/// M (a~-a) (T-a)^(alpha-1) / Gamma(alpha) above.
inline double d2_bound(const ShiftBoundInputs& in) {
    validate(in);
    const double shift = in.a_tilde - in.a;
    if (in.alpha <= 1.0)
        return in.M * std::pow(shift, in.alpha) / gamma_fn(in.alpha + 1.0);
    return in.M * shift * std::pow(in.T - in.a, in.alpha - 1.0) / gamma_fn(in.alpha);
}

/// Full explicit envelope (D1 + D2) E_alpha(L (T-a)^alpha); dominates the
/// true sup difference whenever (L, M) are honest for the problem.
inline double gronwall_envelope(const ShiftBoundInputs& in) {
    validate(in);
    return (d1_bound(in) + d2_bound(in)) *
           mittag_leffler(in.alpha, in.L * std::pow(in.T - in.a, in.alpha));
}

/// Sharpness floor for the linear benchmark with alpha <= 1:
/// shift^alpha / Gamma(alpha+1).
inline double example1_lower_bound(double alpha, double a_shift) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0)
        throw domain_error("example1_lower_bound: requires 0 < alpha <= 1");
    if (!std::isfinite(a_shift) || a_shift < 0.0)
        throw domain_error("example1_lower_bound: shift must be >= 0");
    return std::pow(a_shift, alpha) / gamma_fn(alpha + 1.0);
}

/// Sharpness floor for the linear benchmark with alpha > 1:
/// (T - a~)^(alpha-1) / Gamma(alpha) * shift.
inline double example2_lower_bound(double alpha, double a_shift, double T,
                                   double a_tilde) {
    if (!std::isfinite(alpha) || alpha <= 1.0)
        throw domain_error("example2_lower_bound: requires alpha > 1");
    if (!(a_tilde < T)) throw domain_error("example2_lower_bound: requires a_tilde < T");
    if (!std::isfinite(a_shift) || a_shift < 0.0)
        throw domain_error("example2_lower_bound: shift must be >= 0");
    return std::pow(T - a_tilde, alpha - 1.0) / gamma_fn(alpha) * a_shift;
}

/// Pre-Gronwall inhomogeneity of the terminal-shift inequality:
/// 2 ||f||_inf (T~ - T)^alpha / Gamma(alpha+1).
inline double tvp_terminal_prebound(double alpha, double f_sup, double T,
                                    double T_tilde) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
        throw domain_error("tvp_terminal_prebound: requires 0 < alpha < 1");
    if (!std::isfinite(f_sup) || f_sup < 0.0)
        throw domain_error("tvp_terminal_prebound: f_sup must be >= 0");
    if (!(T_tilde >= T)) throw domain_error("tvp_terminal_prebound: requires T_tilde >= T");
    return 2.0 * f_sup * std::pow(T_tilde - T, alpha) / gamma_fn(alpha + 1.0);
}

}  // namespace fracwell
