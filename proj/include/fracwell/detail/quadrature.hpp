#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fracwell::detail {

// Product-trapezoidal quadrature for the weakly singular memory integral
//
//     I(t) = integral_a^t (t - s)^(alpha-1) g(s) ds
//
// with g replaced by its piecewise-linear interpolant on the grid nodes.  The
// kernel factor is integrated in closed form panel by panel, so the s = t
// singularity never meets floating point.
//
// For a panel [u, v] with c = t - u, d = t - v and linear g:
//     integral = g(u) * [(c^a - d^a)/a] + (g(v) - g(u)) * e(c, d) / (v - u)
//     e(c, d)  = c (c^a - d^a)/a - (c^(a+1) - d^(a+1))/(a+1)

/// Exact memory-kernel integral of a linear segment; d = t - v >= 0.
inline double singular_panel(double alpha, double c, double d, double gu, double gv,
                             double width) {
    const double pa = (std::pow(c, alpha) - std::pow(d, alpha)) / alpha;
    const double pb =
        (std::pow(c, alpha + 1.0) - std::pow(d, alpha + 1.0)) / (alpha + 1.0);
    return gu * pa + (gv - gu) * (c * pa - pb) / width;
}

// Uniform-grid weight tables.  For target node n and panel [t_j, t_{j+1}]
// the weights depend only on the lag m = n - j, so one table serves every
// target on the grid.  left[m]/right[m] multiply g(t_j)/g(t_{j+1}) in the
// product-trapezoidal rule; rect[m] multiplies g(t_j) in the product-rectangle
// (predictor) rule.
struct WeightTable {
    double alpha = 0.0;
    double h = 0.0;
    std::vector<double> left;
    std::vector<double> right;
    std::vector<double> rect;
};

inline WeightTable make_weight_table(double alpha, double h, std::size_t n) {
    WeightTable w;
    w.alpha = alpha;
    w.h = h;
    w.left.assign(n + 1, 0.0);
    w.right.assign(n + 1, 0.0);
    w.rect.assign(n + 1, 0.0);
    std::vector<double> c1(n + 1), c2(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        const double mh = h * static_cast<double>(m);
        c1[m] = std::pow(mh, alpha);
        c2[m] = std::pow(mh, alpha + 1.0);
    }
    for (std::size_t m = 1; m <= n; ++m) {
        const double d1 = (c1[m] - c1[m - 1]) / alpha;
        const double e =
            (static_cast<double>(m) * h * d1 - (c2[m] - c2[m - 1]) / (alpha + 1.0)) / h;
        w.rect[m] = d1;
        w.right[m] = e;
        w.left[m] = d1 - e;
    }
    return w;
}

/// Product-trapezoidal value of I(t_n) from the n+1 leading samples of g.
inline double convolve_trapezoid(const WeightTable& w, const double* g, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t m = n - j;
        s += w.left[m] * g[j] + w.right[m] * g[j + 1];
    }
    return s;
}

/// Same sum with the g(t_n) term left out; the caller supplies it during
/// corrector iterations.  Returns the history part; *diag gets the weight of
/// the withheld final sample.
inline double convolve_history(const WeightTable& w, const double* g, std::size_t n,
                               double* diag) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t m = n - j;
        s += w.left[m] * g[j];
        if (j + 1 < n) s += w.right[m] * g[j + 1];
    }
    *diag = w.right[1];
    return s;
}

/// Product-rectangle (left sample) value of I(t_n); the explicit predictor.
inline double convolve_rectangle(const WeightTable& w, const double* g, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w.rect[n - j] * g[j];
    return s;
}

}  // namespace fracwell::detail
