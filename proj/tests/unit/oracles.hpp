#pragma once

// Independent numerical oracles used by the tests: adaptive Simpson
// quadrature (1-D and nested 2-D) and small helpers. Deliberately written
// without reference to the library internals so agreement is meaningful.

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double whole, double tol, int depth) {
    const double c = 0.5 * (a + b);
    const double left = simpson(f, a, c);
    const double right = simpson(f, c, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, c, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, c, b, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
inline double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-12, int depth = 40) {
    return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, depth);
}

// Nested adaptive quadrature over [ax, bx] x [ay, by].
inline double adaptive_quad_2d(const std::function<double(double, double)>& f, double ax,
                               double bx, double ay, double by, double tol = 1e-11) {
    return adaptive_quad(
        [&](double x) {
            return adaptive_quad([&](double y) { return f(x, y); }, ay, by, tol * 0.1);
        },
        ax, bx, tol);
}

// Gaussian kernel exp(-|y - m|^2 / (2 b^2)).
inline double kernel(const Eigen::VectorXd& y, const Eigen::VectorXd& m, double b) {
    return std::exp(-(y - m).squaredNorm() / (2.0 * b * b));
}

inline bool bits_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline std::string cache_dir() {
    const char* env = std::getenv("DSCEM_CACHE_DIR");
    return env ? env : "dscem-cache";
}

}  // namespace oracles
