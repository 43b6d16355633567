#include "dscem/lcd.hpp"

#include <algorithm>
#include <cmath>

#include "cvm_detail.hpp"

namespace dscem {
namespace detail {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence P_n(x) and derivative.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

CvmGrid::CvmGrid(int dim, const CvmQuadrature& quad) : dim_(dim) {
    std::vector<double> gl_x, gl_w;
    gauss_legendre(quad.points_per_panel, gl_x, gl_w);

    const double t_lo = std::log(quad.b_min);
    const double t_hi = std::log(quad.b_max);
    const double panel = (t_hi - t_lo) / quad.panels;
    const double hd = 0.5 * dim;

    for (int p = 0; p < quad.panels; ++p) {
        const double a = t_lo + p * panel;
        for (int q = 0; q < quad.points_per_panel; ++q) {
            const double t = a + 0.5 * panel * (gl_x[q] + 1.0);
            const double b = std::exp(t);
            const double w = 0.5 * panel * gl_w[q] * b;  // db = b dt
            const double b2 = b * b;
            const double beta2 = std::exp(hd * std::log(2.0 * b2 / (1.0 + 2.0 * b2)));
            const double beta3 = std::exp(hd * std::log(b2 / (1.0 + b2)));
            b_.push_back(b);
            c_.push_back(w * b);
            wob_.push_back(w / b);
            inv4b2_.push_back(0.25 / b2);
            cb2_.push_back(w * b * beta2);
            inv_s2_.push_back(0.5 / (1.0 + 2.0 * b2));
            qgrad_.push_back(w * b * beta2 / (1.0 + 2.0 * b2));
            const_term_ += w * b * beta3;
        }
    }
}

double CvmGrid::evaluate(const Eigen::MatrixXd& points, Eigen::MatrixXd* grad) const {
    const int n = static_cast<int>(points.rows());
    const int m = static_cast<int>(b_.size());
    const double inv_n = 1.0 / n;
    const double inv_n2 = inv_n * inv_n;

    if (grad) grad->setZero(points.rows(), points.cols());

    double obj = const_term_;

    // Diagonal pairs of S1 (exp(0) = 1 for every node).
    double c_total = 0.0;
    for (int t = 0; t < m; ++t) c_total += c_[t];
    obj += c_total * inv_n;

    // Off-diagonal pairs; exponents below the underflow floor are skipped
    // (the bandwidth grid is ascending, underflow only at the small-b end).
    Eigen::VectorXd diff(points.cols());
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            diff = points.row(i) - points.row(j);
            const double r2 = diff.squaredNorm();
            const double b_start = std::sqrt(r2 / (4.0 * 745.0));
            const int t0 = static_cast<int>(
                std::lower_bound(b_.begin(), b_.end(), b_start) - b_.begin());
            double s = 0.0, p = 0.0;
            for (int t = t0; t < m; ++t) {
                const double e = std::exp(-r2 * inv4b2_[t]);
                s += c_[t] * e;
                p += wob_[t] * e;
            }
            obj += 2.0 * s * inv_n2;
            if (grad) {
                grad->row(i) -= (p * inv_n2) * diff.transpose();
                grad->row(j) += (p * inv_n2) * diff.transpose();
            }
        }
    }

    // Cross term with the Gaussian LCD.
    for (int i = 0; i < n; ++i) {
        const double q = points.row(i).squaredNorm();
        double s = 0.0, qg = 0.0;
        for (int t = 0; t < m; ++t) {
            const double e = std::exp(-q * inv_s2_[t]);
            s += cb2_[t] * e;
            qg += qgrad_[t] * e;
        }
        obj -= 2.0 * s * inv_n;
        if (grad) grad->row(i) += (2.0 * qg * inv_n) * points.row(i);
    }

    return obj;
}

}  // namespace detail

double gaussian_lcd(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                    const KernelParams& kernel) {
    const int d = static_cast<int>(mean.size());
    if (cov.rows() != d || cov.cols() != d || kernel.center.size() != d)
        throw std::invalid_argument("gaussian_lcd: dimension mismatch");
    if (kernel.bandwidth <= 0.0)
        throw std::invalid_argument("gaussian_lcd: bandwidth must be positive");
    if (!cov.isApprox(cov.transpose(), 1e-12))
        throw std::invalid_argument("covariance not positive definite");
    Eigen::LLT<Eigen::MatrixXd> spd_check(cov);
    if (spd_check.info() != Eigen::Success)
        throw std::invalid_argument("covariance not positive definite");

    const double b = kernel.bandwidth;
    Eigen::MatrixXd s = cov + b * b * Eigen::MatrixXd::Identity(d, d);
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    double log_det = 0.0;
    for (int i = 0; i < d; ++i) log_det += std::log(llt.matrixL()(i, i));
    const Eigen::VectorXd z = llt.matrixL().solve(kernel.center - mean);
    return std::exp(d * std::log(b) - log_det - 0.5 * z.squaredNorm());
}

double dirac_lcd(const SampleSet& samples, const KernelParams& kernel) {
    if (!samples.valid()) throw std::invalid_argument("dirac_lcd: invalid sample set");
    if (kernel.center.size() != samples.dim)
        throw std::invalid_argument("dirac_lcd: dimension mismatch");
    const double inv2b2 = 0.5 / (kernel.bandwidth * kernel.bandwidth);
    double sum = 0.0;
    for (int i = 0; i < samples.count; ++i) {
        const double r2 = (samples.points.row(i).transpose() - kernel.center).squaredNorm();
        sum += std::exp(-r2 * inv2b2);
    }
    return sum / samples.count;
}

double cvm_distance(const Eigen::MatrixXd& points, const CvmQuadrature& quad) {
    if (points.rows() < 1) throw std::invalid_argument("cvm_distance: empty sample set");
    detail::CvmGrid grid(static_cast<int>(points.cols()), quad);
    const double scaled = grid.evaluate(points, nullptr);
    const double value = std::exp(grid.log_scale()) * scaled;
    if (!std::isfinite(value))
        throw std::runtime_error("cvm_distance: divergent outer integral");
    return value;
}

double cvm_distance(const SampleSet& samples, const CvmQuadrature& quad) {
    return cvm_distance(samples.points, quad);
}

Eigen::MatrixXd cvm_gradient(const Eigen::MatrixXd& points, const CvmQuadrature& quad) {
    detail::CvmGrid grid(static_cast<int>(points.cols()), quad);
    Eigen::MatrixXd grad;
    grid.evaluate(points, &grad);
    return std::exp(grid.log_scale()) * grad;
}

double cvm_inner_integral(const Eigen::MatrixXd& points, double b) {
    const int d = static_cast<int>(points.cols());
    const int n = static_cast<int>(points.rows());
    const double b2 = b * b;
    const double hd = 0.5 * d;

    double s1 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s1 += std::exp(-(points.row(i) - points.row(j)).squaredNorm() / (4.0 * b2));

    double s2 = 0.0;
    for (int i = 0; i < n; ++i)
        s2 += std::exp(-points.row(i).squaredNorm() / (2.0 * (1.0 + 2.0 * b2)));

    const double t1 = std::exp(hd * std::log(M_PI * b2)) * s1 / (n * double(n));
    const double t2 = std::exp(hd * std::log(2.0 * M_PI * b2 * b2 / (1.0 + 2.0 * b2))) * s2 / n;
    const double t3 = std::exp(hd * std::log(M_PI * b2 * b2 / (1.0 + b2)));
    return t1 - 2.0 * t2 + t3;
}

}  // namespace dscem
