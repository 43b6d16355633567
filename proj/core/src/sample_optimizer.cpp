#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <random>
#include <sstream>

#include "cvm_detail.hpp"
#include "dscem/lcd.hpp"

namespace dscem {
namespace {

// Acklam's rational approximation of the standard normal quantile,
// refined with one Halley step to full double precision.
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

std::vector<int> first_primes(int n) {
    std::vector<int> primes;
    for (int cand = 2; static_cast<int>(primes.size()) < n; ++cand) {
        bool ok = true;
        for (int p : primes) {
            if (p * p > cand) break;
            if (cand % p == 0) {
                ok = false;
                break;
            }
        }
        if (ok) primes.push_back(cand);
    }
    return primes;
}

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (i > 0) {
        x += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return x;
}

// Halton points mapped through the Gaussian quantile per coordinate,
// optionally shifted mod 1 (Cranley-Patterson rotation).
Eigen::MatrixXd halton_gaussian(int n, int d, std::uint64_t start, double shift) {
    const std::vector<int> primes = first_primes(d);
    Eigen::MatrixXd pts(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            double u = radical_inverse(start + i, primes[j]) + shift;
            u -= std::floor(u);
            u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
            pts(i, j) = normal_quantile(u);
        }
    }
    return pts;
}

struct SymmetryLayout {
    int count = 0;
    int pairs = 0;
    bool pinned = false;  // odd N: one point fixed at the origin
    bool symmetric = true;
};

Eigen::MatrixXd assemble(const SymmetryLayout& lay, const Eigen::MatrixXd& free_pts) {
    if (!lay.symmetric) return free_pts;
    Eigen::MatrixXd pts(lay.count, free_pts.cols());
    pts.topRows(lay.pairs) = free_pts;
    pts.middleRows(lay.pairs, lay.pairs) = -free_pts;
    if (lay.pinned) pts.row(lay.count - 1).setZero();
    return pts;
}

Eigen::MatrixXd reduce_gradient(const SymmetryLayout& lay, const Eigen::MatrixXd& grad) {
    if (!lay.symmetric) return grad;
    return grad.topRows(lay.pairs) - grad.middleRows(lay.pairs, lay.pairs);
}

struct LbfgsOutcome {
    Eigen::MatrixXd free_pts;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

LbfgsOutcome lbfgs_minimize(const detail::CvmGrid& grid, const SymmetryLayout& lay,
                            Eigen::MatrixXd x, const SampleOptimizerConfig& cfg) {
    const auto eval = [&](const Eigen::MatrixXd& free_pts, Eigen::MatrixXd& g) {
        Eigen::MatrixXd full_grad;
        const double f = grid.evaluate(assemble(lay, free_pts), &full_grad);
        g = reduce_gradient(lay, full_grad);
        return f;
    };

    Eigen::MatrixXd g;
    double f = eval(x, g);

    std::deque<Eigen::MatrixXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    const int mem = cfg.lbfgs_memory;

    LbfgsOutcome out;
    int stall = 0;
    int iter = 0;
    for (; iter < cfg.max_iterations; ++iter) {
        const double gnorm = g.norm();
        if (gnorm <= cfg.grad_tol) {
            out.converged = true;
            break;
        }

        // Two-loop recursion.
        Eigen::MatrixXd q = g;
        std::vector<double> alpha(s_hist.size());
        for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
            alpha[k] = rho_hist[k] * (s_hist[k].array() * q.array()).sum();
            q -= alpha[k] * y_hist[k];
        }
        if (!y_hist.empty()) {
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            q *= (s.array() * y.array()).sum() / y.squaredNorm();
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * (y_hist[k].array() * q.array()).sum();
            q += (alpha[k] - beta) * s_hist[k];
        }
        Eigen::MatrixXd dir = -q;
        double dg = (dir.array() * g.array()).sum();
        if (dg >= 0.0) {  // not a descent direction, fall back to steepest descent
            dir = -g;
            dg = -g.squaredNorm();
        }

        // Armijo backtracking.
        double step = y_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, gnorm)) : 1.0;
        Eigen::MatrixXd x_new, g_new;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            x_new = x + step * dir;
            f_new = eval(x_new, g_new);
            // Rounding allowance keeps progress possible once |f_new - f| is below eps·|f|.
            if (std::isfinite(f_new) &&
                f_new <= f + std::min(1e-4 * step * dg, 0.0) + 4e-16 * std::abs(f)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Eigen::MatrixXd s = x_new - x;
        const Eigen::MatrixXd y = g_new - g;
        const double sy = (s.array() * y.array()).sum();
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > mem) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double decrease = f - f_new;
        x = std::move(x_new);
        g = std::move(g_new);
        f = f_new;

        if (decrease <= 4e-16 * std::max(std::abs(f), 1e-12)) {
            if (++stall >= 25) break;
        } else {
            stall = 0;
        }
    }

    out.free_pts = std::move(x);
    out.value = f;
    out.grad_norm = g.norm();
    out.iterations = iter;
    if (out.grad_norm <= cfg.grad_tol) out.converged = true;
    return out;
}

}  // namespace

SampleOptimizerResult optimize_samples(int dim, int count, const SampleOptimizerConfig& config) {
    if (dim < 1 || count < 1)
        throw std::invalid_argument("optimize_samples: dim and count must be positive");

    SymmetryLayout lay;
    lay.count = count;
    lay.symmetric = config.enforce_symmetry;
    lay.pairs = count / 2;
    lay.pinned = config.enforce_symmetry && (count % 2 == 1);

    detail::CvmGrid grid(dim, config.quad);

    SampleOptimizerResult result;
    result.set.dim = dim;
    result.set.count = count;
    result.set.scheme = SampleScheme::LcdOptimized;

    // N = 1 with symmetry is the pinned origin point; nothing to optimize.
    if (lay.symmetric && lay.pairs == 0) {
        result.set.points = Eigen::MatrixXd::Zero(count, dim);
        result.set.cvm_score = cvm_distance(result.set.points, config.quad);
        result.converged = true;
        return result;
    }

    const int n_free = lay.symmetric ? lay.pairs : count;
    int restarts = config.restarts;
    if (static_cast<long>(count) * dim > 4000) restarts = 1;

    std::vector<Eigen::MatrixXd> inits;
    inits.push_back(halton_gaussian(n_free, dim, 1, 0.0));
    if (restarts > 1) inits.push_back(halton_gaussian(n_free, dim, 1, 0.38196601125010515));
    if (restarts > 2) {
        std::mt19937_64 rng(config.rng_seed);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd z(n_free, dim);
        for (int i = 0; i < n_free; ++i)
            for (int j = 0; j < dim; ++j) z(i, j) = normal(rng);
        inits.push_back(std::move(z));
    }

    LbfgsOutcome best;
    best.value = std::numeric_limits<double>::infinity();
    for (auto& init : inits) {
        LbfgsOutcome run = lbfgs_minimize(grid, lay, std::move(init), config);
        if (run.value < best.value) best = std::move(run);
    }

    result.set.points = assemble(lay, best.free_pts);
    result.set.cvm_score = std::exp(grid.log_scale()) * best.value;
    result.converged = best.converged;
    result.iterations = best.iterations;
    if (!best.converged) {
        std::ostringstream msg;
        msg << "optimizer stopped before gradient tolerance (|g| = " << best.grad_norm << ")";
        result.warning = msg.str();
    }
    return result;
}

SampleSet load_or_optimize(int dim, int count, const std::string& cache_dir,
                           const SampleOptimizerConfig& config) {
    const SampleCacheKey key{dim, count};
    const std::string path =
        (std::filesystem::path(cache_dir) / cache_file_name(key)).string();
    try {
        return load_cache(key, path);
    } catch (const CacheMissError&) {
        SampleSet set = optimize_samples(dim, count, config).set;
        std::filesystem::create_directories(cache_dir);
        save_cache(set, path);
        return set;
    }
}

}  // namespace dscem
