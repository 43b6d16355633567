#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dscem/sample_set.hpp"

namespace dscem {

// Gaussian kernel K(y, m, b) = exp(-|y - m|^2 / (2 b^2)).
struct KernelParams {
    Eigen::VectorXd center;
    double bandwidth = 1.0;
};

// Localized cumulative distribution F(m, b) = int N(y; mean, cov) K(y, m, b) dy
// of a Gaussian density, in closed form:
//   F(m, b) = b^d det(cov + b^2 I)^(-1/2) exp(-1/2 (m-mean)^T (cov + b^2 I)^(-1) (m-mean)).
// Throws std::invalid_argument if cov is not symmetric positive definite.
double gaussian_lcd(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                    const KernelParams& kernel);

// LCD of the Dirac mixture carried by a sample set:
//   F(m, b) = (1/N) sum_i exp(-|x_i - m|^2 / (2 b^2)).
double dirac_lcd(const SampleSet& samples, const KernelParams& kernel);

// Quadrature grid for the outer bandwidth integral of the CvM distance.
// Integration runs over b in [b_min, b_max] after the substitution b = e^t,
// composite Gauss-Legendre with `points_per_panel` nodes on `panels` panels.
struct CvmQuadrature {
    double b_min = 1e-3;
    double b_max = 50.0;
    int panels = 16;
    int points_per_panel = 16;
};

// Modified Cramer-von-Mises distance between the standard Gaussian N(0, I)
// and the Dirac mixture at `points` (one sample per row):
//   D = int_0^inf b^(1-d) int (F_dirac(m,b) - F_gauss(m,b))^2 dm db.
// The inner m-integral is reduced analytically; the b-integral uses `quad`.
double cvm_distance(const Eigen::MatrixXd& points, const CvmQuadrature& quad = {});
double cvm_distance(const SampleSet& samples, const CvmQuadrature& quad = {});

// Gradient of cvm_distance w.r.t. the sample locations, same shape as points.
// Exact gradient of the quadrature-discretized objective.
Eigen::MatrixXd cvm_gradient(const Eigen::MatrixXd& points, const CvmQuadrature& quad = {});

// Analytically reduced inner integral G(b) = int (F_dirac - F_gauss)^2 dm
// at a fixed bandwidth; exposed for verification against direct quadrature.
double cvm_inner_integral(const Eigen::MatrixXd& points, double b);

// Settings for the offline Dirac-mixture optimization.
struct SampleOptimizerConfig {
    double grad_tol = 1e-8;       // on the gradient of the pi^(-d/2)-scaled objective
    int max_iterations = 5000;
    int restarts = 3;             // reduced to 1 automatically when N*d > 4000
    int lbfgs_memory = 10;
    std::uint64_t rng_seed = 0x5eed5eedULL;  // for the random-Gaussian restart
    CvmQuadrature quad;
    bool enforce_symmetry = true;  // antithetic pairs; odd N pins one point at 0
};

struct SampleOptimizerResult {
    SampleSet set;
    bool converged = true;
    int iterations = 0;
    std::string warning;  // non-empty when the iteration budget was exhausted
};

// Minimizes the CvM distance w.r.t. the sample locations and returns an
// lcd-optimized SampleSet (local minimum; multiple deterministic restarts).
SampleOptimizerResult optimize_samples(int dim, int count,
                                       const SampleOptimizerConfig& config = {});

// Loads (d, N) from `cache_dir`, falling back to optimize_samples and saving
// the result on a cache miss. Throws on checksum/key errors.
SampleSet load_or_optimize(int dim, int count, const std::string& cache_dir,
                           const SampleOptimizerConfig& config = {});

}  // namespace dscem
