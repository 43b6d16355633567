#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <random>
#include <variant>

#include "dscem/sample_set.hpp"

namespace dscem {

// Temporal prior over a flattened control sequence: PSD(f) ~ 1/f^beta.
struct NoiseColorSpec {
    double beta = 0.0;
    int horizon = 1;
    int control_dim = 1;
};

// Block-diagonal correlation matrix (one H x H Toeplitz block per control
// dimension) derived from the colored-noise PSD via the Wiener-Khinchin
// theorem; unit diagonal, symmetric positive definite.
Eigen::MatrixXd colored_correlation(const NoiseColorSpec& spec);

// Gaussian proposal over the flattened control sequence.
// FixedCorrelation: C = diag(sigma) * corr * diag(sigma), only sigma adapts.
struct FixedCorrelation {
    Eigen::MatrixXd corr;
    Eigen::VectorXd sigmas;
    std::shared_ptr<const Eigen::MatrixXd> corr_sqrt;  // cached A with A A^T = corr
};

struct FullCovariance {
    Eigen::MatrixXd cov;
};

struct ProposalParams {
    Eigen::VectorXd mean;
    std::variant<FixedCorrelation, FullCovariance> cov_model;
    Eigen::VectorXd sigma_floor;  // per-coordinate lower bound for M1 updates

    int dim() const { return static_cast<int>(mean.size()); }

    // Matrix square root L with L L^T = covariance.
    Eigen::MatrixXd sqrt_cov() const;

    static ProposalParams fixed_correlation(const Eigen::VectorXd& mean,
                                            const Eigen::MatrixXd& corr,
                                            const Eigen::VectorXd& sigmas);
    static ProposalParams full_covariance(const Eigen::VectorXd& mean,
                                          const Eigen::MatrixXd& cov);
};

// y_i = mean + L (R) x_i applied row-wise to the base set.
Eigen::MatrixXd transform_samples(const SampleSet& base, const ProposalParams& params,
                                  const Eigen::MatrixXd* rotation = nullptr);

enum class VarietyKind { V1RandomRotation, V2JointDeterministic, V3Combined };

// Sample source for one CEM iteration. V1 rotates the single base set by a
// fresh random rotation per iteration; V2 uses the j-th block of a joint
// (D * n_iter)-dimensional deterministic set; V3 is V2 with a single rotation
// fixed at MPC-step start.
struct VarietyScheme {
    VarietyKind kind = VarietyKind::V2JointDeterministic;
    std::shared_ptr<const SampleSet> base;   // dim D (V1)
    std::shared_ptr<const SampleSet> joint;  // dim D * n_iter (V2/V3)
    int n_iter = 1;
};

// Candidates for iteration j under the given scheme. `step_rotation` is the
// per-time-step rotation used by V3 (ignored otherwise); V1 draws its own
// rotation from `rng`. V2 consumes no randomness.
Eigen::MatrixXd next_candidates(const VarietyScheme& scheme, int iter,
                                const ProposalParams& params,
                                const Eigen::MatrixXd* step_rotation, std::mt19937_64& rng);

// M1: momentum mean update; per-coordinate std devs refit to the elite set
// (deviations about the *new* mean), momentum applied on sigma; correlation
// structure untouched.
ProposalParams update_m1(const ProposalParams& params, const Eigen::MatrixXd& elites,
                         double momentum);

// M2: momentum mean update; full covariance blended with the elite MLE
// covariance about the new mean, repaired to SPD if necessary.
ProposalParams update_m2(const ProposalParams& params, const Eigen::MatrixXd& elites,
                         double momentum);

}  // namespace dscem
