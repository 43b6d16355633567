#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "dscem/proposal.hpp"

namespace dscem {

enum class SamplerKind { IcemRandom, Deterministic };
enum class AdaptKind { M1, M2 };

struct CemConfig {
    int n_samples = 100;
    int n_elite = 10;
    int n_iter = 3;
    double momentum = 0.1;           // alpha in [0, 1)
    double elite_carry_fraction = 0.3;
    double decay = 1.0;              // eta >= 1; 1 disables sample decay
    SamplerKind sampler = SamplerKind::IcemRandom;
    VarietyScheme scheme;            // used when sampler == Deterministic
    AdaptKind adapt = AdaptKind::M1;

    int carried_count() const {
        return static_cast<int>(elite_carry_fraction * n_elite);
    }
    void validate() const;
};

struct EliteSet {
    Eigen::MatrixXd sequences;  // K x D, aligned with costs
    Eigen::VectorXd costs;      // ascending
};

// K lowest-cost rows; non-finite costs rank last; ties broken by lower index.
EliteSet select_elite(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& costs, int k);

// Warm-start shift: drop the first control block, append u_init.
Eigen::VectorXd shift_sequence(const Eigen::VectorXd& seq, const Eigen::VectorXd& u_init);

// iCEM sample decay: floor(max(N / eta^j, 2K)).
int decayed_count(int n_samples, double eta, int iter, int n_elite);

struct CemIterStats {
    double best_cost = 0.0;
    double mean_cost = 0.0;
    Eigen::VectorXd proposal_mean;
};

struct CemResult {
    Eigen::VectorXd best;
    double best_cost = 0.0;
    std::vector<CemIterStats> trace;
    long evaluations = 0;
};

// Generic CEM (no MPC machinery): sample / evaluate / select / update for
// n_iter iterations, returning the best member of the final elite set.
CemResult cem_optimize(const std::function<double(const Eigen::VectorXd&)>& cost_fn,
                       const CemConfig& config, const ProposalParams& initial,
                       std::mt19937_64& rng);

}  // namespace dscem
