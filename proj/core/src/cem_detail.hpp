#pragma once

#include <random>

#include "dscem/cem.hpp"

namespace dscem::detail {

Eigen::MatrixXd sample_candidates(const CemConfig& config, const ProposalParams& params,
                                  int iter, int count, const Eigen::MatrixXd* step_rotation,
                                  std::mt19937_64& rng);

ProposalParams update_proposal(const CemConfig& config, const ProposalParams& params,
                               const Eigen::MatrixXd& elites);

}  // namespace dscem::detail
