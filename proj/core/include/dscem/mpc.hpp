#pragma once

#include <Eigen/Dense>
#include <random>

#include "dscem/cem.hpp"
#include "dscem/plants.hpp"

namespace dscem {

// Controller state carried between MPC time steps.
struct MpcState {
    ProposalParams proposal;       // warm-started mean, reset scale
    Eigen::MatrixXd carried_elites;  // shifted elite sequences from last step
    int step = 0;
};

struct MpcStepTrace {
    std::vector<CemIterStats> iterations;
    double best_cost = 0.0;
    long rollouts = 0;
};

struct MpcStepResult {
    double control = 0.0;   // u_k*, already clipped to limits
    MpcState next;
    MpcStepTrace trace;
};

// Initial controller state: zero mean, the task's sigma0, colored-noise
// correlation from the task's beta; no carried elites.
MpcState make_initial_state(const TaskSpec& task, const CemConfig& config);

// One receding-horizon step: carried-elite injection, clipping, parallel
// rollouts, elite selection and M1/M2 update, warm-start shift.
MpcStepResult mpc_step(const MpcState& state, const Eigen::VectorXd& x_k,
                       const TaskSpec& task, const CemConfig& config,
                       std::mt19937_64& controller_rng, int threads = 1);

// Full closed-loop run over task.total_steps with environment process noise.
RunRecord run_closed_loop(const TaskSpec& task, const CemConfig& config,
                          std::uint64_t controller_seed, std::uint64_t env_seed,
                          int threads = 1);

}  // namespace dscem
