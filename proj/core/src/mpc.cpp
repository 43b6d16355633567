#include "dscem/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cem_detail.hpp"
#include "dscem/linalg.hpp"

namespace dscem {
namespace {

void clip_rows(Eigen::MatrixXd& candidates, const TaskSpec& task) {
    // d_u = 1 layout: every column is one horizon step of the scalar control.
    const double lo = task.u_min[0], hi = task.u_max[0];
    candidates = candidates.cwiseMax(lo).cwiseMin(hi);
}

Eigen::VectorXd evaluate_costs(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& x_k,
                               const TaskSpec& task, int threads) {
    const int n = static_cast<int>(candidates.rows());
    Eigen::VectorXd costs(n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i)
            costs[i] = rollout_cost(x_k, candidates.row(i), task);
        return costs;
    }
    // Static index partition: results land in candidate order regardless of
    // scheduling, keeping elite selection deterministic.
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads)
                costs[i] = rollout_cost(x_k, candidates.row(i), task);
        });
    }
    for (auto& t : pool) t.join();
    return costs;
}

ProposalParams reset_scale(const ProposalParams& params, const TaskSpec& task,
                           const CemConfig& config, const Eigen::VectorXd& new_mean) {
    // Warm start carries only the shifted mean; the proposal scale restarts
    // from sigma0 at each MPC time step.
    const int d = params.dim();
    const Eigen::VectorXd sigmas = Eigen::VectorXd::Constant(d, task.sigma0);
    NoiseColorSpec spec{task.noise_beta, task.horizon, task.control_dim};
    if (config.adapt == AdaptKind::M1) {
        const auto& fc = std::get<FixedCorrelation>(params.cov_model);
        ProposalParams next = params;
        next.mean = new_mean;
        auto& model = std::get<FixedCorrelation>(next.cov_model);
        model.sigmas = sigmas;
        (void)fc;
        return next;
    }
    const Eigen::MatrixXd corr = colored_correlation(spec);
    const Eigen::MatrixXd cov =
        sigmas.asDiagonal() * corr * sigmas.asDiagonal();
    return ProposalParams::full_covariance(new_mean, cov);
}

}  // namespace

MpcState make_initial_state(const TaskSpec& task, const CemConfig& config) {
    const int d = task.control_dim * task.horizon;
    const Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd sigmas = Eigen::VectorXd::Constant(d, task.sigma0);
    const Eigen::MatrixXd corr =
        colored_correlation({task.noise_beta, task.horizon, task.control_dim});

    MpcState state;
    if (config.adapt == AdaptKind::M1) {
        state.proposal = ProposalParams::fixed_correlation(mean, corr, sigmas);
    } else {
        state.proposal = ProposalParams::full_covariance(
            mean, sigmas.asDiagonal() * corr * sigmas.asDiagonal());
    }
    state.carried_elites.resize(0, d);
    return state;
}

MpcStepResult mpc_step(const MpcState& state, const Eigen::VectorXd& x_k,
                       const TaskSpec& task, const CemConfig& config,
                       std::mt19937_64& controller_rng, int threads) {
    config.validate();
    const int d = task.control_dim * task.horizon;
    if (state.proposal.dim() != d)
        throw std::invalid_argument("mpc_step: proposal dimension mismatch");

    Eigen::MatrixXd step_rotation;
    const Eigen::MatrixXd* rot_ptr = nullptr;
    if (config.sampler == SamplerKind::Deterministic &&
        config.scheme.kind == VarietyKind::V3Combined) {
        step_rotation = random_rotation(d, controller_rng);
        rot_ptr = &step_rotation;
    }

    ProposalParams params = state.proposal;
    const int n_carry = config.carried_count();
    Eigen::MatrixXd reinjected = state.carried_elites;  // iteration 0: previous step's

    MpcStepResult result;
    EliteSet elite;
    for (int j = 0; j < config.n_iter; ++j) {
        const int count = std::min(config.n_samples,
                                   decayed_count(config.n_samples, config.decay, j,
                                                 config.n_elite));
        Eigen::MatrixXd candidates =
            detail::sample_candidates(config, params, j, count, rot_ptr, controller_rng);

        // Injected elites replace the tail of the pool so the rollout budget
        // stays at `count` for every method.
        const int n_inject = std::min<int>(static_cast<int>(reinjected.rows()), count);
        if (n_inject > 0)
            candidates.bottomRows(n_inject) = reinjected.topRows(n_inject);

        clip_rows(candidates, task);
        const Eigen::VectorXd costs = evaluate_costs(candidates, x_k, task, threads);
        result.trace.rollouts += count;

        elite = select_elite(candidates, costs, config.n_elite);
        params = detail::update_proposal(config, params, elite.sequences);

        CemIterStats stats;
        stats.best_cost = elite.costs[0];
        stats.mean_cost = costs.unaryExpr([](double c) {
                               return std::isfinite(c) ? c : 0.0;
                           }).sum() /
                          std::max(1, static_cast<int>(costs.size()));
        stats.proposal_mean = params.mean;
        result.trace.iterations.push_back(std::move(stats));

        // Within-step elite reuse for the next iteration.
        if (j + 1 < config.n_iter && n_carry > 0)
            reinjected = elite.sequences.topRows(std::min(n_carry, config.n_elite));
    }

    const Eigen::VectorXd best = elite.sequences.row(0);
    result.control = std::clamp(best[0], task.u_min[0], task.u_max[0]);
    result.trace.best_cost = elite.costs[0];

    // Next-step state: shifted mean, scale reset, carried shifted elites.
    const Eigen::VectorXd u_init = Eigen::VectorXd::Zero(task.control_dim);
    MpcState next;
    next.proposal = reset_scale(params, task, config, shift_sequence(params.mean, u_init));
    next.step = state.step + 1;
    next.carried_elites.resize(n_carry, d);
    for (int i = 0; i < n_carry; ++i)
        next.carried_elites.row(i) = shift_sequence(elite.sequences.row(i), u_init);
    result.next = std::move(next);
    return result;
}

RunRecord run_closed_loop(const TaskSpec& task, const CemConfig& config,
                          std::uint64_t controller_seed, std::uint64_t env_seed,
                          int threads) {
    std::mt19937_64 controller_rng(controller_seed);
    std::mt19937_64 env_rng(env_seed);

    RunRecord record;
    MpcState state = make_initial_state(task, config);
    Eigen::VectorXd x = sample_initial_state(task, env_rng);

    for (int k = 0; k < task.total_steps; ++k) {
        MpcStepResult step = mpc_step(state, x, task, config, controller_rng, threads);
        const double u = step.control;
        record.states.push_back(x);
        record.controls.push_back(u);
        record.stage_costs.push_back(stage_cost(x, u, task));
        record.rollouts += step.trace.rollouts;
        x = simulate_step(x, u, task, env_rng);
        state = std::move(step.next);
    }

    record.cumulative_cost = 0.0;
    for (double c : record.stage_costs) record.cumulative_cost += c;
    record.smoothness = smoothness(record.controls);
    record.success = run_success(task, record);
    return record;
}

}  // namespace dscem
