#include "dscem/cem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dscem/linalg.hpp"

namespace dscem {

void CemConfig::validate() const {
    if (n_samples < 1) throw std::invalid_argument("CemConfig: n_samples must be positive");
    if (n_elite < 1 || n_elite > n_samples)
        throw std::invalid_argument("CemConfig: need 1 <= n_elite <= n_samples");
    if (n_iter < 1) throw std::invalid_argument("at least one iteration required");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("CemConfig: momentum must be in [0, 1)");
    if (elite_carry_fraction < 0.0 || elite_carry_fraction > 1.0)
        throw std::invalid_argument("CemConfig: elite_carry_fraction must be in [0, 1]");
    if (decay < 1.0) throw std::invalid_argument("CemConfig: decay must be >= 1");
    if (decay > 1.0 && n_samples < 2 * n_elite)
        throw std::invalid_argument("CemConfig: sample decay requires n_samples >= 2 n_elite");
}

EliteSet select_elite(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& costs, int k) {
    const int n = static_cast<int>(candidates.rows());
    if (costs.size() != n) throw std::invalid_argument("select_elite: size mismatch");
    if (k > n) throw std::invalid_argument("select_elite: K exceeds candidate count");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Non-finite costs rank last; ties keep candidate-index order.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const bool fa = std::isfinite(costs[a]), fb = std::isfinite(costs[b]);
        if (fa != fb) return fa;
        if (!fa) return false;
        return costs[a] < costs[b];
    });

    EliteSet elite;
    elite.sequences.resize(k, candidates.cols());
    elite.costs.resize(k);
    for (int i = 0; i < k; ++i) {
        elite.sequences.row(i) = candidates.row(order[i]);
        elite.costs[i] = costs[order[i]];
    }
    return elite;
}

Eigen::VectorXd shift_sequence(const Eigen::VectorXd& seq, const Eigen::VectorXd& u_init) {
    const int du = static_cast<int>(u_init.size());
    if (seq.size() < du || seq.size() % du != 0)
        throw std::invalid_argument("shift_sequence: sequence/control size mismatch");
    Eigen::VectorXd out(seq.size());
    out.head(seq.size() - du) = seq.tail(seq.size() - du);
    out.tail(du) = u_init;
    return out;
}

int decayed_count(int n_samples, double eta, int iter, int n_elite) {
    if (eta < 1.0) throw std::invalid_argument("decayed_count: eta must be >= 1");
    const double decayed = n_samples / std::pow(eta, iter);
    return static_cast<int>(std::floor(std::max(decayed, 2.0 * n_elite)));
}

namespace detail {

Eigen::MatrixXd sample_candidates(const CemConfig& config, const ProposalParams& params,
                                  int iter, int count, const Eigen::MatrixXd* step_rotation,
                                  std::mt19937_64& rng) {
    if (config.sampler == SamplerKind::IcemRandom) {
        std::normal_distribution<double> normal;
        Eigen::MatrixXd z(count, params.dim());
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < params.dim(); ++j) z(i, j) = normal(rng);
        return (z * params.sqrt_cov().transpose()).rowwise() + params.mean.transpose();
    }
    Eigen::MatrixXd cands = next_candidates(config.scheme, iter, params, step_rotation, rng);
    if (cands.rows() < count)
        throw std::invalid_argument("sample_candidates: base set smaller than sample count");
    return cands.topRows(count);
}

ProposalParams update_proposal(const CemConfig& config, const ProposalParams& params,
                               const Eigen::MatrixXd& elites) {
    if (config.adapt == AdaptKind::M1) return update_m1(params, elites, config.momentum);
    return update_m2(params, elites, config.momentum);
}

}  // namespace detail

CemResult cem_optimize(const std::function<double(const Eigen::VectorXd&)>& cost_fn,
                       const CemConfig& config, const ProposalParams& initial,
                       std::mt19937_64& rng) {
    config.validate();

    ProposalParams params = initial;
    Eigen::MatrixXd step_rotation;
    const Eigen::MatrixXd* rot_ptr = nullptr;
    if (config.sampler == SamplerKind::Deterministic &&
        config.scheme.kind == VarietyKind::V3Combined) {
        step_rotation = random_rotation(params.dim(), rng);
        rot_ptr = &step_rotation;
    }

    CemResult result;
    EliteSet elite;
    for (int j = 0; j < config.n_iter; ++j) {
        const int count = std::min(config.n_samples,
                                   decayed_count(config.n_samples, config.decay, j,
                                                 config.n_elite));
        const Eigen::MatrixXd candidates =
            detail::sample_candidates(config, params, j, count, rot_ptr, rng);

        Eigen::VectorXd costs(count);
        int finite = 0;
        double finite_sum = 0.0;
        for (int i = 0; i < count; ++i) {
            costs[i] = cost_fn(candidates.row(i));
            if (std::isfinite(costs[i])) {
                ++finite;
                finite_sum += costs[i];
            }
        }
        result.evaluations += count;
        if (finite == 0) throw std::runtime_error("cem_optimize: all costs non-finite");

        elite = select_elite(candidates, costs, config.n_elite);
        params = detail::update_proposal(config, params, elite.sequences);

        CemIterStats stats;
        stats.best_cost = elite.costs[0];
        stats.mean_cost = finite_sum / finite;
        stats.proposal_mean = params.mean;
        result.trace.push_back(std::move(stats));
    }

    result.best = elite.sequences.row(0);
    result.best_cost = elite.costs[0];
    return result;
}

}  // namespace dscem
