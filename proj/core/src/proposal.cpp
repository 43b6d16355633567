#include "dscem/proposal.hpp"

#include <cmath>
#include <stdexcept>

#include "dscem/linalg.hpp"

namespace dscem {

Eigen::MatrixXd spd_repair(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd s = 0.5 * (m + m.transpose());
    const int d = static_cast<int>(s.rows());
    const double scale = std::max(s.trace() / d, 1e-300);
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 7; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(s + jitter * Eigen::MatrixXd::Identity(d, d));
        if (llt.info() == Eigen::Success)
            return s + jitter * Eigen::MatrixXd::Identity(d, d);
        jitter = (jitter == 0.0) ? 1e-10 * scale : 10.0 * jitter;
        if (jitter > 1e-4 * scale && attempt < 7) jitter = 1e-4 * scale;
    }
    throw std::runtime_error("spd_repair: matrix not repairable to SPD");
}

Eigen::MatrixXd cholesky_sqrt(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::LLT<Eigen::MatrixXd> repaired(spd_repair(cov));
    if (repaired.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        throw std::runtime_error(
            "cholesky_sqrt: covariance not positive definite (min eigenvalue " +
            std::to_string(eig.eigenvalues().minCoeff()) + ")");
    }
    return repaired.matrixL();
}

Eigen::MatrixXd random_rotation(int dim, std::mt19937_64& rng) {
    if (dim < 1) throw std::invalid_argument("random_rotation: dim must be positive");
    if (dim == 1) return Eigen::MatrixXd::Ones(1, 1);

    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = normal(rng);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    if (q.determinant() < 0.0) q.col(0) = -q.col(0);
    return q;
}

ProposalParams ProposalParams::fixed_correlation(const Eigen::VectorXd& mean,
                                                 const Eigen::MatrixXd& corr,
                                                 const Eigen::VectorXd& sigmas) {
    if (corr.rows() != mean.size() || sigmas.size() != mean.size())
        throw std::invalid_argument("ProposalParams: dimension mismatch");
    if ((sigmas.array() <= 0.0).any())
        throw std::invalid_argument("ProposalParams: sigmas must be positive");
    ProposalParams p;
    p.mean = mean;
    FixedCorrelation fc;
    fc.corr = corr;
    fc.sigmas = sigmas;
    fc.corr_sqrt = std::make_shared<Eigen::MatrixXd>(cholesky_sqrt(corr));
    p.cov_model = std::move(fc);
    p.sigma_floor = 1e-6 * sigmas;
    return p;
}

ProposalParams ProposalParams::full_covariance(const Eigen::VectorXd& mean,
                                               const Eigen::MatrixXd& cov) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
        throw std::invalid_argument("ProposalParams: dimension mismatch");
    ProposalParams p;
    p.mean = mean;
    p.cov_model = FullCovariance{cov};
    p.sigma_floor = 1e-6 * cov.diagonal().cwiseSqrt();
    return p;
}

Eigen::MatrixXd ProposalParams::sqrt_cov() const {
    if (const auto* fc = std::get_if<FixedCorrelation>(&cov_model)) {
        return fc->sigmas.asDiagonal() * (*fc->corr_sqrt);
    }
    return cholesky_sqrt(std::get<FullCovariance>(cov_model).cov);
}

Eigen::MatrixXd transform_samples(const SampleSet& base, const ProposalParams& params,
                                  const Eigen::MatrixXd* rotation) {
    if (base.dim != params.dim())
        throw std::invalid_argument("transform_samples: dimension mismatch");
    Eigen::MatrixXd l = params.sqrt_cov();
    if (rotation) {
        if (rotation->rows() != base.dim || rotation->cols() != base.dim)
            throw std::invalid_argument("transform_samples: rotation dimension mismatch");
        l = l * (*rotation);
    }
    return (base.points * l.transpose()).rowwise() + params.mean.transpose();
}

Eigen::MatrixXd next_candidates(const VarietyScheme& scheme, int iter,
                                const ProposalParams& params,
                                const Eigen::MatrixXd* step_rotation, std::mt19937_64& rng) {
    const int d = params.dim();
    if (scheme.kind == VarietyKind::V1RandomRotation) {
        if (!scheme.base || scheme.base->dim != d)
            throw std::invalid_argument("next_candidates: V1 base set missing or mismatched");
        const Eigen::MatrixXd rot = random_rotation(d, rng);
        return transform_samples(*scheme.base, params, &rot);
    }

    if (!scheme.joint || scheme.joint->dim != d * scheme.n_iter)
        throw std::invalid_argument("next_candidates: joint set missing or mismatched");
    if (iter < 0 || iter >= scheme.n_iter)
        throw std::out_of_range("next_candidates: iteration block out of range");

    SampleSet block;
    block.dim = d;
    block.count = scheme.joint->count;
    block.points = scheme.joint->points.middleCols(iter * d, d);
    block.scheme = scheme.joint->scheme;

    if (scheme.kind == VarietyKind::V3Combined) {
        if (!step_rotation)
            throw std::invalid_argument("next_candidates: V3 requires a step rotation");
        return transform_samples(block, params, step_rotation);
    }
    return transform_samples(block, params, nullptr);
}

namespace {

Eigen::VectorXd momentum_mean(const ProposalParams& params, const Eigen::MatrixXd& elites,
                              double momentum) {
    const Eigen::VectorXd elite_mean = elites.colwise().mean();
    return momentum * params.mean + (1.0 - momentum) * elite_mean;
}

}  // namespace

ProposalParams update_m1(const ProposalParams& params, const Eigen::MatrixXd& elites,
                         double momentum) {
    const auto* fc = std::get_if<FixedCorrelation>(&params.cov_model);
    if (!fc) throw std::invalid_argument("update_m1: params must use FixedCorrelation");
    if (elites.rows() < 2) throw std::invalid_argument("update_m1: need at least 2 elites");
    if (elites.cols() != params.dim())
        throw std::invalid_argument("update_m1: dimension mismatch");

    ProposalParams next = params;
    next.mean = momentum_mean(params, elites, momentum);

    const Eigen::MatrixXd centered = elites.rowwise() - next.mean.transpose();
    const Eigen::VectorXd elite_var =
        centered.array().square().colwise().mean().transpose();
    // Momentum on sigma (not sigma^2), matching scale-parameter smoothing.
    Eigen::VectorXd sigma =
        momentum * fc->sigmas + (1.0 - momentum) * elite_var.cwiseSqrt();
    sigma = sigma.cwiseMax(params.sigma_floor);

    auto& model = std::get<FixedCorrelation>(next.cov_model);
    model.sigmas = std::move(sigma);
    return next;
}

ProposalParams update_m2(const ProposalParams& params, const Eigen::MatrixXd& elites,
                         double momentum) {
    const auto* full = std::get_if<FullCovariance>(&params.cov_model);
    if (!full) throw std::invalid_argument("update_m2: params must use FullCovariance");
    if (elites.rows() < params.dim() + 1)
        throw std::invalid_argument("update_m2: need at least dim + 1 elite samples");
    if (elites.cols() != params.dim())
        throw std::invalid_argument("update_m2: dimension mismatch");

    ProposalParams next = params;
    next.mean = momentum_mean(params, elites, momentum);

    const Eigen::MatrixXd centered = elites.rowwise() - next.mean.transpose();
    const Eigen::MatrixXd elite_cov =
        centered.transpose() * centered / static_cast<double>(elites.rows());
    Eigen::MatrixXd cov = momentum * full->cov + (1.0 - momentum) * elite_cov;

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) cov = spd_repair(cov);
    next.cov_model = FullCovariance{std::move(cov)};
    return next;
}

std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : s) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace dscem
