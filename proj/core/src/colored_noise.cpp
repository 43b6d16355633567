#include <cmath>
#include <stdexcept>

#include "dscem/linalg.hpp"
#include "dscem/proposal.hpp"

namespace dscem {

Eigen::MatrixXd colored_correlation(const NoiseColorSpec& spec) {
    const int h = spec.horizon;
    if (h < 1 || spec.control_dim < 1 || spec.beta < 0.0)
        throw std::invalid_argument("colored_correlation: invalid spec");

    // Autocorrelation = inverse DFT of the sampled power spectrum. The DC bin
    // is given the f_1 value to keep lag-0 normalization finite.
    Eigen::VectorXd rho = Eigen::VectorXd::Ones(h);
    if (h > 1) {
        Eigen::VectorXd psd(h);
        for (int k = 0; k < h; ++k) {
            const int kk = std::min(k, h - k);
            const double f = static_cast<double>(kk == 0 ? 1 : kk) / h;
            psd[k] = std::pow(f, -spec.beta);
        }
        Eigen::VectorXd r = Eigen::VectorXd::Zero(h);
        for (int lag = 0; lag < h; ++lag)
            for (int k = 0; k < h; ++k)
                r[lag] += psd[k] * std::cos(2.0 * M_PI * k * lag / h);
        rho = r / r[0];
    }

    const int dim = h * spec.control_dim;
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(dim, dim);
    // Flattened layout: index = t * d_u + i; no cross-dimension correlation.
    for (int i = 0; i < spec.control_dim; ++i)
        for (int t1 = 0; t1 < h; ++t1)
            for (int t2 = 0; t2 < h; ++t2)
                corr(t1 * spec.control_dim + i, t2 * spec.control_dim + i) =
                    rho[std::abs(t1 - t2)];

    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success) {
        corr = spd_repair(corr);
        // Restore the exact unit diagonal after jitter.
        const Eigen::VectorXd inv_sd = corr.diagonal().cwiseSqrt().cwiseInverse();
        corr = inv_sd.asDiagonal() * corr * inv_sd.asDiagonal();
    }
    return corr;
}

}  // namespace dscem
