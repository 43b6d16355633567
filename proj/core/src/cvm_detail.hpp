#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dscem/lcd.hpp"

namespace dscem::detail {

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Precomputed bandwidth grid for the reduced CvM objective. The objective is
// evaluated in a pi^(-d/2) scale so that coefficients stay O(b) for any d;
// cvm_distance multiplies the scale back in.
//
// Scaled objective:
//   D' = sum_t c_t [ S1(b_t)/N^2 - 2 beta2_t S2(b_t)/N + beta3_t ]
// with c_t = w_t * b_t (w_t includes the b = e^t substitution Jacobian),
//   S1 = sum_ij exp(-|x_i - x_j|^2 / (4 b^2)),
//   S2 = sum_i  exp(-|x_i|^2 / (2 (1 + 2 b^2))),
//   beta2 = (2 b^2 / (1 + 2 b^2))^(d/2),  beta3 = (b^2 / (1 + b^2))^(d/2).
class CvmGrid {
public:
    CvmGrid(int dim, const CvmQuadrature& quad);

    int dim() const { return dim_; }
    double log_scale() const { return 0.5 * dim_ * std::log(M_PI); }

    // Scaled objective; if grad is non-null it receives the scaled gradient
    // (same quadrature grid, so it is the exact gradient of the returned value).
    double evaluate(const Eigen::MatrixXd& points, Eigen::MatrixXd* grad) const;

private:
    int dim_;
    std::vector<double> b_;        // ascending bandwidth nodes
    std::vector<double> c_;        // w_t * b_t
    std::vector<double> wob_;      // w_t / b_t           (pair gradient factor)
    std::vector<double> inv4b2_;   // 1 / (4 b_t^2)
    std::vector<double> cb2_;      // c_t * beta2_t
    std::vector<double> inv_s2_;   // 1 / (2 (1 + 2 b_t^2))
    std::vector<double> qgrad_;    // c_t * beta2_t / (1 + 2 b_t^2)
    double const_term_ = 0.0;      // sum_t c_t * beta3_t
};

}  // namespace dscem::detail
