#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace dscem {

// Symmetrizes and, if needed, adds escalating diagonal jitter
// (1e-10 * trace/D, growing x10 up to 1e-4 * trace/D) until the matrix
// factorizes. Throws std::runtime_error if it never does.
Eigen::MatrixXd spd_repair(const Eigen::MatrixXd& m);

// Lower-triangular square root (Cholesky), repairing to SPD on failure.
Eigen::MatrixXd cholesky_sqrt(const Eigen::MatrixXd& cov);

// Haar-uniform rotation from SO(dim): QR of a standard-Gaussian matrix with
// sign-corrected diagonal, one column negated if the determinant is -1.
Eigen::MatrixXd random_rotation(int dim, std::mt19937_64& rng);

// FNV-1a hash of a string, used to derive independent rng seeds.
std::uint64_t fnv1a_hash(const std::string& s);

}  // namespace dscem
