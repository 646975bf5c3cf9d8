#pragma once

#include "lpseq/kron.hpp"
#include "lpseq/moments.hpp"

namespace lpseq {

// The closed-form mean squared error of the energy detector splits into
// expectations of three zero-offset terms: a (signal distortion through the
// non-orthogonal Gram matrix), b (signal/noise cross term) and c (pure noise
// energy).  Only E[a^2], E[b^2], E[c^2] and E[ac] are nonzero.
struct MseBreakdown {
  double distortion_sq = 0.0;     // E[a^2]
  double cross_sq = 0.0;          // E[b^2]
  double noise_sq = 0.0;          // E[c^2]
  double distortion_noise = 0.0;  // E[ac]
  double total = 0.0;             // E[a^2] + E[b^2] + E[c^2] - 2 E[ac]
};

// Coefficients of the ray restriction J(gamma * S0) =
// quartic * gamma^4 + quadratic * gamma^2 + constant.
struct ScaleProfile {
  double quartic = 0.0;
  double quadratic = 0.0;
  double constant = 0.0;
};

// Analytic MSE, dense path: the fourth-moment contraction is evaluated
// against the explicit K^2 x K^2 matrix.
MseBreakdown mse(const Eigen::MatrixXd& seq, const MomentSet& mom);

// Analytic MSE, factorized path: the same contraction via the Kronecker
// factors, tr{M (G x G)} = sum_k tr{M_k G}^2.  This is the form the
// optimizer evaluates in its inner loop.
MseBreakdown mse(const Eigen::MatrixXd& seq, const MomentSet& mom, const KronFactorization& fact);

// Gradient of the analytic MSE with respect to the sequence matrix.
Eigen::MatrixXd mse_gradient(const Eigen::MatrixXd& seq, const MomentSet& mom,
                             const KronFactorization& fact);

ScaleProfile mse_scale_profile(const Eigen::MatrixXd& seq0, const MomentSet& mom);

}  // namespace lpseq
