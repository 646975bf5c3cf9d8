#pragma once

#include <Eigen/Dense>
#include <span>

namespace lpseq {

// Problem dimensions and channel statistics shared by every module.
//
// The network computes f(x) = sum_k |x_k|^p over a multiple-access channel:
// node k scales its transmit sequence (column k of a seq_len x num_nodes
// matrix) by the preprocessed reading |x_k|^{p/2}, the receiver sees the
// superposition plus white Gaussian noise and applies an energy detector.
struct SystemConfig {
  int num_nodes = 1;      // K, number of transmitting nodes
  int seq_len = 1;        // transmit sequence length per node
  double p = 2.0;         // norm exponent of the target function
  double sigma_x2 = 1.0;  // sensor reading variance
  double sigma_n2 = 0.0;  // receiver noise variance

  void validate() const;  // throws std::domain_error on out-of-range values
};

// Supported parameter range.  The norm exponent is kept away from 0 (moment
// formulas degenerate) and from huge values (Gamma factors overflow double
// range); the dense K^2 x K^2 fourth-moment matrix is capped so a typo cannot
// silently allocate gigabytes.
inline constexpr double kMinNormExponent = 1e-6;
inline constexpr double kMaxNormExponent = 64.0;
inline constexpr int kMaxNodesDense = 32;

// Closed-form Gaussian moment matrices entering the analytic MSE.
struct MomentSet {
  SystemConfig config;
  Eigen::MatrixXd second_moment;  // E[phi phi^T], K x K
  Eigen::MatrixXd fourth_moment;  // E[vec{phi phi^T} vec{phi phi^T}^T], K^2 x K^2
  double fourth_moment_trace = 0.0;
  double noise_energy = 0.0;  // E[(n^T n)^2]
};

// E[prod_k |x_k|^{alpha_k}] for x ~ N(0, sigma_x2 * I).  Exponents are
// nonnegative reals; the empty or all-zero vector yields 1.  Evaluated as
// exp(sum of log-Gamma terms) so large exponents do not overflow
// intermediate Gamma values.
double abs_moment(std::span<const double> alpha, double sigma_x2);

// E[prod_m n_m^{beta_m}] for n ~ N(0, sigma_n2 * I).  Exponents are
// nonnegative integers (passed as doubles, validated); any odd exponent makes
// the product vanish by symmetry.
double central_moment(std::span<const double> beta, double sigma_n2);

// E[phi phi^T] with phi_k = |x_k|^{p/2}.  Diagonal entries are all equal and
// so are off-diagonal ones; every entry is strictly positive.
Eigen::MatrixXd preprocessed_second_moment(const SystemConfig& config);

// E[vec{phi phi^T} vec{phi phi^T}^T], symmetric positive semidefinite and
// invariant under the block rearrangement used by the Kronecker
// decomposition.  Entries depend only on the multiset of the four node
// indices involved, which keeps equal entries bit-identical.
Eigen::MatrixXd preprocessed_fourth_moment(const SystemConfig& config);

// E[(n^T n)^2] = seq_len * (seq_len + 2) * sigma_n2^2.  The full seq_len^2 x
// seq_len^2 noise moment matrix is never materialized; only its trace enters
// the objective.
double noise_energy_moment(int seq_len, double sigma_n2);

MomentSet build_moments(const SystemConfig& config);

}  // namespace lpseq
