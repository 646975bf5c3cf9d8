#pragma once

#include <cstdint>

#include "lpseq/moments.hpp"

namespace lpseq {

struct McConfig {
  std::int64_t num_samples = 100000;
  std::uint64_t seed = 1;
  // Scheduling granularity only: every sample draws from its own counter
  // stream and partial sums are combined over fixed-size internal blocks, so
  // the estimate is a function of (seed, num_samples) alone.
  std::int64_t chunk_size = 8192;

  void validate() const;
};

struct McEstimate {
  double mean_sq_error = 0.0;
  double std_error = 0.0;  // standard error of the mean
  std::int64_t num_samples = 0;
};

// Elementwise |x_k|^{p/2} (the transmit amplitude of node k); 0 maps to 0.
Eigen::VectorXd preprocess(const Eigen::VectorXd& x, double p);

// Energy detector output ||S phi(x) + noise||^2.
double detect(const Eigen::MatrixXd& seq, const Eigen::VectorXd& x, const Eigen::VectorXd& noise,
              double p);

// Monte Carlo estimate of E[(f - fhat)^2] under the configured channel.
// Deterministic per seed, independent of chunk size and thread count.
McEstimate empirical_mse(const Eigen::MatrixXd& seq, const SystemConfig& config,
                         const McConfig& mc);

}  // namespace lpseq
