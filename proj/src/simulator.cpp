#include "lpseq/simulator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lpseq/rng.hpp"

namespace lpseq {
namespace {

// Accumulation block size.  Fixed (not tied to McConfig::chunk_size) so the
// summation tree, and with it the rounding, never depends on scheduling.
constexpr std::int64_t kBlockSize = 4096;

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void McConfig::validate() const {
  if (num_samples < 1) throw std::domain_error("McConfig: num_samples must be >= 1");
  if (chunk_size < 1) throw std::domain_error("McConfig: chunk_size must be >= 1");
}

Eigen::VectorXd preprocess(const Eigen::VectorXd& x, double p) {
  if (!(p > 0.0)) throw std::domain_error("preprocess: p must be positive");
  const double half_p = 0.5 * p;
  Eigen::VectorXd phi(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) phi[i] = std::pow(std::abs(x[i]), half_p);
  return phi;
}

double detect(const Eigen::MatrixXd& seq, const Eigen::VectorXd& x, const Eigen::VectorXd& noise,
              double p) {
  if (x.size() != seq.cols() || noise.size() != seq.rows()) {
    std::ostringstream os;
    os << "detect: got reading vector of size " << x.size() << " and noise of size "
       << noise.size() << " for a " << seq.rows() << " x " << seq.cols() << " sequence matrix";
    throw std::invalid_argument(os.str());
  }
  return (seq * preprocess(x, p) + noise).squaredNorm();
}

McEstimate empirical_mse(const Eigen::MatrixXd& seq, const SystemConfig& config,
                         const McConfig& mc) {
  config.validate();
  mc.validate();
  if (seq.rows() != config.seq_len || seq.cols() != config.num_nodes)
    throw std::invalid_argument("empirical_mse: sequence matrix does not match config dimensions");

  const Eigen::Index k = config.num_nodes;
  const Eigen::Index m = config.seq_len;
  const double sx = std::sqrt(config.sigma_x2);
  const double sn = std::sqrt(config.sigma_n2);
  const double half_p = 0.5 * config.p;
  const std::int64_t n = mc.num_samples;
  const std::int64_t num_blocks = (n + kBlockSize - 1) / kBlockSize;

  std::vector<double> block_sum(num_blocks), block_sum_sq(num_blocks);
  Eigen::VectorXd draws(k + m);
  Eigen::VectorXd phi(k);
  Eigen::VectorXd received(m);
  for (std::int64_t b = 0; b < num_blocks; ++b) {
    Kahan err, err_sq;
    const std::int64_t hi = std::min(n, (b + 1) * kBlockSize);
    for (std::int64_t j = b * kBlockSize; j < hi; ++j) {
      CounterRng rng = CounterRng::for_stream(mc.seed, static_cast<std::uint64_t>(j));
      rng.fill_normals(draws.data(), draws.size());
      for (Eigen::Index i = 0; i < k; ++i) phi[i] = std::pow(std::abs(sx * draws[i]), half_p);
      // f = ||phi||^2 evaluates the target through the same preprocessed
      // amplitudes the channel transmits; with an orthonormal noiseless
      // channel the detector output is then identical, not merely close.
      const double f = phi.squaredNorm();
      received.noalias() = seq * phi;
      if (sn != 0.0) received += sn * draws.tail(m);
      const double fhat = received.squaredNorm();
      const double e = (f - fhat) * (f - fhat);
      err.add(e);
      err_sq.add(e * e);
    }
    block_sum[b] = err.sum;
    block_sum_sq[b] = err_sq.sum;
  }

  Kahan total, total_sq;
  for (std::int64_t b = 0; b < num_blocks; ++b) {
    total.add(block_sum[b]);
    total_sq.add(block_sum_sq[b]);
  }

  McEstimate est;
  est.num_samples = n;
  est.mean_sq_error = total.sum / static_cast<double>(n);
  if (n > 1) {
    const double nd = static_cast<double>(n);
    const double var = std::max(0.0, (total_sq.sum - nd * est.mean_sq_error * est.mean_sq_error) /
                                         (nd - 1.0));
    est.std_error = std::sqrt(var / nd);
  }
  return est;
}

}  // namespace lpseq
