#include "lpseq/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lpseq {
namespace {

constexpr double kLogPi = 1.1447298858494001741434273513531;

// One coordinate's additive share of log E[prod |x_k|^{alpha_k}]:
// (alpha/2) log(2 sigma^2) + log Gamma((alpha+1)/2) - log sqrt(pi).
// Coordinates with alpha = 0 contribute exactly 0.
double log_moment_term(double alpha, double sigma2) {
  return 0.5 * alpha * std::log(2.0 * sigma2) + std::lgamma(0.5 * (alpha + 1.0)) - 0.5 * kLogPi;
}

}  // namespace

void SystemConfig::validate() const {
  if (num_nodes < 1) throw std::domain_error("SystemConfig: num_nodes must be >= 1");
  if (seq_len < 1) throw std::domain_error("SystemConfig: seq_len must be >= 1");
  if (!std::isfinite(p) || p < kMinNormExponent || p > kMaxNormExponent) {
    std::ostringstream os;
    os << "SystemConfig: p = " << p << " outside supported range [" << kMinNormExponent << ", "
       << kMaxNormExponent << "]";
    throw std::domain_error(os.str());
  }
  if (!std::isfinite(sigma_x2) || sigma_x2 <= 0.0)
    throw std::domain_error("SystemConfig: sigma_x2 must be positive");
  if (!std::isfinite(sigma_n2) || sigma_n2 < 0.0)
    throw std::domain_error("SystemConfig: sigma_n2 must be nonnegative");
}

double abs_moment(std::span<const double> alpha, double sigma_x2) {
  if (!std::isfinite(sigma_x2) || sigma_x2 <= 0.0)
    throw std::domain_error("abs_moment: sigma_x2 must be positive");
  double log_q = 0.0;
  for (double a : alpha) {
    if (!std::isfinite(a) || a < 0.0) throw std::domain_error("abs_moment: exponents must be nonnegative");
    if (a == 0.0) continue;
    log_q += log_moment_term(a, sigma_x2);
  }
  return std::exp(log_q);
}

double central_moment(std::span<const double> beta, double sigma_n2) {
  if (!std::isfinite(sigma_n2) || sigma_n2 < 0.0)
    throw std::domain_error("central_moment: sigma_n2 must be nonnegative");
  double log_q = 0.0;
  for (double b : beta) {
    if (!std::isfinite(b) || b < 0.0 || b != std::floor(b))
      throw std::domain_error("central_moment: exponents must be nonnegative integers");
    if (b == 0.0) continue;
    if (std::fmod(b, 2.0) != 0.0) return 0.0;  // odd power of a symmetric variable
    log_q += log_moment_term(b, sigma_n2);
  }
  return std::exp(log_q);
}

Eigen::MatrixXd preprocessed_second_moment(const SystemConfig& config) {
  config.validate();
  const int k = config.num_nodes;
  const double half[2] = {0.5 * config.p, 0.5 * config.p};
  const double full[1] = {config.p};
  const double diag = abs_moment(full, config.sigma_x2);
  const double off = abs_moment(half, config.sigma_x2);
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(k, k, off);
  c.diagonal().setConstant(diag);
  return c;
}

Eigen::MatrixXd preprocessed_fourth_moment(const SystemConfig& config) {
  config.validate();
  const int k = config.num_nodes;
  if (k > kMaxNodesDense) {
    std::ostringstream os;
    os << "preprocessed_fourth_moment: num_nodes = " << k << " exceeds dense cap " << kMaxNodesDense;
    throw std::invalid_argument(os.str());
  }
  // An entry is E[phi_a phi_b phi_c phi_d]; independence across nodes reduces
  // it to a product over distinct indices, one Gamma term per multiplicity.
  // Multiplicity shares are tabulated so equal-multiset entries are assembled
  // from identical doubles in identical order (exact symmetry, exact
  // invariance under block rearrangement).
  std::array<double, 5> share{};  // share[m]: index appearing m times
  share[0] = 0.0;
  for (int m = 1; m <= 4; ++m) share[m] = log_moment_term(0.5 * config.p * m, config.sigma_x2);

  Eigen::MatrixXd mm(k * k, k * k);
  std::array<int, 4> idx;
  for (int c1 = 0; c1 < k; ++c1)
    for (int r1 = 0; r1 < k; ++r1)
      for (int c2 = 0; c2 < k; ++c2)
        for (int r2 = 0; r2 < k; ++r2) {
          idx = {r1, c1, r2, c2};
          std::sort(idx.begin(), idx.end());
          double log_q = 0.0;
          int run = 1;
          for (int t = 1; t <= 4; ++t) {
            if (t < 4 && idx[t] == idx[t - 1]) {
              ++run;
            } else {
              log_q += share[run];
              run = 1;
            }
          }
          mm(c1 * k + r1, c2 * k + r2) = std::exp(log_q);
        }
  return mm;
}

double noise_energy_moment(int seq_len, double sigma_n2) {
  if (seq_len < 1) throw std::domain_error("noise_energy_moment: seq_len must be >= 1");
  if (!std::isfinite(sigma_n2) || sigma_n2 < 0.0)
    throw std::domain_error("noise_energy_moment: sigma_n2 must be nonnegative");
  const double m = static_cast<double>(seq_len);
  return m * (m + 2.0) * sigma_n2 * sigma_n2;
}

MomentSet build_moments(const SystemConfig& config) {
  MomentSet set;
  set.config = config;
  set.second_moment = preprocessed_second_moment(config);
  set.fourth_moment = preprocessed_fourth_moment(config);
  set.fourth_moment_trace = set.fourth_moment.trace();
  set.noise_energy = noise_energy_moment(config.seq_len, config.sigma_n2);
  return set;
}

}  // namespace lpseq
