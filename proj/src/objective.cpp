#include "lpseq/objective.hpp"

#include <sstream>

namespace lpseq {
namespace {

void check_dims(const Eigen::MatrixXd& seq, const MomentSet& mom, const char* who) {
  if (seq.rows() != mom.config.seq_len || seq.cols() != mom.config.num_nodes) {
    std::ostringstream os;
    os << who << ": sequence matrix is " << seq.rows() << " x " << seq.cols()
       << ", config expects " << mom.config.seq_len << " x " << mom.config.num_nodes;
    throw std::invalid_argument(os.str());
  }
  if (!seq.allFinite()) throw std::invalid_argument(std::string(who) + ": sequence matrix has non-finite entries");
}

void check_fact(const MomentSet& mom, const KronFactorization& fact, const char* who) {
  if (!fact.symmetric)
    throw std::invalid_argument(std::string(who) + ": factorization must come from the symmetric path");
  if (fact.source_dim != mom.config.num_nodes) {
    std::ostringstream os;
    os << who << ": factorization is over dimension " << fact.source_dim << ", config expects "
       << mom.config.num_nodes;
    throw std::invalid_argument(os.str());
  }
}

// Shared assembly of the breakdown once the quartic and quadratic
// fourth-moment contractions are known.
MseBreakdown assemble(double quartic, double quadratic, double tr_cg, const MomentSet& mom) {
  const double sn2 = mom.config.sigma_n2;
  const double m = static_cast<double>(mom.config.seq_len);
  MseBreakdown out;
  out.distortion_sq = quartic - 2.0 * quadratic + mom.fourth_moment_trace;
  out.cross_sq = 4.0 * sn2 * tr_cg;
  out.noise_sq = mom.noise_energy;
  out.distortion_noise = m * sn2 * (mom.second_moment.trace() - tr_cg);
  out.total = out.distortion_sq + out.cross_sq + out.noise_sq - 2.0 * out.distortion_noise;
  return out;
}

}  // namespace

MseBreakdown mse(const Eigen::MatrixXd& seq, const MomentSet& mom) {
  check_dims(seq, mom, "mse");
  const Eigen::MatrixXd gram = seq.transpose() * seq;
  const auto k = gram.rows();
  // Both Kronecker products are symmetric, so tr{M X} reduces to an
  // elementwise contraction.
  const double quartic = mom.fourth_moment.cwiseProduct(kron_product(gram, gram)).sum();
  const double quadratic =
      mom.fourth_moment.cwiseProduct(kron_product(Eigen::MatrixXd::Identity(k, k), gram)).sum();
  const double tr_cg = mom.second_moment.cwiseProduct(gram).sum();
  return assemble(quartic, quadratic, tr_cg, mom);
}

MseBreakdown mse(const Eigen::MatrixXd& seq, const MomentSet& mom, const KronFactorization& fact) {
  check_dims(seq, mom, "mse");
  check_fact(mom, fact, "mse");
  const Eigen::MatrixXd gram = seq.transpose() * seq;
  double quartic = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < fact.weights.size(); ++i) {
    if (fact.weights[i] == 0.0) continue;
    const double tr_fg = fact.factors[i].cwiseProduct(gram).sum();
    quartic += tr_fg * tr_fg;
    quadratic += fact.factors[i].trace() * tr_fg;
  }
  const double tr_cg = mom.second_moment.cwiseProduct(gram).sum();
  return assemble(quartic, quadratic, tr_cg, mom);
}

Eigen::MatrixXd mse_gradient(const Eigen::MatrixXd& seq, const MomentSet& mom,
                             const KronFactorization& fact) {
  check_dims(seq, mom, "mse_gradient");
  check_fact(mom, fact, "mse_gradient");
  const auto k = mom.config.num_nodes;
  const Eigen::MatrixXd gram = seq.transpose() * seq;

  // d/dS of the distortion term: sum_k 2 (tr{M_k G} - tr{M_k}) S (M_k + M_k^T);
  // the K x K accumulation keeps the loop free of per-factor matrix products.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < fact.weights.size(); ++i) {
    if (fact.weights[i] == 0.0) continue;
    const Eigen::MatrixXd& f = fact.factors[i];
    const double coeff = 2.0 * (f.cwiseProduct(gram).sum() - f.trace());
    acc.noalias() += coeff * (f + f.transpose());
  }

  const double noise_coeff = (2.0 * mom.config.seq_len + 4.0) * mom.config.sigma_n2;
  acc.noalias() += noise_coeff * (mom.second_moment + mom.second_moment.transpose());
  return seq * acc;
}

ScaleProfile mse_scale_profile(const Eigen::MatrixXd& seq0, const MomentSet& mom) {
  check_dims(seq0, mom, "mse_scale_profile");
  if (seq0.norm() == 0.0) throw std::invalid_argument("mse_scale_profile: seq0 must be nonzero");
  const Eigen::MatrixXd gram = seq0.transpose() * seq0;
  const auto k = gram.rows();
  const double sn2 = mom.config.sigma_n2;
  const double m = static_cast<double>(mom.config.seq_len);
  const double tr_cg = mom.second_moment.cwiseProduct(gram).sum();
  ScaleProfile prof;
  prof.quartic = mom.fourth_moment.cwiseProduct(kron_product(gram, gram)).sum();
  prof.quadratic =
      -2.0 * mom.fourth_moment.cwiseProduct(kron_product(Eigen::MatrixXd::Identity(k, k), gram)).sum() +
      (2.0 * m + 4.0) * sn2 * tr_cg;
  prof.constant = mom.fourth_moment_trace + mom.noise_energy - 2.0 * m * sn2 * mom.second_moment.trace();
  return prof;
}

}  // namespace lpseq
