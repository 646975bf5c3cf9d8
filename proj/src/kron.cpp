#include "lpseq/kron.hpp"

#include <cmath>
#include <sstream>

namespace lpseq {
namespace {

// Side length K for a K^2 x K^2 input; rejects anything else.
Eigen::Index block_dim(const Eigen::MatrixXd& a, const char* who) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << who << ": expected a square matrix, got " << a.rows() << " x " << a.cols();
    throw std::invalid_argument(os.str());
  }
  const auto n = a.rows();
  const auto k = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (k < 1 || k * k != n) {
    std::ostringstream os;
    os << who << ": dimension " << n << " is not a perfect square";
    throw std::invalid_argument(os.str());
  }
  return k;
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index k) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), k, k);
}

// Sign convention: flip so the first component with magnitude above tol is
// positive.  Keeps eigenvector output stable for reproducible factors.
bool wants_flip(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14) return v[i] < 0.0;
  }
  return false;
}

}  // namespace

Eigen::MatrixXd kron_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd rearrange(const Eigen::MatrixXd& a) {
  const auto k = block_dim(a, "rearrange");
  Eigen::MatrixXd out(k * k, k * k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index l = 0; l < k; ++l)
        for (Eigen::Index r = 0; r < k; ++r) out(j * k + i, l * k + r) = a(i * k + r, j * k + l);
  return out;
}

Eigen::MatrixXd rearrange_inverse(const Eigen::MatrixXd& a) {
  const auto k = block_dim(a, "rearrange_inverse");
  Eigen::MatrixXd out(k * k, k * k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index l = 0; l < k; ++l)
        for (Eigen::Index r = 0; r < k; ++r) out(i * k + r, j * k + l) = a(j * k + i, l * k + r);
  return out;
}

Eigen::MatrixXd KronFactorization::reconstruct() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(source_dim * source_dim, source_dim * source_dim);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    out.noalias() += weights[k] * kron_product(left[k], right[k]);
  }
  return out;
}

KronFactorization kron_decompose(const Eigen::MatrixXd& a) {
  const auto k = block_dim(a, "kron_decompose");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(rearrange(a), Eigen::ComputeFullU | Eigen::ComputeFullV);

  KronFactorization fact;
  fact.source_dim = k;
  fact.symmetric = false;
  const auto n = svd.singularValues().size();
  fact.weights.resize(n);
  fact.left.reserve(n);
  fact.right.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    fact.weights[i] = svd.singularValues()[i];
    Eigen::VectorXd u = svd.matrixU().col(i);
    Eigen::VectorXd v = svd.matrixV().col(i);
    if (wants_flip(u)) {
      u = -u;
      v = -v;  // compensating flip keeps the rank-one term unchanged
    }
    fact.left.push_back(unvec(u, k));
    fact.right.push_back(unvec(v, k));
  }
  return fact;
}

KronFactorization kron_decompose_symmetric(const Eigen::MatrixXd& a) {
  const auto k = block_dim(a, "kron_decompose_symmetric");
  const double scale = a.norm();
  if (scale > 0.0) {
    const double asym = (a - a.transpose()).norm() / scale;
    if (asym > 1e-10) {
      std::ostringstream os;
      os << "kron_decompose_symmetric: input is not symmetric (relative asymmetry " << asym << ")";
      throw StructureError(os.str());
    }
    const double mismatch = (rearrange(a) - a).norm() / scale;
    if (mismatch > 1e-8) {
      std::ostringstream os;
      os << "kron_decompose_symmetric: input is not a rearrangement fixed point (relative "
            "mismatch "
         << mismatch << ")";
      throw StructureError(os.str());
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw StructureError("kron_decompose_symmetric: eigendecomposition failed");

  const auto n = es.eigenvalues().size();
  const double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());

  KronFactorization fact;
  fact.source_dim = k;
  fact.symmetric = true;
  fact.weights.resize(n);
  fact.left.reserve(n);
  fact.right.reserve(n);
  fact.factors.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lam = es.eigenvalues()[n - 1 - i];  // solver sorts ascending
    if (lam < 0.0) {
      if (lam < -1e-10 * lam_max) {
        std::ostringstream os;
        os << "kron_decompose_symmetric: eigenvalue " << lam << " below tolerance -1e-10 * "
           << lam_max << "; input is not PSD";
        throw StructureError(os.str());
      }
      lam = 0.0;
    }
    Eigen::VectorXd w = es.eigenvectors().col(n - 1 - i);
    if (wants_flip(w)) w = -w;
    // Eigenvectors with nonzero eigenvalue unvec to symmetric matrices in
    // exact arithmetic; project so the contract also holds for the null ones.
    const Eigen::MatrixXd raw = unvec(w, k);
    const Eigen::MatrixXd base = 0.5 * (raw + raw.transpose());
    fact.weights[i] = lam;
    fact.left.push_back(base);
    fact.right.push_back(base);
    fact.factors.push_back(std::sqrt(lam) * base);
  }
  return fact;
}

KronFactorization truncate(const KronFactorization& fact, double rel_tol) {
  if (!(rel_tol >= 0.0) || rel_tol >= 1.0)
    throw std::invalid_argument("truncate: rel_tol must lie in [0, 1)");
  KronFactorization out;
  out.source_dim = fact.source_dim;
  out.symmetric = fact.symmetric;
  if (fact.weights.empty()) return out;
  const double cut = rel_tol * fact.weights.front();
  for (std::size_t i = 0; i < fact.weights.size(); ++i) {
    if (fact.weights[i] < cut) continue;
    out.weights.push_back(fact.weights[i]);
    out.left.push_back(fact.left[i]);
    out.right.push_back(fact.right[i]);
    if (fact.symmetric) out.factors.push_back(fact.factors[i]);
  }
  return out;
}

}  // namespace lpseq
