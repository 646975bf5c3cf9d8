#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace lpseq {

// Thrown when a matrix fails the structural preconditions of a decomposition
// (asymmetry, indefiniteness, rearrangement mismatch).
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kronecker-sum factorization of a K^2 x K^2 matrix:
//
//   A = sum_k weights[k] * left[k] (x) right[k]
//
// with weights sorted descending.  The symmetric path additionally stores
// factors[k] = sqrt(weights[k]) * left[k], so A = sum_k factors[k] (x)
// factors[k]; the objective and gradient consume that form.
struct KronFactorization {
  Eigen::Index source_dim = 0;           // K
  std::vector<double> weights;           // nonnegative, descending
  std::vector<Eigen::MatrixXd> left;     // K x K
  std::vector<Eigen::MatrixXd> right;    // K x K
  std::vector<Eigen::MatrixXd> factors;  // symmetric path only
  bool symmetric = false;

  Eigen::MatrixXd reconstruct() const;
};

Eigen::MatrixXd kron_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Block rearrangement mapping Kronecker structure to rank structure: row
// (j*K + i) of the output is vec(A_ij)^T, where A_ij is the (i,j) K x K block
// of A and blocks are enumerated in column-major order.  It satisfies
// rearrange(B (x) C) = vec(B) vec(C)^T.
Eigen::MatrixXd rearrange(const Eigen::MatrixXd& a);
Eigen::MatrixXd rearrange_inverse(const Eigen::MatrixXd& a);

// Nearest-Kronecker-product expansion via SVD of the rearranged matrix.
KronFactorization kron_decompose(const Eigen::MatrixXd& a);

// Specialization for symmetric PSD matrices that are fixed points of
// rearrange(): an eigendecomposition of A itself yields A = sum_k M_k (x) M_k
// with symmetric M_k.  Eigenvalues in [-1e-10 * max, 0) are clamped to zero;
// anything lower is rejected.
KronFactorization kron_decompose_symmetric(const Eigen::MatrixXd& a);

// Drops trailing factors with weights[k] < rel_tol * weights[0].  rel_tol = 0
// keeps everything.
KronFactorization truncate(const KronFactorization& fact, double rel_tol);

}  // namespace lpseq
