#include "lpseq/frames.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "lpseq/rng.hpp"

namespace lpseq {
namespace {

// Column sign convention plus lexicographic column order; makes the builtin
// constructions reproducible byte-for-byte.
void canonicalize_columns(Eigen::MatrixXd& s) {
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      if (std::abs(s(r, c)) > 1e-12) {
        if (s(r, c) < 0.0) s.col(c) = -s.col(c);
        break;
      }
    }
  }
  std::vector<Eigen::Index> order(s.cols());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      if (s(r, a) != s(r, b)) return s(r, a) < s(r, b);
    }
    return false;
  });
  Eigen::MatrixXd sorted(s.rows(), s.cols());
  for (Eigen::Index c = 0; c < s.cols(); ++c) sorted.col(c) = s.col(order[c]);
  s = std::move(sorted);
}

// Six unit vectors along the diagonals of the regular icosahedron; pairwise
// inner products are all +-1/sqrt(5).
Eigen::MatrixXd icosahedron_etf() {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  Eigen::MatrixXd s(3, 6);
  s.col(0) << 0.0, 1.0, phi;
  s.col(1) << 0.0, -1.0, phi;
  s.col(2) << 1.0, phi, 0.0;
  s.col(3) << -1.0, phi, 0.0;
  s.col(4) << phi, 0.0, 1.0;
  s.col(5) << phi, 0.0, -1.0;
  s /= std::sqrt(1.0 + phi * phi);
  canonicalize_columns(s);
  return s;
}

// 16 equiangular lines in R^6.  Vertices are F_2^4; joining vertices whose
// difference has Hamming weight 1 or 4 gives a strongly regular (16,5,0,2)
// graph, whose Seidel matrix has spectrum {5^(6), -3^(10)} and therefore
// defines a regular two-graph.  (Seidel + 3I)/3 is then a PSD rank-6 Gram
// matrix of unit vectors with pairwise |inner product| = 1/3; factoring its
// top eigenspace yields the frame.
Eigen::MatrixXd two_graph_etf() {
  constexpr int n = 16;
  Eigen::MatrixXd gram(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) {
        gram(a, b) = 1.0;
        continue;
      }
      const int w = std::popcount(static_cast<unsigned>(a ^ b));
      const bool adjacent = (w == 1 || w == 4);
      gram(a, b) = adjacent ? -1.0 / 3.0 : 1.0 / 3.0;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  Eigen::MatrixXd s(6, n);
  for (int i = 0; i < 6; ++i) {
    const double lam = es.eigenvalues()[n - 1 - i];  // the six copies of K/M = 8/3
    s.row(i) = std::sqrt(lam) * es.eigenvectors().col(n - 1 - i).transpose();
  }
  canonicalize_columns(s);
  return s;
}

}  // namespace

Eigen::MatrixXd build_etf(int seq_len, int num_vectors) {
  if (seq_len == 3 && num_vectors == 6) return icosahedron_etf();
  if (seq_len == 6 && num_vectors == 16) return two_graph_etf();
  std::ostringstream os;
  os << "build_etf: no built-in " << seq_len << " x " << num_vectors
     << " equiangular tight frame; supply a matrix file instead";
  throw std::invalid_argument(os.str());
}

Eigen::MatrixXd build_frame(const FrameSpec& spec) {
  switch (spec.source) {
    case FrameSource::builtin_3x6: return build_etf(3, 6);
    case FrameSource::builtin_6x16: return build_etf(6, 16);
    case FrameSource::from_file: return load_matrix(spec.path);
    case FrameSource::random:
      return random_init(spec.seq_len, spec.num_vectors, spec.scale, spec.seed);
  }
  throw std::invalid_argument("build_frame: unknown source");
}

EtfReport verify_etf(const Eigen::MatrixXd& seq, double tol) {
  if (seq.rows() < 1 || seq.cols() < 1) throw std::invalid_argument("verify_etf: empty matrix");
  const auto m = seq.rows();
  const auto k = seq.cols();
  EtfReport rep;
  rep.welch_bound =
      k > m ? std::sqrt(static_cast<double>(k - m) / static_cast<double>(m * (k - 1))) : 0.0;

  const Eigen::MatrixXd gram = seq.transpose() * seq;
  for (Eigen::Index c = 0; c < k; ++c)
    rep.max_norm_deviation = std::max(rep.max_norm_deviation, std::abs(std::sqrt(gram(c, c)) - 1.0));

  if (k > 1) {
    rep.coherence_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index r = 0; r < k; ++r) {
        if (r == c) continue;
        const double coh = std::abs(gram(r, c));
        rep.coherence_min = std::min(rep.coherence_min, coh);
        rep.coherence_max = std::max(rep.coherence_max, coh);
      }
  }

  const double ratio = static_cast<double>(k) / static_cast<double>(m);
  rep.tightness_residual =
      (seq * seq.transpose() - ratio * Eigen::MatrixXd::Identity(m, m)).norm();

  rep.passed = rep.max_norm_deviation <= tol && rep.tightness_residual <= tol &&
               (k == 1 || (std::abs(rep.coherence_max - rep.welch_bound) <= tol &&
                           std::abs(rep.coherence_min - rep.welch_bound) <= tol));
  return rep;
}

ScaleResult optimal_scale(const Eigen::MatrixXd& seq0, const MomentSet& mom) {
  const ScaleProfile prof = mse_scale_profile(seq0, mom);
  ScaleResult res;
  if (prof.quartic <= 0.0) {
    // T1 = tr{M (G x G)} >= 0 for a PSD fourth moment; T1 = 0 with B < 0
    // would make the ray unbounded below and cannot occur.
    if (prof.quadratic < 0.0)
      throw StructureError("optimal_scale: degenerate ray (T1 <= 0 with B < 0)");
    res.gamma = 0.0;
  } else {
    res.gamma = std::sqrt(std::max(0.0, -prof.quadratic / (2.0 * prof.quartic)));
  }
  res.seq = res.gamma * seq0;
  res.j_value = mse(res.seq, mom).total;
  return res;
}

Eigen::MatrixXd random_init(int seq_len, int num_vectors, double scale, std::uint64_t seed) {
  if (seq_len < 1 || num_vectors < 1)
    throw std::invalid_argument("random_init: dimensions must be positive");
  if (!(scale > 0.0)) throw std::invalid_argument("random_init: scale must be positive");
  Eigen::MatrixXd s(seq_len, num_vectors);
  CounterRng rng = CounterRng::for_stream(seed, 0);
  rng.fill_normals(s.data(), s.size());
  s *= scale / std::sqrt(static_cast<double>(seq_len));
  return s;
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& seq) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix: cannot open " + path.string());
  out << seq.rows() << " " << seq.cols() << "\n";
  char buf[64];
  for (Eigen::Index r = 0; r < seq.rows(); ++r) {
    for (Eigen::Index c = 0; c < seq.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", seq(r, c));
      out << buf << (c + 1 < seq.cols() ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_matrix: write failed for " + path.string());
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path.string());
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error("load_matrix: bad header in " + path.string());
  Eigen::MatrixXd seq(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(in >> seq(r, c)))
        throw std::runtime_error("load_matrix: truncated data in " + path.string());
    }
  return seq;
}

}  // namespace lpseq
