#pragma once

#include <cstdint>
#include <filesystem>

#include "lpseq/objective.hpp"

namespace lpseq {

enum class FrameSource { builtin_3x6, builtin_6x16, from_file, random };

struct FrameSpec {
  int seq_len = 0;
  int num_vectors = 0;
  FrameSource source = FrameSource::builtin_3x6;
  std::filesystem::path path;   // from_file
  std::uint64_t seed = 1;       // random
  double scale = 1.0;           // random: sqrt of expected column power
};

// Verification report for an equiangular tight frame candidate: unit column
// norms, equiangularity at the Welch bound and tightness S S^T = (K/M) I.
struct EtfReport {
  double max_norm_deviation = 0.0;  // max |  ||s_k||  - 1 |
  double coherence_min = 0.0;       // min_{k != l} |<s_k, s_l>|
  double coherence_max = 0.0;
  double welch_bound = 0.0;         // sqrt((K - M) / (M (K - 1))), 0 when K <= M
  double tightness_residual = 0.0;  // || S S^T - (K/M) I ||_F
  bool passed = false;
};

// Built-in real equiangular tight frames.  The 3 x 6 frame takes one unit
// vector along each diagonal of the regular icosahedron (coherence 1/sqrt(5)).
// The 6 x 16 frame factors the Gram matrix of a regular two-graph on 16
// vertices: the Seidel spectrum {5, -3} makes (S_seidel + 3I)/3 a rank-6 PSD
// Gram matrix with off-diagonal magnitude 1/3.  Columns are canonicalized
// (first significant entry positive, then sorted lexicographically).
Eigen::MatrixXd build_etf(int seq_len, int num_vectors);

Eigen::MatrixXd build_frame(const FrameSpec& spec);

EtfReport verify_etf(const Eigen::MatrixXd& seq, double tol);

struct ScaleResult {
  double gamma = 0.0;
  Eigen::MatrixXd seq;   // gamma * seq0
  double j_value = 0.0;  // analytic MSE at the scaled matrix
};

// Closed-form minimizer of J(gamma * seq0) over gamma >= 0.  The ray
// restriction is a quartic in gamma with nonnegative leading coefficient, so
// gamma* = sqrt(max(0, -B / (2 T1))) with T1, B from mse_scale_profile.
ScaleResult optimal_scale(const Eigen::MatrixXd& seq0, const MomentSet& mom);

// I.i.d. Gaussian entries with standard deviation scale / sqrt(seq_len), so
// every column has expected squared norm scale^2.  Deterministic per seed.
Eigen::MatrixXd random_init(int seq_len, int num_vectors, double scale, std::uint64_t seed);

// Plain text matrix format: a "seq_len num_nodes" header line followed by
// seq_len rows of num_nodes entries printed with 17 significant digits
// (lossless double round-trip).
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& seq);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

}  // namespace lpseq
