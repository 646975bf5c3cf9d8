#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lpseq/frames.hpp"
#include "lpseq/optimizer.hpp"
#include "lpseq/simulator.hpp"

namespace lpseq {

enum class InitPolicy { scaled_etf, random_restart, from_file };

std::string to_string(InitPolicy policy);
InitPolicy parse_init_policy(const std::string& name);

// Full experiment description: the (num_nodes, seq_len) pairs, parameter
// grids, initialization policy and optimizer / Monte Carlo settings.
struct ExperimentSpec {
  std::vector<std::pair<int, int>> dims = {{6, 3}, {16, 6}};  // (num_nodes, seq_len)
  std::vector<double> p_grid;                                 // empty: default_p_grid()
  std::vector<double> sigma_x2 = {1.0};
  std::vector<double> sigma_n2 = {1e-3, 0.1};

  InitPolicy init = InitPolicy::scaled_etf;
  int restarts = 1;                  // random_restart: number of starts
  std::uint64_t init_seed = 1;       // random_restart: seed of start r is init_seed + r
  double init_scale = 1.0;           // random_restart: expected column power scale^2
  std::filesystem::path init_file;   // from_file

  OptimizerParams opt;
  McConfig mc;

  std::filesystem::path output_dir;  // empty: skip matrix files
  int threads = 1;
  bool keep_traces = false;          // retain optimizer traces in the result

  void validate() const;
};

// p = 1e-3 plus 19 uniformly spaced points from 0.25 to 4.
std::vector<double> default_p_grid();

// Reads an ExperimentSpec from a JSON file; missing keys keep their defaults.
ExperimentSpec load_spec(const std::filesystem::path& path);

struct SweepRecord {
  double p = 0.0;
  int num_nodes = 0;
  int seq_len = 0;
  double sigma_x2 = 0.0;
  double sigma_n2 = 0.0;
  double j_analytic_init = 0.0;
  double j_analytic_opt = 0.0;
  double j_mc_init = 0.0;
  double j_mc_opt = 0.0;
  double mc_std_error_init = 0.0;
  double mc_std_error_opt = 0.0;
  long iterations = 0;
  std::string termination_reason;
  double init_total_power = 0.0;
  double opt_total_power = 0.0;
  double opt_max_column_power = 0.0;
  bool skipped = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;       // sorted by (num_nodes, seq_len, sigma_n2, p)
  std::vector<OptimizerTrace> traces;     // aligned with records when keep_traces is set
  bool all_ok = true;                     // false if any grid point was skipped
};

// Runs the whole grid: builds moments and the Kronecker factorization per
// point, scales the initial frame, descends, and attaches Monte Carlo
// estimates for both the initial and the optimized matrix.  Grid points are
// independent; `threads` workers may process them concurrently without
// changing a single output bit.
SweepResult run_sweep(const ExperimentSpec& spec);

std::string csv_header();
void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);

// Two-column (p, log10 J) series per (num_nodes, seq_len, sigma_n2) cell,
// for the initial frame (wbe) and the optimized matrix (alg) in both the
// analytic and Monte Carlo variants.  Nonpositive J values emit a nan
// sentinel with a warning on stderr.
void write_plot_series(const std::vector<SweepRecord>& records,
                       const std::filesystem::path& dir);

}  // namespace lpseq
