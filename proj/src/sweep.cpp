#include "lpseq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

namespace lpseq {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct GridPoint {
  int num_nodes;
  int seq_len;
  double sigma_x2;
  double sigma_n2;
  double p;
};

struct PointOutcome {
  SweepRecord record;
  OptimizerTrace trace;
};

SweepRecord skipped_record(const GridPoint& pt, const std::string& reason) {
  SweepRecord rec;
  rec.p = pt.p;
  rec.num_nodes = pt.num_nodes;
  rec.seq_len = pt.seq_len;
  rec.sigma_x2 = pt.sigma_x2;
  rec.sigma_n2 = pt.sigma_n2;
  rec.j_analytic_init = kNan;
  rec.j_analytic_opt = kNan;
  rec.j_mc_init = kNan;
  rec.j_mc_opt = kNan;
  rec.mc_std_error_init = kNan;
  rec.mc_std_error_opt = kNan;
  rec.init_total_power = kNan;
  rec.opt_total_power = kNan;
  rec.opt_max_column_power = kNan;
  rec.skipped = true;
  std::string clean = reason;
  std::replace(clean.begin(), clean.end(), ',', ';');
  std::replace(clean.begin(), clean.end(), '\n', ' ');
  rec.termination_reason = "skipped: " + clean;
  return rec;
}

// Scale the raw start matrix along its ray; a degenerate optimum at the
// origin falls back to the unscaled matrix (the optimizer rejects zero
// starts, and J(start) is still recorded faithfully).
Eigen::MatrixXd scaled_or_raw(const Eigen::MatrixXd& raw, const MomentSet& mom) {
  const ScaleResult sc = optimal_scale(raw, mom);
  return sc.gamma > 0.0 ? sc.seq : raw;
}

PointOutcome process_point(const GridPoint& pt, const ExperimentSpec& spec) {
  PointOutcome out;
  try {
    SystemConfig cfg;
    cfg.num_nodes = pt.num_nodes;
    cfg.seq_len = pt.seq_len;
    cfg.p = pt.p;
    cfg.sigma_x2 = pt.sigma_x2;
    cfg.sigma_n2 = pt.sigma_n2;
    cfg.validate();

    const MomentSet mom = build_moments(cfg);
    const KronFactorization fact = kron_decompose_symmetric(mom.fourth_moment);

    Eigen::MatrixXd init;
    DescentResult run;
    if (spec.init == InitPolicy::random_restart) {
      bool have = false;
      for (int r = 0; r < spec.restarts; ++r) {
        const Eigen::MatrixXd raw =
            random_init(pt.seq_len, pt.num_nodes, spec.init_scale, spec.init_seed + r);
        const Eigen::MatrixXd start = scaled_or_raw(raw, mom);
        DescentResult cand = gradient_descent(start, mom, fact, spec.opt);
        if (!have || cand.j_value < run.j_value) {
          have = true;
          run = std::move(cand);
          init = start;
        }
      }
    } else {
      Eigen::MatrixXd raw;
      if (spec.init == InitPolicy::scaled_etf) {
        raw = build_etf(pt.seq_len, pt.num_nodes);
      } else {
        raw = load_matrix(spec.init_file);
        if (raw.rows() != pt.seq_len || raw.cols() != pt.num_nodes)
          throw std::invalid_argument("init file is " + std::to_string(raw.rows()) + " x " +
                                      std::to_string(raw.cols()) + ", grid point needs " +
                                      std::to_string(pt.seq_len) + " x " +
                                      std::to_string(pt.num_nodes));
      }
      init = scaled_or_raw(raw, mom);
      run = gradient_descent(init, mom, fact, spec.opt);
    }

    const McEstimate mc_init = empirical_mse(init, cfg, spec.mc);
    const McEstimate mc_opt = empirical_mse(run.seq, cfg, spec.mc);

    SweepRecord rec;
    rec.p = pt.p;
    rec.num_nodes = pt.num_nodes;
    rec.seq_len = pt.seq_len;
    rec.sigma_x2 = pt.sigma_x2;
    rec.sigma_n2 = pt.sigma_n2;
    rec.j_analytic_init = run.trace.entries.front().j_value;
    rec.j_analytic_opt = run.j_value;
    rec.j_mc_init = mc_init.mean_sq_error;
    rec.j_mc_opt = mc_opt.mean_sq_error;
    rec.mc_std_error_init = mc_init.std_error;
    rec.mc_std_error_opt = mc_opt.std_error;
    rec.iterations = static_cast<long>(run.trace.entries.size()) - 1;
    rec.termination_reason = to_string(run.trace.reason);
    rec.init_total_power = init.squaredNorm();
    rec.opt_total_power = run.seq.squaredNorm();
    rec.opt_max_column_power = run.seq.colwise().squaredNorm().maxCoeff();
    out.record = rec;
    out.trace = std::move(run.trace);

    if (!spec.output_dir.empty()) {
      const auto dir = spec.output_dir / "matrices";
      const std::string tag = "K" + std::to_string(pt.num_nodes) + "_len" +
                              std::to_string(pt.seq_len) + "_sx" + fmt_short(pt.sigma_x2) +
                              "_sn" + fmt_short(pt.sigma_n2) + "_p" + fmt_short(pt.p);
      save_matrix(dir / ("S_init_" + tag + ".txt"), init);
      save_matrix(dir / ("S_opt_" + tag + ".txt"), run.seq);
    }
  } catch (const std::exception& ex) {
    out.record = skipped_record(pt, ex.what());
    out.trace = OptimizerTrace{};
  }
  return out;
}

}  // namespace

std::string to_string(InitPolicy policy) {
  switch (policy) {
    case InitPolicy::scaled_etf: return "scaled_etf";
    case InitPolicy::random_restart: return "random";
    case InitPolicy::from_file: return "file";
  }
  return "unknown";
}

InitPolicy parse_init_policy(const std::string& name) {
  if (name == "scaled_etf") return InitPolicy::scaled_etf;
  if (name == "random") return InitPolicy::random_restart;
  if (name == "file") return InitPolicy::from_file;
  throw std::invalid_argument("unknown init policy '" + name + "' (scaled_etf | random | file)");
}

void ExperimentSpec::validate() const {
  if (dims.empty()) throw std::domain_error("ExperimentSpec: dims must not be empty");
  if (sigma_x2.empty() || sigma_n2.empty())
    throw std::domain_error("ExperimentSpec: sigma grids must not be empty");
  if (restarts < 1) throw std::domain_error("ExperimentSpec: restarts must be >= 1");
  if (threads < 1) throw std::domain_error("ExperimentSpec: threads must be >= 1");
  if (init == InitPolicy::from_file && init_file.empty())
    throw std::domain_error("ExperimentSpec: init policy 'file' needs init_file");
  opt.validate();
  mc.validate();
}

std::vector<double> default_p_grid() {
  std::vector<double> grid;
  grid.push_back(1e-3);
  const double lo = 0.25, hi = 4.0;
  for (int i = 0; i < 19; ++i) grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 18.0);
  return grid;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_spec: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error("load_spec: " + path.string() + ": " + ex.what());
  }

  ExperimentSpec spec;
  if (j.contains("dims")) {
    spec.dims.clear();
    for (const auto& d : j.at("dims"))
      spec.dims.emplace_back(d.at(0).get<int>(), d.at(1).get<int>());
  }
  if (j.contains("p_grid")) spec.p_grid = j.at("p_grid").get<std::vector<double>>();
  if (j.contains("sigma_x2")) spec.sigma_x2 = j.at("sigma_x2").get<std::vector<double>>();
  if (j.contains("sigma_n2")) spec.sigma_n2 = j.at("sigma_n2").get<std::vector<double>>();
  if (j.contains("init")) {
    const auto& init = j.at("init");
    if (init.contains("policy")) spec.init = parse_init_policy(init.at("policy").get<std::string>());
    if (init.contains("restarts")) spec.restarts = init.at("restarts").get<int>();
    if (init.contains("seed")) spec.init_seed = init.at("seed").get<std::uint64_t>();
    if (init.contains("scale")) spec.init_scale = init.at("scale").get<double>();
    if (init.contains("path")) spec.init_file = init.at("path").get<std::string>();
  }
  if (j.contains("optimizer")) {
    const auto& opt = j.at("optimizer");
    if (opt.contains("rel_tol")) spec.opt.rel_tol = opt.at("rel_tol").get<double>();
    if (opt.contains("armijo_c")) spec.opt.armijo_c = opt.at("armijo_c").get<double>();
    if (opt.contains("max_iters")) spec.opt.max_iters = opt.at("max_iters").get<int>();
    if (opt.contains("initial_step")) spec.opt.initial_step = opt.at("initial_step").get<double>();
    if (opt.contains("backtrack_factor"))
      spec.opt.backtrack_factor = opt.at("backtrack_factor").get<double>();
    if (opt.contains("max_backtracks"))
      spec.opt.max_backtracks = opt.at("max_backtracks").get<int>();
  }
  if (j.contains("mc")) {
    const auto& mc = j.at("mc");
    if (mc.contains("num_samples")) spec.mc.num_samples = mc.at("num_samples").get<std::int64_t>();
    if (mc.contains("seed")) spec.mc.seed = mc.at("seed").get<std::uint64_t>();
    if (mc.contains("chunk_size")) spec.mc.chunk_size = mc.at("chunk_size").get<std::int64_t>();
  }
  if (j.contains("output_dir")) spec.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("threads")) spec.threads = j.at("threads").get<int>();
  return spec;
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<double> p_grid = spec.p_grid.empty() ? default_p_grid() : spec.p_grid;

  std::vector<GridPoint> points;
  for (const auto& [k, m] : spec.dims)
    for (double sx2 : spec.sigma_x2)
      for (double sn2 : spec.sigma_n2)
        for (double p : p_grid) points.push_back({k, m, sx2, sn2, p});
  std::sort(points.begin(), points.end(), [](const GridPoint& a, const GridPoint& b) {
    return std::tie(a.num_nodes, a.seq_len, a.sigma_n2, a.p, a.sigma_x2) <
           std::tie(b.num_nodes, b.seq_len, b.sigma_n2, b.p, b.sigma_x2);
  });

  if (!spec.output_dir.empty())
    std::filesystem::create_directories(spec.output_dir / "matrices");

  std::vector<PointOutcome> outcomes(points.size());
  if (spec.threads == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) outcomes[i] = process_point(points[i], spec);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    const int workers = std::min<int>(spec.threads, static_cast<int>(points.size()));
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < points.size(); i = cursor.fetch_add(1))
          outcomes[i] = process_point(points[i], spec);
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.records.reserve(outcomes.size());
  for (auto& oc : outcomes) {
    result.all_ok = result.all_ok && !oc.record.skipped;
    result.records.push_back(std::move(oc.record));
    if (spec.keep_traces) result.traces.push_back(std::move(oc.trace));
  }
  return result;
}

std::string csv_header() {
  return "p,K,seq_len,sigma_x2,sigma_n2,J_analytic_init,J_analytic_opt,J_mc_init,J_mc_opt,"
         "mc_std_error_init,mc_std_error_opt,iterations,termination_reason,init_total_power,"
         "opt_total_power,opt_max_column_power";
}

void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  out << csv_header() << "\n";
  for (const auto& r : records) {
    out << fmt17(r.p) << ',' << r.num_nodes << ',' << r.seq_len << ',' << fmt17(r.sigma_x2) << ','
        << fmt17(r.sigma_n2) << ',' << fmt17(r.j_analytic_init) << ',' << fmt17(r.j_analytic_opt)
        << ',' << fmt17(r.j_mc_init) << ',' << fmt17(r.j_mc_opt) << ','
        << fmt17(r.mc_std_error_init) << ',' << fmt17(r.mc_std_error_opt) << ',' << r.iterations
        << ',' << r.termination_reason << ',' << fmt17(r.init_total_power) << ','
        << fmt17(r.opt_total_power) << ',' << fmt17(r.opt_max_column_power) << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

void write_plot_series(const std::vector<SweepRecord>& records,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  struct Series {
    const char* method;
    const char* variant;
    double SweepRecord::* value;
  };
  const Series series[] = {
      {"wbe", "analytic", &SweepRecord::j_analytic_init},
      {"wbe", "mc", &SweepRecord::j_mc_init},
      {"alg", "analytic", &SweepRecord::j_analytic_opt},
      {"alg", "mc", &SweepRecord::j_mc_opt},
  };

  // Cells in record order (records are already sorted).
  std::vector<std::tuple<int, int, double>> cells;
  for (const auto& r : records) {
    std::tuple<int, int, double> cell{r.num_nodes, r.seq_len, r.sigma_n2};
    if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
  }

  for (const auto& [k, m, sn2] : cells) {
    for (const auto& s : series) {
      const std::string name = "series_K" + std::to_string(k) + "_len" + std::to_string(m) +
                               "_sn" + fmt_short(sn2) + "_" + s.method + "_" + s.variant + ".dat";
      const auto path = dir / name;
      std::ofstream out(path);
      if (!out) throw std::runtime_error("write_plot_series: cannot open " + path.string());
      for (const auto& r : records) {
        if (r.num_nodes != k || r.seq_len != m || r.sigma_n2 != sn2) continue;
        if (r.skipped) {
          std::cerr << "write_plot_series: skipped point left out of " << name << " (p=" << r.p
                    << ")\n";
          continue;
        }
        const double j = r.*(s.value);
        if (j > 0.0 && std::isfinite(j)) {
          out << fmt17(r.p) << ' ' << fmt17(std::log10(j)) << "\n";
        } else {
          out << fmt17(r.p) << " nan\n";
          std::cerr << "write_plot_series: J = " << j << " has no log10, nan sentinel in " << name
                    << " (p=" << r.p << ")\n";
        }
      }
      if (!out) throw std::runtime_error("write_plot_series: write failed for " + path.string());
    }
  }
}

}  // namespace lpseq
