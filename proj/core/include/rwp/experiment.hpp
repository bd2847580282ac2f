#pragma once

#include <cstdint>
#include <string>

#include "rwp/repair.hpp"

namespace rwp {

/// One experiment, fully described by a config file: benchmark, task, seed
/// controller, partition geometry, method and every run-level knob. Unknown
/// keys and out-of-domain values are rejected at load time.
struct ExperimentConfig {
  std::string plant_name;
  std::string formula_text;  // empty: plant's default task
  Eigen::VectorXd init_lower, init_upper, steps;  // empty: plant defaults
  std::string weights_path;  // empty: synthesize a seed controller
  int synth_budget = 2000;
  std::string method = "isar";
  int K = 100;
  double lambda = 1.0;
  double sigma = 0.01;
  double tau0 = 1.0;
  double alpha = 0.95;
  int max_iter = 100;
  int refine_depth = 2;
  int max_outer_iter = 100;
  std::uint64_t seed = 0;
  std::string out_dir;

  void validate() const;
};

/// Parses a JSON config. Relative weight paths resolve against the config
/// file's directory.
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentResult {
  RepairResult repair;
  std::string out_dir;
};

/// Runs the configured experiment and writes the artifact directory:
/// weights_final.txt, verification_log.txt, iteration_log.txt, report.json,
/// regions_before.txt, regions_after.txt and a timing.json sidecar (the only
/// artifact that is not reproducible bit-for-bit).
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads);

/// Renders report.json as a fixed-width six-column table; min-rob cells are
/// "mean +- std", count cells "n (p%)".
std::string report_render(const std::string& report_path);

/// Converts a region classification artifact into a plain delimited grid
/// (lower bounds, upper bounds, class label per row).
std::string emit_plot_data(const std::string& regions_path);

}  // namespace rwp
