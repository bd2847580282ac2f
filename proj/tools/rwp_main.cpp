// rwp: verify / repair controllers against STL tasks and render the results.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <thread>

#include "rwp/experiment.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required();
  cmd->add_option("--out", f.out, "artifact directory (overrides config)");
  cmd->add_option("--seed", f.seed, "RNG seed (overrides config)")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--threads", f.threads, "work pool size (default: logical CPUs)");
}

int run_with(const RunFlags& f, const std::string& forced_method) {
  rwp::ExperimentConfig cfg = rwp::load_experiment_config(f.config);
  if (!forced_method.empty()) cfg.method = forced_method;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.seed_set) cfg.seed = f.seed;
  int threads = f.threads > 0 ? f.threads
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  rwp::ExperimentResult res = rwp::run_experiment(cfg, threads);
  std::cout << rwp::report_render(res.out_dir + "/report.json");
  std::cout << "artifacts: " << res.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repair-with-preservation toolkit"};
  app.require_subcommand(1);

  RunFlags verify_f, repair_f, baseline_f;
  std::string baseline_method = "plain-sa";

  CLI::App* verify = app.add_subcommand("verify", "verify and classify regions only");
  add_run_flags(verify, verify_f);

  CLI::App* repair = app.add_subcommand("repair", "full safeguarded incremental repair");
  add_run_flags(repair, repair_f);

  CLI::App* baseline = app.add_subcommand("baseline", "run a baseline repair method");
  add_run_flags(baseline, baseline_f);
  baseline->add_option("--method", baseline_method, "plain-sa or grad")
      ->check(CLI::IsMember({"plain-sa", "grad"}));

  std::string report_path;
  CLI::App* report = app.add_subcommand("report", "render a report as a table");
  report->add_option("path", report_path, "report.json path")->required();

  std::string regions_path;
  CLI::App* plot = app.add_subcommand("plot-data", "emit a plot-ready region grid");
  plot->add_option("path", regions_path, "regions_*.txt path")->required();

  std::string synth_plant = "uuv", synth_out;
  int synth_budget = 2000;
  std::uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand("synth", "synthesize a seed controller");
  synth->add_option("--plant", synth_plant, "uuv or mc")->check(CLI::IsMember({"uuv", "mc"}));
  synth->add_option("--budget", synth_budget, "annealing iterations");
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--out", synth_out, "weight file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run_with(verify_f, "verify-only");
    if (*repair) return run_with(repair_f, "isar");
    if (*baseline) return run_with(baseline_f, baseline_method);
    if (*report) {
      std::cout << rwp::report_render(report_path);
      return 0;
    }
    if (*plot) {
      std::cout << rwp::emit_plot_data(regions_path);
      return 0;
    }
    if (*synth) {
      auto plant = rwp::make_plant(synth_plant);
      rwp::MlpParams theta = rwp::synthesize_seed_controller(*plant, *plant->task_formula(),
                                                             synth_budget, synth_seed);
      rwp::save_mlp(synth_out, theta);
      std::cout << "wrote " << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
