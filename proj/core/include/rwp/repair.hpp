#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rwp/energy.hpp"
#include "rwp/mlp.hpp"
#include "rwp/plant.hpp"
#include "rwp/region.hpp"
#include "rwp/verifier.hpp"

namespace rwp {

struct AnnealConfig {
  double sigma = 0.01;  // perturbation standard deviation
  double tau0 = 1.0;    // initial temperature
  double alpha = 0.95;  // cooling factor in (0, 1)
  int max_iter = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Metropolis-Hastings criterion: always accepts improvements; a worsening
/// move is accepted with probability exp(delta_e / tau) and consumes exactly
/// one uniform draw.
bool metropolis_accept(double delta_e, double tau, std::mt19937_64& rng);

struct IterationRecord {
  int outer = 0;  // main-loop index of the driver (0 for standalone runs)
  int iter = 0;
  double tau = 0.0;
  double energy = 0.0;  // candidate energy
  double delta = 0.0;
  bool accepted = false;
  bool safeguard_ok = false;
  double min_rob = 0.0;  // minimum robustness over protected samples
};

/// Robustness from one initial state (region coordinates) under the given
/// parameters; the closed-loop one is bound by the driver, synthetic ones
/// by tests.
using ParamRobFn = std::function<double(const MlpParams&, const Eigen::VectorXd&)>;

/// One run of safeguarded simulated annealing: perturbs every parameter
/// with N(0, sigma^2) noise each iteration and accepts only moves that pass
/// Metropolis AND keep every protected sample's robustness >= 0 (when
/// `safeguard` is set). Returns the last accepted parameters, which may
/// equal the input.
MlpParams safeguarded_sim_annealing(const std::vector<Eigen::VectorXd>& repair_states,
                                    const std::vector<Eigen::VectorXd>& protected_states,
                                    const MlpParams& theta, const ParamRobFn& rob,
                                    const EnergyConfig& ecfg, const AnnealConfig& acfg,
                                    std::vector<IterationRecord>* log = nullptr, int outer = 0,
                                    bool safeguard = true, int threads = 1);

/// Gradient-ascent inner step used by the first baseline: central-difference
/// gradient of the smoothed energy, one pass per step size, candidates
/// rejected once any protected sample's exact robustness drops below 0.
MlpParams gradient_ascent_core(const std::vector<Eigen::VectorXd>& repair_states,
                               const std::vector<Eigen::VectorXd>& protected_states,
                               const MlpParams& theta, const ParamRobFn& rob,
                               const ParamRobFn& smooth_rob, const EnergyConfig& ecfg,
                               const std::vector<double>& etas, int steps, double fd_step = 1e-4,
                               int threads = 1);

enum class RepairMethod { VerifyOnly, Isar, PlainAnnealing, GradientAscent };

const char* repair_method_name(RepairMethod m);
RepairMethod repair_method_from_name(const std::string& name);

struct RepairOptions {
  RepairMethod method = RepairMethod::Isar;
  EnergyConfig energy;
  AnnealConfig anneal;
  int refine_depth = 2;
  double verify_margin = 0.0;
  std::uint64_t seed = 0;  // keys region sampling and the annealer
  int threads = 1;
  int max_outer_iter = 100;  // global budget on main repair loops
  // gradient baseline knobs
  std::vector<double> grad_etas = {0.01, 0.001, 0.0001};
  int grad_steps = 20;
  double smooth_beta = 10.0;
};

struct SetSizes {
  int verified = 0;
  int unknown = 0;
  int failed = 0;
};

struct RobStats {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct PhaseTimes {
  double verify_before = 0.0;
  double sample = 0.0;
  double repair = 0.0;
  double verify_after = 0.0;
};

struct RepairReport {
  std::string method;
  SetSizes before, after;
  int broken = 0;    // initially verified regions failing final verification
  int repaired = 0;  // initially failed regions with all samples >= 0 at end
  std::vector<int> broken_ids, repaired_ids;
  /// Regions that were protected during repair yet fail final verification.
  std::vector<int> protected_unverified_ids;
  /// Per-region minimum sampled robustness, mean +- std.
  RobStats before_min_rob_failed, before_min_rob_success, before_min_rob_overall;
  RobStats after_min_rob_failed, after_min_rob_success, after_min_rob_overall;
  int outer_iters = 0;
};

struct RepairResult {
  MlpParams theta;
  std::vector<int> flags_before, flags_after;
  PartitionState before, after;
  RepairReport report;
  std::vector<IterationRecord> iterations;
  /// |S^f| after each main-loop iteration (still-failing regions).
  std::vector<int> failed_counts;
  std::vector<VerifyRecord> verify_before_records, verify_after_records;
  PhaseTimes times;
};

/// The incremental repair driver: verify all regions, classify, then repair
/// failed regions head-first with safeguarded annealing, promoting fully
/// repaired regions into the protected set, and re-verify at the end.
/// RepairMethod selects the full algorithm, either baseline, or the
/// verify-and-classify-only phase.
RepairResult run_repair(const Plant& plant, const Formula& formula, const MlpParams& theta0,
                        const std::vector<Region>& regions, const RepairOptions& opt);

}  // namespace rwp
