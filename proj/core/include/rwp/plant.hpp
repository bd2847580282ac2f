#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "rwp/interval.hpp"
#include "rwp/mlp.hpp"
#include "rwp/stl.hpp"

namespace rwp {

/// Closed-loop system model: deterministic dynamics, observation map and
/// action scaling, in both concrete and interval (box) form. The interval
/// methods must enclose the image of the concrete ones on any input box.
class Plant {
 public:
  virtual ~Plant() = default;

  virtual const std::string& name() const = 0;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int obs_dim() const = 0;
  /// Number of free initial-state coordinates (regions live in this space).
  virtual int free_dim() const = 0;
  /// Trajectory horizon T in steps (dt = 1 s).
  virtual int horizon() const = 0;
  virtual const VarTable& vars() const = 0;

  virtual Eigen::VectorXd initial_state(const Eigen::VectorXd& free) const = 0;
  virtual IntervalBox initial_box(const Eigen::VectorXd& free_lo,
                                  const Eigen::VectorXd& free_hi) const = 0;

  virtual Eigen::VectorXd observe(const Eigen::VectorXd& s) const = 0;
  virtual IntervalBox observe_box(const IntervalBox& s) const = 0;

  /// Maps raw network output to a clamped physical action.
  virtual Eigen::VectorXd scale_action(const Eigen::VectorXd& raw) const = 0;
  virtual IntervalBox scale_action_box(const IntervalBox& raw) const = 0;

  virtual Eigen::VectorXd step(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const = 0;
  virtual IntervalBox step_box(const IntervalBox& s, const IntervalBox& a) const = 0;

  /// Default experiment geometry and task for this benchmark.
  virtual Eigen::VectorXd init_lower() const = 0;
  virtual Eigen::VectorXd init_upper() const = 0;
  virtual FormulaPtr task_formula() const = 0;
  virtual MlpParams default_architecture() const = 0;
};

/// Plant selection by name ("uuv", "mc").
std::unique_ptr<Plant> make_plant(const std::string& name);

Trajectory rollout(const Plant& plant, const MlpParams& theta, const Eigen::VectorXd& s0, int T);

/// STL robustness of the closed-loop trajectory from initial state s0.
double rob(const Plant& plant, const Formula& formula, const Eigen::VectorXd& s0,
           const MlpParams& theta);
double smooth_rob(const Plant& plant, const Formula& formula, const Eigen::VectorXd& s0,
                  const MlpParams& theta, double beta);

/// Reproducible stand-in for a pre-trained controller: simulated-annealing
/// maximization of mean robustness over a coarse grid of initial states,
/// stopped while the controller still fails from at least one grid state.
/// Throws if no parameter vector with mixed outcomes is encountered within
/// the budget.
MlpParams synthesize_seed_controller(const Plant& plant, const Formula& formula, int budget,
                                     std::uint64_t seed);

}  // namespace rwp
