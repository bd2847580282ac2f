#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rwp/region.hpp"
#include "rwp/stl.hpp"

namespace rwp {

struct EnergyConfig {
  double lambda = 1.0;           // balance factor, >= 0
  double barrier_floor = -1000.0;
  int K = 100;                   // samples per region
};

/// Log barrier with a finite floor: max(floor, log(rho)) for rho > 0, floor
/// otherwise.
double log_barrier(double rho, double floor);

/// Robustness of the closed loop from one initial state (free/region
/// coordinates), under whatever parameters the caller has bound.
using StateRobFn = std::function<double(const Eigen::VectorXd&)>;

struct EnergyResult {
  double energy = 0.0;
  /// Minimum robustness over the protected samples; kTop when none.
  double min_protected_rob = kTop;
};

/// Monte Carlo energy: mean robustness over the repair samples plus
/// lambda * mean log-barrier over the protected samples. An empty protected
/// set drops the barrier term (the non-safeguarded baseline's objective).
EnergyResult evaluate_energy(const std::vector<Eigen::VectorXd>& repair_states,
                             const std::vector<Eigen::VectorXd>& protected_states,
                             const StateRobFn& rob, const EnergyConfig& cfg);

/// Same combination over already-computed robustness values, summed in
/// index order so parallel callers stay bit-stable.
EnergyResult energy_from_robs(const std::vector<double>& repair_robs,
                              const std::vector<double>& protected_robs,
                              const EnergyConfig& cfg);

/// Deterministic midpoint-rule quadrature of the integral form of the
/// energy, used as the statistical oracle for the Monte Carlo estimator.
double exact_energy_oracle(const Region& repair_region,
                           const std::vector<Region>& protected_regions, const StateRobFn& rob,
                           const EnergyConfig& cfg, int grid_per_dim);

}  // namespace rwp
