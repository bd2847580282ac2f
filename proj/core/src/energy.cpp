#include "rwp/energy.hpp"

#include <cmath>

namespace rwp {

double log_barrier(double rho, double floor) {
  if (rho <= 0.0) return floor;
  return std::max(floor, std::log(rho));
}

EnergyResult energy_from_robs(const std::vector<double>& repair_robs,
                              const std::vector<double>& protected_robs,
                              const EnergyConfig& cfg) {
  if (repair_robs.empty()) throw Error("evaluate_energy: empty repair sample set");
  if (cfg.lambda < 0.0) throw Error("balance factor lambda must be >= 0");

  double sum = 0.0;
  for (double r : repair_robs) sum += r;
  EnergyResult out;
  out.energy = sum / static_cast<double>(repair_robs.size());

  if (!protected_robs.empty()) {
    double barrier_sum = 0.0;
    double min_rob = kTop;
    for (double r : protected_robs) {
      barrier_sum += log_barrier(r, cfg.barrier_floor);
      min_rob = std::min(min_rob, r);
    }
    out.energy += cfg.lambda * barrier_sum / static_cast<double>(protected_robs.size());
    out.min_protected_rob = min_rob;
  }
  return out;
}

EnergyResult evaluate_energy(const std::vector<Eigen::VectorXd>& repair_states,
                             const std::vector<Eigen::VectorXd>& protected_states,
                             const StateRobFn& rob, const EnergyConfig& cfg) {
  std::vector<double> rr, pr;
  rr.reserve(repair_states.size());
  pr.reserve(protected_states.size());
  for (const auto& s : repair_states) rr.push_back(rob(s));
  for (const auto& s : protected_states) pr.push_back(rob(s));
  return energy_from_robs(rr, pr, cfg);
}

namespace {

// Midpoint-rule mean of fn over a box.
double grid_mean(const Region& r, int n, const std::function<double(const Eigen::VectorXd&)>& fn) {
  const Eigen::Index d = r.lower.size();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  double sum = 0.0;
  std::size_t count = 0;
  for (;;) {
    Eigen::VectorXd p(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      p[i] = r.lower[i] +
             (idx[static_cast<std::size_t>(i)] + 0.5) / n * (r.upper[i] - r.lower[i]);
    }
    sum += fn(p);
    ++count;
    Eigen::Index i = d - 1;
    for (;;) {
      if (++idx[static_cast<std::size_t>(i)] < n) break;
      idx[static_cast<std::size_t>(i)] = 0;
      if (i-- == 0) return sum / static_cast<double>(count);
    }
  }
}

double volume(const Region& r) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < r.lower.size(); ++i) v *= r.upper[i] - r.lower[i];
  return v;
}

}  // namespace

double exact_energy_oracle(const Region& repair_region,
                           const std::vector<Region>& protected_regions, const StateRobFn& rob,
                           const EnergyConfig& cfg, int grid_per_dim) {
  if (grid_per_dim < 50) throw Error("oracle quadrature needs >= 50 grid points per dimension");

  double e = grid_mean(repair_region, grid_per_dim, rob);
  if (!protected_regions.empty()) {
    double total_volume = 0.0;
    double total_integral = 0.0;
    for (const Region& r : protected_regions) {
      double v = volume(r);
      total_volume += v;
      total_integral += v * grid_mean(r, grid_per_dim, [&](const Eigen::VectorXd& s) {
        return log_barrier(rob(s), cfg.barrier_floor);
      });
    }
    e += cfg.lambda * total_integral / total_volume;
  }
  return e;
}

}  // namespace rwp
