#include "rwp/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rwp {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

Interval imul(Interval a, Interval b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

class UuvPlant final : public Plant {
 public:
  UuvPlant() : name_("uuv"), vars_(std::vector<std::string>{"x", "y", "h", "v"}) {}

  const std::string& name() const override { return name_; }
  int state_dim() const override { return 4; }
  int action_dim() const override { return 1; }
  int obs_dim() const override { return 2; }
  int free_dim() const override { return 2; }  // (y, h)
  int horizon() const override { return 30; }
  const VarTable& vars() const override { return vars_; }

  Eigen::VectorXd initial_state(const Eigen::VectorXd& free) const override {
    check_free(free);
    Eigen::VectorXd s(4);
    s << 0.0, free[0], free[1], kSpeed;
    return s;
  }

  IntervalBox initial_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) const override {
    check_free(lo);
    check_free(hi);
    Eigen::VectorXd l(4), u(4);
    l << 0.0, lo[0], lo[1], kSpeed;
    u << 0.0, hi[0], hi[1], kSpeed;
    return {l, u};
  }

  Eigen::VectorXd observe(const Eigen::VectorXd& s) const override {
    Eigen::VectorXd o(2);
    o << s[2], s[1] - 10.0;  // heading, distance to pipe's lower edge
    return o;
  }

  IntervalBox observe_box(const IntervalBox& s) const override {
    Eigen::VectorXd l(2), u(2);
    l << s.lower[2], s.lower[1] - 10.0;
    u << s.upper[2], s.upper[1] - 10.0;
    return {l, u};
  }

  Eigen::VectorXd scale_action(const Eigen::VectorXd& raw) const override {
    Eigen::VectorXd a(1);
    a[0] = kTurnLimit * std::clamp(raw[0], -1.0, 1.0);
    return a;
  }

  IntervalBox scale_action_box(const IntervalBox& raw) const override {
    Interval a = kTurnLimit * interval_clamp(raw.coord(0), -1.0, 1.0);
    Eigen::VectorXd l(1), u(1);
    l << a.lo;
    u << a.hi;
    return {l, u};
  }

  Eigen::VectorXd step(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const override {
    double rad = s[2] * kDegToRad;
    Eigen::VectorXd n(4);
    n << s[0] + s[3] * std::cos(rad), s[1] + s[3] * std::sin(rad), s[2] + a[0], s[3];
    return n;
  }

  IntervalBox step_box(const IntervalBox& s, const IntervalBox& a) const override {
    Interval h_rad = kDegToRad * s.coord(2);
    Interval v = s.coord(3);
    Interval x = s.coord(0) + imul(v, interval_cos(h_rad));
    Interval y = s.coord(1) + imul(v, interval_sin(h_rad));
    Interval h = s.coord(2) + a.coord(0);
    Eigen::VectorXd l(4), u(4);
    l << x.lo, y.lo, h.lo, v.lo;
    u << x.hi, y.hi, h.hi, v.hi;
    return {l, u};
  }

  Eigen::VectorXd init_lower() const override {
    Eigen::VectorXd v(2);
    v << 12.0, 10.0;
    return v;
  }

  Eigen::VectorXd init_upper() const override {
    Eigen::VectorXd v(2);
    v << 22.0, 30.0;
    return v;
  }

  FormulaPtr task_formula() const override {
    return parse_formula("G[0,30](y > 10 & y < 50)", vars_);
  }

  MlpParams default_architecture() const override;

 private:
  void check_free(const Eigen::VectorXd& free) const {
    if (free.size() != 2) throw DimensionError("uuv expects free coordinates (y, h)");
  }

  static constexpr double kSpeed = 0.4855;     // m/s, fixed
  static constexpr double kTurnLimit = 5.0;    // degrees per second
  std::string name_;
  VarTable vars_;
};

class MountainCarPlant final : public Plant {
 public:
  MountainCarPlant() : name_("mc"), vars_(std::vector<std::string>{"x", "v"}) {}

  const std::string& name() const override { return name_; }
  int state_dim() const override { return 2; }
  int action_dim() const override { return 1; }
  int obs_dim() const override { return 2; }
  int free_dim() const override { return 2; }
  int horizon() const override { return 110; }
  const VarTable& vars() const override { return vars_; }

  Eigen::VectorXd initial_state(const Eigen::VectorXd& free) const override { return free; }

  IntervalBox initial_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) const override {
    return {lo, hi};
  }

  Eigen::VectorXd observe(const Eigen::VectorXd& s) const override { return s; }
  IntervalBox observe_box(const IntervalBox& s) const override { return s; }

  Eigen::VectorXd scale_action(const Eigen::VectorXd& raw) const override {
    Eigen::VectorXd a(1);
    a[0] = std::clamp(raw[0], -1.0, 1.0);
    return a;
  }

  IntervalBox scale_action_box(const IntervalBox& raw) const override {
    Interval a = interval_clamp(raw.coord(0), -1.0, 1.0);
    Eigen::VectorXd l(1), u(1);
    l << a.lo;
    u << a.hi;
    return {l, u};
  }

  Eigen::VectorXd step(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const override {
    double v = std::clamp(s[1] + 0.0015 * a[0] - 0.0025 * std::cos(3.0 * s[0]), -kVMax, kVMax);
    double x = std::clamp(s[0] + v, kXMin, kXMax);
    if (x == kXMin && v < 0.0) v = 0.0;  // inelastic left wall
    Eigen::VectorXd n(2);
    n << x, v;
    return n;
  }

  IntervalBox step_box(const IntervalBox& s, const IntervalBox& a) const override {
    Interval force = 0.0015 * a.coord(0) + (-0.0025) * interval_cos(3.0 * s.coord(0));
    Interval v = interval_clamp(s.coord(1) + force, -kVMax, kVMax);
    Interval x = interval_clamp(s.coord(0) + v, kXMin, kXMax);
    if (x.lo <= kXMin && v.lo < 0.0) {
      // some trajectory may touch the wall and have its velocity reset
      v.hi = std::max(v.hi, 0.0);
    }
    Eigen::VectorXd l(2), u(2);
    l << x.lo, v.lo;
    u << x.hi, v.hi;
    return {l, u};
  }

  Eigen::VectorXd init_lower() const override {
    Eigen::VectorXd v(2);
    v << -0.505, -0.055;
    return v;
  }

  Eigen::VectorXd init_upper() const override {
    Eigen::VectorXd v(2);
    v << 0.395, 0.045;
    return v;
  }

  FormulaPtr task_formula() const override { return parse_formula("F[0,110](x >= 0.45)", vars_); }

  MlpParams default_architecture() const override;

 private:
  static constexpr double kVMax = 0.07;
  static constexpr double kXMin = -1.2;
  static constexpr double kXMax = 0.6;
  std::string name_;
  VarTable vars_;
};

MlpParams make_architecture(int in, const std::vector<int>& hidden, Activation hidden_act,
                            Activation out_act) {
  MlpParams mlp;
  int prev = in;
  for (int width : hidden) {
    mlp.layers.push_back({Eigen::MatrixXd::Zero(width, prev), Eigen::VectorXd::Zero(width),
                          hidden_act});
    prev = width;
  }
  mlp.layers.push_back({Eigen::MatrixXd::Zero(1, prev), Eigen::VectorXd::Zero(1), out_act});
  return mlp;
}

MlpParams UuvPlant::default_architecture() const {
  return make_architecture(2, {32, 32}, Activation::Tanh, Activation::Tanh);
}

MlpParams MountainCarPlant::default_architecture() const {
  return make_architecture(2, {16, 16}, Activation::Sigmoid, Activation::Tanh);
}

}  // namespace

std::unique_ptr<Plant> make_plant(const std::string& name) {
  if (name == "uuv") return std::make_unique<UuvPlant>();
  if (name == "mc") return std::make_unique<MountainCarPlant>();
  throw Error("unknown plant '" + name + "' (expected \"uuv\" or \"mc\")");
}

Trajectory rollout(const Plant& plant, const MlpParams& theta, const Eigen::VectorXd& s0, int T) {
  if (T < 1) throw Error("rollout horizon must be >= 1");
  if (!s0.allFinite()) throw Error("initial state must be finite");
  Trajectory tr;
  tr.states.reserve(static_cast<std::size_t>(T) + 1);
  tr.states.push_back(s0);
  Eigen::VectorXd s = s0;
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd a = plant.scale_action(mlp_eval(theta, plant.observe(s)));
    s = plant.step(s, a);
    tr.states.push_back(s);
  }
  return tr;
}

double rob(const Plant& plant, const Formula& formula, const Eigen::VectorXd& s0,
           const MlpParams& theta) {
  return robustness(formula, rollout(plant, theta, s0, plant.horizon()), plant.vars(), 0);
}

double smooth_rob(const Plant& plant, const Formula& formula, const Eigen::VectorXd& s0,
                  const MlpParams& theta, double beta) {
  return smooth_robustness(formula, rollout(plant, theta, s0, plant.horizon()), plant.vars(), 0,
                           beta);
}

MlpParams synthesize_seed_controller(const Plant& plant, const Formula& formula, int budget,
                                     std::uint64_t seed) {
  if (budget < 1) throw Error("synthesis budget must be >= 1");

  // Coarse grid of initial states (cell centers of a 5x5 partition).
  std::vector<Eigen::VectorXd> grid;
  const int n = 5;
  Eigen::VectorXd lo = plant.init_lower(), hi = plant.init_upper();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd free(2);
      free << lo[0] + (i + 0.5) / n * (hi[0] - lo[0]), lo[1] + (j + 0.5) / n * (hi[1] - lo[1]);
      grid.push_back(plant.initial_state(free));
    }
  }

  auto grid_robs = [&](const MlpParams& theta) {
    std::vector<double> r(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) r[i] = rob(plant, formula, grid[i], theta);
    return r;
  };
  auto mean = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v;
    return s / static_cast<double>(r.size());
  };
  auto mixed = [](const std::vector<double>& r) {
    bool any_pos = false, any_neg = false;
    for (double v : r) (v >= 0.0 ? any_pos : any_neg) = true;
    return any_pos && any_neg;
  };

  std::mt19937_64 rng(mix_seed(seed, 0xa11ea1));
  std::normal_distribution<double> gauss(0.0, 1.0);

  MlpParams theta = plant.default_architecture();
  Eigen::VectorXd p = mlp_flatten(theta);
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = 0.2 * gauss(rng);
  theta = mlp_unflatten(theta, p);

  std::vector<double> robs = grid_robs(theta);
  double energy = mean(robs);

  bool have_candidate = mixed(robs);
  MlpParams best = theta;
  double best_energy = have_candidate ? energy : -std::numeric_limits<double>::infinity();

  double tau = 0.5;
  const double sigma = 0.05, alpha = 0.99;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int iter = 0; iter < budget; ++iter) {
    Eigen::VectorXd q = p;
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] += sigma * gauss(rng);
    MlpParams cand = mlp_unflatten(theta, q);
    std::vector<double> cand_robs = grid_robs(cand);
    double cand_energy = mean(cand_robs);
    double delta = cand_energy - energy;
    if (delta >= 0.0 || unif(rng) < std::exp(delta / tau)) {
      p = q;
      theta = std::move(cand);
      energy = cand_energy;
      robs = std::move(cand_robs);
      if (mixed(robs) && energy > best_energy) {
        best = theta;
        best_energy = energy;
        have_candidate = true;
      }
    }
    tau *= alpha;
  }

  if (!have_candidate) {
    throw Error("seed-controller synthesis found no parameters with mixed outcomes within budget");
  }
  return best;
}

}  // namespace rwp
