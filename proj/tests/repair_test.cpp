#include <doctest.h>

#include <cmath>
#include <random>

#include "rwp/repair.hpp"

using namespace rwp;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

// One scalar parameter w: a single 1x1 identity layer with zero bias.
MlpParams scalar_theta(double w) {
  MlpParams mlp;
  mlp.layers.push_back(
      {Eigen::MatrixXd::Constant(1, 1, w), Eigen::VectorXd::Zero(1), Activation::Identity});
  return mlp;
}

double scalar_w(const MlpParams& theta) { return theta.layers[0].W(0, 0); }

}  // namespace

TEST_CASE("metropolis criterion") {
  std::mt19937_64 rng(1);
  SUBCASE("improvements always accepted") {
    CHECK(metropolis_accept(0.0, 1.0, rng));
    CHECK(metropolis_accept(5.0, 1.0, rng));
    CHECK(metropolis_accept(0.0, 1e-9, rng));
  }
  SUBCASE("worsening moves accepted at rate exp(delta/tau)") {
    double tau = 1.0, delta = -tau * std::log(2.0);
    int accepted = 0, trials = 10000;
    for (int i = 0; i < trials; ++i) accepted += metropolis_accept(delta, tau, rng) ? 1 : 0;
    double rate = static_cast<double>(accepted) / trials;
    CHECK(std::abs(rate - 0.5) <= 0.015);  // 3 binomial sigma
  }
  SUBCASE("temperature scales the threshold") {
    double delta = -2.0 * std::log(4.0);
    int accepted = 0, trials = 20000;
    for (int i = 0; i < trials; ++i) accepted += metropolis_accept(delta, 2.0, rng) ? 1 : 0;
    CHECK(std::abs(accepted / 20000.0 - 0.25) <= 0.01);
  }
  SUBCASE("invalid temperature") {
    CHECK_THROWS_AS(metropolis_accept(-1.0, 0.0, rng), Error);
  }
}

TEST_CASE("anneal config validation") {
  AnnealConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  AnnealConfig bad = cfg;
  bad.sigma = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.tau0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("safeguarded simulated annealing") {
  EnergyConfig ecfg;
  AnnealConfig acfg;
  acfg.sigma = 0.5;
  acfg.max_iter = 200;
  acfg.seed = 17;

  SUBCASE("climbs a quadratic energy") {
    // rob(theta, s) = -(w - 3)^2: maximized at w = 3
    ParamRobFn rob = [](const MlpParams& t, const Eigen::VectorXd&) {
      double w = scalar_w(t);
      return -(w - 3.0) * (w - 3.0);
    };
    std::vector<IterationRecord> log;
    MlpParams out = safeguarded_sim_annealing({vec1(0.0)}, {}, scalar_theta(0.0), rob, ecfg, acfg,
                                              &log, 0, true);
    CHECK(log.size() == 200);
    CHECK(std::abs(scalar_w(out) - 3.0) < std::abs(0.0 - 3.0));
    for (const auto& r : log) {
      if (r.accepted) CHECK(r.min_rob == kTop);  // no protected set
    }
  }

  SUBCASE("sigma = 0 leaves theta untouched") {
    ParamRobFn rob = [](const MlpParams& t, const Eigen::VectorXd&) { return scalar_w(t); };
    AnnealConfig frozen = acfg;
    frozen.sigma = 0.0;
    MlpParams out =
        safeguarded_sim_annealing({vec1(0.0)}, {}, scalar_theta(1.5), rob, ecfg, frozen, nullptr);
    CHECK(scalar_w(out) == 1.5);
  }

  SUBCASE("safeguard keeps every accepted theta feasible") {
    // repair wants w large; the protected sample fails once w > 0.5
    ParamRobFn rob = [](const MlpParams& t, const Eigen::VectorXd& s) {
      double w = scalar_w(t);
      return s[0] > 0.0 ? 0.5 - std::abs(w) : w;
    };
    std::vector<IterationRecord> log;
    MlpParams out = safeguarded_sim_annealing({vec1(-1.0)}, {vec1(1.0)}, scalar_theta(0.0), rob,
                                              ecfg, acfg, &log, 0, true);
    CHECK(std::abs(scalar_w(out)) <= 0.5);
    for (const auto& r : log) {
      if (r.accepted) CHECK(r.min_rob >= 0.0);
    }
  }

  SUBCASE("differential trace: safeguard off diverges at a safeguard-only rejection") {
    ParamRobFn rob = [](const MlpParams& t, const Eigen::VectorXd& s) {
      double w = scalar_w(t);
      return s[0] > 0.0 ? 0.5 - std::abs(w) : w;
    };
    // lambda = 0 so the barrier cannot do the safeguard's job via Metropolis
    EnergyConfig flat = ecfg;
    flat.lambda = 0.0;
    std::vector<IterationRecord> on, off;
    safeguarded_sim_annealing({vec1(-1.0)}, {vec1(1.0)}, scalar_theta(0.0), rob, flat, acfg, &on,
                              0, true);
    safeguarded_sim_annealing({vec1(-1.0)}, {vec1(1.0)}, scalar_theta(0.0), rob, flat, acfg, &off,
                              0, false);
    REQUIRE(on.size() == off.size());
    std::size_t i = 0;
    while (i < on.size() && on[i].accepted == off[i].accepted && on[i].energy == off[i].energy) {
      ++i;
    }
    REQUIRE(i < on.size());  // the runs must diverge
    CHECK(off[i].accepted);
    CHECK_FALSE(on[i].accepted);
    CHECK_FALSE(on[i].safeguard_ok);
    CHECK(on[i].min_rob < 0.0);
  }

  SUBCASE("empty repair set rejected") {
    ParamRobFn rob = [](const MlpParams&, const Eigen::VectorXd&) { return 0.0; };
    CHECK_THROWS_AS(safeguarded_sim_annealing({}, {}, scalar_theta(0.0), rob, ecfg, acfg), Error);
  }
}

TEST_CASE("gradient ascent core") {
  EnergyConfig ecfg;
  ParamRobFn rob = [](const MlpParams& t, const Eigen::VectorXd&) {
    double w = scalar_w(t);
    return -(w - 3.0) * (w - 3.0);
  };

  SUBCASE("quadratic converges to the analytic maximizer") {
    MlpParams out =
        gradient_ascent_core({vec1(0.0)}, {}, scalar_theta(0.0), rob, rob, ecfg, {0.1}, 200);
    CHECK(std::abs(scalar_w(out) - 3.0) <= 1e-3);
  }
  SUBCASE("eta = 0 leaves theta unchanged") {
    MlpParams out =
        gradient_ascent_core({vec1(0.0)}, {}, scalar_theta(1.0), rob, rob, ecfg, {0.0}, 50);
    CHECK(scalar_w(out) == 1.0);
  }
  SUBCASE("protected violation stops the pass") {
    // ascent pushes w towards 3 but the protected sample fails beyond 0.5
    ParamRobFn guard = [](const MlpParams& t, const Eigen::VectorXd& s) {
      double w = scalar_w(t);
      return s[0] > 0.0 ? 0.5 - w : -(w - 3.0) * (w - 3.0);
    };
    MlpParams out = gradient_ascent_core({vec1(-1.0)}, {vec1(1.0)}, scalar_theta(0.0), guard,
                                         guard, ecfg, {0.1}, 200);
    CHECK(scalar_w(out) <= 0.5 + 1e-9);
  }
}

TEST_CASE("method names") {
  CHECK(repair_method_from_name("isar") == RepairMethod::Isar);
  CHECK(repair_method_from_name("plain-sa") == RepairMethod::PlainAnnealing);
  CHECK(repair_method_from_name("grad") == RepairMethod::GradientAscent);
  CHECK(repair_method_from_name("verify-only") == RepairMethod::VerifyOnly);
  CHECK(repair_method_name(RepairMethod::Isar) == std::string("isar"));
  CHECK_THROWS_AS(repair_method_from_name("annealing"), Error);
}

namespace {

// 1-D integrator plant: x' = x + a with a = clamp(raw, [-1, 1]). One region
// is immediately good, the other is repairable by biasing the action up.
class ToyPlant final : public Plant {
 public:
  ToyPlant() : name_("toy"), vars_(std::vector<std::string>{"x"}) {}
  const std::string& name() const override { return name_; }
  int state_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  int obs_dim() const override { return 1; }
  int free_dim() const override { return 1; }
  int horizon() const override { return 2; }
  const VarTable& vars() const override { return vars_; }
  Eigen::VectorXd initial_state(const Eigen::VectorXd& free) const override { return free; }
  IntervalBox initial_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) const override {
    return {lo, hi};
  }
  Eigen::VectorXd observe(const Eigen::VectorXd& s) const override { return s; }
  IntervalBox observe_box(const IntervalBox& s) const override { return s; }
  Eigen::VectorXd scale_action(const Eigen::VectorXd& raw) const override {
    return vec1(std::clamp(raw[0], -1.0, 1.0));
  }
  IntervalBox scale_action_box(const IntervalBox& raw) const override {
    Interval a = interval_clamp(raw.coord(0), -1.0, 1.0);
    return {vec1(a.lo), vec1(a.hi)};
  }
  Eigen::VectorXd step(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const override {
    return vec1(s[0] + a[0]);
  }
  IntervalBox step_box(const IntervalBox& s, const IntervalBox& a) const override {
    Interval x = s.coord(0) + a.coord(0);
    return {vec1(x.lo), vec1(x.hi)};
  }
  Eigen::VectorXd init_lower() const override { return vec1(-0.5); }
  Eigen::VectorXd init_upper() const override { return vec1(2.5); }
  FormulaPtr task_formula() const override { return parse_formula("F[0,2](x >= 1)", vars_); }
  MlpParams default_architecture() const override {
    MlpParams mlp;
    mlp.layers.push_back(
        {Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), Activation::Identity});
    return mlp;
  }

 private:
  std::string name_;
  VarTable vars_;
};

}  // namespace

TEST_CASE("run_repair on the toy fixture") {
  ToyPlant plant;
  auto f = plant.task_formula();
  MlpParams zero = plant.default_architecture();
  std::vector<Region> regions = {
      {0, vec1(1.5), vec1(2.5)},   // already satisfies F(x >= 1) at t = 0
      {1, vec1(-0.5), vec1(0.0)},  // needs a positive action bias
  };

  RepairOptions opt;
  opt.method = RepairMethod::Isar;
  opt.energy.K = 10;
  opt.anneal.sigma = 0.5;
  opt.anneal.max_iter = 100;
  opt.refine_depth = 1;
  opt.max_outer_iter = 10;
  opt.seed = 5;

  SUBCASE("isar repairs the failing region and preserves the good one") {
    RepairResult res = run_repair(plant, *f, zero, regions, opt);
    CHECK(res.report.before.verified == 1);
    CHECK(res.report.before.failed == 1);
    CHECK(res.report.repaired >= 1);
    CHECK(res.report.broken == 0);
    CHECK(res.report.after.failed == 0);
    CHECK(res.report.after.verified >= res.report.before.verified);
    // monotone failed-set trace
    for (std::size_t i = 1; i < res.failed_counts.size(); ++i) {
      CHECK(res.failed_counts[i] <= res.failed_counts[i - 1]);
    }
    // promotion correctness: accepted iterations never violate the safeguard
    for (const auto& r : res.iterations) {
      if (r.accepted) CHECK(r.min_rob >= 0.0);
    }
  }

  SUBCASE("verify-only stops after classification") {
    RepairOptions vo = opt;
    vo.method = RepairMethod::VerifyOnly;
    RepairResult res = run_repair(plant, *f, zero, regions, vo);
    CHECK(res.iterations.empty());
    CHECK(res.report.outer_iters == 0);
    CHECK(mlp_flatten(res.theta) == mlp_flatten(zero));
    CHECK(res.report.before.verified == res.report.after.verified);
  }

  SUBCASE("nothing to repair leaves theta untouched") {
    std::vector<Region> good = {{0, vec1(1.5), vec1(2.5)}};
    RepairResult res = run_repair(plant, *f, zero, good, opt);
    CHECK(res.report.outer_iters == 0);
    CHECK(res.report.repaired == 0);
    CHECK(res.report.broken == 0);
    CHECK(mlp_flatten(res.theta) == mlp_flatten(zero));
  }

  SUBCASE("deterministic in the seed") {
    RepairResult a = run_repair(plant, *f, zero, regions, opt);
    RepairResult b = run_repair(plant, *f, zero, regions, opt);
    CHECK(mlp_flatten(a.theta) == mlp_flatten(b.theta));
    CHECK(a.iterations.size() == b.iterations.size());
  }
}
