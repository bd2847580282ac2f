#include <doctest.h>

#include <cmath>
#include <random>

#include "rwp/energy.hpp"

using namespace rwp;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("log barrier") {
  CHECK(log_barrier(1.0, -1000.0) == 0.0);
  CHECK(log_barrier(-0.5, -1000.0) == -1000.0);
  CHECK(log_barrier(0.0, -1000.0) == -1000.0);
  CHECK(log_barrier(std::exp(2.0), -1000.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(log_barrier(1e-300, -5.0) == -5.0);  // floor dominates the log tail
}

TEST_CASE("evaluate_energy") {
  EnergyConfig cfg;

  SUBCASE("single repair + single protected sample") {
    auto rob = [](const Eigen::VectorXd& s) { return s[0]; };
    EnergyResult e = evaluate_energy({vec1(2.0)}, {vec1(1.0)}, rob, cfg);
    CHECK(e.energy == doctest::Approx(2.0).epsilon(1e-14));  // 2 + 1*ln(1)
    CHECK(e.min_protected_rob == 1.0);
  }
  SUBCASE("lambda = 0 is the plain sample mean") {
    EnergyConfig flat = cfg;
    flat.lambda = 0.0;
    auto rob = [](const Eigen::VectorXd& s) { return s[0]; };
    EnergyResult e = evaluate_energy({vec1(1.0), vec1(3.0)}, {vec1(-4.0)}, rob, flat);
    CHECK(e.energy == doctest::Approx(2.0));
    CHECK(e.min_protected_rob == -4.0);
  }
  SUBCASE("failing protected sample hits the floor") {
    auto rob = [](const Eigen::VectorXd& s) { return s[0]; };
    EnergyResult e = evaluate_energy({vec1(1.0)}, {vec1(-0.5), vec1(1.0)}, rob, cfg);
    CHECK(e.energy == doctest::Approx(1.0 + (-1000.0 + 0.0) / 2.0));
    CHECK(e.min_protected_rob == -0.5);
  }
  SUBCASE("no protected samples drops the barrier") {
    auto rob = [](const Eigen::VectorXd& s) { return s[0]; };
    EnergyResult e = evaluate_energy({vec1(-2.0)}, {}, rob, cfg);
    CHECK(e.energy == -2.0);
    CHECK(e.min_protected_rob == kTop);
  }
  SUBCASE("invalid inputs") {
    auto rob = [](const Eigen::VectorXd& s) { return s[0]; };
    CHECK_THROWS_AS(evaluate_energy({}, {}, rob, cfg), Error);
    EnergyConfig bad = cfg;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(evaluate_energy({vec1(1.0)}, {}, rob, bad), Error);
  }
}

TEST_CASE("exact energy oracle") {
  EnergyConfig cfg;
  Region r{0, vec1(0.0), vec1(1.0)};

  SUBCASE("constant robustness c gives c + lambda*ln(c)") {
    auto rob = [](const Eigen::VectorXd&) { return 2.5; };
    double e = exact_energy_oracle(r, {r}, rob, cfg, 64);
    CHECK(e == doctest::Approx(2.5 + std::log(2.5)).epsilon(1e-12));
  }
  SUBCASE("affine robustness integrates to the center value when lambda = 0") {
    EnergyConfig flat = cfg;
    flat.lambda = 0.0;
    auto rob = [](const Eigen::VectorXd& s) { return 3.0 * s[0] - 1.0; };
    double e = exact_energy_oracle(r, {}, rob, flat, 64);
    CHECK(e == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("coarse grids are rejected") {
    auto rob = [](const Eigen::VectorXd&) { return 1.0; };
    CHECK_THROWS_AS(exact_energy_oracle(r, {}, rob, cfg, 10), Error);
  }
}

TEST_CASE("Monte Carlo estimator is unbiased against the grid oracle") {
  // smooth analytic robustness over 1-D regions; small-scale version of the
  // acceptance-suite estimator sweep
  EnergyConfig cfg;
  cfg.lambda = 1.0;
  cfg.K = 25;
  Region repair{0, vec1(-1.0), vec1(0.0)};
  Region p1{1, vec1(0.0), vec1(1.0)};
  Region p2{2, vec1(1.0), vec1(2.0)};
  auto rob = [](const Eigen::VectorXd& s) { return 1.5 + std::sin(2.0 * s[0]); };

  double oracle = exact_energy_oracle(repair, {p1, p2}, rob, cfg, 400);

  int resamples = 400;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < resamples; ++i) {
    std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
    auto rs = sample_region(repair, cfg.K, seed);
    auto ps = sample_region(p1, cfg.K, seed);
    auto ps2 = sample_region(p2, cfg.K, seed);
    ps.insert(ps.end(), ps2.begin(), ps2.end());
    double e = evaluate_energy(rs, ps, rob, cfg).energy;
    sum += e;
    sumsq += e * e;
  }
  double mean = sum / resamples;
  double var = (sumsq - resamples * mean * mean) / (resamples - 1);
  double se = std::sqrt(var / resamples);
  CHECK(std::abs(mean - oracle) <= 5.0 * se);
}
