#include <doctest.h>

#include <cmath>

#include "rwp/plant.hpp"

using namespace rwp;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("uuv dynamics") {
  auto uuv = make_plant("uuv");
  SUBCASE("heading 0 moves straight in +x") {
    Eigen::VectorXd n = uuv->step(vec4(0, 12, 0, 0.4855), vec1(0));
    CHECK(n == vec4(0.4855, 12, 0, 0.4855));
  }
  SUBCASE("heading 90 deg moves straight in +y") {
    Eigen::VectorXd n = uuv->step(vec4(0, 12, 90, 0.4855), vec1(0));
    CHECK(n[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(n[1] == doctest::Approx(12.4855).epsilon(1e-12));
    CHECK(n[2] == 90.0);
  }
  SUBCASE("turn rate adds to heading") {
    Eigen::VectorXd n = uuv->step(vec4(0, 20, 10, 0.4855), vec1(-10));
    CHECK(n[2] == 0.0);
    CHECK(n[1] == doctest::Approx(20.0 + 0.4855 * std::sin(10.0 * kDeg)).epsilon(1e-12));
  }
  SUBCASE("observation and action scaling") {
    CHECK(uuv->observe(vec4(3, 14, 25, 0.4855)) == vec2(25, 4));
    CHECK(uuv->scale_action(vec1(0.5))[0] == 2.5);
    CHECK(uuv->scale_action(vec1(7.0))[0] == 5.0);  // clamped
    CHECK(uuv->scale_action(vec1(-7.0))[0] == -5.0);
  }
}

TEST_CASE("mountain car dynamics") {
  auto mc = make_plant("mc");
  SUBCASE("gravity pull at the origin") {
    Eigen::VectorXd n = mc->step(vec2(0, 0), vec1(0));
    CHECK(n[1] == doctest::Approx(-0.0025).epsilon(1e-15));
    CHECK(n[0] == doctest::Approx(-0.0025).epsilon(1e-15));
  }
  SUBCASE("position clamps at the right edge") {
    Eigen::VectorXd n = mc->step(vec2(0.6, 0.07), vec1(1));
    CHECK(n[0] == 0.6);
  }
  SUBCASE("velocity resets at the left wall") {
    Eigen::VectorXd n = mc->step(vec2(-1.2, -0.01), vec1(0));
    CHECK(n[0] == -1.2);
    CHECK(n[1] == 0.0);
  }
  SUBCASE("velocity clamp") {
    Eigen::VectorXd n = mc->step(vec2(-0.5, 0.069), vec1(1));
    CHECK(n[1] <= 0.07);
  }
}

TEST_CASE("make_plant") {
  CHECK(make_plant("uuv")->horizon() == 30);
  CHECK(make_plant("mc")->horizon() == 110);
  CHECK_THROWS_AS(make_plant("pendulum"), Error);
}

TEST_CASE("rollout") {
  auto uuv = make_plant("uuv");
  MlpParams zero = uuv->default_architecture();  // all-zero weights

  SUBCASE("T = 1 yields exactly two states") {
    Trajectory tr = rollout(*uuv, zero, vec4(0, 12, 0, 0.4855), 1);
    CHECK(tr.states.size() == 2);
  }
  SUBCASE("zero controller from heading 0 is a straight +x line") {
    Trajectory tr = rollout(*uuv, zero, vec4(0, 12, 0, 0.4855), 3);
    for (int t = 0; t <= 3; ++t) {
      CHECK(tr.states[static_cast<std::size_t>(t)][0] == doctest::Approx(0.4855 * t));
      CHECK(tr.states[static_cast<std::size_t>(t)][1] == 12.0);
    }
  }
  SUBCASE("unactuated mountain car cannot climb") {
    auto mc = make_plant("mc");
    MlpParams theta = mc->default_architecture();
    // tanh output of a zero network is 0 = no throttle
    double r = rob(*mc, *mc->task_formula(), vec2(-0.5, 0.0), theta);
    CHECK(r < 0.0);
  }
}

TEST_CASE("closed-loop robustness") {
  auto uuv = make_plant("uuv");
  // holding y = 30 exactly gives min(30-10, 50-30) = 20 at every step
  VarTable vars = uuv->vars();
  auto f = uuv->task_formula();
  Trajectory tr;
  for (int t = 0; t <= 30; ++t) tr.states.push_back(vec4(0.4855 * t, 30, 0, 0.4855));
  CHECK(robustness(*f, tr, vars, 0) == doctest::Approx(20.0));
  CHECK(robustness(*parse_formula("true"), tr, vars, 0) == kTop);
}

TEST_CASE("seed controller synthesis") {
  auto uuv = make_plant("uuv");
  auto f = uuv->task_formula();
  SUBCASE("deterministic in the seed") {
    MlpParams a = synthesize_seed_controller(*uuv, *f, 50, 1);
    MlpParams b = synthesize_seed_controller(*uuv, *f, 50, 1);
    CHECK(mlp_flatten(a) == mlp_flatten(b));
  }
  SUBCASE("degenerate budget rejected") {
    CHECK_THROWS_AS(synthesize_seed_controller(*uuv, *f, 0, 1), Error);
  }
}
