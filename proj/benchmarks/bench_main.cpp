#include <benchmark/benchmark.h>

#include <random>

#include "rwp/energy.hpp"
#include "rwp/plant.hpp"
#include "rwp/verifier.hpp"

using namespace rwp;

namespace {

MlpParams random_controller(const Plant& plant, std::uint64_t seed) {
  MlpParams theta = plant.default_architecture();
  Eigen::VectorXd p = mlp_flatten(theta);
  std::mt19937_64 rng(mix_seed(seed, 0xbe9c4));
  std::normal_distribution<double> g(0.0, 1.0);
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = 0.2 * g(rng);
  return mlp_unflatten(theta, p);
}

void BM_Rollout(benchmark::State& state, const char* name) {
  auto plant = make_plant(name);
  MlpParams theta = random_controller(*plant, 1);
  Eigen::VectorXd s0 = plant->initial_state(0.5 * (plant->init_lower() + plant->init_upper()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout(*plant, theta, s0, plant->horizon()));
  }
}

void BM_Robustness(benchmark::State& state, const char* name) {
  auto plant = make_plant(name);
  auto f = plant->task_formula();
  MlpParams theta = random_controller(*plant, 1);
  Trajectory tr = rollout(*plant, theta,
                          plant->initial_state(0.5 * (plant->init_lower() + plant->init_upper())),
                          plant->horizon());
  for (auto _ : state) {
    benchmark::DoNotOptimize(robustness(*f, tr, plant->vars(), 0));
  }
}

void BM_PropagateBox(benchmark::State& state, const char* name) {
  auto plant = make_plant(name);
  MlpParams theta = random_controller(*plant, 1);
  Eigen::VectorXd lo = plant->init_lower(), hi = plant->init_upper();
  Eigen::VectorXd a = lo + 0.45 * (hi - lo), b = lo + 0.55 * (hi - lo);
  IntervalBox box = plant->initial_box(a, b);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_box(*plant, theta, box, plant->horizon()));
  }
}

void BM_Energy(benchmark::State& state) {
  auto vec1 = [](double x) { return Eigen::VectorXd::Constant(1, x); };
  Region r{0, vec1(0.0), vec1(1.0)};
  auto repair = sample_region(r, 100, 1);
  auto prot = sample_region(r, 2000, 2);
  EnergyConfig cfg;
  auto rob_fn = [](const Eigen::VectorXd& s) { return 1.0 + s[0]; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_energy(repair, prot, rob_fn, cfg));
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Rollout, uuv, "uuv");
BENCHMARK_CAPTURE(BM_Rollout, mc, "mc");
BENCHMARK_CAPTURE(BM_Robustness, uuv, "uuv");
BENCHMARK_CAPTURE(BM_Robustness, mc, "mc");
BENCHMARK_CAPTURE(BM_PropagateBox, uuv, "uuv");
BENCHMARK_CAPTURE(BM_PropagateBox, mc, "mc");
BENCHMARK(BM_Energy);

BENCHMARK_MAIN();
