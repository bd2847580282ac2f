#include "rwp/repair.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace rwp {

void AnnealConfig::validate() const {
  if (sigma < 0.0) throw Error("perturbation std sigma must be >= 0");
  if (tau0 <= 0.0) throw Error("initial temperature must be > 0");
  if (alpha <= 0.0 || alpha >= 1.0) throw Error("cooling factor must lie in (0, 1)");
  if (max_iter < 1) throw Error("max_iter must be >= 1");
}

bool metropolis_accept(double delta_e, double tau, std::mt19937_64& rng) {
  if (tau <= 0.0) throw Error("temperature must be > 0");
  if (delta_e >= 0.0) return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < std::exp(delta_e / tau);
}

namespace {

// Robustness of every state under theta, evaluated on the pool but reduced
// in index order.
std::vector<double> robs_of(const std::vector<Eigen::VectorXd>& states, const MlpParams& theta,
                            const ParamRobFn& rob, int threads) {
  std::vector<double> out(states.size());
  parallel_for(states.size(), threads, [&](std::size_t i) { out[i] = rob(theta, states[i]); });
  return out;
}

EnergyResult energy_of(const std::vector<Eigen::VectorXd>& repair_states,
                       const std::vector<Eigen::VectorXd>& protected_states,
                       const MlpParams& theta, const ParamRobFn& rob, const EnergyConfig& ecfg,
                       int threads) {
  return energy_from_robs(robs_of(repair_states, theta, rob, threads),
                          robs_of(protected_states, theta, rob, threads), ecfg);
}

}  // namespace

MlpParams safeguarded_sim_annealing(const std::vector<Eigen::VectorXd>& repair_states,
                                    const std::vector<Eigen::VectorXd>& protected_states,
                                    const MlpParams& theta0, const ParamRobFn& rob,
                                    const EnergyConfig& ecfg, const AnnealConfig& acfg,
                                    std::vector<IterationRecord>* log, int outer, bool safeguard,
                                    int threads) {
  if (repair_states.empty()) throw Error("annealing requires a non-empty repair sample set");
  acfg.validate();

  std::mt19937_64 rng(acfg.seed);
  std::normal_distribution<double> gauss(0.0, acfg.sigma);

  MlpParams theta = theta0;
  Eigen::VectorXd p = mlp_flatten(theta);
  EnergyResult cur = energy_of(repair_states, protected_states, theta, rob, ecfg, threads);

  double tau = acfg.tau0;
  for (int iter = 1; iter <= acfg.max_iter; ++iter) {
    Eigen::VectorXd q = p;
    if (acfg.sigma > 0.0) {
      for (Eigen::Index i = 0; i < q.size(); ++i) q[i] += gauss(rng);
    }
    MlpParams cand = mlp_unflatten(theta0, q);
    EnergyResult next = energy_of(repair_states, protected_states, cand, rob, ecfg, threads);
    double delta = next.energy - cur.energy;

    bool metropolis = metropolis_accept(delta, tau, rng);
    bool safeguard_ok = !safeguard || protected_states.empty() || next.min_protected_rob >= 0.0;
    bool accepted = metropolis && safeguard_ok;
    if (accepted) {
      p = std::move(q);
      theta = std::move(cand);
      cur = next;
    }
    if (log != nullptr) {
      log->push_back({outer, iter, tau, next.energy, delta, accepted, safeguard_ok,
                      next.min_protected_rob});
    }
    tau *= acfg.alpha;
  }
  return theta;
}

MlpParams gradient_ascent_core(const std::vector<Eigen::VectorXd>& repair_states,
                               const std::vector<Eigen::VectorXd>& protected_states,
                               const MlpParams& theta0, const ParamRobFn& rob,
                               const ParamRobFn& smooth_rob, const EnergyConfig& ecfg,
                               const std::vector<double>& etas, int steps, double fd_step,
                               int threads) {
  if (repair_states.empty()) throw Error("gradient ascent requires a non-empty repair sample set");

  auto smooth_energy = [&](const Eigen::VectorXd& params) {
    MlpParams th = mlp_unflatten(theta0, params);
    return energy_of(repair_states, protected_states, th, smooth_rob, ecfg, threads).energy;
  };

  const Eigen::VectorXd p0 = mlp_flatten(theta0);
  MlpParams best = theta0;
  double best_exact = energy_of(repair_states, protected_states, theta0, rob, ecfg, threads).energy;

  for (double eta : etas) {
    Eigen::VectorXd p = p0;
    for (int step = 0; step < steps; ++step) {
      Eigen::VectorXd grad(p.size());
      parallel_for(static_cast<std::size_t>(p.size()), threads, [&](std::size_t i) {
        Eigen::VectorXd hi = p, lo = p;
        hi[static_cast<Eigen::Index>(i)] += fd_step;
        lo[static_cast<Eigen::Index>(i)] -= fd_step;
        // inner evaluations stay sequential; the pool is spent on parameters
        MlpParams th_hi = mlp_unflatten(theta0, hi);
        MlpParams th_lo = mlp_unflatten(theta0, lo);
        double e_hi = energy_of(repair_states, protected_states, th_hi, smooth_rob, ecfg, 1).energy;
        double e_lo = energy_of(repair_states, protected_states, th_lo, smooth_rob, ecfg, 1).energy;
        grad[static_cast<Eigen::Index>(i)] = (e_hi - e_lo) / (2.0 * fd_step);
      });
      Eigen::VectorXd cand = p + eta * grad;
      MlpParams cand_theta = mlp_unflatten(theta0, cand);
      EnergyResult cand_exact =
          energy_of(repair_states, protected_states, cand_theta, rob, ecfg, threads);
      if (!protected_states.empty() && cand_exact.min_protected_rob < 0.0) break;
      p = std::move(cand);
      if (cand_exact.energy > best_exact) {
        best_exact = cand_exact.energy;
        best = std::move(cand_theta);
      }
    }
  }
  (void)smooth_energy;
  return best;
}

const char* repair_method_name(RepairMethod m) {
  switch (m) {
    case RepairMethod::VerifyOnly: return "verify-only";
    case RepairMethod::Isar: return "isar";
    case RepairMethod::PlainAnnealing: return "plain-sa";
    case RepairMethod::GradientAscent: return "grad";
  }
  return "?";
}

RepairMethod repair_method_from_name(const std::string& name) {
  if (name == "verify-only") return RepairMethod::VerifyOnly;
  if (name == "isar") return RepairMethod::Isar;
  if (name == "plain-sa") return RepairMethod::PlainAnnealing;
  if (name == "grad") return RepairMethod::GradientAscent;
  throw Error("unknown method '" + name + "'");
}

namespace {

RobStats min_rob_stats(const PartitionState& st, const std::vector<bool>& include) {
  std::vector<double> mins;
  for (std::size_t i = 0; i < st.regions.size(); ++i) {
    if (!include[i]) continue;
    mins.push_back(*std::min_element(st.rob[i].begin(), st.rob[i].end()));
  }
  RobStats out;
  out.count = static_cast<int>(mins.size());
  if (mins.empty()) return out;
  out.mean = std::accumulate(mins.begin(), mins.end(), 0.0) / static_cast<double>(mins.size());
  if (mins.size() > 1) {
    double ss = 0.0;
    for (double m : mins) ss += (m - out.mean) * (m - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(mins.size() - 1));
  }
  return out;
}

SetSizes set_sizes(const PartitionState& st) {
  return {st.count(RegionClass::Verified), st.count(RegionClass::Unknown),
          st.count(RegionClass::Failed)};
}

void fill_stats(const PartitionState& st, RobStats& failed, RobStats& success,
                RobStats& overall) {
  std::size_t m = st.regions.size();
  std::vector<bool> is_failed(m), is_success(m), all(m, true);
  for (std::size_t i = 0; i < m; ++i) {
    is_failed[i] = st.cls[i] == RegionClass::Failed;
    is_success[i] = !is_failed[i];
  }
  failed = min_rob_stats(st, is_failed);
  success = min_rob_stats(st, is_success);
  overall = min_rob_stats(st, all);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RepairResult run_repair(const Plant& plant, const Formula& formula, const MlpParams& theta0,
                        const std::vector<Region>& regions, const RepairOptions& opt) {
  theta0.validate();
  if (horizon(formula) > plant.horizon()) {
    throw HorizonError("formula horizon exceeds the plant's configured trajectory length");
  }

  RepairResult res;
  res.report.method = repair_method_name(opt.method);

  auto closed_loop_rob = [&](const MlpParams& th, const Eigen::VectorXd& free) {
    return rob(plant, formula, plant.initial_state(free), th);
  };
  auto closed_loop_smooth = [&](const MlpParams& th, const Eigen::VectorXd& free) {
    return smooth_rob(plant, formula, plant.initial_state(free), th, opt.smooth_beta);
  };

  // --- preparation: verify, sample, evaluate ------------------------------
  auto t0 = std::chrono::steady_clock::now();
  res.verify_before_records =
      verify_regions(plant, formula, theta0, regions, opt.refine_depth, opt.threads,
                     opt.verify_margin);
  res.times.verify_before = seconds_since(t0);
  std::vector<int> flags(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) flags[i] = res.verify_before_records[i].result;
  res.flags_before = flags;

  t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<Eigen::VectorXd>> samples(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    samples[i] = sample_region(regions[i], opt.energy.K, opt.seed);
  }
  std::vector<std::vector<double>> robs(regions.size());
  parallel_for(regions.size(), opt.threads, [&](std::size_t i) {
    robs[i].resize(samples[i].size());
    for (std::size_t j = 0; j < samples[i].size(); ++j) {
      robs[i][j] = closed_loop_rob(theta0, samples[i][j]);
    }
  });
  res.times.sample = seconds_since(t0);

  res.before = classify(regions, samples, flags, robs);
  fill_stats(res.before, res.report.before_min_rob_failed, res.report.before_min_rob_success,
             res.report.before_min_rob_overall);
  res.report.before = set_sizes(res.before);

  MlpParams theta = theta0;
  const bool safeguarded = opt.method == RepairMethod::Isar;
  EnergyConfig ecfg = opt.energy;
  if (opt.method == RepairMethod::PlainAnnealing) ecfg.lambda = 0.0;

  // Mutable repair bookkeeping.
  std::vector<int> active = res.before.failed_order;  // region indices
  std::vector<int> quarantined;
  std::vector<bool> is_protected(regions.size(), false);
  std::vector<bool> initially_failed(regions.size(), false);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    is_protected[i] = safeguarded && res.before.cls[i] == RegionClass::Verified;
  }
  for (int i : active) initially_failed[static_cast<std::size_t>(i)] = true;

  auto protected_states = [&]() {
    std::vector<Eigen::VectorXd> out;
    if (!safeguarded) return out;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (is_protected[i]) out.insert(out.end(), samples[i].begin(), samples[i].end());
    }
    return out;
  };
  auto rob_sum = [&](int i) {
    const auto& r = robs[static_cast<std::size_t>(i)];
    return std::accumulate(r.begin(), r.end(), 0.0);
  };
  auto resort = [&](std::vector<int>& order) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      double sa = rob_sum(a), sb = rob_sum(b);
      if (sa != sb) return sa > sb;
      return regions[static_cast<std::size_t>(a)].id < regions[static_cast<std::size_t>(b)].id;
    });
  };

  // --- main repair loop ----------------------------------------------------
  t0 = std::chrono::steady_clock::now();
  int outer = 0;
  if (opt.method == RepairMethod::Isar || opt.method == RepairMethod::PlainAnnealing) {
    while (!active.empty() && outer < opt.max_outer_iter) {
      ++outer;
      int head = active.front();
      std::vector<Eigen::VectorXd> failing;
      for (std::size_t j = 0; j < samples[static_cast<std::size_t>(head)].size(); ++j) {
        if (robs[static_cast<std::size_t>(head)][j] < 0.0) {
          failing.push_back(samples[static_cast<std::size_t>(head)][j]);
        }
      }

      AnnealConfig acfg = opt.anneal;
      acfg.seed = mix_seed(opt.seed, 0x5a5a0000ULL + static_cast<std::uint64_t>(outer));
      MlpParams theta_next = safeguarded_sim_annealing(
          failing, protected_states(), theta, closed_loop_rob, ecfg, acfg, &res.iterations, outer,
          safeguarded, opt.threads);

      Eigen::VectorXd pn = mlp_flatten(theta_next);
      Eigen::VectorXd pc = mlp_flatten(theta);
      if (pn.size() == pc.size() && (pn.array() == pc.array()).all()) {
        // stall: quarantine the head region and move on
        quarantined.push_back(head);
        active.erase(active.begin());
        res.failed_counts.push_back(static_cast<int>(active.size() + quarantined.size()));
        continue;
      }
      theta = std::move(theta_next);

      // Re-evaluate every not-yet-repaired region under the new parameters.
      std::vector<int> pending = active;
      pending.insert(pending.end(), quarantined.begin(), quarantined.end());
      parallel_for(pending.size(), opt.threads, [&](std::size_t k) {
        int i = pending[k];
        for (std::size_t j = 0; j < samples[static_cast<std::size_t>(i)].size(); ++j) {
          robs[static_cast<std::size_t>(i)][j] =
              closed_loop_rob(theta, samples[static_cast<std::size_t>(i)][j]);
        }
      });

      auto fully_repaired = [&](int i) {
        const auto& r = robs[static_cast<std::size_t>(i)];
        return std::all_of(r.begin(), r.end(), [](double v) { return v >= 0.0; });
      };
      auto promote = [&](std::vector<int>& order) {
        for (auto it = order.begin(); it != order.end();) {
          if (fully_repaired(*it)) {
            if (safeguarded) is_protected[static_cast<std::size_t>(*it)] = true;
            it = order.erase(it);
          } else {
            ++it;
          }
        }
      };
      promote(active);
      promote(quarantined);
      resort(active);
      res.failed_counts.push_back(static_cast<int>(active.size() + quarantined.size()));
    }
  } else if (opt.method == RepairMethod::GradientAscent) {
    if (!active.empty()) {
      outer = 1;
      int head = active.front();
      std::vector<Eigen::VectorXd> failing;
      for (std::size_t j = 0; j < samples[static_cast<std::size_t>(head)].size(); ++j) {
        if (robs[static_cast<std::size_t>(head)][j] < 0.0) {
          failing.push_back(samples[static_cast<std::size_t>(head)][j]);
        }
      }
      theta = gradient_ascent_core(failing, protected_states(), theta, closed_loop_rob,
                                   closed_loop_smooth, ecfg, opt.grad_etas, opt.grad_steps, 1e-4,
                                   opt.threads);
    }
  }
  res.times.repair = seconds_since(t0);
  res.report.outer_iters = outer;

  // --- final evaluation and verification -----------------------------------
  parallel_for(regions.size(), opt.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < samples[i].size(); ++j) {
      robs[i][j] = closed_loop_rob(theta, samples[i][j]);
    }
  });

  t0 = std::chrono::steady_clock::now();
  std::vector<int> flags_after = flags;
  if (opt.method != RepairMethod::VerifyOnly) {
    res.verify_after_records =
        verify_regions(plant, formula, theta, regions, opt.refine_depth, opt.threads,
                       opt.verify_margin);
    for (std::size_t i = 0; i < regions.size(); ++i) {
      flags_after[i] = res.verify_after_records[i].result;
    }
  } else {
    res.verify_after_records = res.verify_before_records;
  }
  res.times.verify_after = seconds_since(t0);
  res.flags_after = flags_after;

  res.after = classify(regions, samples, flags_after, robs);
  res.report.after = set_sizes(res.after);
  fill_stats(res.after, res.report.after_min_rob_failed, res.report.after_min_rob_success,
             res.report.after_min_rob_overall);

  for (std::size_t i = 0; i < regions.size(); ++i) {
    int id = regions[i].id;
    if (res.flags_before[i] == 1 && flags_after[i] == 0) res.report.broken_ids.push_back(id);
    if (initially_failed[i] && res.after.cls[i] != RegionClass::Failed) {
      res.report.repaired_ids.push_back(id);
    }
    if (is_protected[i] && flags_after[i] == 0) {
      res.report.protected_unverified_ids.push_back(id);
    }
  }
  res.report.broken = static_cast<int>(res.report.broken_ids.size());
  res.report.repaired = static_cast<int>(res.report.repaired_ids.size());

  res.theta = std::move(theta);
  return res;
}

}  // namespace rwp
