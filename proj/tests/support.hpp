// Independent reference implementations the tests check the library against.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "rwp/stl.hpp"

namespace rwp::testing {

// Straight-from-the-definitions robustness recursion, written without any of
// the library's evaluation helpers.
inline double ref_robustness(const Formula& f, const Trajectory& traj, const VarTable& vars,
                             int t) {
  switch (f.kind) {
    case Formula::Kind::True:
      return kTop;
    case Formula::Kind::Pred: {
      const Predicate& p = f.pred;
      if (p.is_named()) return p.fn(traj.states[static_cast<std::size_t>(t)]);
      double v = 0.0;
      for (const auto& [var, coeff] : p.terms) {
        v += coeff * traj.states[static_cast<std::size_t>(t)][vars.index(var)];
      }
      return (p.cmp == Cmp::Gt || p.cmp == Cmp::Ge) ? v - p.bound : p.bound - v;
    }
    case Formula::Kind::Not:
      return -ref_robustness(*f.lhs, traj, vars, t);
    case Formula::Kind::And:
      return std::min(ref_robustness(*f.lhs, traj, vars, t),
                      ref_robustness(*f.rhs, traj, vars, t));
    case Formula::Kind::Or:
      return std::max(ref_robustness(*f.lhs, traj, vars, t),
                      ref_robustness(*f.rhs, traj, vars, t));
    case Formula::Kind::Globally: {
      double m = kTop;
      for (int u = t + f.t1; u <= t + f.t2; ++u) {
        m = std::min(m, ref_robustness(*f.lhs, traj, vars, u));
      }
      return m;
    }
    case Formula::Kind::Finally: {
      double m = -kTop;
      for (int u = t + f.t1; u <= t + f.t2; ++u) {
        m = std::max(m, ref_robustness(*f.lhs, traj, vars, u));
      }
      return m;
    }
    case Formula::Kind::Until: {
      double best = -kTop;
      for (int u = t + f.t1; u <= t + f.t2; ++u) {
        double v = ref_robustness(*f.rhs, traj, vars, u);
        for (int w = t; w < u; ++w) {
          v = std::min(v, ref_robustness(*f.lhs, traj, vars, w));
        }
        best = std::max(best, v);
      }
      return best;
    }
  }
  return 0.0;
}

// Boolean semantics with the satisfied-at-zero convention (margin >= 0).
inline bool ref_holds(const Formula& f, const Trajectory& traj, const VarTable& vars, int t) {
  switch (f.kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::Pred:
      return ref_robustness(f, traj, vars, t) >= 0.0;
    case Formula::Kind::Not:
      // true boolean negation; ties rho == 0 (measure zero on random data)
      // are the only place this can disagree with the sign of -rho
      return !ref_holds(*f.lhs, traj, vars, t);
    case Formula::Kind::And:
      return ref_holds(*f.lhs, traj, vars, t) && ref_holds(*f.rhs, traj, vars, t);
    case Formula::Kind::Or:
      return ref_holds(*f.lhs, traj, vars, t) || ref_holds(*f.rhs, traj, vars, t);
    case Formula::Kind::Globally:
      for (int u = t + f.t1; u <= t + f.t2; ++u) {
        if (!ref_holds(*f.lhs, traj, vars, u)) return false;
      }
      return true;
    case Formula::Kind::Finally:
      for (int u = t + f.t1; u <= t + f.t2; ++u) {
        if (ref_holds(*f.lhs, traj, vars, u)) return true;
      }
      return false;
    case Formula::Kind::Until:
      for (int u = t + f.t1; u <= t + f.t2; ++u) {
        if (!ref_holds(*f.rhs, traj, vars, u)) continue;
        bool ok = true;
        for (int w = t; w < u; ++w) {
          if (!ref_holds(*f.lhs, traj, vars, w)) {
            ok = false;
            break;
          }
        }
        if (ok) return true;
      }
      return false;
  }
  return false;
}

inline FormulaPtr random_formula(std::mt19937_64& rng, const VarTable& vars, int depth,
                                 int max_hor) {
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  auto rand_pred = [&] {
    Predicate p;
    std::uniform_int_distribution<int> nvars(1, 2);
    std::uniform_int_distribution<int> pick(0, vars.size() - 1);
    int n = nvars(rng);
    for (int i = 0; i < n; ++i) p.terms.emplace_back(vars.names()[static_cast<std::size_t>(pick(rng))], unif(rng));
    p.bound = unif(rng);
    p.cmp = static_cast<Cmp>(std::uniform_int_distribution<int>(0, 3)(rng));
    return make_pred(std::move(p));
  };
  if (depth <= 0) {
    return std::uniform_int_distribution<int>(0, 9)(rng) == 0 ? make_true() : rand_pred();
  }
  auto window = [&](int budget) {
    int a = std::uniform_int_distribution<int>(0, budget)(rng);
    int b = std::uniform_int_distribution<int>(a, budget)(rng);
    return std::pair{a, b};
  };
  switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
    case 0:
      return rand_pred();
    case 1:
      return make_not(random_formula(rng, vars, depth - 1, max_hor));
    case 2:
      return make_and(random_formula(rng, vars, depth - 1, max_hor),
                      random_formula(rng, vars, depth - 1, max_hor));
    case 3:
      return make_or(random_formula(rng, vars, depth - 1, max_hor),
                     random_formula(rng, vars, depth - 1, max_hor));
    case 4: {
      auto [a, b] = window(max_hor / 2);
      return make_globally(a, b, random_formula(rng, vars, depth - 1, max_hor - b));
    }
    case 5: {
      auto [a, b] = window(max_hor / 2);
      return make_finally(a, b, random_formula(rng, vars, depth - 1, max_hor - b));
    }
    default: {
      auto [a, b] = window(max_hor / 2);
      return make_until(a, b, random_formula(rng, vars, depth - 1, max_hor - b),
                        random_formula(rng, vars, depth - 1, max_hor - b));
    }
  }
}

inline Trajectory random_trajectory(std::mt19937_64& rng, int dim, int length) {
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  Trajectory tr;
  for (int t = 0; t <= length; ++t) {
    Eigen::VectorXd s(dim);
    for (int i = 0; i < dim; ++i) s[i] = unif(rng);
    tr.states.push_back(std::move(s));
  }
  return tr;
}

}  // namespace rwp::testing
