#include "rwp/verifier.hpp"

#include <chrono>
#include <cmath>

namespace rwp {

namespace {

constexpr double kMagnitudeCap = 1e6;

Interval pred_margin_box(const Predicate& p, const IntervalBox& box, const VarTable& vars) {
  if (p.is_named()) throw Error("named predicates are not supported by the sound verifier");
  Interval expr{0.0, 0.0};
  for (const auto& [var, coeff] : p.terms) expr = expr + coeff * box.coord(vars.index(var));
  return (p.cmp == Cmp::Gt || p.cmp == Cmp::Ge) ? expr + Interval{-p.bound, -p.bound}
                                                : Interval{p.bound, p.bound} + (-expr);
}

// Interval enclosure of the body's robustness over one state box; also
// reports whether any strict comparison occurs (those need margin > 0).
Interval body_margin_box(const Formula& f, const IntervalBox& box, const VarTable& vars,
                         bool& any_strict) {
  switch (f.kind) {
    case Formula::Kind::True:
      return {kTop, kTop};
    case Formula::Kind::Pred:
      any_strict = any_strict || f.pred.strict();
      return pred_margin_box(f.pred, box, vars);
    case Formula::Kind::Not:
      return -body_margin_box(*f.lhs, box, vars, any_strict);
    case Formula::Kind::And:
      return interval_min(body_margin_box(*f.lhs, box, vars, any_strict),
                          body_margin_box(*f.rhs, box, vars, any_strict));
    case Formula::Kind::Or:
      return interval_max(body_margin_box(*f.lhs, box, vars, any_strict),
                          body_margin_box(*f.rhs, box, vars, any_strict));
    default:
      throw Error("nested temporal operators are outside the sound verification templates");
  }
}

struct SoundCheck {
  bool safety = false;  // true: G template, false: F template
  int t1 = 0, t2 = 0;
  const Formula* body = nullptr;
};

SoundCheck match_template(const Formula& f) {
  if (f.kind != Formula::Kind::Globally && f.kind != Formula::Kind::Finally) {
    throw Error("unsupported formula for sound verification: expected G[...](...) or F[...](...)");
  }
  SoundCheck c;
  c.safety = f.kind == Formula::Kind::Globally;
  c.t1 = f.t1;
  c.t2 = f.t2;
  c.body = f.lhs.get();
  return c;
}

bool check_subbox(const Plant& plant, const SoundCheck& chk, const MlpParams& theta,
                  const IntervalBox& box0, double margin) {
  std::vector<IntervalBox> boxes = propagate_box(plant, theta, box0, chk.t2);
  auto passes = [&](int t) {
    bool any_strict = false;
    Interval m = body_margin_box(*chk.body, boxes[static_cast<std::size_t>(t)], plant.vars(),
                                 any_strict);
    return any_strict ? m.lo > margin : m.lo >= margin;
  };
  if (chk.safety) {
    for (int t = chk.t1; t <= chk.t2; ++t) {
      if (!passes(t)) return false;
    }
    return true;
  }
  for (int t = chk.t1; t <= chk.t2; ++t) {
    if (passes(t)) return true;
  }
  return false;
}

}  // namespace

std::vector<IntervalBox> propagate_box(const Plant& plant, const MlpParams& theta,
                                       const IntervalBox& box0, int T) {
  box0.validate();
  std::vector<IntervalBox> out;
  out.reserve(static_cast<std::size_t>(T) + 1);
  out.push_back(box0);
  IntervalBox box = box0;
  for (int t = 0; t < T; ++t) {
    IntervalBox act = plant.scale_action_box(mlp_eval(theta, plant.observe_box(box)));
    box = plant.step_box(box, act);
    if (box.lower.cwiseAbs().maxCoeff() > kMagnitudeCap ||
        box.upper.cwiseAbs().maxCoeff() > kMagnitudeCap) {
      throw DivergenceError("reachable box exceeded magnitude cap at step " + std::to_string(t + 1));
    }
    out.push_back(box);
  }
  return out;
}

int verify_region(const Plant& plant, const Formula& check, const MlpParams& theta,
                  const Region& region, int refine_depth, double margin) {
  if (refine_depth < 0) throw Error("refine_depth must be >= 0");
  SoundCheck chk = match_template(check);

  const Eigen::Index d = region.lower.size();
  const int cells = 1 << refine_depth;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double w = (region.upper[i] - region.lower[i]) / cells;
      lo[i] = region.lower[i] + idx[static_cast<std::size_t>(i)] * w;
      hi[i] = region.lower[i] + (idx[static_cast<std::size_t>(i)] + 1) * w;
    }
    if (!check_subbox(plant, chk, theta, plant.initial_box(lo, hi), margin)) return 0;
    Eigen::Index i = d - 1;
    for (;;) {
      if (++idx[static_cast<std::size_t>(i)] < cells) break;
      idx[static_cast<std::size_t>(i)] = 0;
      if (i-- == 0) return 1;
    }
  }
}

std::vector<VerifyRecord> verify_regions(const Plant& plant, const Formula& check,
                                         const MlpParams& theta, const std::vector<Region>& regions,
                                         int refine_depth, int threads, double margin) {
  std::vector<VerifyRecord> out(regions.size());
  parallel_for(regions.size(), threads, [&](std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    int result = verify_region(plant, check, theta, regions[i], refine_depth, margin);
    auto t1 = std::chrono::steady_clock::now();
    out[i] = {regions[i].id, result, refine_depth, std::chrono::duration<double>(t1 - t0).count()};
  });
  return out;
}

}  // namespace rwp
