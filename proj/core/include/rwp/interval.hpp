#pragma once

#include <Eigen/Dense>

#include "rwp/common.hpp"
#include "rwp/mlp.hpp"

namespace rwp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a);
Interval operator*(double k, Interval a);
Interval interval_clamp(Interval a, double lo, double hi);
Interval interval_min(Interval a, Interval b);
Interval interval_max(Interval a, Interval b);

/// Sound enclosures of sin/cos over an interval of radians: endpoint images,
/// widened to +-1 wherever a critical point lies inside.
Interval interval_sin(Interval radians);
Interval interval_cos(Interval radians);

/// Axis-aligned box over plant state, lower <= upper componentwise.
struct IntervalBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static IntervalBox point(const Eigen::VectorXd& v) { return {v, v}; }
  int dim() const { return static_cast<int>(lower.size()); }
  Interval coord(int i) const { return {lower[i], upper[i]}; }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  void validate() const;
};

/// Exact interval image of an affine map: center W*mid + b, radius |W|*rad.
IntervalBox interval_affine(const IntervalBox& box, const Eigen::MatrixXd& W,
                            const Eigen::VectorXd& b);

/// Monotone activations admit exact endpoint images.
IntervalBox interval_activation(const IntervalBox& box, Activation act);

/// Interval forward pass through all layers.
IntervalBox mlp_eval(const MlpParams& mlp, const IntervalBox& box);

}  // namespace rwp
