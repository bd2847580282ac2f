#include "rwp/interval.hpp"

#include <algorithm>
#include <cmath>

namespace rwp {

Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }

Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

Interval operator*(double k, Interval a) {
  return k >= 0 ? Interval{k * a.lo, k * a.hi} : Interval{k * a.hi, k * a.lo};
}

Interval interval_clamp(Interval a, double lo, double hi) {
  return {std::clamp(a.lo, lo, hi), std::clamp(a.hi, lo, hi)};
}

Interval interval_min(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Interval interval_max(Interval a, Interval b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Is there an integer k with offset + k*period inside [a, b]?
bool contains_critical(double a, double b, double offset, double period) {
  double kmin = std::ceil((a - offset) / period);
  double kmax = std::floor((b - offset) / period);
  return kmin <= kmax;
}

}  // namespace

Interval interval_sin(Interval r) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) return {-1.0, 1.0};
  double lo = std::min(std::sin(r.lo), std::sin(r.hi));
  double hi = std::max(std::sin(r.lo), std::sin(r.hi));
  if (contains_critical(r.lo, r.hi, kPi / 2.0, 2.0 * kPi)) hi = 1.0;
  if (contains_critical(r.lo, r.hi, -kPi / 2.0, 2.0 * kPi)) lo = -1.0;
  return {lo, hi};
}

Interval interval_cos(Interval r) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) return {-1.0, 1.0};
  double lo = std::min(std::cos(r.lo), std::cos(r.hi));
  double hi = std::max(std::cos(r.lo), std::cos(r.hi));
  if (contains_critical(r.lo, r.hi, 0.0, 2.0 * kPi)) hi = 1.0;
  if (contains_critical(r.lo, r.hi, kPi, 2.0 * kPi)) lo = -1.0;
  return {lo, hi};
}

bool IntervalBox::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

void IntervalBox::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("box bound dimensions differ");
  if (!lower.allFinite() || !upper.allFinite()) throw Error("box bounds must be finite");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw Error("box lower bound exceeds upper bound");
  }
}

IntervalBox interval_affine(const IntervalBox& box, const Eigen::MatrixXd& W,
                            const Eigen::VectorXd& b) {
  if (W.cols() != box.lower.size() || W.rows() != b.size()) {
    throw DimensionError("affine map dimensions do not match box");
  }
  Eigen::VectorXd mid = 0.5 * (box.lower + box.upper);
  Eigen::VectorXd rad = 0.5 * (box.upper - box.lower);
  Eigen::VectorXd c = W * mid + b;
  Eigen::VectorXd r = W.cwiseAbs() * rad;
  return {c - r, c + r};
}

IntervalBox interval_activation(const IntervalBox& box, Activation act) {
  IntervalBox out = box;
  for (Eigen::Index i = 0; i < box.lower.size(); ++i) {
    out.lower[i] = apply_activation(act, box.lower[i]);
    out.upper[i] = apply_activation(act, box.upper[i]);
  }
  return out;
}

IntervalBox mlp_eval(const MlpParams& mlp, const IntervalBox& box) {
  IntervalBox x = box;
  for (const Layer& l : mlp.layers) {
    x = interval_activation(interval_affine(x, l.W, l.b), l.act);
  }
  return x;
}

}  // namespace rwp
