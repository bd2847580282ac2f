#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rwp/common.hpp"

namespace rwp {

/// Finite robustness value assigned to the tautology (and to empty
/// min/max windows), keeping all arithmetic finite.
constexpr double kTop = 1e9;

/// Maps state-variable names to coordinate indices of the plant state.
class VarTable {
 public:
  VarTable() = default;
  explicit VarTable(std::vector<std::string> names) : names_(std::move(names)) {}

  int index(const std::string& name) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

enum class Cmp { Lt, Le, Gt, Ge };

/// Atomic proposition over one state. Either an affine comparison
/// `sum(coeff * var) cmp bound` or a named function registered
/// programmatically by a plant. The margin is >= 0 iff the predicate holds
/// (boundary counted as satisfied).
struct Predicate {
  std::vector<std::pair<std::string, double>> terms;
  double bound = 0.0;
  Cmp cmp = Cmp::Ge;

  std::string name;
  std::function<double(const Eigen::VectorXd&)> fn;

  bool is_named() const { return static_cast<bool>(fn); }
  bool strict() const { return cmp == Cmp::Lt || cmp == Cmp::Gt; }
  double margin(const Eigen::VectorXd& state, const VarTable& vars) const;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { True, Pred, Not, And, Or, Globally, Finally, Until };

  Kind kind = Kind::True;
  Predicate pred;          // Kind::Pred
  FormulaPtr lhs, rhs;     // children; unary ops use lhs
  int t1 = 0, t2 = 0;      // temporal window in steps, closed [t1, t2]
};

FormulaPtr make_true();
FormulaPtr make_pred(Predicate p);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
FormulaPtr make_globally(int t1, int t2, FormulaPtr f);
FormulaPtr make_finally(int t1, int t2, FormulaPtr f);
FormulaPtr make_until(int t1, int t2, FormulaPtr a, FormulaPtr b);

bool structurally_equal(const Formula& a, const Formula& b);

/// Largest temporal offset referenced by the formula; a trajectory must
/// extend at least `t + horizon(f)` steps past the evaluation time t.
int horizon(const Formula& f);

/// Sequence of plant states under discrete-time semantics, one state per
/// dt seconds (dt = 1 s for both bundled plants).
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  double dt = 1.0;

  int length() const { return static_cast<int>(states.size()) - 1; }  // T
};

/// Classical quantitative robustness rho(s, t, f). rho >= 0 iff the Boolean
/// semantics hold, with rho = 0 counted as satisfied.
double robustness(const Formula& f, const Trajectory& traj, const VarTable& vars, int t,
                  double top = kTop);

/// Smooth surrogate with min/max replaced by log-sum-exp soft-min/soft-max
/// of sharpness beta. |smooth - exact| <= log(smooth_arity(f)) / beta.
double smooth_robustness(const Formula& f, const Trajectory& traj, const VarTable& vars, int t,
                         double beta, double top = kTop);

/// Effective arity governing the log-sum-exp error bound. Nested soft
/// operators compound, so this is the product of operator arities along the
/// worst nesting path, not the largest single arity.
double smooth_arity(const Formula& f);

FormulaPtr parse_formula(const std::string& text);
FormulaPtr parse_formula(const std::string& text, const VarTable& vars);

/// Canonical text form; parse_formula(print_formula(f)) is structurally
/// equal to f for any formula without named predicates.
std::string print_formula(const Formula& f);

}  // namespace rwp
