#include "rwp/stl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace rwp {

int VarTable::index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  throw Error("unknown state variable '" + name + "'");
}

double Predicate::margin(const Eigen::VectorXd& state, const VarTable& vars) const {
  if (is_named()) return fn(state);
  if (state.size() != vars.size()) {
    throw DimensionError("state dimension " + std::to_string(state.size()) +
                         " does not match variable table of size " + std::to_string(vars.size()));
  }
  double expr = 0.0;
  for (const auto& [var, coeff] : terms) expr += coeff * state[vars.index(var)];
  return (cmp == Cmp::Gt || cmp == Cmp::Ge) ? expr - bound : bound - expr;
}

namespace {

FormulaPtr node(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

void check_window(int t1, int t2) {
  if (t1 < 0 || t1 > t2) {
    throw Error("temporal window requires 0 <= t1 <= t2, got [" + std::to_string(t1) + "," +
                std::to_string(t2) + "]");
  }
}

}  // namespace

FormulaPtr make_true() { return node({}); }

FormulaPtr make_pred(Predicate p) {
  Formula f;
  f.kind = Formula::Kind::Pred;
  f.pred = std::move(p);
  return node(std::move(f));
}

FormulaPtr make_not(FormulaPtr c) {
  Formula f;
  f.kind = Formula::Kind::Not;
  f.lhs = std::move(c);
  return node(std::move(f));
}

FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Formula::Kind::And;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return node(std::move(f));
}

FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Formula::Kind::Or;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return node(std::move(f));
}

FormulaPtr make_globally(int t1, int t2, FormulaPtr c) {
  check_window(t1, t2);
  Formula f;
  f.kind = Formula::Kind::Globally;
  f.t1 = t1;
  f.t2 = t2;
  f.lhs = std::move(c);
  return node(std::move(f));
}

FormulaPtr make_finally(int t1, int t2, FormulaPtr c) {
  check_window(t1, t2);
  Formula f;
  f.kind = Formula::Kind::Finally;
  f.t1 = t1;
  f.t2 = t2;
  f.lhs = std::move(c);
  return node(std::move(f));
}

FormulaPtr make_until(int t1, int t2, FormulaPtr a, FormulaPtr b) {
  check_window(t1, t2);
  Formula f;
  f.kind = Formula::Kind::Until;
  f.t1 = t1;
  f.t2 = t2;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return node(std::move(f));
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.t1 != b.t1 || a.t2 != b.t2) return false;
  if (a.kind == Formula::Kind::Pred) {
    const Predicate& p = a.pred;
    const Predicate& q = b.pred;
    if (p.is_named() || q.is_named()) return p.is_named() && q.is_named() && p.name == q.name;
    return p.terms == q.terms && p.bound == q.bound && p.cmp == q.cmp;
  }
  if (a.lhs && (!b.lhs || !structurally_equal(*a.lhs, *b.lhs))) return false;
  if (a.rhs && (!b.rhs || !structurally_equal(*a.rhs, *b.rhs))) return false;
  return static_cast<bool>(a.lhs) == static_cast<bool>(b.lhs) &&
         static_cast<bool>(a.rhs) == static_cast<bool>(b.rhs);
}

int horizon(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::Pred:
      return 0;
    case Formula::Kind::Not:
      return horizon(*f.lhs);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return std::max(horizon(*f.lhs), horizon(*f.rhs));
    case Formula::Kind::Globally:
    case Formula::Kind::Finally:
      return f.t2 + horizon(*f.lhs);
    case Formula::Kind::Until:
      return f.t2 + std::max(horizon(*f.lhs), horizon(*f.rhs));
  }
  return 0;
}

namespace {

double eval_exact(const Formula& f, const Trajectory& tr, const VarTable& vars, int t, double top) {
  switch (f.kind) {
    case Formula::Kind::True:
      return top;
    case Formula::Kind::Pred:
      return f.pred.margin(tr.states[static_cast<std::size_t>(t)], vars);
    case Formula::Kind::Not:
      return -eval_exact(*f.lhs, tr, vars, t, top);
    case Formula::Kind::And:
      return std::min(eval_exact(*f.lhs, tr, vars, t, top), eval_exact(*f.rhs, tr, vars, t, top));
    case Formula::Kind::Or:
      return std::max(eval_exact(*f.lhs, tr, vars, t, top), eval_exact(*f.rhs, tr, vars, t, top));
    case Formula::Kind::Globally: {
      double m = top;
      for (int tt = t + f.t1; tt <= t + f.t2; ++tt) {
        m = std::min(m, eval_exact(*f.lhs, tr, vars, tt, top));
      }
      return m;
    }
    case Formula::Kind::Finally: {
      double m = -top;
      for (int tt = t + f.t1; tt <= t + f.t2; ++tt) {
        m = std::max(m, eval_exact(*f.lhs, tr, vars, tt, top));
      }
      return m;
    }
    case Formula::Kind::Until: {
      double best = -top;
      double prefix = top;  // min of lhs over [t, t'-1]
      for (int tp = t; tp <= t + f.t2; ++tp) {
        if (tp >= t + f.t1) {
          double v = std::min(eval_exact(*f.rhs, tr, vars, tp, top), prefix);
          best = std::max(best, v);
        }
        prefix = std::min(prefix, eval_exact(*f.lhs, tr, vars, tp, top));
      }
      return best;
    }
  }
  return 0.0;
}

double soft_min(const std::vector<double>& xs, double beta) {
  double m = *std::min_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(-beta * (x - m));
  return m - std::log(s) / beta;
}

double soft_max(const std::vector<double>& xs, double beta) {
  double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(beta * (x - m));
  return m + std::log(s) / beta;
}

double eval_smooth(const Formula& f, const Trajectory& tr, const VarTable& vars, int t, double beta,
                   double top) {
  switch (f.kind) {
    case Formula::Kind::True:
      return top;
    case Formula::Kind::Pred:
      return f.pred.margin(tr.states[static_cast<std::size_t>(t)], vars);
    case Formula::Kind::Not:
      return -eval_smooth(*f.lhs, tr, vars, t, beta, top);
    case Formula::Kind::And:
      return soft_min({eval_smooth(*f.lhs, tr, vars, t, beta, top),
                       eval_smooth(*f.rhs, tr, vars, t, beta, top)},
                      beta);
    case Formula::Kind::Or:
      return soft_max({eval_smooth(*f.lhs, tr, vars, t, beta, top),
                       eval_smooth(*f.rhs, tr, vars, t, beta, top)},
                      beta);
    case Formula::Kind::Globally: {
      std::vector<double> xs;
      for (int tt = t + f.t1; tt <= t + f.t2; ++tt) {
        xs.push_back(eval_smooth(*f.lhs, tr, vars, tt, beta, top));
      }
      return soft_min(xs, beta);
    }
    case Formula::Kind::Finally: {
      std::vector<double> xs;
      for (int tt = t + f.t1; tt <= t + f.t2; ++tt) {
        xs.push_back(eval_smooth(*f.lhs, tr, vars, tt, beta, top));
      }
      return soft_max(xs, beta);
    }
    case Formula::Kind::Until: {
      std::vector<double> outer;
      std::vector<double> prefix;  // lhs values over [t, t'-1]
      for (int tp = t; tp <= t + f.t2; ++tp) {
        if (tp >= t + f.t1) {
          std::vector<double> entry = prefix;
          entry.push_back(eval_smooth(*f.rhs, tr, vars, tp, beta, top));
          outer.push_back(soft_min(entry, beta));
        }
        prefix.push_back(eval_smooth(*f.lhs, tr, vars, tp, beta, top));
      }
      return soft_max(outer, beta);
    }
  }
  return 0.0;
}

void check_horizon(const Formula& f, const Trajectory& tr, int t) {
  if (tr.states.empty()) throw Error("empty trajectory");
  if (t < 0 || t + horizon(f) > tr.length()) {
    throw HorizonError("formula horizon " + std::to_string(horizon(f)) + " at time " +
                       std::to_string(t) + " exceeds trajectory length " +
                       std::to_string(tr.length()));
  }
}

}  // namespace

double robustness(const Formula& f, const Trajectory& tr, const VarTable& vars, int t, double top) {
  check_horizon(f, tr, t);
  return eval_exact(f, tr, vars, t, top);
}

double smooth_robustness(const Formula& f, const Trajectory& tr, const VarTable& vars, int t,
                         double beta, double top) {
  if (beta <= 0.0) throw Error("smoothing sharpness beta must be positive");
  check_horizon(f, tr, t);
  return eval_smooth(f, tr, vars, t, beta, top);
}

double smooth_arity(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::Pred:
      return 1.0;
    case Formula::Kind::Not:
      return smooth_arity(*f.lhs);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return 2.0 * std::max(smooth_arity(*f.lhs), smooth_arity(*f.rhs));
    case Formula::Kind::Globally:
    case Formula::Kind::Finally:
      return static_cast<double>(f.t2 - f.t1 + 1) * smooth_arity(*f.lhs);
    case Formula::Kind::Until:
      return static_cast<double>(f.t2 - f.t1 + 1) * static_cast<double>(f.t2 + 1) *
             std::max(smooth_arity(*f.lhs), smooth_arity(*f.rhs));
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(const std::string& text, const VarTable* vars) : s_(text), vars_(vars) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_or();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    for (;;) {
      skip_ws();
      if (!eat('|')) return f;
      f = make_or(std::move(f), parse_and());
    }
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    for (;;) {
      skip_ws();
      if (!eat('&')) return f;
      f = make_and(std::move(f), parse_unary());
    }
  }

  FormulaPtr parse_unary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of formula", pos_);
    char c = s_[pos_];
    if (c == '!') {
      ++pos_;
      return make_not(parse_unary());
    }
    if (c == '(') {
      ++pos_;
      FormulaPtr f = parse_or();
      expect(')');
      return f;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      std::string id = read_ident();
      skip_ws();
      if (id == "true") return make_true();
      if ((id == "G" || id == "F" || id == "U") && peek('[')) {
        auto [t1, t2] = read_window();
        expect('(');
        FormulaPtr a = parse_or();
        if (id == "U") {
          skip_ws();
          expect(',');
          FormulaPtr b = parse_or();
          expect(')');
          return make_until(t1, t2, std::move(a), std::move(b));
        }
        expect(')');
        return id == "G" ? make_globally(t1, t2, std::move(a))
                         : make_finally(t1, t2, std::move(a));
      }
      pos_ = start;  // identifier begins a comparison
      return parse_comparison();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      return parse_comparison();
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  FormulaPtr parse_comparison() {
    Predicate p;
    double const_accum = 0.0;
    bool first = true;
    for (;;) {
      skip_ws();
      double sign = 1.0;
      if (!first) {
        if (eat('+')) {
          sign = 1.0;
        } else if (eat('-')) {
          sign = -1.0;
        } else {
          break;
        }
      } else if (eat('-')) {
        sign = -1.0;
      } else {
        eat('+');
      }
      first = false;
      skip_ws();
      if (pos_ < s_.size() && !std::isalpha(static_cast<unsigned char>(s_[pos_])) &&
          s_[pos_] != '_') {
        double v = read_number();  // strtod handles an embedded sign
        skip_ws();
        if (eat('*')) {
          skip_ws();
          std::string var = read_var();
          p.terms.emplace_back(var, sign * v);
        } else {
          const_accum += sign * v;
        }
      } else {
        std::string var = read_var();
        p.terms.emplace_back(var, sign);
      }
    }
    skip_ws();
    p.cmp = read_cmp();
    skip_ws();
    double neg = eat('-') ? -1.0 : (eat('+'), 1.0);
    skip_ws();
    p.bound = neg * read_number() - const_accum;
    return make_pred(std::move(p));
  }

  Cmp read_cmp() {
    if (eat('<')) return eat('=') ? Cmp::Le : Cmp::Lt;
    if (eat('>')) return eat('=') ? Cmp::Ge : Cmp::Gt;
    throw ParseError("expected comparison operator", pos_);
  }

  std::pair<int, int> read_window() {
    expect('[');
    skip_ws();
    int t1 = read_int();
    skip_ws();
    expect(',');
    skip_ws();
    int t2 = read_int();
    skip_ws();
    expect(']');
    skip_ws();
    if (t1 < 0 || t1 > t2) throw ParseError("window requires 0 <= t1 <= t2", pos_);
    return {t1, t2};
  }

  std::string read_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected identifier", pos_);
    return s_.substr(start, pos_ - start);
  }

  std::string read_var() {
    std::size_t at = pos_;
    std::string id = read_ident();
    if (vars_ != nullptr) {
      bool known = false;
      for (const auto& n : vars_->names()) known = known || n == id;
      if (!known) throw ParseError("unknown predicate variable '" + id + "'", at);
    }
    return id;
  }

  double read_number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  int read_int() {
    std::size_t at = pos_;
    double v = read_number();
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ParseError("expected integer step index", at);
    return i;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  bool eat(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  const VarTable* vars_;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  return Parser(text, nullptr).parse();
}

FormulaPtr parse_formula(const std::string& text, const VarTable& vars) {
  return Parser(text, &vars).parse();
}

std::string print_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
      return "true";
    case Formula::Kind::Pred: {
      const Predicate& p = f.pred;
      if (p.is_named()) return p.name;
      std::string out;
      for (std::size_t i = 0; i < p.terms.size(); ++i) {
        if (i > 0) out += " + ";
        out += fmt_double(p.terms[i].second) + "*" + p.terms[i].first;
      }
      out += std::string(" ") + cmp_text(p.cmp) + " " + fmt_double(p.bound);
      return out;
    }
    case Formula::Kind::Not:
      return "!(" + print_formula(*f.lhs) + ")";
    case Formula::Kind::And:
      return "(" + print_formula(*f.lhs) + " & " + print_formula(*f.rhs) + ")";
    case Formula::Kind::Or:
      return "(" + print_formula(*f.lhs) + " | " + print_formula(*f.rhs) + ")";
    case Formula::Kind::Globally:
      return "G[" + std::to_string(f.t1) + "," + std::to_string(f.t2) + "](" +
             print_formula(*f.lhs) + ")";
    case Formula::Kind::Finally:
      return "F[" + std::to_string(f.t1) + "," + std::to_string(f.t2) + "](" +
             print_formula(*f.lhs) + ")";
    case Formula::Kind::Until:
      return "U[" + std::to_string(f.t1) + "," + std::to_string(f.t2) + "](" +
             print_formula(*f.lhs) + ", " + print_formula(*f.rhs) + ")";
  }
  return "";
}

}  // namespace rwp
