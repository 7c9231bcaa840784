#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace elr {

/// Raised when an operation's precondition on its inputs does not hold
/// (nodes outside the domain, insufficient derivative order, bad ranges).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed interval [lower, upper] with lower < upper.
struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  Interval() = default;
  Interval(double lo, double hi) : lower(lo), upper(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw PreconditionError("interval requires finite a < b, got [" +
                              std::to_string(lo) + ", " + std::to_string(hi) +
                              "]");
    }
  }

  double width() const { return upper - lower; }
  bool contains(double t) const { return lower <= t && t <= upper; }
  bool contains(const Interval& other) const {
    return lower <= other.lower && other.upper <= upper;
  }
};

/// A real function on a closed interval together with its analytic
/// derivatives up to `max_order`.
///
/// The callables are not domain checked: operations that rely on the
/// function being defined (divided differences, bounds) validate their
/// nodes against `domain()` themselves. Generators additionally carry the
/// limits f(0+) and lim f(t)/t used by the Csiszar conventions.
class FunctionModel {
 public:
  using Eval = std::function<double(double)>;
  using Deriv = std::function<double(int, double)>;

  FunctionModel(Eval eval, Deriv deriv, Interval domain, int max_order,
                std::string name = "f")
      : eval_(std::move(eval)),
        deriv_(std::move(deriv)),
        domain_(domain),
        max_order_(max_order),
        name_(std::move(name)) {
    if (!eval_) throw PreconditionError("function model needs an evaluator");
    if (max_order_ < 0) throw PreconditionError("max_order must be >= 0");
    if (max_order_ > 0 && !deriv_) {
      throw PreconditionError("max_order > 0 requires a derivative callable");
    }
  }

  double operator()(double t) const { return eval_(t); }

  /// k-th derivative; k = 0 is the function itself.
  double derivative(int k, double t) const {
    if (k == 0) return eval_(t);
    if (k < 0 || k > max_order_) {
      throw PreconditionError("derivative order " + std::to_string(k) +
                              " exceeds max_order " +
                              std::to_string(max_order_) + " of " + name_);
    }
    return deriv_(k, t);
  }

  const Interval& domain() const { return domain_; }
  int max_order() const { return max_order_; }
  const std::string& name() const { return name_; }

  const std::optional<double>& f_at_zero_plus() const { return f_at_zero_plus_; }
  const std::optional<double>& slope_at_infinity() const {
    return slope_at_infinity_;
  }

  FunctionModel with_domain(Interval domain) const {
    FunctionModel copy = *this;
    copy.domain_ = domain;
    return copy;
  }

  FunctionModel with_limits(std::optional<double> at_zero_plus,
                            std::optional<double> slope_at_infinity) const {
    FunctionModel copy = *this;
    copy.f_at_zero_plus_ = at_zero_plus;
    copy.slope_at_infinity_ = slope_at_infinity;
    return copy;
  }

  /// -f, with derivatives and limits negated.
  FunctionModel negated() const {
    auto eval = eval_;
    auto deriv = deriv_;
    FunctionModel out(
        [eval](double t) { return -eval(t); },
        deriv ? Deriv([deriv](int k, double t) { return -deriv(k, t); })
              : Deriv{},
        domain_, max_order_, "-(" + name_ + ")");
    if (f_at_zero_plus_) out.f_at_zero_plus_ = -*f_at_zero_plus_;
    if (slope_at_infinity_) out.slope_at_infinity_ = -*slope_at_infinity_;
    return out;
  }

 private:
  Eval eval_;
  Deriv deriv_;
  Interval domain_;
  int max_order_;
  std::string name_;
  std::optional<double> f_at_zero_plus_;
  std::optional<double> slope_at_infinity_;
};

inline double factorial(int k) {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

/// x^k for non-negative integer k by repeated multiplication, so that
/// 0^0 = 1 and signs of negative bases are exact.
inline double ipow(double x, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

}  // namespace elr
