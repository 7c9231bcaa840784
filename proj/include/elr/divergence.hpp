#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "elr/elr_bounds.hpp"
#include "elr/function_model.hpp"
#include "elr/functional.hpp"

namespace elr {

/// Raised when two independent evaluations of the same quantity disagree.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kProbabilitySumTolerance = 1e-12;
inline constexpr double kDelegationTolerance = 1e-12;

/// Neumaier-compensated sum.
inline double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw PreconditionError("probability vector is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
        throw PreconditionError("probability " + std::to_string(i) + " = " +
                                std::to_string(values_[i]) + " is outside [0, 1]");
      }
    }
    const double total = compensated_sum(values_);
    if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
      throw PreconditionError("probabilities sum to " + std::to_string(total) +
                              ", expected 1");
    }
  }

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// [min_i p_i/q_i, max_i p_i/q_i]. May be degenerate (p = q).
struct RatioRange {
  double a = 1.0;
  double b = 1.0;

  bool degenerate() const { return !(a < b); }
  Interval interval() const {
    if (degenerate()) {
      throw PreconditionError(
          "ratio range is degenerate (a = b); supply an enclosing interval with a < b");
    }
    return Interval(a, b);
  }
};

/// sum_i q_i f(p_i / q_i) with the Csiszar conventions for zero entries:
/// 0 f(0/0) = 0, 0 f(p/0) = p lim f(t)/t, f(0) = f(0+).
inline double f_divergence(const FunctionModel& f, const ProbabilityVector& p,
                           const ProbabilityVector& q) {
  if (p.size() != q.size()) {
    throw PreconditionError("p and q differ in length (" + std::to_string(p.size()) +
                            " vs " + std::to_string(q.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (qi == 0.0) {
      if (pi == 0.0) continue;
      if (!f.slope_at_infinity()) {
        throw PreconditionError("q_" + std::to_string(i) + " = 0 < p_" + std::to_string(i) +
                                " but " + f.name() + " declares no limit of f(t)/t");
      }
      total += pi * *f.slope_at_infinity();
      continue;
    }
    if (pi == 0.0) {
      total += qi * (f.f_at_zero_plus() ? *f.f_at_zero_plus() : f(0.0));
      continue;
    }
    total += qi * f(pi / qi);
  }
  return total;
}

inline RatioRange ratio_range(const ProbabilityVector& p, const ProbabilityVector& q) {
  if (p.size() != q.size()) throw PreconditionError("p and q differ in length");
  RatioRange out{std::numeric_limits<double>::infinity(),
                 -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0)) {
      throw PreconditionError("q_" + std::to_string(i) + " = 0; ratios p_i/q_i are undefined");
    }
    const double x = p[i] / q[i];
    out.a = std::min(out.a, x);
    out.b = std::max(out.b, x);
  }
  if (out.a > 1.0 + 1e-12 || out.b < 1.0 - 1e-12) {
    throw std::logic_error("ratio range does not contain 1");
  }
  return out;
}

struct DivergenceBoundReport {
  BoundReport report;  // evaluated through the discrete functional
  Interval interval;
  RatioRange ratios;
  double divergence = 0.0;     // D_f(p, q)
  double chord_at_one = 0.0;   // (b-1)/(b-a) f(a) + (1-a)/(b-a) f(b)
  double divergence_gap = 0.0;  // chord_at_one - divergence = -LR
  // The same quantities from the closed p, q formulas.
  double direct_lr = 0.0;
  std::optional<double> direct_lower;
  std::optional<double> direct_upper;
  double delegation_discrepancy = 0.0;  // max |direct - delegated| / max(1, |direct|, |delegated|)
};

namespace detail {

/// Bound expression written directly in p and q: the expansion of type
/// (m, n-m) about a (about_a) or about b, with A(g) = 1.
inline double direct_expression(const FunctionModel& f, const std::vector<double>& p,
                                const std::vector<double>& q, double a, double b, int n,
                                int m, bool about_a) {
  const double c = about_a ? a : b;   // node with multiplicity m
  const double o = about_a ? b : a;   // the other node
  // sum_i (p_i - c q_i)^j (p_i - o q_i)^k / q_i^e
  auto mixed = [&](int j, int k, int e) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      s += ipow(p[i] - c * q[i], j) * ipow(p[i] - o * q[i], k) / ipow(q[i], e);
    }
    return s;
  };
  auto dd = [&](int mc, int mo) {
    return divided_difference(f, NodeMultiset::two_point(c, mc, o, mo));
  };

  double value = 0.0;
  if (m == 1) {
    for (int k = 2; k <= n - 1; ++k) value += dd(1, k) * mixed(1, k - 1, k - 1);
    return value;
  }
  if (m == 2) {
    value += dd(2, 1) * mixed(1, 1, 1);
    for (int k = 2; k <= n - 2; ++k) value += dd(2, k) * mixed(2, k - 1, k);
    return value;
  }
  const double slope = (f(b) - f(a)) / (b - a);
  // (1 - a)(f'(a) - f[a,b])  or  (b - 1)(f[a,b] - f'(b))
  value += about_a ? (1.0 - a) * (f.derivative(1, a) - slope)
                   : (b - 1.0) * (slope - f.derivative(1, b));
  for (int k = 2; k <= m - 1; ++k) {
    value += f.derivative(k, c) / factorial(k) * mixed(k, 0, k - 1);
  }
  for (int k = 1; k <= n - m; ++k) value += dd(m, k) * mixed(m, k - 1, m + k - 2);
  return value;
}

// Largest |coefficient| (b - a)^degree: a bound on each summand's size
// before cancellation inside its moment, which is what input rounding scales with.
inline double summand_scale(const std::vector<Term>& terms, double width) {
  double out = 0.0;
  for (const auto& t : terms) out = std::max(out, std::abs(t.coefficient) * ipow(width, t.degree));
  return out;
}

// |x - y| relative to max(1, |x|, |y|).
inline double scaled_gap(double x, double y) {
  return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace detail

/// Bounds on D_f(p, q) - chord(1) obtained by setting x_i = p_i/q_i with
/// weights q_i, so that A(g) = 1. `interval` widens [a, b] beyond the ratio
/// range; it must contain every ratio and 1.
///
/// The bound is computed twice, through the discrete functional and through
/// the closed p, q formulas, and the two must agree to 1e-12 relative to the
/// largest of 1, the compared values and the summands.
inline DivergenceBoundReport divergence_bounds(const FunctionModel& f,
                                               const ProbabilityVector& p,
                                               const ProbabilityVector& q, int n, int m,
                                               Theorem theorem, Convexity convexity,
                                               std::optional<Interval> interval = std::nullopt) {
  DivergenceBoundReport out;
  out.ratios = ratio_range(p, q);
  out.interval = interval ? *interval : out.ratios.interval();
  const double a = out.interval.lower;
  const double b = out.interval.upper;
  if (!(a <= 1.0 && 1.0 <= b)) throw PreconditionError("interval must satisfy a <= 1 <= b");
  if (out.ratios.a < a || out.ratios.b > b) {
    throw PreconditionError("interval does not contain every ratio p_i/q_i");
  }

  std::vector<double> points(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) points[i] = p[i] / q[i];
  const DiscreteFunctional A(std::move(points), q.values(), out.interval);
  out.report = evaluate_bound(theorem, f, A, n, m, convexity);

  out.divergence = f_divergence(f, p, q);
  out.chord_at_one = (b - 1.0) / (b - a) * f(a) + (1.0 - a) / (b - a) * f(b);
  out.divergence_gap = out.chord_at_one - out.divergence;
  out.direct_lr = out.divergence - out.chord_at_one;

  auto expr = [&](int mm, bool about_a) {
    return detail::direct_expression(f, p.values(), q.values(), a, b, n, mm, about_a);
  };
  const auto& r = out.report;
  auto assign = [&](double first, double second) {
    // `first` is the expression listed as the lower side in the normal case.
    out.direct_lower = r.reversed ? second : first;
    out.direct_upper = r.reversed ? first : second;
  };
  switch (theorem) {
    case Theorem::tm21:
    case Theorem::tm22: {
      const double v = expr(m, theorem == Theorem::tm21);
      if (r.lower) out.direct_lower = v;
      if (r.upper) out.direct_upper = v;
      break;
    }
    case Theorem::cor21: assign(expr(m, true), expr(m, false)); break;
    case Theorem::tm23: assign(expr(1, true), expr(2, true)); break;
    case Theorem::tm24: assign(expr(2, false), expr(1, false)); break;
  }

  double worst = detail::scaled_gap(out.direct_lr, r.lr);
  if (r.lower) worst = std::max(worst, detail::scaled_gap(*out.direct_lower, *r.lower));
  if (r.upper) worst = std::max(worst, detail::scaled_gap(*out.direct_upper, *r.upper));
  out.delegation_discrepancy = worst;
  // The assertion targets transcription errors, which are O(1) relative. Rounding of
  // the ratios p_i/q_i propagates through |coefficient| (b - a)^degree per summand,
  // so that magnitude joins the scale.
  const double summand = std::max(detail::summand_scale(r.lower_terms, b - a),
                                  detail::summand_scale(r.upper_terms, b - a));
  auto conditioned = [&](double x, double y) {
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y), summand});
  };
  double gap = conditioned(out.direct_lr, r.lr);
  if (r.lower) gap = std::max(gap, conditioned(*out.direct_lower, *r.lower));
  if (r.upper) gap = std::max(gap, conditioned(*out.direct_upper, *r.upper));
  if (!(gap <= kDelegationTolerance)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "direct and delegated bound evaluations disagree: gap %.3g relative to "
                  "the summand scale %.3g",
                  gap, summand);
    throw ConsistencyError(buf);
  }
  return out;
}

}  // namespace elr
