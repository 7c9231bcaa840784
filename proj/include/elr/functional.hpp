#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "elr/function_model.hpp"

namespace elr {

/// Tolerance on the total weight of a discrete functional.
inline constexpr double kWeightSumTolerance = 1e-12;

/// A(h) = sum_i w_i h(x_i): a positive normalized linear functional with
/// g given by its values x_i on a finite set.
///
/// The enclosing interval is stored rather than inferred; it may be larger
/// than the range of the points.
class DiscreteFunctional {
 public:
  DiscreteFunctional(std::vector<double> points, std::vector<double> weights,
                     Interval interval)
      : points_(std::move(points)), weights_(std::move(weights)), interval_(interval) {
    if (points_.empty()) throw PreconditionError("functional needs at least one point");
    if (points_.size() != weights_.size()) {
      throw PreconditionError("points and weights differ in length (" +
                              std::to_string(points_.size()) + " vs " +
                              std::to_string(weights_.size()) + ")");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
        throw PreconditionError("weight " + std::to_string(i) + " is negative");
      }
      if (!interval_.contains(points_[i])) {
        throw PreconditionError("point " + std::to_string(points_[i]) +
                                " lies outside the interval");
      }
      total += weights_[i];
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
      throw PreconditionError("weights sum to " + std::to_string(total) +
                              ", expected 1");
    }
    if (total != 1.0) {
      for (double& w : weights_) w /= total;
    }
  }

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const Interval& interval() const { return interval_; }
  double a() const { return interval_.lower; }
  double b() const { return interval_.upper; }
  std::size_t size() const { return points_.size(); }

  template <class H>
  double apply(H&& h) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) sum += weights_[i] * h(points_[i]);
    return sum;
  }

  /// A(g)
  double mean() const {
    return apply([](double x) { return x; });
  }

  /// A[(g - a)^j (g - b)^k]
  double moment(int j, int k) const {
    if (j < 0 || k < 0) throw PreconditionError("moment exponents must be >= 0");
    const double lo = a();
    const double hi = b();
    return apply([&](double x) { return ipow(x - lo, j) * ipow(x - hi, k); });
  }

  /// A[(g - b)^j (g - a)^k]
  double moment_b_first(int j, int k) const { return moment(k, j); }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  Interval interval_;
};

template <class H>
double apply(const DiscreteFunctional& A, H&& h) {
  return A.apply(std::forward<H>(h));
}

inline double moment(const DiscreteFunctional& A, int j, int k) { return A.moment(j, k); }

/// The chord through (a, f(a)) and (b, f(b)) evaluated at x.
inline double chord(const FunctionModel& f, const Interval& ab, double x) {
  const double a = ab.lower;
  const double b = ab.upper;
  return (b - x) / (b - a) * f(a) + (x - a) / (b - a) * f(b);
}

/// LR(f, g, a, b, A) = A(f(g)) - (b - A(g))/(b - a) f(a) - (A(g) - a)/(b - a) f(b)
inline double lr_difference(const FunctionModel& f, const DiscreteFunctional& A) {
  if (!f.domain().contains(A.interval())) {
    throw PreconditionError("functional interval exceeds the domain of " + f.name());
  }
  const double composed = A.apply([&](double x) { return f(x); });
  return composed - chord(f, A.interval(), A.mean());
}

}  // namespace elr
