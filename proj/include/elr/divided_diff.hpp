#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "elr/function_model.hpp"

namespace elr {

/// Relative gap below which two distinct node values are considered a
/// numerical accident rather than a deliberate pair of nodes.
inline constexpr double kNearNodeTolerance = 1e-13;

inline bool nodes_nearly_equal(double x, double y) {
  if (x == y) return false;
  const double scale = std::max(std::abs(x), std::abs(y));
  return std::abs(x - y) < kNearNodeTolerance * scale;
}

struct NodeEntry {
  double node = 0.0;
  int multiplicity = 1;
};

/// Interpolation nodes with multiplicities. Entries are kept sorted by node
/// value and equal values are merged; nearly-equal distinct values are
/// rejected instead of merged.
class NodeMultiset {
 public:
  NodeMultiset() = default;

  explicit NodeMultiset(std::vector<NodeEntry> entries) {
    for (const auto& e : entries) {
      if (!std::isfinite(e.node)) throw PreconditionError("node is not finite");
      if (e.multiplicity < 1) {
        throw PreconditionError("node multiplicity must be positive");
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const NodeEntry& l, const NodeEntry& r) { return l.node < r.node; });
    for (const auto& e : entries) {
      if (!entries_.empty() && entries_.back().node == e.node) {
        entries_.back().multiplicity += e.multiplicity;
        continue;
      }
      if (!entries_.empty() && nodes_nearly_equal(entries_.back().node, e.node)) {
        throw PreconditionError("nodes " + std::to_string(entries_.back().node) +
                                " and " + std::to_string(e.node) +
                                " are distinct but nearly equal");
      }
      entries_.push_back(e);
    }
  }

  /// Builds the multiset from a flat list; repeated values become
  /// multiplicities.
  static NodeMultiset from_points(std::span<const double> points) {
    std::vector<NodeEntry> entries;
    entries.reserve(points.size());
    for (double t : points) entries.push_back({t, 1});
    return NodeMultiset(std::move(entries));
  }

  /// {a repeated m times, b repeated k times}
  static NodeMultiset two_point(double a, int m, double b, int k) {
    std::vector<NodeEntry> entries;
    if (m > 0) entries.push_back({a, m});
    if (k > 0) entries.push_back({b, k});
    return NodeMultiset(std::move(entries));
  }

  const std::vector<NodeEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  int total_count() const {
    int n = 0;
    for (const auto& e : entries_) n += e.multiplicity;
    return n;
  }

  int max_multiplicity() const {
    int out = 0;
    for (const auto& e : entries_) out = std::max(out, e.multiplicity);
    return out;
  }

  /// Ascending node list with each node repeated by its multiplicity.
  std::vector<double> flattened() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total_count()));
    for (const auto& e : entries_) out.insert(out.end(), e.multiplicity, e.node);
    return out;
  }

 private:
  std::vector<NodeEntry> entries_;
};

/// P(t) = c0 + c1 (t - z0) + c2 (t - z0)(t - z1) + ...
struct NewtonForm {
  std::vector<double> nodes;
  std::vector<double> coeffs;

  double operator()(double t) const {
    if (coeffs.empty()) return 0.0;
    double p = coeffs.back();
    for (std::size_t j = coeffs.size() - 1; j-- > 0;) {
      p = p * (t - nodes[j]) + coeffs[j];
    }
    return p;
  }

  /// P(t), P'(t), ..., P^(order)(t).
  std::vector<double> derivatives(double t, int order) const {
    // Taylor coefficients of P about t, built by nested multiplication
    // with (s + t - z_j).
    std::vector<double> taylor(static_cast<std::size_t>(order) + 1, 0.0);
    for (std::size_t j = coeffs.size(); j-- > 0;) {
      if (j + 1 < coeffs.size()) {
        const double shift = t - nodes[j];
        for (int d = order; d >= 1; --d) {
          taylor[d] = taylor[d] * shift + taylor[d - 1];
        }
        taylor[0] *= shift;
      }
      taylor[0] += coeffs[j];
    }
    for (int d = 0; d <= order; ++d) taylor[d] *= factorial(d);
    return taylor;
  }
};

namespace detail {

inline void check_nodes(const FunctionModel& f, const NodeMultiset& nodes) {
  if (nodes.empty()) throw PreconditionError("divided difference of an empty node set");
  for (const auto& e : nodes.entries()) {
    if (!f.domain().contains(e.node)) {
      throw PreconditionError("node " + std::to_string(e.node) +
                              " lies outside the domain of " + f.name());
    }
  }
  if (nodes.max_multiplicity() - 1 > f.max_order()) {
    throw PreconditionError("node multiplicity " +
                            std::to_string(nodes.max_multiplicity()) +
                            " needs derivative order beyond max_order of " +
                            f.name());
  }
}

/// Confluent Newton table over ascending nodes; returns the top diagonal,
/// i.e. coefficient j is f[z_0, ..., z_j].
inline std::vector<double> newton_coefficients(const FunctionModel& f,
                                               const std::vector<double>& z) {
  const std::size_t n = z.size();
  std::vector<double> column(n);
  for (std::size_t i = 0; i < n; ++i) column[i] = f(z[i]);
  std::vector<double> coeffs(n);
  coeffs[0] = column[0];
  for (std::size_t level = 1; level < n; ++level) {
    const double inv_fact = 1.0 / factorial(static_cast<int>(level));
    for (std::size_t i = n - 1; i >= level; --i) {
      if (z[i] == z[i - level]) {
        column[i] = f.derivative(static_cast<int>(level), z[i]) * inv_fact;
      } else {
        column[i] = (column[i] - column[i - 1]) / (z[i] - z[i - level]);
      }
    }
    coeffs[level] = column[level];
  }
  return coeffs;
}

}  // namespace detail

/// f[t_0, ..., t_n] over a node multiset, with f[a, ..., a] (j+1 times)
/// = f^(j)(a) / j!.
inline double divided_difference(const FunctionModel& f, const NodeMultiset& nodes) {
  detail::check_nodes(f, nodes);
  const auto z = nodes.flattened();
  return detail::newton_coefficients(f, z).back();
}

inline NewtonForm newton_interpolant(const FunctionModel& f, const NodeMultiset& nodes) {
  detail::check_nodes(f, nodes);
  NewtonForm out;
  out.nodes = nodes.flattened();
  out.coeffs = detail::newton_coefficients(f, out.nodes);
  return out;
}

/// Hermite interpolant of type (m, n-m): matches f^(i)(a) for i < m and
/// f^(i)(b) for i < n-m.
inline NewtonForm hermite_mn(const FunctionModel& f, double a, double b, int m, int n) {
  if (m < 1 || m > n - 1) {
    throw PreconditionError("hermite_mn requires 1 <= m <= n-1, got m=" +
                            std::to_string(m) + ", n=" + std::to_string(n));
  }
  if (!(a < b)) throw PreconditionError("hermite_mn requires a < b");
  if (f.max_order() < std::max(m, n - m)) {
    throw PreconditionError("hermite_mn needs derivatives up to order " +
                            std::to_string(std::max(m, n - m)));
  }
  return newton_interpolant(f, NodeMultiset::two_point(a, m, b, n - m));
}

namespace detail {

// (t - p)^mp (t - q)^mq f[t; p x mp; q x mq]
inline double two_point_remainder(const FunctionModel& f, double p, int mp, double q,
                                  int mq, double t) {
  if (t == p || t == q) return 0.0;
  const double factor = ipow(t - p, mp) * ipow(t - q, mq);
  std::vector<NodeEntry> entries{{p, mp}, {q, mq}};
  if (nodes_nearly_equal(t, p)) {
    entries[0].multiplicity += 1;
  } else if (nodes_nearly_equal(t, q)) {
    entries[1].multiplicity += 1;
  } else {
    entries.push_back({t, 1});
  }
  return factor * divided_difference(f, NodeMultiset(std::move(entries)));
}

inline void check_remainder_args(const FunctionModel& f, double a, double b, int m,
                                 int n, double t) {
  if (!(a < b)) throw PreconditionError("remainder requires a < b");
  if (m < 1 || m > n - 1) {
    throw PreconditionError("remainder requires 1 <= m <= n-1, got m=" +
                            std::to_string(m) + ", n=" + std::to_string(n));
  }
  if (t < a || t > b) {
    throw PreconditionError("remainder point " + std::to_string(t) +
                            " lies outside [a, b]");
  }
  if (!f.domain().contains(Interval(a, b))) {
    throw PreconditionError("[a, b] exceeds the domain of " + f.name());
  }
}

}  // namespace detail

/// R_m(t) = (t-a)^m (t-b)^(n-m) f[t; a x m; b x (n-m)]
inline double remainder_R(const FunctionModel& f, double a, double b, int m, int n,
                          double t) {
  detail::check_remainder_args(f, a, b, m, n, t);
  return detail::two_point_remainder(f, a, m, b, n - m, t);
}

/// R*_m(t) = (t-b)^m (t-a)^(n-m) f[t; b x m; a x (n-m)]
inline double remainder_Rstar(const FunctionModel& f, double a, double b, int m, int n,
                              double t) {
  detail::check_remainder_args(f, a, b, m, n, t);
  return detail::two_point_remainder(f, b, m, a, n - m, t);
}

}  // namespace elr
