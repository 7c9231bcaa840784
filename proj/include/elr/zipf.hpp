#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "elr/divergence.hpp"
#include "elr/elr_bounds.hpp"

namespace elr {

struct ZipfMandelbrotParams {
  int N = 1;
  double q = 0.0;
  double s = 1.0;

  void validate() const {
    if (N < 1) throw PreconditionError("Zipf-Mandelbrot requires N >= 1");
    if (!(q >= 0.0) || !std::isfinite(q)) throw PreconditionError("Zipf-Mandelbrot requires q >= 0");
    if (!(s > 0.0) || !std::isfinite(s)) throw PreconditionError("Zipf-Mandelbrot requires s > 0");
  }
};

namespace detail {

// (i + q)^(-s) / (1 + q)^(-s), computed in the log domain so that large s
// does not underflow every term.
inline std::vector<double> zm_relative_terms(const ZipfMandelbrotParams& params) {
  std::vector<double> terms(static_cast<std::size_t>(params.N));
  const double log_first = std::log1p(params.q);
  for (int i = 1; i <= params.N; ++i) {
    terms[i - 1] = std::exp(-params.s * (std::log(i + params.q) - log_first));
  }
  return terms;
}

inline double log_normalizer(const ZipfMandelbrotParams& params) {
  return -params.s * std::log1p(params.q) + std::log(compensated_sum(zm_relative_terms(params)));
}

}  // namespace detail

/// H_{N,q,s} = sum_{i=1}^N (i+q)^(-s). Underflows to 0 when every term
/// does; pmf and ratio_extrema work from relative terms instead.
inline double normalizer(const ZipfMandelbrotParams& params) {
  params.validate();
  std::vector<double> terms(static_cast<std::size_t>(params.N));
  for (int i = 1; i <= params.N; ++i) terms[i - 1] = std::pow(i + params.q, -params.s);
  return compensated_sum(terms);
}

/// The whole pmf as a probability vector.
inline std::vector<double> pmf_table(const ZipfMandelbrotParams& params) {
  params.validate();
  auto terms = detail::zm_relative_terms(params);
  const double total = compensated_sum(terms);
  for (double& x : terms) x /= total;
  return terms;
}

inline double pmf(int i, const ZipfMandelbrotParams& params) {
  params.validate();
  if (i < 1 || i > params.N) {
    throw PreconditionError("rank " + std::to_string(i) + " outside 1.." +
                            std::to_string(params.N));
  }
  return pmf_table(params)[static_cast<std::size_t>(i - 1)];
}

inline ProbabilityVector materialize(const ZipfMandelbrotParams& params) {
  return ProbabilityVector(pmf_table(params));
}

/// min and max over i of p_i/q_i = (H2/H1) (i+q2)^s2 / (i+q1)^s1 for P with
/// (q1, s1) and Q with (q2, s2). Scans every rank: the ratio need not be
/// monotone in i.
inline RatioRange ratio_extrema(const ZipfMandelbrotParams& P, const ZipfMandelbrotParams& Q) {
  P.validate();
  Q.validate();
  if (P.N != Q.N) {
    throw PreconditionError("Zipf-Mandelbrot laws have different N (" + std::to_string(P.N) +
                            " vs " + std::to_string(Q.N) + ")");
  }
  const double log_h = detail::log_normalizer(Q) - detail::log_normalizer(P);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 1; i <= P.N; ++i) {
    const double log_ratio = Q.s * std::log(i + Q.q) - P.s * std::log(i + P.q);
    lo = std::min(lo, log_ratio);
    hi = std::max(hi, log_ratio);
  }
  return RatioRange{std::exp(log_h + lo), std::exp(log_h + hi)};
}

/// Divergence bounds for two Zipf-Mandelbrot laws: materializes both pmfs
/// and delegates to divergence_bounds on the vectors.
inline DivergenceBoundReport zm_divergence_bounds(const ZipfMandelbrotParams& P,
                                                  const ZipfMandelbrotParams& Q,
                                                  const FunctionModel& f, int n, int m,
                                                  Theorem theorem, Convexity convexity,
                                                  std::optional<Interval> interval = std::nullopt) {
  if (P.N != Q.N) {
    throw PreconditionError("Zipf-Mandelbrot laws have different N (" + std::to_string(P.N) +
                            " vs " + std::to_string(Q.N) + ")");
  }
  const auto p = materialize(P);
  const auto q = materialize(Q);
  return divergence_bounds(f, p, q, n, m, theorem, convexity, interval);
}

}  // namespace elr
