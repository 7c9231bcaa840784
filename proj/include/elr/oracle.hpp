#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "elr/divergence.hpp"
#include "elr/divided_diff.hpp"
#include "elr/elr_bounds.hpp"
#include "elr/functional.hpp"
#include "elr/generators.hpp"

namespace elr {

inline constexpr double kCertificationTolerance = 1e-12;

struct ConvexityCertificate {
  int n = 0;
  ConvexityVerdict verdict = ConvexityVerdict::indefinite;
  int samples = 0;
  double min_dd = 0.0;
  double max_dd = 0.0;
  std::uint64_t seed = 0;
};

/// Samples `samples` sets of n+1 distinct points in f's domain (pairwise
/// gaps >= 1e-6 (b-a)) and classifies f by the sign of the n-th divided
/// differences. This is evidence, not proof.
inline ConvexityCertificate certify_convexity(const FunctionModel& f, int n, int samples,
                                              std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("certify_convexity needs samples >= 1");
  if (n < 0) throw PreconditionError("certify_convexity needs n >= 0");
  const Interval& d = f.domain();
  const double min_gap = 1e-6 * d.width();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(d.lower, d.upper);

  ConvexityCertificate cert;
  cert.n = n;
  cert.samples = samples;
  cert.seed = seed;
  cert.min_dd = std::numeric_limits<double>::infinity();
  cert.max_dd = -cert.min_dd;
  std::vector<double> pts(static_cast<std::size_t>(n) + 1);
  for (int s = 0; s < samples; ++s) {
    for (;;) {
      for (double& t : pts) t = uniform(rng);
      std::sort(pts.begin(), pts.end());
      bool separated = true;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i] - pts[i - 1] < min_gap) separated = false;
      }
      if (separated) break;
    }
    const double v = divided_difference(f, NodeMultiset::from_points(pts));
    cert.min_dd = std::min(cert.min_dd, v);
    cert.max_dd = std::max(cert.max_dd, v);
  }
  if (cert.min_dd >= -kCertificationTolerance) {
    cert.verdict = ConvexityVerdict::convex;
  } else if (cert.max_dd <= kCertificationTolerance) {
    cert.verdict = ConvexityVerdict::concave;
  } else {
    cert.verdict = ConvexityVerdict::indefinite;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Random configurations shared by the audits.

namespace detail {

class CaseSampler {
 public:
  explicit CaseSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return uniform(0.0, 1.0) < p; }
  std::uint64_t next_seed() { return rng_(); }

  Interval interval_within(double lo, double hi, double min_width) {
    for (;;) {
      double x = uniform(lo, hi);
      double y = uniform(lo, hi);
      if (x > y) std::swap(x, y);
      if (y - x >= min_width) return Interval(x, y);
    }
  }

  /// Interval with a < 1 < b and moderate ratios, where the divergence
  /// generators are well behaved.
  Interval ratio_safe_interval() { return Interval(uniform(0.5, 0.95), uniform(1.05, 2.5)); }

  DiscreteFunctional functional(const Interval& ab, int max_points) {
    const int size = integer(1, max_points);
    std::vector<double> pts(static_cast<std::size_t>(size));
    std::vector<double> w(static_cast<std::size_t>(size));
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
      const double r = uniform(0.0, 1.0);
      pts[i] = r < 0.05 ? ab.lower : r < 0.10 ? ab.upper : uniform(ab.lower, ab.upper);
      w[i] = uniform(0.0, 1.0) + 1e-3;
      total += w[i];
    }
    for (double& x : w) x /= total;
    return DiscreteFunctional(std::move(pts), std::move(w), ab);
  }

  GeneratorSpec polynomial(int degree, const Interval& ab) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::poly;
    spec.domain = ab;
    spec.coeffs.resize(static_cast<std::size_t>(degree) + 1);
    for (double& c : spec.coeffs) c = uniform(-2.0, 2.0);
    return spec;
  }

  /// One of exp, a random polynomial, power, or a divergence generator, on a
  /// suitable interval.
  GeneratorSpec any_function() {
    GeneratorSpec spec;
    switch (integer(0, 6)) {
      case 0:
        spec.kind = GeneratorKind::exp;
        spec.domain = interval_within(-2.0, 2.0, 0.1);
        return spec;
      case 1: return polynomial(integer(0, 8), interval_within(-1.5, 1.5, 0.1));
      case 2:
        spec.kind = GeneratorKind::power;
        spec.exponent = uniform(-2.0, 3.0);
        spec.domain = ratio_safe_interval();
        return spec;
      case 3: spec.kind = GeneratorKind::kl; break;
      case 4: spec.kind = GeneratorKind::hellinger; break;
      case 5: spec.kind = GeneratorKind::harmonic; break;
      default: spec.kind = GeneratorKind::jeffreys; break;
    }
    spec.domain = ratio_safe_interval();
    return spec;
  }

  /// Functions whose n-th derivative has a fixed sign on the sampled interval.
  GeneratorSpec definite_function() {
    GeneratorSpec spec;
    switch (integer(0, 5)) {
      case 0:
        spec.kind = GeneratorKind::exp;
        spec.domain = interval_within(-2.0, 2.0, 0.1);
        return spec;
      case 1:
        spec.kind = GeneratorKind::power;
        // Non-integer exponents keep every falling factorial non-zero.
        spec.exponent = std::floor(uniform(-2.0, 6.0)) + uniform(0.2, 0.8);
        spec.domain = ratio_safe_interval();
        return spec;
      case 2: spec.kind = GeneratorKind::kl; break;
      case 3: spec.kind = GeneratorKind::hellinger; break;
      case 4: spec.kind = GeneratorKind::harmonic; break;
      default: spec.kind = GeneratorKind::jeffreys; break;
    }
    spec.domain = ratio_safe_interval();
    return spec;
  }

 private:
  std::mt19937_64 rng_;
};

/// f restricted to derivatives up to `order`.
inline FunctionModel with_max_order(const FunctionModel& f, int order) {
  return FunctionModel([f](double t) { return f(t); },
                       [f](int k, double t) { return f.derivative(k, t); }, f.domain(), order,
                       f.name());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Identity audit.

struct IdentityAuditConfig {
  std::uint64_t seed = 42;
  int cases = 200;
  int n_min = 3;
  int n_max = 7;
  int max_points = 20;
  // Only polynomials of degree <= n-1, for which the remainder vanishes.
  bool polynomial_only = false;
  // Extra cases whose n exceeds the function's derivative order.
  int unsupported_cases = 0;
  double tolerance = 1e-9;
};

struct AuditFailure {
  int index = 0;
  std::string check;
  std::string function;
  int n = 0;
  std::optional<int> m;
  double lr = 0.0;
  double value = 0.0;
  std::string detail;
};

struct AuditReport {
  std::string suite;
  std::uint64_t seed = 0;
  int cases = 0;
  int evaluated = 0;
  int skipped = 0;
  int tight = 0;
  // Brackets: cases whose bound differs from LR by more than the tolerance,
  // i.e. those a wrong orientation must be caught on.
  int detectable = 0;
  std::vector<AuditFailure> failures;
  // Identities: max |lr - terms - remainder| / (1 + |lr|).
  // Brackets: max amount by which lr leaves a bound, relative to 1 + |lr|.
  // Delegation: max direct/delegated discrepancy.
  double max_residual = 0.0;

  bool passed() const { return failures.empty(); }
};

/// Checks LR = sum of terms + remainder for both expansions on random
/// configurations.
inline AuditReport audit_identities(const IdentityAuditConfig& config = {}) {
  AuditReport report;
  report.suite = config.polynomial_only ? "identities-polynomial" : "identities";
  report.seed = config.seed;
  detail::CaseSampler sampler(config.seed);
  const int total = config.cases + config.unsupported_cases;
  for (int index = 0; index < total; ++index) {
    const bool unsupported = index >= config.cases;
    const int n = sampler.integer(config.n_min, config.n_max);
    const int m = sampler.integer(1, n - 1);
    GeneratorSpec spec = config.polynomial_only
                             ? sampler.polynomial(sampler.integer(0, n - 1),
                                                  sampler.interval_within(-1.5, 1.5, 0.1))
                             : sampler.any_function();
    FunctionModel f = make_generator(spec);
    if (unsupported) f = detail::with_max_order(f, sampler.integer(0, n - 1));
    const DiscreteFunctional A = sampler.functional(spec.domain, config.max_points);
    ++report.cases;
    if (f.max_order() < n) {
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    const Decomposition parts[] = {decompose_lemma21(f, A, n, m), decompose_lemma22(f, A, n, m)};
    const char* names[] = {"lemma21", "lemma22"};
    for (int which = 0; which < 2; ++which) {
      const auto& dec = parts[which];
      const double normalized = dec.residual() / (1.0 + std::abs(dec.lr));
      report.max_residual = std::max(report.max_residual, normalized);
      if (!(normalized <= config.tolerance)) {
        report.failures.push_back({index, names[which], spec.name(), n, m, dec.lr,
                                   dec.terms_sum() + dec.remainder,
                                   "residual " + std::to_string(dec.residual())});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Bracket audit.

struct BracketAuditConfig {
  std::uint64_t seed = 42;
  int cases_per_theorem = 100;
  // Additional cases per theorem with polynomials of degree <= n-1.
  int polynomial_cases_per_theorem = 10;
  int certification_samples = 200;
  int max_points = 20;
  // Mirror every report's orientation before checking it, as a dispatcher
  // that took the wrong parity branch would. Expected to produce violations.
  bool inject_wrong_parity = false;
};

namespace detail {

inline void pick_n_m(Theorem theorem, CaseSampler& s, int& n, int& m) {
  switch (theorem) {
    case Theorem::tm21:
    case Theorem::tm22:
      n = s.integer(4, 7);
      m = s.integer(3, n - 1);
      return;
    case Theorem::cor21:
      n = s.coin(0.5) ? 5 : 7;
      m = s.integer(3, n - 1);
      return;
    case Theorem::tm23:
    case Theorem::tm24:
      n = s.integer(3, 7);
      m = 1;
      return;
  }
}

inline BoundReport mirrored(BoundReport r) {
  std::swap(r.lower, r.upper);
  std::swap(r.lower_terms, r.upper_terms);
  r.reversed = !r.reversed;
  return r;
}

inline double excess(const BoundReport& r) {
  double e = 0.0;
  if (r.lower) e = std::max(e, *r.lower - r.lr);
  if (r.upper) e = std::max(e, r.lr - *r.upper);
  return e / (1.0 + std::abs(r.lr));
}

}  // namespace detail

inline constexpr Theorem kAllTheorems[] = {Theorem::tm21, Theorem::tm22, Theorem::cor21,
                                           Theorem::tm23, Theorem::tm24};

/// Evaluates every theorem on random configurations whose convexity is
/// certified by sampling and checks that LR lies on the reported side(s).
/// Polynomials of degree <= n-1 must give equality ("tight").
inline AuditReport audit_brackets(const BracketAuditConfig& config = {}) {
  AuditReport report;
  report.suite = config.inject_wrong_parity ? "brackets-injected" : "brackets";
  report.seed = config.seed;
  detail::CaseSampler sampler(config.seed);
  int index = 0;
  for (Theorem theorem : kAllTheorems) {
    int done = 0;
    while (done < config.cases_per_theorem) {
      int n = 0;
      int m = 0;
      detail::pick_n_m(theorem, sampler, n, m);
      const GeneratorSpec spec = sampler.definite_function();
      FunctionModel f = make_generator(spec);
      if (sampler.coin(0.5)) f = f.negated();
      const auto cert = certify_convexity(f, n, config.certification_samples, sampler.next_seed());
      const DiscreteFunctional A = sampler.functional(spec.domain, config.max_points);
      ++report.cases;
      if (cert.verdict == ConvexityVerdict::indefinite) {
        ++report.skipped;
        continue;
      }
      ++done;
      ++report.evaluated;
      const Convexity c =
          cert.verdict == ConvexityVerdict::convex ? Convexity::convex : Convexity::concave;
      BoundReport r = evaluate_bound(theorem, f, A, n, m, c);
      if (config.inject_wrong_parity) r = detail::mirrored(r);
      const double tol = BoundReport::tolerance(r.lr);
      if ((r.lower && std::abs(*r.lower - r.lr) > tol) ||
          (r.upper && std::abs(*r.upper - r.lr) > tol)) {
        ++report.detectable;
      }
      const double e = detail::excess(r);
      report.max_residual = std::max(report.max_residual, e);
      if (!r.direction_valid || !r.holds()) {
        report.failures.push_back(
            {index, std::string(to_string(theorem)), f.name(), n,
             theorem == Theorem::tm23 || theorem == Theorem::tm24 ? std::nullopt
                                                                  : std::optional<int>(m),
             r.lr, r.lower ? *r.lower : *r.upper,
             std::string(to_string(c)) + (r.direction_valid ? "" : ", direction invalid") +
                 ", excess " + std::to_string(e)});
      }
      ++index;
    }
    for (int k = 0; k < config.polynomial_cases_per_theorem; ++k, ++index) {
      int n = 0;
      int m = 0;
      detail::pick_n_m(theorem, sampler, n, m);
      const GeneratorSpec spec =
          sampler.polynomial(sampler.integer(0, n - 1), sampler.interval_within(-1.5, 1.5, 0.1));
      const FunctionModel f = make_generator(spec);
      const DiscreteFunctional A = sampler.functional(spec.domain, config.max_points);
      const Convexity c =
          classify(spec, n) == ConvexityVerdict::concave ? Convexity::concave : Convexity::convex;
      ++report.cases;
      ++report.evaluated;
      const BoundReport r = evaluate_bound(theorem, f, A, n, m, c);
      const double tol = BoundReport::tolerance(r.lr);
      const bool tight = (!r.lower || std::abs(*r.lower - r.lr) <= tol) &&
                         (!r.upper || std::abs(*r.upper - r.lr) <= tol);
      if (tight) {
        ++report.tight;
      } else {
        report.failures.push_back({index, std::string(to_string(theorem)) + "-tight", f.name(),
                                   n, m, r.lr, r.lower ? *r.lower : *r.upper,
                                   "polynomial of degree <= n-1 is not tight"});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Delegation audit.

struct DelegationAuditConfig {
  std::uint64_t seed = 42;
  int cases = 200;
  int max_size = 20;
};

/// Random probability pairs: every theorem evaluated through the functional
/// and through the closed p, q formulas. A disagreement beyond 1e-12 is a
/// failure.
inline AuditReport audit_delegation(const DelegationAuditConfig& config = {}) {
  AuditReport report;
  report.suite = "delegation";
  report.seed = config.seed;
  detail::CaseSampler sampler(config.seed);
  for (int index = 0; index < config.cases; ++index) {
    const int r = sampler.integer(2, config.max_size);
    std::vector<double> p(static_cast<std::size_t>(r));
    std::vector<double> q(static_cast<std::size_t>(r));
    double sp = 0.0;
    double sq = 0.0;
    for (int i = 0; i < r; ++i) {
      p[i] = sampler.uniform(0.05, 1.0);
      q[i] = sampler.uniform(0.05, 1.0);
      sp += p[i];
      sq += q[i];
    }
    for (double& x : p) x /= sp;
    for (double& x : q) x /= sq;
    const ProbabilityVector pv(p);
    const ProbabilityVector qv(q);
    const RatioRange ratios = ratio_range(pv, qv);
    const Theorem theorem = kAllTheorems[sampler.integer(0, 4)];
    int n = 0;
    int m = 0;
    detail::pick_n_m(theorem, sampler, n, m);
    GeneratorSpec spec = sampler.definite_function();
    if (spec.kind == GeneratorKind::exp) spec.kind = GeneratorKind::kl;
    spec.domain = ratios.interval();
    const FunctionModel f = make_generator(spec);
    const ConvexityVerdict v = classify(spec, n);
    const Convexity c = v == ConvexityVerdict::concave ? Convexity::concave : Convexity::convex;
    ++report.cases;
    try {
      const auto out = divergence_bounds(f, pv, qv, n, m, theorem, c);
      ++report.evaluated;
      report.max_residual = std::max(report.max_residual, out.delegation_discrepancy);
      if (out.report.direction_valid && !out.report.holds()) {
        report.failures.push_back({index, std::string(to_string(theorem)), f.name(), n, m,
                                   out.report.lr, 0.0, "bracket violated"});
      }
    } catch (const ConsistencyError& e) {
      ++report.evaluated;
      report.failures.push_back({index, std::string(to_string(theorem)), f.name(), n, m, 0.0,
                                 0.0, e.what()});
    }
  }
  return report;
}

}  // namespace elr
