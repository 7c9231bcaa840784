#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "elr/function_model.hpp"

namespace elr {

/// Highest derivative order the built-in generators expose. Beyond this the
/// factorial growth swamps double precision.
inline constexpr int kMaxGeneratorOrder = 12;

enum class ConvexityVerdict { convex, concave, indefinite };

inline std::string_view to_string(ConvexityVerdict v) {
  switch (v) {
    case ConvexityVerdict::convex: return "n-convex";
    case ConvexityVerdict::concave: return "n-concave";
    case ConvexityVerdict::indefinite: return "indefinite";
  }
  return "?";
}

inline ConvexityVerdict mirror(ConvexityVerdict v) {
  switch (v) {
    case ConvexityVerdict::convex: return ConvexityVerdict::concave;
    case ConvexityVerdict::concave: return ConvexityVerdict::convex;
    default: return v;
  }
}

enum class GeneratorKind { kl, hellinger, harmonic, jeffreys, poly, exp, power };

/// A named generating function on a domain.
///
/// kl, hellinger, harmonic and jeffreys are the divergence generators; exp,
/// power and poly are general-purpose test functions.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::exp;
  std::vector<double> coeffs;  // poly: c0 + c1 t + ...
  double exponent = 1.0;       // power: t^exponent
  Interval domain{0.5, 2.0};

  std::string name() const {
    switch (kind) {
      case GeneratorKind::kl: return "kl";
      case GeneratorKind::hellinger: return "hellinger";
      case GeneratorKind::harmonic: return "harmonic";
      case GeneratorKind::jeffreys: return "jeffreys";
      case GeneratorKind::exp: return "exp";
      case GeneratorKind::power: {
        std::ostringstream os;
        os.precision(17);
        os << "power:" << exponent;
        return os.str();
      }
      case GeneratorKind::poly: {
        std::ostringstream os;
        os.precision(17);
        os << "poly:";
        for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? "," : "") << coeffs[i];
        return os.str();
      }
    }
    return "?";
  }
};

/// Parses kl | hellinger | harmonic | jeffreys | exp | poly:c0,c1,... | power:p
inline GeneratorSpec parse_generator(std::string_view text, Interval domain) {
  GeneratorSpec spec;
  spec.domain = domain;
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  const std::string tail = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw PreconditionError("function: cannot parse number '" + s + "' in '" +
                              std::string(text) + "'");
    }
    return v;
  };
  if (head == "kl") {
    spec.kind = GeneratorKind::kl;
  } else if (head == "hellinger") {
    spec.kind = GeneratorKind::hellinger;
  } else if (head == "harmonic") {
    spec.kind = GeneratorKind::harmonic;
  } else if (head == "jeffreys") {
    spec.kind = GeneratorKind::jeffreys;
  } else if (head == "exp") {
    spec.kind = GeneratorKind::exp;
  } else if (head == "power") {
    spec.kind = GeneratorKind::power;
    spec.exponent = number(tail);
  } else if (head == "poly") {
    spec.kind = GeneratorKind::poly;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) spec.coeffs.push_back(number(item));
    if (spec.coeffs.empty()) throw PreconditionError("function: poly needs coefficients");
  } else {
    throw PreconditionError("function: unknown generator '" + std::string(text) + "'");
  }
  if (colon != std::string_view::npos && spec.kind != GeneratorKind::power &&
      spec.kind != GeneratorKind::poly) {
    throw PreconditionError("function: '" + head + "' takes no parameters");
  }
  return spec;
}

namespace detail {

inline double horner(const std::vector<double>& c, double t) {
  double out = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) out = out * t + c[i];
  return out;
}

inline std::vector<double> poly_derivative(const std::vector<double>& c, int k) {
  std::vector<double> out = c;
  for (int step = 0; step < k; ++step) {
    if (out.size() <= 1) return {0.0};
    std::vector<double> next(out.size() - 1);
    for (std::size_t i = 1; i < out.size(); ++i) next[i - 1] = out[i] * static_cast<double>(i);
    out = std::move(next);
  }
  return out;
}

// p (p-1) ... (p-k+1)
inline double falling_factorial(double p, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= p - i;
  return out;
}

// (2k-3)!! for k >= 2
inline double odd_double_factorial(int k) {
  double out = 1.0;
  for (int i = 2 * k - 3; i > 1; i -= 2) out *= i;
  return out;
}

inline double sign_power(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

/// Roots of the polynomial c inside [lo, hi], found by isolating monotone
/// pieces between the critical points and bisecting sign changes.
inline std::vector<double> poly_roots_in(const std::vector<double>& c, double lo, double hi) {
  std::vector<double> trimmed = c;
  while (trimmed.size() > 1 && trimmed.back() == 0.0) trimmed.pop_back();
  if (trimmed.size() <= 1) return {};
  std::vector<double> breaks{lo};
  for (double r : poly_roots_in(poly_derivative(trimmed, 1), lo, hi)) breaks.push_back(r);
  breaks.push_back(hi);
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double l = breaks[i];
    double r = breaks[i + 1];
    double fl = horner(trimmed, l);
    double fr = horner(trimmed, r);
    if (fl == 0.0) {
      roots.push_back(l);
      continue;
    }
    if ((fl < 0.0) == (fr < 0.0) || fr == 0.0) continue;
    for (int it = 0; it < 200 && r - l > 0.0; ++it) {
      const double mid = 0.5 * (l + r);
      if (mid == l || mid == r) break;
      const double fm = horner(trimmed, mid);
      if ((fm < 0.0) == (fl < 0.0)) {
        l = mid;
        fl = fm;
      } else {
        r = mid;
      }
    }
    roots.push_back(0.5 * (l + r));
  }
  if (horner(trimmed, hi) == 0.0) roots.push_back(hi);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

inline ConvexityVerdict verdict_from_sign(double s) {
  return s >= 0.0 ? ConvexityVerdict::convex : ConvexityVerdict::concave;
}

}  // namespace detail

inline void check_generator_domain(const GeneratorSpec& spec) {
  const auto& d = spec.domain;
  switch (spec.kind) {
    case GeneratorKind::kl:
    case GeneratorKind::hellinger:
    case GeneratorKind::jeffreys:
    case GeneratorKind::power:
      if (!(d.lower > 0.0)) {
        throw PreconditionError(spec.name() + " is only defined for t > 0");
      }
      break;
    case GeneratorKind::harmonic:
      if (d.contains(-1.0)) throw PreconditionError("harmonic is undefined at t = -1");
      break;
    default: break;
  }
}

/// Builds the function model with closed-form derivatives up to order 12.
inline FunctionModel make_generator(const GeneratorSpec& spec) {
  check_generator_domain(spec);
  using detail::sign_power;
  const std::string name = spec.name();
  const int order = kMaxGeneratorOrder;
  const double inf = std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case GeneratorKind::kl:
      return FunctionModel(
                 [](double t) { return t * std::log(t); },
                 [](int k, double t) {
                   if (k == 1) return std::log(t) + 1.0;
                   return sign_power(k) * factorial(k - 2) * std::pow(t, -(k - 1));
                 },
                 spec.domain, order, name)
          .with_limits(0.0, inf);
    case GeneratorKind::hellinger:
      return FunctionModel(
                 [](double t) {
                   const double d = 1.0 - std::sqrt(t);
                   return 0.5 * d * d;
                 },
                 [](int k, double t) {
                   if (k == 1) return (std::sqrt(t) - 1.0) / (2.0 * std::sqrt(t));
                   return sign_power(k) * detail::odd_double_factorial(k) /
                          std::ldexp(1.0, k) * std::pow(t, -(2.0 * k - 1.0) / 2.0);
                 },
                 spec.domain, order, name)
          .with_limits(0.5, 0.5);
    case GeneratorKind::harmonic:
      return FunctionModel(
                 [](double t) { return 2.0 * t / (1.0 + t); },
                 [](int k, double t) {
                   return 2.0 * sign_power(k + 1) * factorial(k) * std::pow(1.0 + t, -(k + 1));
                 },
                 spec.domain, order, name)
          .with_limits(0.0, 0.0);
    case GeneratorKind::jeffreys:
      return FunctionModel(
                 [](double t) { return (1.0 - t) * std::log(1.0 / t); },
                 [](int k, double t) {
                   if (k == 1) return std::log(t) + 1.0 - 1.0 / t;
                   return sign_power(k) * factorial(k - 2) * std::pow(t, -k) * (t + k - 1.0);
                 },
                 spec.domain, order, name)
          .with_limits(inf, inf);
    case GeneratorKind::exp:
      return FunctionModel([](double t) { return std::exp(t); },
                           [](int, double t) { return std::exp(t); }, spec.domain, order,
                           name);
    case GeneratorKind::power: {
      const double p = spec.exponent;
      return FunctionModel(
          [p](double t) { return std::pow(t, p); },
          [p](int k, double t) {
            return detail::falling_factorial(p, k) * std::pow(t, p - k);
          },
          spec.domain, order, name);
    }
    case GeneratorKind::poly: {
      std::vector<std::vector<double>> stack;
      for (int k = 0; k <= order; ++k) stack.push_back(detail::poly_derivative(spec.coeffs, k));
      return FunctionModel(
          [c = spec.coeffs](double t) { return detail::horner(c, t); },
          [stack](int k, double t) { return detail::horner(stack[static_cast<std::size_t>(k)], t); },
          spec.domain, order, name);
    }
  }
  throw std::logic_error("unknown generator kind");
}

/// n-convexity of the generator on its domain from the sign of f^(n).
inline ConvexityVerdict classify(const GeneratorSpec& spec, int n) {
  if (n < 1 || n > kMaxGeneratorOrder) {
    throw PreconditionError("classify requires 1 <= n <= " +
                            std::to_string(kMaxGeneratorOrder));
  }
  check_generator_domain(spec);
  const Interval& d = spec.domain;
  switch (spec.kind) {
    case GeneratorKind::kl:
    case GeneratorKind::hellinger:
    case GeneratorKind::jeffreys: {
      if (n >= 2) return detail::verdict_from_sign(detail::sign_power(n));
      // f'' > 0, so f' is increasing and its sign on [a,b] is read off the
      // endpoints.
      const auto f = make_generator(spec);
      if (f.derivative(1, d.lower) >= 0.0) return ConvexityVerdict::convex;
      if (f.derivative(1, d.upper) <= 0.0) return ConvexityVerdict::concave;
      return ConvexityVerdict::indefinite;
    }
    case GeneratorKind::harmonic:
      if (d.upper < -1.0) return ConvexityVerdict::convex;
      return detail::verdict_from_sign(detail::sign_power(n + 1));
    case GeneratorKind::exp: return ConvexityVerdict::convex;
    case GeneratorKind::power:
      return detail::verdict_from_sign(detail::falling_factorial(spec.exponent, n));
    case GeneratorKind::poly: {
      const auto dn = detail::poly_derivative(spec.coeffs, n);
      std::vector<double> candidates{d.lower, d.upper};
      for (double r : detail::poly_roots_in(detail::poly_derivative(dn, 1), d.lower, d.upper)) {
        candidates.push_back(r);
      }
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double scale = 0.0;
      for (double c : dn) scale = std::max(scale, std::abs(c));
      for (double t : candidates) {
        const double v = detail::horner(dn, t);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double tol = 1e-12 * std::max(scale, 1.0);
      if (lo >= -tol) return ConvexityVerdict::convex;
      if (hi <= tol) return ConvexityVerdict::concave;
      return ConvexityVerdict::indefinite;
    }
  }
  return ConvexityVerdict::indefinite;
}

}  // namespace elr
