#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elr/divided_diff.hpp"
#include "elr/function_model.hpp"
#include "elr/functional.hpp"

namespace elr {

enum class Convexity { convex, concave };
enum class Theorem { tm21, tm22, cor21, tm23, tm24 };
enum class Side { lower, upper };

inline std::string_view to_string(Convexity c) {
  return c == Convexity::convex ? "n-convex" : "n-concave";
}

inline std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::tm21: return "TM21";
    case Theorem::tm22: return "TM22";
    case Theorem::cor21: return "COR21";
    case Theorem::tm23: return "TM23";
    case Theorem::tm24: return "TM24";
  }
  return "?";
}

inline std::optional<Theorem> parse_theorem(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "tm21") return Theorem::tm21;
  if (lower == "tm22") return Theorem::tm22;
  if (lower == "cor21") return Theorem::cor21;
  if (lower == "tm23") return Theorem::tm23;
  if (lower == "tm24") return Theorem::tm24;
  return std::nullopt;
}

inline Convexity flip(Convexity c) {
  return c == Convexity::convex ? Convexity::concave : Convexity::convex;
}

/// One summand coefficient * weight of a decomposition. `weight` is the
/// functional-side factor, usually a mixed moment.
struct Term {
  std::string label;
  int k = 0;
  double coefficient = 0.0;
  double weight = 0.0;
  double value = 0.0;
  int degree = 0;  // total degree of the moment in `weight`
};

inline double sum_terms(const std::vector<Term>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += t.value;
  return s;
}

struct Decomposition {
  std::vector<Term> terms;
  double remainder = 0.0;
  double lr = 0.0;

  double terms_sum() const { return sum_terms(terms); }
  double residual() const { return std::abs(lr - terms_sum() - remainder); }
};

struct ParityCase {
  int n = 3;
  std::optional<int> m;
  Convexity convexity = Convexity::convex;
};

struct BoundReport {
  double lr = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  Theorem theorem = Theorem::tm23;
  ParityCase parity_case;
  bool direction_valid = false;
  // Set when the theorem's reversed-sign case applies, so that the
  // expression printed as the lower side in the statement bounds from above.
  bool reversed = false;
  std::vector<Term> lower_terms;
  std::vector<Term> upper_terms;

  static double tolerance(double lr) { return 1e-9 * (1.0 + std::abs(lr)); }

  bool lower_holds(double tol) const { return !lower || *lower <= lr + tol; }
  bool upper_holds(double tol) const { return !upper || lr <= *upper + tol; }
  bool holds() const {
    const double tol = tolerance(lr);
    return lower_holds(tol) && upper_holds(tol);
  }
};

// ---------------------------------------------------------------------------
// Direction dispatch.
//
// Each row states, for a theorem, which side the displayed expression(s)
// bound LR on. For single-bound theorems `side` is the side of the bound; for
// brackets `side` is the side of the expression the statement lists first
// (lower in the normal case).

struct DispatchRow {
  Convexity convexity;
  bool parity_flag;
  Side side;
};

/// TM21: parity_flag = "n and m are of different parity".
inline constexpr std::array<DispatchRow, 4> kTm21Dispatch{{
    {Convexity::convex, true, Side::upper},
    {Convexity::concave, false, Side::upper},
    {Convexity::convex, false, Side::lower},
    {Convexity::concave, true, Side::lower},
}};

/// TM22: parity_flag = "m is odd".
inline constexpr std::array<DispatchRow, 4> kTm22Dispatch{{
    {Convexity::convex, true, Side::upper},
    {Convexity::concave, false, Side::upper},
    {Convexity::convex, false, Side::lower},
    {Convexity::concave, true, Side::lower},
}};

/// COR21 (n odd): parity_flag = "m is odd"; side of the expression about a.
inline constexpr std::array<DispatchRow, 4> kCor21Dispatch{{
    {Convexity::convex, true, Side::lower},
    {Convexity::concave, false, Side::lower},
    {Convexity::convex, false, Side::upper},
    {Convexity::concave, true, Side::upper},
}};

/// TM23: parity_flag = "n is odd"; side of the m = 1 expression.
inline constexpr std::array<DispatchRow, 4> kTm23Dispatch{{
    {Convexity::convex, true, Side::lower},
    {Convexity::concave, false, Side::lower},
    {Convexity::convex, false, Side::upper},
    {Convexity::concave, true, Side::upper},
}};

/// TM24: no parity dependence; side of the f[b,b;a...] expression.
inline constexpr std::array<DispatchRow, 4> kTm24Dispatch{{
    {Convexity::convex, true, Side::lower},
    {Convexity::convex, false, Side::lower},
    {Convexity::concave, true, Side::upper},
    {Convexity::concave, false, Side::upper},
}};

inline Side dispatch(const std::array<DispatchRow, 4>& table, Convexity c, bool flag) {
  for (const auto& row : table) {
    if (row.convexity == c && row.parity_flag == flag) return row.side;
  }
  throw std::logic_error("dispatch table is incomplete");
}

namespace detail {

inline void check_bound_args(const FunctionModel& f, const DiscreteFunctional& A, int n,
                             int m) {
  if (n < 2) throw PreconditionError("n must be at least 2");
  if (m < 1 || m > n - 1) {
    throw PreconditionError("m must satisfy 1 <= m <= n-1, got m=" + std::to_string(m) +
                            ", n=" + std::to_string(n));
  }
  if (f.max_order() < n) {
    throw PreconditionError("derivative order insufficient: " + f.name() +
                            " provides " + std::to_string(f.max_order()) +
                            ", n = " + std::to_string(n));
  }
  if (!f.domain().contains(A.interval())) {
    throw PreconditionError("functional interval exceeds the domain of " + f.name());
  }
}

inline std::string dd_label(char first, int first_count, char second, int second_count) {
  return "f[" + std::string(1, first) + "x" + std::to_string(first_count) + ";" +
         std::string(1, second) + "x" + std::to_string(second_count) + "]";
}

inline std::string moment_label(char first, int j, char second, int k) {
  return "A[(g-" + std::string(1, first) + ")^" + std::to_string(j) + "(g-" +
         std::string(1, second) + ")^" + std::to_string(k) + "]";
}

inline Term make_term(std::string label, int k, double coefficient, double weight, int degree) {
  return Term{std::move(label), k, coefficient, weight, coefficient * weight, degree};
}

/// Summands of the (m, n-m) expansion of LR about a (about_a) or about b:
/// p is the node carrying multiplicity m, q the other endpoint.
inline std::vector<Term> expansion_terms(const FunctionModel& f,
                                         const DiscreteFunctional& A, int n, int m,
                                         bool about_a) {
  const double a = A.a();
  const double b = A.b();
  const double p = about_a ? a : b;
  const double q = about_a ? b : a;
  const char pn = about_a ? 'a' : 'b';
  const char qn = about_a ? 'b' : 'a';
  // A[(g-p)^j (g-q)^k]
  auto pq_moment = [&](int j, int k) {
    return about_a ? A.moment(j, k) : A.moment(k, j);
  };
  auto dd = [&](int mp, int mq) {
    return divided_difference(f, NodeMultiset::two_point(p, mp, q, mq));
  };

  std::vector<Term> terms;
  if (m == 1) {
    for (int k = 2; k <= n - 1; ++k) {
      terms.push_back(make_term(dd_label(pn, 1, qn, k) + "*" + moment_label(pn, 1, qn, k - 1),
                                k, dd(1, k), pq_moment(1, k - 1), k));
    }
    return terms;
  }
  if (m == 2) {
    terms.push_back(make_term(dd_label(pn, 2, qn, 1) + "*" + moment_label(pn, 1, qn, 1), 1,
                              dd(2, 1), pq_moment(1, 1), 2));
    for (int k = 2; k <= n - 2; ++k) {
      terms.push_back(make_term(dd_label(pn, 2, qn, k) + "*" + moment_label(pn, 2, qn, k - 1),
                                k, dd(2, k), pq_moment(2, k - 1), k + 1));
    }
    return terms;
  }
  // m >= 3: (A(g) - p)(f[p,p] - f[a,b]) + Taylor terms at p + mixed terms.
  const double fab = divided_difference(f, NodeMultiset::two_point(a, 1, b, 1));
  terms.push_back(make_term("(f[" + std::string(1, pn) + "x2]-f[a,b])*(A(g)-" +
                                std::string(1, pn) + ")",
                            1, dd(2, 0) - fab, pq_moment(1, 0), 1));
  for (int k = 2; k <= m - 1; ++k) {
    terms.push_back(make_term("f^(" + std::to_string(k) + ")(" + std::string(1, pn) + ")/" +
                                  std::to_string(k) + "!*" + moment_label(pn, k, qn, 0),
                              k, dd(k + 1, 0), pq_moment(k, 0), k));
  }
  for (int k = 1; k <= n - m; ++k) {
    terms.push_back(make_term(dd_label(pn, m, qn, k) + "*" + moment_label(pn, m, qn, k - 1),
                              k, dd(m, k), pq_moment(m, k - 1), m + k - 1));
  }
  return terms;
}

}  // namespace detail

/// Summands of the expansion about a, without remainder.
inline std::vector<Term> lemma21_terms(const FunctionModel& f, const DiscreteFunctional& A,
                                       int n, int m) {
  detail::check_bound_args(f, A, n, m);
  return detail::expansion_terms(f, A, n, m, true);
}

/// Summands of the expansion about b, without remainder.
inline std::vector<Term> lemma22_terms(const FunctionModel& f, const DiscreteFunctional& A,
                                       int n, int m) {
  detail::check_bound_args(f, A, n, m);
  return detail::expansion_terms(f, A, n, m, false);
}

/// LR = sum of terms + A(R_m(g))
inline Decomposition decompose_lemma21(const FunctionModel& f, const DiscreteFunctional& A,
                                       int n, int m) {
  Decomposition out;
  out.terms = lemma21_terms(f, A, n, m);
  out.remainder =
      A.apply([&](double t) { return remainder_R(f, A.a(), A.b(), m, n, t); });
  out.lr = lr_difference(f, A);
  return out;
}

/// LR = sum of terms + A(R*_m(g))
inline Decomposition decompose_lemma22(const FunctionModel& f, const DiscreteFunctional& A,
                                       int n, int m) {
  Decomposition out;
  out.terms = lemma22_terms(f, A, n, m);
  out.remainder =
      A.apply([&](double t) { return remainder_Rstar(f, A.a(), A.b(), m, n, t); });
  out.lr = lr_difference(f, A);
  return out;
}

namespace detail {

inline void place(BoundReport& r, Side side, std::vector<Term> terms) {
  const double value = sum_terms(terms);
  if (side == Side::lower) {
    r.lower = value;
    r.lower_terms = std::move(terms);
  } else {
    r.upper = value;
    r.upper_terms = std::move(terms);
  }
}

inline Side other(Side s) { return s == Side::lower ? Side::upper : Side::lower; }

inline void require_m_at_least_3(int m) {
  if (m < 3) throw PreconditionError("this bound requires m >= 3, got m=" + std::to_string(m));
}

}  // namespace detail

/// Single bound from the expansion about a, m >= 3.
inline BoundReport bound_tm21(const FunctionModel& f, const DiscreteFunctional& A, int n,
                              int m, Convexity convexity) {
  detail::require_m_at_least_3(m);
  auto terms = lemma21_terms(f, A, n, m);
  BoundReport r;
  r.theorem = Theorem::tm21;
  r.parity_case = {n, m, convexity};
  r.lr = lr_difference(f, A);
  const bool different_parity = (n - m) % 2 != 0;
  const Side side = dispatch(kTm21Dispatch, convexity, different_parity);
  r.reversed = side == Side::lower;
  detail::place(r, side, std::move(terms));
  r.direction_valid = true;
  return r;
}

/// Single bound from the expansion about b, m >= 3.
inline BoundReport bound_tm22(const FunctionModel& f, const DiscreteFunctional& A, int n,
                              int m, Convexity convexity) {
  detail::require_m_at_least_3(m);
  auto terms = lemma22_terms(f, A, n, m);
  BoundReport r;
  r.theorem = Theorem::tm22;
  r.parity_case = {n, m, convexity};
  r.lr = lr_difference(f, A);
  const Side side = dispatch(kTm22Dispatch, convexity, m % 2 != 0);
  r.reversed = side == Side::lower;
  detail::place(r, side, std::move(terms));
  r.direction_valid = true;
  return r;
}

/// Two-sided bracket combining the TM21 and TM22 expressions; only valid for
/// odd n.
inline BoundReport bracket_cor21(const FunctionModel& f, const DiscreteFunctional& A, int n,
                                 int m, Convexity convexity) {
  detail::require_m_at_least_3(m);
  auto from_a = lemma21_terms(f, A, n, m);
  auto from_b = lemma22_terms(f, A, n, m);
  BoundReport r;
  r.theorem = Theorem::cor21;
  r.parity_case = {n, m, convexity};
  r.lr = lr_difference(f, A);
  if (n % 2 == 0) {
    detail::place(r, Side::lower, std::move(from_a));
    detail::place(r, Side::upper, std::move(from_b));
    r.direction_valid = false;
    return r;
  }
  const Side side_a = dispatch(kCor21Dispatch, convexity, m % 2 != 0);
  r.reversed = side_a == Side::upper;
  detail::place(r, side_a, std::move(from_a));
  detail::place(r, detail::other(side_a), std::move(from_b));
  r.direction_valid = true;
  return r;
}

/// Bracket from the (1, n-1) and (2, n-2) expansions about a.
inline BoundReport bracket_tm23(const FunctionModel& f, const DiscreteFunctional& A, int n,
                                Convexity convexity) {
  if (n < 3) throw PreconditionError("bracket_tm23 requires n >= 3");
  auto first = lemma21_terms(f, A, n, 1);
  auto second = lemma21_terms(f, A, n, 2);
  BoundReport r;
  r.theorem = Theorem::tm23;
  r.parity_case = {n, std::nullopt, convexity};
  r.lr = lr_difference(f, A);
  const Side side_first = dispatch(kTm23Dispatch, convexity, n % 2 != 0);
  r.reversed = side_first == Side::upper;
  detail::place(r, side_first, std::move(first));
  detail::place(r, detail::other(side_first), std::move(second));
  r.direction_valid = true;
  return r;
}

/// Bracket from the (2, n-2) and (1, n-1) expansions about b; no parity
/// restriction on n.
inline BoundReport bracket_tm24(const FunctionModel& f, const DiscreteFunctional& A, int n,
                                Convexity convexity) {
  if (n < 3) throw PreconditionError("bracket_tm24 requires n >= 3");
  auto second = lemma22_terms(f, A, n, 2);
  auto first = lemma22_terms(f, A, n, 1);
  BoundReport r;
  r.theorem = Theorem::tm24;
  r.parity_case = {n, std::nullopt, convexity};
  r.lr = lr_difference(f, A);
  const Side side_second = dispatch(kTm24Dispatch, convexity, n % 2 != 0);
  r.reversed = side_second == Side::upper;
  detail::place(r, side_second, std::move(second));
  detail::place(r, detail::other(side_second), std::move(first));
  r.direction_valid = true;
  return r;
}

/// Dispatches on the theorem tag. `m` is ignored by TM23 and TM24.
inline BoundReport evaluate_bound(Theorem theorem, const FunctionModel& f,
                                  const DiscreteFunctional& A, int n, int m,
                                  Convexity convexity) {
  switch (theorem) {
    case Theorem::tm21: return bound_tm21(f, A, n, m, convexity);
    case Theorem::tm22: return bound_tm22(f, A, n, m, convexity);
    case Theorem::cor21: return bracket_cor21(f, A, n, m, convexity);
    case Theorem::tm23: return bracket_tm23(f, A, n, convexity);
    case Theorem::tm24: return bracket_tm24(f, A, n, convexity);
  }
  throw std::logic_error("unknown theorem");
}

/// The n = 3 bracket in closed form next to its algorithmic counterparts.
///
/// `printed_upper` is the upper side written with f[b,b;a] where f[a,a;b]
/// belongs, which makes it coincide with the lower side; `corrected_upper`
/// uses f[a,a;b] = (f[a,b] - f'(a)) / (b - a). Orientation is the convex one.
struct N3ClosedForm {
  double lower = 0.0;
  double upper = 0.0;
  double printed_upper = 0.0;
  double corrected_upper = 0.0;
  double algorithmic_lower = 0.0;
};

inline N3ClosedForm n3_closed_form(const FunctionModel& f, const DiscreteFunctional& A) {
  if (f.max_order() < 3) throw PreconditionError("n3_closed_form needs max_order >= 3");
  const double a = A.a();
  const double b = A.b();
  const double mixed = A.moment(1, 1);
  const double chord_slope = (f(b) - f(a)) / (b - a);
  N3ClosedForm out;
  out.lower = mixed / (b - a) * (f.derivative(1, b) - chord_slope);
  out.printed_upper = out.lower;
  out.corrected_upper = mixed / (b - a) * (chord_slope - f.derivative(1, a));
  const auto bracket = bracket_tm23(f, A, 3, Convexity::convex);
  out.algorithmic_lower = *bracket.lower;
  out.upper = *bracket.upper;
  return out;
}

}  // namespace elr
