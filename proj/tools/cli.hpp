#pragma once

#include <cstdint>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elr/elr.hpp"

namespace elr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitViolation = 2;

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError(field, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw InputError(field, "expected a comma-separated list of numbers");
  return out;
}

inline Interval parse_interval(const std::string& text) {
  const auto v = parse_list(text, "interval");
  if (v.size() != 2) throw InputError("interval", "expected a,b");
  try {
    return Interval(v[0], v[1]);
  } catch (const PreconditionError& e) {
    throw InputError("interval", e.what());
  }
}

inline ZipfMandelbrotParams parse_zm(const std::string& text) {
  const auto v = parse_list(text, "zm");
  if (v.size() != 3) throw InputError("zm", "expected N,q,s");
  if (v[0] != static_cast<double>(static_cast<int>(v[0]))) {
    throw InputError("zm", "N must be an integer");
  }
  ZipfMandelbrotParams p{static_cast<int>(v[0]), v[1], v[2]};
  try {
    p.validate();
  } catch (const PreconditionError& e) {
    throw InputError("zm", e.what());
  }
  return p;
}

/// Runs `fn`, relabelling precondition failures with the input field.
template <class Fn>
auto guarded(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PreconditionError& e) {
    throw InputError(field, e.what());
  }
}

inline FunctionModel build_function(const std::string& text, const Interval& domain,
                                    GeneratorSpec* spec_out = nullptr) {
  return guarded("function", [&] {
    GeneratorSpec spec = parse_generator(text, domain);
    if (spec_out) *spec_out = spec;
    return make_generator(spec);
  });
}

}  // namespace detail

/// Inputs shared by the subcommands; fields stay empty when not given.
struct RunConfig {
  std::string function;
  std::string nodes;
  std::string points;
  std::string weights;
  std::string interval;
  std::string functional_file;
  std::string theorem;
  std::optional<int> n;
  std::optional<int> m;
  std::string convexity = "auto";
  std::string p;
  std::string q;
  std::string p_file;
  std::string q_file;
  std::vector<std::string> zm;
  bool ratio_range = false;
  std::string format = "json";
  std::uint64_t seed = 42;
  int samples = 500;
  int cases = 0;
  std::string suite = "all";
  bool inject_wrong_parity = false;
};

class Runner {
 public:
  Runner(const RunConfig& c, std::ostream& out) : c_(c), out_(out) {}

  int dd() {
    require(c_.function, "function");
    require(c_.nodes, "nodes");
    const auto nodes = detail::parse_list(c_.nodes, "nodes");
    const NodeMultiset set = detail::guarded("nodes", [&] { return NodeMultiset::from_points(nodes); });
    Interval domain = c_.interval.empty() ? node_span(nodes) : detail::parse_interval(c_.interval);
    const FunctionModel f = detail::build_function(c_.function, domain);
    const double value = detail::guarded("nodes", [&] { return divided_difference(f, set); });
    const NewtonForm p = detail::guarded("nodes", [&] { return newton_interpolant(f, set); });
    if (csv()) {
      out_ << "value\n" << format_double(value) << '\n';
      return kExitOk;
    }
    emit(Json{{"function", f.name()}, {"nodes", set.flattened()}, {"value", value},
              {"newton", to_json(p)}});
    return kExitOk;
  }

  int lr() {
    require(c_.function, "function");
    const DiscreteFunctional A = functional();
    const FunctionModel f = detail::build_function(c_.function, A.interval());
    const double value = lr_difference(f, A);
    const bool decompose = c_.n.has_value() || c_.m.has_value();
    if (decompose) check_n_m(std::nullopt, 1);
    Json doc{{"function", f.name()},
             {"interval", {A.a(), A.b()}},
             {"mean", A.mean()},
             {"apply", A.apply([&](double t) { return f(t); })},
             {"chord", chord(f, A.interval(), A.mean())},
             {"lr", value}};
    if (!decompose) {
      if (csv()) {
        out_ << "lr\n" << format_double(value) << '\n';
      } else {
        emit(doc);
      }
      return kExitOk;
    }
    const auto about_a = detail::guarded("n", [&] { return decompose_lemma21(f, A, *c_.n, *c_.m); });
    const auto about_b = detail::guarded("n", [&] { return decompose_lemma22(f, A, *c_.n, *c_.m); });
    if (csv()) {
      out_ << to_csv(about_a, "about_a") << to_csv(about_b, "about_b");
      return kExitOk;
    }
    doc["n"] = *c_.n;
    doc["m"] = *c_.m;
    doc["about_a"] = to_json(about_a);
    doc["about_b"] = to_json(about_b);
    emit(doc);
    return kExitOk;
  }

  int bounds() {
    require(c_.function, "function");
    const Theorem theorem = parse_theorem_field();
    const DiscreteFunctional A = functional();
    GeneratorSpec spec;
    const FunctionModel f = detail::build_function(c_.function, A.interval(), &spec);
    check_n_m(theorem, 3);
    const Convexity conv = convexity(spec, *c_.n);
    const BoundReport r =
        detail::guarded("n", [&] { return evaluate_bound(theorem, f, A, *c_.n, m_or_1(), conv); });
    if (csv()) {
      out_ << to_csv(r);
      return kExitOk;
    }
    Json doc{{"function", f.name()}};
    doc.update(to_json(r));
    emit(doc);
    return kExitOk;
  }

  int div() {
    require(c_.function, "function");
    auto [p, q] = distributions();
    if (c_.theorem.empty()) {
      const Interval domain =
          c_.interval.empty() ? positive_ratio_span(p, q) : detail::parse_interval(c_.interval);
      const FunctionModel f = detail::build_function(c_.function, domain);
      const double d = detail::guarded("p", [&] { return f_divergence(f, p, q); });
      if (csv()) {
        out_ << "divergence\n" << format_double(d) << '\n';
      } else {
        emit(Json{{"function", f.name()}, {"divergence", d}});
      }
      return kExitOk;
    }
    return divergence_report(p, q);
  }

  int zm() {
    if (c_.zm.empty() || c_.zm.size() > 2) {
      throw InputError("zm", "give one law (pmf table) or two laws (P then Q)");
    }
    std::vector<ZipfMandelbrotParams> laws;
    for (const auto& z : c_.zm) laws.push_back(detail::parse_zm(z));
    if (laws.size() == 1) {
      const auto& P = laws.front();
      const auto table = pmf_table(P);
      if (csv()) {
        out_ << "i,pmf\n";
        for (std::size_t i = 0; i < table.size(); ++i) {
          out_ << i + 1 << ',' << format_double(table[i]) << '\n';
        }
        return kExitOk;
      }
      emit(Json{{"N", P.N}, {"q", P.q}, {"s", P.s}, {"normalizer", normalizer(P)}, {"pmf", table}});
      return kExitOk;
    }
    const auto& P = laws[0];
    const auto& Q = laws[1];
    if (P.N != Q.N) throw InputError("zm", "the two laws must share N");
    if (c_.ratio_range) {
      const RatioRange rr = ratio_extrema(P, Q);
      if (csv()) {
        out_ << "a,b\n" << format_double(rr.a) << ',' << format_double(rr.b) << '\n';
      } else {
        emit(Json{{"ratio_range", {rr.a, rr.b}}});
      }
      return kExitOk;
    }
    require(c_.function, "function");
    require(c_.theorem, "theorem");
    const ProbabilityVector p = materialize(P);
    const ProbabilityVector q = materialize(Q);
    return divergence_report(p, q);
  }

  int verify() {
    const std::uint64_t seed = effective_seed();
    std::vector<AuditReport> reports;
    std::optional<ConvexityCertificate> cert;
    const std::string& s = c_.suite;
    const bool all = s == "all";
    bool known = all;
    if (all || s == "identities") {
      known = true;
      IdentityAuditConfig cfg;
      cfg.seed = seed;
      if (c_.cases > 0) cfg.cases = c_.cases;
      reports.push_back(audit_identities(cfg));
    }
    if (all || s == "identities-polynomial") {
      known = true;
      IdentityAuditConfig cfg;
      cfg.seed = seed;
      cfg.polynomial_only = true;
      if (c_.cases > 0) cfg.cases = c_.cases;
      reports.push_back(audit_identities(cfg));
    }
    if (all || s == "brackets") {
      known = true;
      BracketAuditConfig cfg;
      cfg.seed = seed;
      cfg.inject_wrong_parity = c_.inject_wrong_parity;
      if (c_.cases > 0) cfg.cases_per_theorem = c_.cases;
      reports.push_back(audit_brackets(cfg));
    }
    if (all || s == "delegation") {
      known = true;
      DelegationAuditConfig cfg;
      cfg.seed = seed;
      if (c_.cases > 0) cfg.cases = c_.cases;
      reports.push_back(audit_delegation(cfg));
    }
    if (s == "certify") {
      known = true;
      require(c_.function, "function");
      require(c_.interval, "interval");
      if (!c_.n) throw InputError("n", "required");
      const FunctionModel f = detail::build_function(c_.function, detail::parse_interval(c_.interval));
      if (c_.samples < 1) throw InputError("samples", "must be at least 1");
      cert = detail::guarded("n", [&] { return certify_convexity(f, *c_.n, c_.samples, seed); });
    }
    if (!known) {
      throw InputError("suite", "unknown suite '" + s +
                                    "' (identities, identities-polynomial, brackets, delegation, "
                                    "certify, all)");
    }
    bool failed = false;
    for (const auto& r : reports) failed = failed || !r.passed();

    if (csv()) {
      if (cert) {
        out_ << "n,verdict,samples,min_dd,max_dd,seed\n"
             << cert->n << ',' << to_string(cert->verdict) << ',' << cert->samples << ','
             << format_double(cert->min_dd) << ',' << format_double(cert->max_dd) << ','
             << cert->seed << '\n';
      } else {
        out_ << "suite,seed,cases,evaluated,skipped,tight,failures,max_residual\n";
        for (const auto& r : reports) {
          out_ << r.suite << ',' << r.seed << ',' << r.cases << ',' << r.evaluated << ','
               << r.skipped << ',' << r.tight << ',' << r.failures.size() << ','
               << format_double(r.max_residual) << '\n';
        }
      }
    } else if (cert) {
      emit(to_json(*cert));
    } else if (reports.size() == 1) {
      emit(to_json(reports.front()));
    } else {
      Json doc = Json::array();
      for (const auto& r : reports) doc.push_back(to_json(r));
      emit(doc);
    }
    return failed ? kExitViolation : kExitOk;
  }

 private:
  const RunConfig& c_;
  std::ostream& out_;

  bool csv() const { return c_.format == "csv"; }
  void emit(const Json& doc) { out_ << doc.dump(2) << '\n'; }

  static void require(const std::string& value, const std::string& field) {
    if (value.empty()) throw InputError(field, "required");
  }

  std::uint64_t effective_seed() const {
    if (const char* env = std::getenv("ELR_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument("");
        return v;
      } catch (const std::exception&) {
        throw InputError("ELR_SEED", std::string("'") + env + "' is not an unsigned integer");
      }
    }
    return c_.seed;
  }

  static Interval node_span(const std::vector<double>& nodes) {
    const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
    if (*lo < *hi) return Interval(*lo, *hi);
    return Interval(*lo, *lo + std::max(1.0, std::abs(*lo)));
  }

  /// Range of the finite positive ratios p_i/q_i, widened when degenerate;
  /// zero entries are handled by the generator's limits instead.
  static Interval positive_ratio_span(const ProbabilityVector& p, const ProbabilityVector& q) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0 && q[i] > 0.0) {
        lo = std::min(lo, p[i] / q[i]);
        hi = std::max(hi, p[i] / q[i]);
      }
    }
    if (!(lo <= hi)) return Interval(0.5, 2.0);
    if (lo == hi) return Interval(lo / 2.0, hi * 2.0);
    return Interval(lo, hi);
  }

  DiscreteFunctional functional() const {
    if (!c_.functional_file.empty()) {
      if (!c_.points.empty() || !c_.weights.empty()) {
        throw InputError("functional-file", "cannot be combined with --points/--weights");
      }
      auto A = functional_from_json(read_text_file(c_.functional_file, "functional-file"));
      if (c_.interval.empty()) return A;
      return detail::guarded("interval", [&] {
        return DiscreteFunctional(A.points(), A.weights(), detail::parse_interval(c_.interval));
      });
    }
    require(c_.points, "points");
    require(c_.weights, "weights");
    require(c_.interval, "interval");
    auto pts = detail::parse_list(c_.points, "points");
    auto w = detail::parse_list(c_.weights, "weights");
    const Interval ab = detail::parse_interval(c_.interval);
    if (pts.size() != w.size()) {
      throw InputError("weights", "expected " + std::to_string(pts.size()) + " weights, got " +
                                      std::to_string(w.size()));
    }
    for (double x : w) {
      if (!(x >= 0.0)) throw InputError("weights", "weights must be non-negative");
    }
    for (double x : pts) {
      if (!ab.contains(x)) throw InputError("points", "point " + format_double(x) + " is outside the interval");
    }
    return detail::guarded("weights", [&] { return DiscreteFunctional(pts, w, ab); });
  }

  std::pair<ProbabilityVector, ProbabilityVector> distributions() const {
    std::optional<std::vector<double>> p;
    std::optional<std::vector<double>> q;
    if (!c_.p_file.empty()) {
      auto d = distribution_from_text(read_text_file(c_.p_file, "p-file"), "p-file");
      p = d.p;
      q = d.q;
    }
    if (!c_.q_file.empty()) {
      auto d = distribution_from_text(read_text_file(c_.q_file, "q-file"), "q-file");
      if (!d.q) throw InputError("q-file", "no q values");
      q = d.q;
      if (!p) p = d.p;
    }
    if (!c_.p.empty()) p = detail::parse_list(c_.p, "p");
    if (!c_.q.empty()) q = detail::parse_list(c_.q, "q");
    if (!p) throw InputError("p", "required (--p or --p-file)");
    if (!q) throw InputError("q", "required (--q or --q-file)");
    if (p->size() != q->size()) {
      throw InputError("q", "p has " + std::to_string(p->size()) + " entries, q has " +
                                std::to_string(q->size()));
    }
    return {detail::guarded("p", [&] { return ProbabilityVector(*p); }),
            detail::guarded("q", [&] { return ProbabilityVector(*q); })};
  }

  Theorem parse_theorem_field() const {
    require(c_.theorem, "theorem");
    const auto t = parse_theorem(c_.theorem);
    if (!t) throw InputError("theorem", "unknown theorem '" + c_.theorem + "' (tm21, tm22, cor21, tm23, tm24)");
    return *t;
  }

  /// n and m against the theorem's requirements; `min_n` applies when no
  /// theorem is involved.
  void check_n_m(std::optional<Theorem> theorem, int min_n) const {
    if (!c_.n) throw InputError("n", "required");
    const int n = *c_.n;
    const bool needs_m = !theorem || *theorem == Theorem::tm21 || *theorem == Theorem::tm22 ||
                         *theorem == Theorem::cor21;
    if (n < (theorem ? 3 : min_n + 1) || n > kMaxGeneratorOrder) {
      throw InputError("n", "out of range: " + std::to_string(n));
    }
    if (needs_m) {
      if (!c_.m) throw InputError("m", "required");
      const int lo = theorem ? 3 : 1;
      if (*c_.m < lo || *c_.m > n - 1) {
        throw InputError("m", "must satisfy " + std::to_string(lo) + " <= m <= n-1, got " +
                                  std::to_string(*c_.m));
      }
    } else if (c_.m) {
      throw InputError("m", std::string(to_string(*theorem)) + " takes no m");
    }
  }

  int m_or_1() const { return c_.m.value_or(1); }

  Convexity convexity(const GeneratorSpec& spec, int n) const {
    if (c_.convexity == "convex") return Convexity::convex;
    if (c_.convexity == "concave") return Convexity::concave;
    if (c_.convexity != "auto") {
      throw InputError("convexity", "expected convex, concave or auto");
    }
    const auto v = detail::guarded("convexity", [&] { return classify(spec, n); });
    if (v == ConvexityVerdict::indefinite) {
      throw InputError("convexity", spec.name() + " is not " + std::to_string(n) +
                                        "-convex or -concave on the interval; pass --convexity");
    }
    return v == ConvexityVerdict::convex ? Convexity::convex : Convexity::concave;
  }

  int divergence_report(const ProbabilityVector& p, const ProbabilityVector& q) {
    const Theorem theorem = parse_theorem_field();
    check_n_m(theorem, 3);
    std::optional<Interval> override;
    if (!c_.interval.empty()) override = detail::parse_interval(c_.interval);
    const RatioRange rr = detail::guarded("q", [&] { return ratio_range(p, q); });
    if (!override && rr.degenerate()) {
      throw InputError("interval", "p = q gives a degenerate ratio range; pass --interval a,b");
    }
    const Interval domain = override ? *override : rr.interval();
    GeneratorSpec spec;
    const FunctionModel f = detail::build_function(c_.function, domain, &spec);
    const Convexity conv = convexity(spec, *c_.n);
    const auto d = detail::guarded("interval", [&] {
      return divergence_bounds(f, p, q, *c_.n, m_or_1(), theorem, conv, override);
    });
    if (csv()) {
      out_ << to_csv(d.report);
      out_ << "divergence,,\"divergence\",,," << format_double(d.divergence) << '\n';
      out_ << "divergence,,\"chord_at_one\",,," << format_double(d.chord_at_one) << '\n';
      return kExitOk;
    }
    Json doc{{"function", f.name()}};
    doc.update(to_json(d));
    emit(doc);
    return kExitOk;
  }
};

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edmundson-Lah-Ribaric differences, bounds and divergence estimates", "elr"};
  app.require_subcommand(1, 1);
  RunConfig c;

  auto add_function = [&](CLI::App* s) {
    s->add_option("--function", c.function,
                  "kl|hellinger|harmonic|jeffreys|exp|poly:<c0,c1,...>|power:<p>");
  };
  auto add_functional = [&](CLI::App* s) {
    s->add_option("--points", c.points, "comma-separated points of the functional");
    s->add_option("--weights", c.weights, "comma-separated weights summing to 1");
    s->add_option("--functional-file", c.functional_file,
                  "JSON {\"points\":[...],\"weights\":[...],\"interval\":[a,b]}");
  };
  auto add_interval = [&](CLI::App* s) { s->add_option("--interval", c.interval, "a,b"); };
  auto add_format = [&](CLI::App* s) {
    s->add_option("--format", c.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_bound = [&](CLI::App* s) {
    s->add_option("--theorem", c.theorem, "tm21|tm22|cor21|tm23|tm24");
    s->add_option("--n", c.n, "order n");
    s->add_option("--m", c.m, "Hermite split m (tm21, tm22, cor21)");
    s->add_option("--convexity", c.convexity, "convex, concave or auto");
  };

  auto* dd = app.add_subcommand("dd", "divided difference over the given nodes");
  add_function(dd);
  dd->add_option("--nodes", c.nodes, "comma-separated nodes; repeats are confluent");
  add_interval(dd);
  add_format(dd);

  auto* lr = app.add_subcommand("lr", "LR difference, optionally with both expansions (--n, --m)");
  add_function(lr);
  add_functional(lr);
  add_interval(lr);
  lr->add_option("--n", c.n, "expansion order");
  lr->add_option("--m", c.m, "Hermite split m");
  add_format(lr);

  auto* bounds = app.add_subcommand("bounds", "bound or bracket on LR");
  add_function(bounds);
  add_functional(bounds);
  add_interval(bounds);
  add_bound(bounds);
  add_format(bounds);

  auto* div = app.add_subcommand("div", "f-divergence, and its bracket with --theorem");
  add_function(div);
  div->add_option("--p", c.p, "comma-separated probabilities");
  div->add_option("--q", c.q, "comma-separated probabilities");
  div->add_option("--p-file", c.p_file, "JSON {\"p\":[...],\"q\":[...]} or CSV p,q");
  div->add_option("--q-file", c.q_file, "JSON {\"q\":[...]} or CSV p,q");
  add_interval(div);
  add_bound(div);
  add_format(div);

  auto* zm = app.add_subcommand("zm", "Zipf-Mandelbrot pmf, ratio range or divergence bounds");
  zm->add_option("--zm", c.zm, "N,q,s (give twice for P and Q)")->take_all()->allow_extra_args(false);
  zm->add_flag("--ratio-range", c.ratio_range, "print the extreme ratios p_i/q_i");
  add_function(zm);
  add_interval(zm);
  add_bound(zm);
  add_format(zm);

  auto* verify = app.add_subcommand("verify", "run oracle suites");
  verify->add_option("--suite", c.suite,
                     "identities|identities-polynomial|brackets|delegation|certify|all");
  verify->add_option("--seed", c.seed, "random seed (ELR_SEED overrides)");
  verify->add_option("--samples", c.samples, "certification samples");
  verify->add_option("--cases", c.cases, "cases per suite (per theorem for brackets)");
  verify->add_flag("--inject-wrong-parity", c.inject_wrong_parity,
                   "mirror every bracket before checking (negative control)");
  add_function(verify);
  add_interval(verify);
  verify->add_option("--n", c.n, "order for --suite certify");
  add_format(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  Runner runner(c, out);
  try {
    if (*dd) return runner.dd();
    if (*lr) return runner.lr();
    if (*bounds) return runner.bounds();
    if (*div) return runner.div();
    if (*zm) return runner.zm();
    if (*verify) return runner.verify();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ConsistencyError& e) {
    err << "error: internal consistency check failed: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitInvalid;
}

}  // namespace elr::cli
