#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "elr/divergence.hpp"
#include "elr/divided_diff.hpp"
#include "elr/elr_bounds.hpp"
#include "elr/functional.hpp"
#include "elr/generators.hpp"
#include "elr/oracle.hpp"

namespace elr {

using Json = nlohmann::ordered_json;

/// Errors in input files; `field` names the offending key or column.
class InputError : public std::runtime_error {
 public:
  InputError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

inline Json to_json(const NewtonForm& p) {
  return Json{{"nodes", p.nodes}, {"coeffs", p.coeffs}};
}

inline Json to_json(const Term& t) {
  return Json{{"k", t.k},
              {"label", t.label},
              {"coefficient", t.coefficient},
              {"weight", t.weight},
              {"value", t.value}};
}

inline Json to_json(const std::vector<Term>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back(to_json(t));
  return out;
}

inline Json to_json(const Decomposition& d) {
  return Json{{"lr", d.lr},
              {"terms_sum", d.terms_sum()},
              {"remainder", d.remainder},
              {"residual", d.residual()},
              {"terms", to_json(d.terms)}};
}

inline Json to_json(const BoundReport& r) {
  return Json{{"lr", r.lr},
              {"lower", optional_json(r.lower)},
              {"upper", optional_json(r.upper)},
              {"theorem", std::string(to_string(r.theorem))},
              {"n", r.parity_case.n},
              {"m", r.parity_case.m ? Json(*r.parity_case.m) : Json(nullptr)},
              {"convexity", std::string(to_string(r.parity_case.convexity))},
              {"direction_valid", r.direction_valid},
              {"reversed", r.reversed},
              {"holds", r.holds()},
              {"lower_terms", to_json(r.lower_terms)},
              {"upper_terms", to_json(r.upper_terms)}};
}

inline Json to_json(const DivergenceBoundReport& d) {
  return Json{{"divergence", d.divergence},
              {"chord_at_one", d.chord_at_one},
              {"divergence_gap", d.divergence_gap},
              {"interval", {d.interval.lower, d.interval.upper}},
              {"ratio_range", {d.ratios.a, d.ratios.b}},
              {"bound", to_json(d.report)},
              {"direct",
               {{"lr", d.direct_lr},
                {"lower", optional_json(d.direct_lower)},
                {"upper", optional_json(d.direct_upper)}}},
              {"delegation_discrepancy", d.delegation_discrepancy}};
}

inline Json to_json(const ConvexityCertificate& c) {
  return Json{{"n", c.n},
              {"verdict", std::string(to_string(c.verdict))},
              {"samples", c.samples},
              {"min_dd", c.min_dd},
              {"max_dd", c.max_dd},
              {"seed", c.seed}};
}

inline Json to_json(const AuditFailure& f) {
  return Json{{"index", f.index},
              {"check", f.check},
              {"function", f.function},
              {"n", f.n},
              {"m", f.m ? Json(*f.m) : Json(nullptr)},
              {"lr", f.lr},
              {"value", f.value},
              {"detail", f.detail}};
}

inline Json to_json(const AuditReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(f));
  return Json{{"suite", r.suite},
              {"seed", r.seed},
              {"cases", r.cases},
              {"evaluated", r.evaluated},
              {"skipped", r.skipped},
              {"tight", r.tight},
              {"detectable", r.detectable},
              {"failures", failures},
              {"max_residual", r.max_residual}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// One row per (k, term) of each side, then the side totals and LR.
inline std::string to_csv(const BoundReport& r) {
  std::ostringstream out;
  out << "side,k,term,coefficient,weight,value\n";
  auto rows = [&](const char* side, const std::vector<Term>& terms,
                  const std::optional<double>& total) {
    if (!total) return;
    for (const auto& t : terms) {
      out << side << ',' << t.k << ',' << csv_quote(t.label) << ',' << format_double(t.coefficient)
          << ',' << format_double(t.weight) << ',' << format_double(t.value) << '\n';
    }
    out << side << ",," << csv_quote("total") << ",,," << format_double(*total) << '\n';
  };
  rows("lower", r.lower_terms, r.lower);
  rows("upper", r.upper_terms, r.upper);
  out << "lr,," << csv_quote("lr") << ",,," << format_double(r.lr) << '\n';
  return out.str();
}

inline std::string to_csv(const Decomposition& d, const char* side) {
  std::ostringstream out;
  out << "side,k,term,coefficient,weight,value\n";
  for (const auto& t : d.terms) {
    out << side << ',' << t.k << ',' << csv_quote(t.label) << ',' << format_double(t.coefficient)
        << ',' << format_double(t.weight) << ',' << format_double(t.value) << '\n';
  }
  out << side << ",," << csv_quote("remainder") << ",,," << format_double(d.remainder) << '\n';
  out << "lr,," << csv_quote("lr") << ",,," << format_double(d.lr) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Input files

inline std::string read_text_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw InputError(field, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace detail {

inline std::vector<double> json_numbers(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) throw InputError(key, "missing");
  const Json& v = doc.at(key);
  if (!v.is_array()) throw InputError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InputError(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline Json parse_json(const std::string& text, const std::string& field) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(field, std::string("malformed JSON: ") + e.what());
  }
}

inline bool looks_like_json(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

}  // namespace detail

/// {"points":[…],"weights":[…],"interval":[a,b]}
inline DiscreteFunctional functional_from_json(const std::string& text) {
  const Json doc = detail::parse_json(text, "functional-file");
  auto points = detail::json_numbers(doc, "points");
  auto weights = detail::json_numbers(doc, "weights");
  const auto ab = detail::json_numbers(doc, "interval");
  if (ab.size() != 2) throw InputError("interval", "expected [a, b]");
  try {
    return DiscreteFunctional(std::move(points), std::move(weights), Interval(ab[0], ab[1]));
  } catch (const PreconditionError& e) {
    throw InputError("functional-file", e.what());
  }
}

struct DistributionFile {
  std::optional<std::vector<double>> p;
  std::optional<std::vector<double>> q;
};

/// JSON {"p":[…],"q":[…]} (either key may be absent) or CSV with two columns
/// p,q; a non-numeric first line is taken as a header.
inline DistributionFile distribution_from_text(const std::string& text, const std::string& field) {
  DistributionFile out;
  if (detail::looks_like_json(text)) {
    const Json doc = detail::parse_json(text, field);
    if (!doc.is_object()) throw InputError(field, "expected a JSON object");
    if (doc.contains("p")) out.p = detail::json_numbers(doc, "p");
    if (doc.contains("q")) out.q = detail::json_numbers(doc, "q");
    if (!out.p && !out.q) throw InputError(field, "neither \"p\" nor \"q\" present");
    return out;
  }
  std::vector<double> p;
  std::vector<double> q;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError(field, "line " + std::to_string(line_no) + ": expected two columns");
    }
    try {
      std::size_t used1 = 0;
      std::size_t used2 = 0;
      const std::string c1 = line.substr(0, comma);
      const std::string c2 = line.substr(comma + 1);
      const double x = std::stod(c1, &used1);
      const double y = std::stod(c2, &used2);
      if (c1.find_first_not_of(" \t", used1) != std::string::npos ||
          c2.find_first_not_of(" \t", used2) != std::string::npos) {
        throw std::invalid_argument("trailing characters");
      }
      p.push_back(x);
      q.push_back(y);
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header
      throw InputError(field, "line " + std::to_string(line_no) + ": not two numbers");
    }
  }
  if (p.empty()) throw InputError(field, "no rows");
  out.p = std::move(p);
  out.q = std::move(q);
  return out;
}

}  // namespace elr
