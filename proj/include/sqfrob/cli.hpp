// Text parsing and report rendering for the sqfrob command-line tool.
#pragma once

#include "sqfrob/bipoly.hpp"
#include "sqfrob/frobenius.hpp"
#include "sqfrob/integers.hpp"
#include "sqfrob/rational.hpp"
#include "sqfrob/serre.hpp"
#include "sqfrob/verify.hpp"

#include <json.hpp>

#include <cctype>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sqfrob {

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::invalid_argument("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  BiPoly parse() {
    std::vector<Term> terms;
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty polynomial");
    int sign = 1;
    if (peek() == '+' || peek() == '-') sign = take() == '-' ? -1 : 1;
    for (;;) {
      skip_ws();
      terms.push_back(term(sign));
      skip_ws();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') throw ParseError(pos_, "expected '+' or '-'");
      sign = take() == '-' ? -1 : 1;
    }
    return BiPoly(std::move(terms));
  }

 private:
  Term term(int sign) {
    __int128 coeff = sign;
    int dx = 0, dy = 0;
    factor(coeff, dx, dy);
    for (skip_ws(); !at_end() && peek() == '*'; skip_ws()) {
      take();
      skip_ws();
      factor(coeff, dx, dy);
    }
    return {dx, dy, static_cast<std::int64_t>(coeff)};
  }

  void factor(__int128& coeff, int& dx, int& dy) {
    const std::size_t start = pos_;
    if (at_end()) throw ParseError(pos_, "unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff *= integer();
      if (coeff > INT64_MAX || coeff < -INT64_MAX) throw ParseError(start, "coefficient out of 64-bit range");
      return;
    }
    const char v = peek();
    if (v != 'x' && v != 'y') throw ParseError(pos_, "expected a number, 'x' or 'y'");
    take();
    __int128 e = 1;
    skip_ws();
    if (!at_end() && peek() == '^') {
      take();
      skip_ws();
      if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError(pos_, "expected exponent");
      e = integer();
    }
    int& d = v == 'x' ? dx : dy;
    if (d + e > BiPoly::kMaxDegree) {
      throw ParseError(start, "degree exceeds " + std::to_string(BiPoly::kMaxDegree));
    }
    d += static_cast<int>(e);
  }

  __int128 integer() {
    const std::size_t start = pos_;
    __int128 v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (take() - '0');
      if (v > INT64_MAX) throw ParseError(start, "integer out of 64-bit range");
    }
    return v;
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Sum of c*x^i*y^j terms, or one of the aliases koblitz, frobdisc.
inline BiPoly parse_poly(std::string_view text) {
  const std::string_view t = detail::trim(text);
  if (t == "koblitz" || t == "frobdisc") return builtin(t);
  return detail::PolyParser(text).parse();
}

/// "a,b" with optional sign on each coefficient.
inline Curve parse_curve(std::string_view text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string_view::npos) throw ParseError(text.size(), "expected 'a,b'");
  auto number = [&](std::size_t from, std::size_t to) -> std::int64_t {
    std::size_t i = from;
    while (i < to && text[i] == ' ') ++i;
    bool neg = false;
    if (i < to && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
    const std::size_t digits = i;
    std::int64_t v = 0;
    while (i < to && std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (v > (INT64_MAX - 9) / 10) throw ParseError(digits, "coefficient out of range");
      v = v * 10 + (text[i++] - '0');
    }
    if (i == digits) throw ParseError(i, "expected an integer");
    while (i < to && text[i] == ' ') ++i;
    if (i != to) throw ParseError(i, "unexpected character");
    return neg ? -v : v;
  };
  const std::int64_t a = number(0, comma);
  const std::int64_t b = number(comma + 1, text.size());
  return Curve(a, b);
}

enum class Format { json, csv };

/// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitIo = 4;

inline constexpr std::int64_t kMaxFamilyBox = 1000;

struct RunConfig {
  std::string command;  // constant-generic, constant-serre, ap, pi-sf, family-average, verify
  std::string f;
  std::string curve;
  std::optional<std::uint64_t> x_max;
  std::uint64_t ell_max = 101;
  std::optional<std::int64_t> A, B;
  std::optional<std::uint64_t> sample_size;
  std::uint64_t seed = 1;
  std::string mode = "constants";
  std::string output;  // empty: standard output
  Format format = Format::json;
  bool wall_clock = true;
};

namespace report {

using Json = nlohmann::ordered_json;

inline Json rational(const Rational& q) { return to_string(q); }
inline Json real(double v) { return round12(v); }

inline Json curve(const Curve& c) { return Json{{"a", c.a}, {"b", c.b}}; }

inline Json local_factors(const std::vector<LocalDensity>& v) {
  Json out = Json::array();
  for (const LocalDensity& ld : v) {
    out.push_back(Json{{"ell", ld.modulus}, {"density", rational(ld.density())}, {"approx", real(to_double(ld.density()))}});
  }
  return out;
}

inline void constant_fields(Json& j, const SerreConstant& c) {
  j["constant"] = rational(c.value);
  j["constant_approx"] = real(c.approx);
  j["ell_max"] = c.ell_max;
  j["tail_estimate"] = real(c.tail_estimate);
  j["key_lemma_constant"] = real(c.key_lemma_constant);
  if (c.serre) {
    const SerreData& sd = *c.serre;
    j["serre"] = Json{{"delta", sd.delta}, {"delta_sf", sd.delta_sf}, {"d_fund", sd.d_fund}, {"m_e", sd.m_e}};
    j["finite_part"] = rational(c.finite_part);
    j["generic_part"] = rational(c.generic_part);
    Json terms = Json::array();
    for (const DivisorTerm& t : c.divisor_terms) {
      terms.push_back(Json{{"n", t.n}, {"mu", t.mu}, {"ratio", rational(t.ratio)}, {"generic_ratio", rational(t.generic_ratio)}});
    }
    j["divisor_terms"] = terms;
  }
  j["local_factors"] = local_factors(c.local_factors);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

inline std::string csv_real(double v) {
  std::ostringstream os;
  os.precision(12);
  os << round12(v);
  return os.str();
}

class Csv {
 public:
  template <class... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += csv_field(cell(cols)), first = false), ...);
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return csv_real(v); }
  template <class T>
  static std::string cell(const T& v) {
    return std::to_string(v);
  }
  std::string text_;
};

}  // namespace report

namespace detail {

inline const std::string& require(const std::string& v, const char* flag, const std::string& command) {
  if (v.empty()) throw std::invalid_argument(command + " requires " + flag);
  return v;
}

template <class T>
const T& require(const std::optional<T>& v, const char* flag, const std::string& command) {
  if (!v) throw std::invalid_argument(command + " requires " + flag);
  return *v;
}

inline std::uint64_t checked_x_max(const RunConfig& cfg) {
  const std::uint64_t x = require(cfg.x_max, "--x-max", cfg.command);
  if (x > kApSeriesLimit) {
    throw BudgetError("--x-max " + std::to_string(x) + " exceeds the cap " + std::to_string(kApSeriesLimit));
  }
  return x;
}

inline std::string render(const report::Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Builds the report text for cfg; verify also appends PASS/FAIL lines to
/// console. Throws on validation or budget failure.
inline std::string build_report(const RunConfig& cfg, bool& checks_passed, std::string& console) {
  using report::Json;
  const auto start = std::chrono::steady_clock::now();
  checks_passed = true;
  Json j;
  j["command"] = cfg.command;
  report::Csv csv;
  auto finish = [&]() -> std::string {
    if (cfg.format == Format::csv) return csv.str();
    if (cfg.wall_clock) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      j["wall_clock_seconds"] = report::real(secs);
    }
    return detail::render(j);
  };

  if (cfg.command == "constant-generic" || cfg.command == "constant-serre") {
    const BiPoly f = parse_poly(detail::require(cfg.f, "--f", cfg.command));
    j["inputs"] = Json{{"f", f.to_string()}, {"ell_max", cfg.ell_max}};
    SerreConstant c;
    if (cfg.command == "constant-generic") {
      c = constant_generic(f, cfg.ell_max);
    } else {
      const Curve curve = parse_curve(detail::require(cfg.curve, "--curve", cfg.command));
      j["inputs"]["curve"] = report::curve(curve);
      c = constant_serre(curve, f, cfg.ell_max);
    }
    report::constant_fields(j, c);
    csv.row("ell", "density", "approx");
    for (const LocalDensity& ld : c.local_factors) csv.row(ld.modulus, to_string(ld.density()), to_double(ld.density()));
    csv.row("constant", to_string(c.value), c.approx);
    return finish();
  }

  if (cfg.command == "ap") {
    const Curve curve = parse_curve(detail::require(cfg.curve, "--curve", cfg.command));
    const std::uint64_t x = detail::checked_x_max(cfg);
    const ApSeries s = ap_series(curve, x);
    j["inputs"] = Json{{"curve", report::curve(curve)}, {"x_max", x}};
    j["skipped_primes"] = s.skipped;
    Json entries = Json::array();
    csv.row("p", "ap");
    for (const ApEntry& e : s.entries) {
      entries.push_back(Json::array({e.p, e.ap}));
      csv.row(e.p, e.ap);
    }
    j["entries"] = entries;
    return finish();
  }

  if (cfg.command == "pi-sf") {
    const Curve curve = parse_curve(detail::require(cfg.curve, "--curve", cfg.command));
    const BiPoly f = parse_poly(detail::require(cfg.f, "--f", cfg.command));
    const std::uint64_t x = detail::checked_x_max(cfg);
    SfOptions opts;
    opts.ell_max = cfg.ell_max;
    const SfReport r = pi_sf(curve, f, x, opts);
    j["inputs"] = Json{{"curve", report::curve(curve)}, {"f", f.to_string()}, {"x_max", x}, {"ell_max", cfg.ell_max}};
    j["pi_x"] = r.pi_x;
    j["good_primes"] = r.good_primes;
    j["skipped_primes"] = r.skipped;
    j["sf_count"] = r.sf_count;
    j["zero_count"] = r.zero_count;
    j["empirical_ratio"] = report::real(r.empirical_ratio);
    Json constant;
    report::constant_fields(constant, *r.constant);
    j["serre_constant"] = constant;
    j["difference"] = report::real(r.empirical_ratio - r.constant->approx);
    Json rows = Json::array();
    csv.row("n", "observed", "expected");
    for (const DivisibilityRow& row : r.divisibility) {
      rows.push_back(Json{{"n", row.n},
                          {"observed", row.observed},
                          {"expected", report::real(row.expected)},
                          {"density", report::rational(row.density)}});
      csv.row(row.n, row.observed, row.expected);
    }
    j["divisibility"] = rows;
    csv.row("squarefree", r.sf_count, r.constant->approx * static_cast<double>(r.pi_x));
    return finish();
  }

  if (cfg.command == "family-average") {
    const BiPoly f = parse_poly(detail::require(cfg.f, "--f", cfg.command));
    const std::int64_t A = detail::require(cfg.A, "--A", cfg.command);
    const std::int64_t B = detail::require(cfg.B, "--B", cfg.command);
    if (A > kMaxFamilyBox || B > kMaxFamilyBox) throw BudgetError("--A and --B are capped at " + std::to_string(kMaxFamilyBox));
    FamilyOptions opts;
    if (cfg.mode == "constants") {
      opts.mode = FamilyMode::constants;
    } else if (cfg.mode == "empirical") {
      opts.mode = FamilyMode::empirical;
      opts.x_max = detail::checked_x_max(cfg);
    } else {
      throw std::invalid_argument("--mode must be 'constants' or 'empirical'");
    }
    opts.ell_max = cfg.ell_max;
    opts.sample_size = cfg.sample_size;
    opts.seed = cfg.seed;
    const FamilyReport r = family_average(A, B, f, opts);
    j["inputs"] = Json{{"f", f.to_string()}, {"A", A}, {"B", B}, {"mode", cfg.mode}, {"ell_max", cfg.ell_max}};
    if (opts.mode == FamilyMode::empirical) j["inputs"]["x_max"] = opts.x_max;
    if (cfg.sample_size) {
      j["inputs"]["sample_size"] = *cfg.sample_size;
      j["inputs"]["seed"] = cfg.seed;
    }
    j["box_size"] = r.box_size;
    j["evaluated"] = r.evaluated;
    j["skipped"] = r.skipped;
    j["average"] = report::real(r.average);
    j["generic_constant"] = report::rational(r.generic.value);
    j["generic_constant_approx"] = report::real(r.generic.approx);
    j["difference"] = report::real(r.difference);
    Json curves = Json::array();
    csv.row("a", "b", "value", "status");
    for (const FamilyCurveResult& c : r.curves) {
      Json row{{"a", c.curve.a}, {"b", c.curve.b}};
      if (c.skipped) {
        row["skipped"] = c.note;
        csv.row(c.curve.a, c.curve.b, "", "skipped: " + c.note);
      } else {
        row["value"] = report::real(c.value);
        csv.row(c.curve.a, c.curve.b, c.value, "ok");
      }
      curves.push_back(row);
    }
    j["curves"] = curves;
    csv.row("average", "", r.average, "generic " + report::csv_real(r.generic.approx));
    return finish();
  }

  if (cfg.command == "verify") {
    Json checks = Json::array();
    csv.row("check", "status", "detail");
    for (const VerifyCheck& c : run_verification()) {
      checks_passed = checks_passed && c.passed;
      checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      csv.row(c.name, c.passed ? "PASS" : "FAIL", c.detail);
      console += (c.passed ? "PASS " : "FAIL ") + c.name + (c.passed ? "" : ": " + c.detail) + "\n";
    }
    j["checks"] = checks;
    j["passed"] = checks_passed;
    return finish();
  }

  throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

/// Runs cfg, writing the report to cfg.output or to out. Diagnostics go to
/// err. Returns a process exit status.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string text, console;
  bool passed = true;
  try {
    text = build_report(cfg, passed, console);
  } catch (const ParseError& e) {
    err << "sqfrob: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "sqfrob: budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const CapacityError& e) {
    err << "sqfrob: budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "sqfrob: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sqfrob: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  out << console;
  if (cfg.output.empty() && console.empty()) out << text;
  if (!cfg.output.empty()) {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file || !(file << text) || !file.flush()) {
      err << "sqfrob: cannot write " << cfg.output << '\n';
      return kExitIo;
    }
  }
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace sqfrob
