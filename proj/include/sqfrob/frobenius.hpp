// Traces of Frobenius by point counting over F_p, the sequences f(a_p, p),
// and the empirical squarefree and divisibility counters.
#pragma once

#include "sqfrob/bipoly.hpp"
#include "sqfrob/integers.hpp"
#include "sqfrob/parallel.hpp"
#include "sqfrob/rational.hpp"
#include "sqfrob/serre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqfrob {

inline constexpr std::uint64_t kApSeriesLimit = 1'000'000;

namespace detail {

/// -sum_x chi_p(x^3 + a x + b), walking the cubic by finite differences.
/// chi is scratch space for the quadratic-character table.
inline std::int64_t ap_character_sum(std::int64_t a, std::int64_t b, std::uint64_t p, std::vector<std::int8_t>& chi) {
  chi.assign(p, -1);
  chi[0] = 0;
  std::uint64_t sq = 0;
  for (std::uint64_t s = 1; 2 * s < p; ++s) {
    sq += 2 * s - 1;
    if (sq >= p) sq -= p;
    chi[sq] = 1;
  }
  std::uint64_t g = reduce(b, p);
  std::uint64_t d1 = reduce(a + 1, p);
  std::uint64_t d2 = 6 % p;
  const std::uint64_t d3 = 6 % p;
  std::int64_t sum = 0;
  const std::int8_t* table = chi.data();
  for (std::uint64_t x = 0; x < p; ++x) {
    sum += table[g];
    g += d1;
    g -= g >= p ? p : 0;
    d1 += d2;
    d1 -= d1 >= p ? p : 0;
    d2 += d3;
    d2 -= d2 >= p ? p : 0;
  }
  return -sum;
}

}  // namespace detail

/// Trace of Frobenius at a good prime p >= 5.
inline std::int64_t ap(const Curve& curve, std::uint64_t p) {
  if (p < 5) throw std::invalid_argument("ap: p must be at least 5");
  if (!is_prime(p)) throw std::invalid_argument("ap: " + std::to_string(p) + " is not prime");
  if (detail::reduce(curve.delta(), p) == 0) throw std::invalid_argument("ap: bad reduction at " + std::to_string(p));
  std::vector<std::int8_t> chi;
  return detail::ap_character_sum(curve.a, curve.b, p, chi);
}

struct ApEntry {
  std::uint64_t p = 0;
  std::int64_t ap = 0;
};

struct ApSeries {
  Curve curve;
  std::uint64_t x_max = 0;
  std::vector<ApEntry> entries;       // good primes 5 <= p <= x_max
  std::vector<std::uint64_t> skipped;  // 2, 3 and primes dividing delta
};

inline ApSeries ap_series(const Curve& curve, std::uint64_t x_max, std::uint64_t limit = kApSeriesLimit) {
  if (x_max > limit) throw CapacityError("ap_series: x_max " + std::to_string(x_max) + " exceeds " + std::to_string(limit));
  ApSeries series{curve, x_max, {}, {}};
  if (x_max < 2) return series;
  for (std::uint64_t p : primes_up_to(x_max)) {
    if (p < 5 || detail::reduce(curve.delta(), p) == 0) {
      series.skipped.push_back(p);
    } else {
      series.entries.push_back({p, 0});
    }
  }
  parallel_for(
      series.entries.size(),
      [&](std::size_t i) {
        thread_local std::vector<std::int8_t> chi;
        ApEntry& e = series.entries[i];
        e.ap = detail::ap_character_sum(curve.a, curve.b, e.p, chi);
        if (static_cast<std::uint64_t>(e.ap * e.ap) > 4 * e.p) {
          throw std::logic_error("Hasse bound violated at p = " + std::to_string(e.p));
        }
      },
      16);
  return series;
}

/// Squarefree n in [2, 20].
inline std::vector<std::uint64_t> default_divisibility_moduli() { return {2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19}; }

struct SfOptions {
  std::vector<std::uint64_t> moduli = default_divisibility_moduli();
  std::uint64_t ell_max = 101;
  bool with_constant = true;
};

struct DivisibilityRow {
  std::uint64_t n = 1;
  std::uint64_t observed = 0;  // good p with n^2 | f_p
  Rational density = 0;        // |C_{E,f}(n^2)| / |G_E(n^2)|
  double expected = 0.0;       // density * good_primes
};

struct SfReport {
  Curve curve;
  BiPoly f;
  std::uint64_t x_max = 0;
  std::uint64_t pi_x = 0;         // all primes <= x_max
  std::uint64_t good_primes = 0;  // primes actually examined
  std::vector<std::uint64_t> skipped;
  std::uint64_t sf_count = 0;
  std::uint64_t zero_count = 0;  // f_p = 0, counted as not squarefree
  double empirical_ratio = 0.0;  // sf_count / pi_x
  std::optional<SerreConstant> constant;
  std::vector<DivisibilityRow> divisibility;
};

/// f(a_p, p) as a 64-bit integer.
inline std::int64_t sequence_value(const BiPoly& f, std::int64_t ap, std::uint64_t p) {
  const __int128 v = f.eval(ap, static_cast<std::int64_t>(p));
  if (v > INT64_MAX || v < -INT64_MAX) throw BudgetError("f_p value outside 64-bit range at p = " + std::to_string(p));
  return static_cast<std::int64_t>(v);
}

inline SfReport pi_sf(const ApSeries& series, const BiPoly& f, const SfOptions& opts = {}) {
  SfReport r;
  r.curve = series.curve;
  r.f = f;
  r.x_max = series.x_max;
  r.good_primes = series.entries.size();
  r.pi_x = series.entries.size() + series.skipped.size();
  r.skipped = series.skipped;

  std::vector<std::int64_t> values;
  values.reserve(series.entries.size());
  std::uint64_t max_abs = 1;
  for (const ApEntry& e : series.entries) {
    values.push_back(sequence_value(f, e.ap, e.p));
    max_abs = std::max(max_abs, detail::abs_u64(values.back()));
  }
  const SquarefreeTable table(std::min(max_abs, kSieveLimit));
  for (std::int64_t v : values) {
    if (v == 0) {
      ++r.zero_count;
      continue;
    }
    if (table.covers(v) ? table(v) : is_squarefree(v)) ++r.sf_count;
  }
  r.empirical_ratio = r.pi_x ? static_cast<double>(r.sf_count) / static_cast<double>(r.pi_x) : 0.0;

  CurveDensities densities(series.curve, f);
  for (std::uint64_t n : opts.moduli) {
    DivisibilityRow row;
    row.n = n;
    const std::uint64_t n2 = n * n;
    for (std::int64_t v : values) row.observed += detail::reduce(v, n2) == 0;
    row.density = densities.ratio(n);
    row.expected = to_double(row.density) * static_cast<double>(r.good_primes);
    r.divisibility.push_back(std::move(row));
  }
  if (opts.with_constant) r.constant = constant_serre(series.curve, f, opts.ell_max);
  return r;
}

inline SfReport pi_sf(const Curve& curve, const BiPoly& f, std::uint64_t x_max, const SfOptions& opts = {}) {
  return pi_sf(ap_series(curve, x_max), f, opts);
}

enum class FamilyMode { constants, empirical };

struct FamilyOptions {
  FamilyMode mode = FamilyMode::constants;
  std::uint64_t ell_max = 101;
  std::uint64_t x_max = 0;  // empirical mode only
  std::optional<std::uint64_t> sample_size;
  std::uint64_t seed = 1;
};

struct FamilyCurveResult {
  Curve curve;
  double value = 0.0;
  bool skipped = false;
  std::string note;
};

struct FamilyReport {
  std::int64_t A = 0, B = 0;
  FamilyOptions options;
  std::uint64_t box_size = 0;
  std::uint64_t evaluated = 0;
  std::uint64_t skipped = 0;
  double average = 0.0;
  SerreConstant generic;
  double difference = 0.0;  // average - generic
  std::vector<FamilyCurveResult> curves;
};

/// Nonsingular curves with |a| <= A, |b| <= B, ordered by (a, b).
inline std::vector<Curve> curve_box(std::int64_t A, std::int64_t B) {
  if (A < 1 || B < 1) throw std::invalid_argument("family box needs A, B >= 1");
  std::vector<Curve> out;
  for (std::int64_t a = -A; a <= A; ++a)
    for (std::int64_t b = -B; b <= B; ++b) {
      if (4 * a * a * a + 27 * b * b != 0) out.emplace_back(a, b);
    }
  return out;
}

/// Average of per-curve constants (or empirical ratios) over the box,
/// compared with the generic constant.
inline FamilyReport family_average(std::int64_t A, std::int64_t B, const BiPoly& f, const FamilyOptions& opts) {
  if (opts.mode == FamilyMode::empirical && opts.x_max < 5) {
    throw std::invalid_argument("empirical family average needs x_max >= 5");
  }
  FamilyReport rep;
  rep.A = A;
  rep.B = B;
  rep.options = opts;
  std::vector<Curve> box = curve_box(A, B);
  rep.box_size = box.size();
  if (opts.sample_size && *opts.sample_size < box.size()) {
    // partial Fisher-Yates with an explicit reduction so the sample is the
    // same on every standard library
    std::mt19937_64 rng(opts.seed);
    const std::size_t k = *opts.sample_size;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (box.size() - i));
      std::swap(box[i], box[j]);
    }
    box.resize(k);
    std::sort(box.begin(), box.end(), [](const Curve& x, const Curve& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  }

  const GenericFactors table(f, opts.ell_max);
  rep.generic = constant_generic(table);
  rep.curves.resize(box.size());
  parallel_for(box.size(), [&](std::size_t i) {
    FamilyCurveResult& out = rep.curves[i];
    out.curve = box[i];
    try {
      if (opts.mode == FamilyMode::constants) {
        out.value = constant_serre(box[i], table).approx;
      } else {
        SfOptions so;
        so.moduli.clear();
        so.with_constant = false;
        out.value = pi_sf(box[i], f, opts.x_max, so).empirical_ratio;
      }
    } catch (const BudgetError& e) {
      out.skipped = true;
      out.note = e.what();
    } catch (const CapacityError& e) {
      out.skipped = true;
      out.note = e.what();
    }
  });

  long double sum = 0;
  for (const FamilyCurveResult& c : rep.curves) {
    if (c.skipped) {
      ++rep.skipped;
    } else {
      ++rep.evaluated;
      sum += c.value;
    }
  }
  if (rep.evaluated == 0) throw BudgetError("family_average: every curve exceeded the budget");
  rep.average = static_cast<double>(sum / static_cast<long double>(rep.evaluated));
  rep.difference = rep.average - rep.generic.approx;
  return rep;
}

}  // namespace sqfrob
