// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "sqfrob/frobenius.hpp"
#include "sqfrob/gl2.hpp"
#include "sqfrob/serre.hpp"
#include "sqfrob/verify.hpp"

#include "generators.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace sqfrob;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail.str("");
    pass = false;
    detail << why << "; ";
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(Outcome&)> body;
};

const BiPoly& frobdisc() {
  static const BiPoly f = builtin("frobdisc");
  return f;
}
const BiPoly& koblitz() {
  static const BiPoly f = builtin("koblitz");
  return f;
}

std::map<std::pair<std::int64_t, std::int64_t>, ApSeries>& series_cache() {
  static std::map<std::pair<std::int64_t, std::int64_t>, ApSeries> cache;
  return cache;
}

const ApSeries& series_to_million(const Curve& c) {
  auto& cache = series_cache();
  const auto key = std::make_pair(c.a, c.b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, ap_series(c, 1'000'000)).first;
  return it->second;
}

Rational density(const BiPoly& f, std::uint64_t l) { return Rational(count_cf(f, l * l), gl2_order(l * l)); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void local_identities(Outcome& o) {
  if (density(frobdisc(), 2) != Rational(2, 3)) o.fail("x^2-4y at l=2");
  for (std::uint64_t l : {3, 5, 7, 11, 13}) {
    const BigInt L(l);
    if (density(frobdisc(), l) != Rational(L * L + L - 1, L * L * (L * L - 1))) o.fail("x^2-4y at l=" + std::to_string(l));
  }
  for (std::uint64_t l : {2, 3, 5, 7, 11}) {
    const BigInt L(l);
    if (density(koblitz(), l) != Rational(L * L * L - L - 1, L * L * (L * L - 1) * (L - 1))) {
      o.fail("y+1-x at l=" + std::to_string(l));
    }
  }
  if (o.pass) o.detail << "10 exact identities";
}

void fiber_formula(Outcome& o) {
  std::uint64_t checked = 0;
  for (std::uint64_t p : {3, 5, 7, 11, 13, 17, 19, 23}) {
    const TraceDetFiber fib = trace_det_fiber({p, 1});
    for (std::uint64_t t = 0; t < p; ++t)
      for (std::uint64_t d = 1; d < p; ++d) {
        std::uint64_t roots = 0;  // of X^2 - tX + d in F_p
        for (std::uint64_t x = 0; x < p; ++x) roots += (x * x + (p - t) * x + d) % p == 0;
        const auto want = static_cast<std::int64_t>(p * p) + static_cast<std::int64_t>(p) * (static_cast<std::int64_t>(roots) - 1);
        if (static_cast<std::int64_t>(fib(t, d)) != want) o.fail("p=" + std::to_string(p) + " T=" + std::to_string(t) + " D=" + std::to_string(d));
        ++checked;
      }
  }
  if (o.pass) o.detail << checked << " (T, D) pairs";
}

void oracle_equivalence(Outcome& o) {
  gen::Gen g(20240601);
  std::vector<BiPoly> polys{frobdisc(), koblitz(), g.linear_in_y(9), g.linear_in_y(9)};
  {
    // y^2 + c y + g(x), deg g odd: irreducible over Q(x)
    const int deg = 3;
    std::vector<Term> t{{0, 2, 1}, {0, 1, g.integer(-5, 5)}, {deg, 0, g.integer(1, 5)}};
    for (int i = 0; i < deg; ++i) t.push_back({i, 0, g.integer(-5, 5)});
    polys.emplace_back(t);
  }
  for (const BiPoly& f : polys) {
    for (std::uint64_t m : {2, 3, 4, 5, 6, 7, 8, 9, 12, 16}) {
      if (count_cf(f, m) != enumerate_oracle(f, m)) o.fail(f.to_string() + " mod " + std::to_string(m));
    }
  }
  for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
    for (auto [p, q] : {std::pair<std::uint64_t, std::uint64_t>{3, 9}, {5, 25}}) {
      const DetCharacter chi = DetCharacter::legendre(p);
      std::int64_t signed_count = 0;
      for_each_gl2(q, [&](const Mat2& h) {
        if (f->eval_mod(h.trace(), h.det(), q) == 0) signed_count += chi(detail::reduce(h.det(), q));
      });
      if (count_cf_twisted(*f, {p, 2}, chi) != signed_count) o.fail("twisted " + f->to_string() + " q=" + std::to_string(q));
    }
  }
  if (o.pass) {
    o.detail << "polynomials:";
    for (const BiPoly& f : polys) o.detail << " " << f.to_string();
  }
}

void key_lemma(Outcome& o) {
  for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
    double worst = 0.0;
    for (std::uint64_t l : primes_up_to(47)) {
      const double scaled = to_double(density(*f, l)) * static_cast<double>(l * l);
      worst = std::max(worst, scaled);
      if (scaled > 4.0 * f->deg_x()) o.fail(f->to_string() + " at l=" + std::to_string(l) + ": " + fmt(scaled));
    }
    if (o.pass) o.detail << f->to_string() << " max l^2 r_l = " << fmt(worst) << " <= " << 4 * f->deg_x() << "; ";
  }
}

void serre_oracle(Outcome& o) {
  const Curve c(0, 1);
  const SerreData sd = serre_data(c);
  if (sd.m_e != 6) o.fail("m_e != 6");
  for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
    std::uint64_t hits = 0, size = 0;
    for_each_gl2(36, [&](const Mat2& h) {
      if (psi(h, sd) != 1) return;
      ++size;
      hits += f->eval_mod(h.trace(), h.det(), 36) == 0;
    });
    const Rational want{BigInt(hits), BigInt(size)};
    const Rational got = ratio_cef(c, *f, 6);
    if (got != want) o.fail(f->to_string() + ": " + to_string(got) + " vs " + to_string(want));
    for (std::uint64_t n : {2, 3}) {
      if (ratio_cef(c, *f, n) != density(*f, n)) o.fail(f->to_string() + " not generic at n=" + std::to_string(n));
    }
    if (o.pass) o.detail << f->to_string() << " -> " << to_string(got) << "; ";
  }
}

void moebius_form(Outcome& o) {
  double zeta_tail = 0.0;  // sum over d > 30 of 1/d^2
  {
    double s = 0.0;
    for (int d = 1; d <= 30; ++d) s += 1.0 / (d * d);
    zeta_tail = M_PI * M_PI / 6.0 - s;
  }
  for (const Curve& c : {Curve(1, 1), Curve(-1, 1), Curve(0, 1), Curve(1, 0), Curve(-1, 2)}) {
    for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
      CurveDensities dens(c, *f);
      double truncated = 0.0, C = 0.0;
      for (std::uint64_t d = 1; d <= 900; ++d) {
        const int mu = moebius(d);
        if (mu == 0) continue;
        const double r = to_double(dens.ratio(d));
        C = std::max(C, r * static_cast<double>(d * d));
        if (d <= 30) truncated += mu * r;
      }
      const double value = constant_serre(c, *f, 101).approx;
      const double gap = std::abs(truncated - value), bound = C * zeta_tail;
      if (gap > bound) o.fail("(" + std::to_string(c.a) + "," + std::to_string(c.b) + ") " + f->to_string() + ": " + fmt(gap) + " > " + fmt(bound));
      if (o.pass) o.detail << "(" << c.a << "," << c.b << ") " << f->to_string() << " " << fmt(gap) << "<=" << fmt(bound) << "; ";
    }
  }
}

void chebotarev(Outcome& o) {
  const Curve c(-1, 2);
  const ApSeries& s = series_to_million(c);
  const SerreData sd = serre_data(c);
  const double N = static_cast<double>(s.entries.size());
  for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
    const SfReport r = pi_sf(s, *f, {{5, 7, 11}, 101, false});
    for (const DivisibilityRow& row : r.divisibility) {
      if (std::gcd(row.n, sd.m_e) != 1) o.fail("n not coprime to m_e");
      const double rho = to_double(row.density);
      const double sigma = std::sqrt(N * rho * (1 - rho));
      const double z = (static_cast<double>(row.observed) - N * rho) / sigma;
      if (std::abs(z) > 4.0) o.fail(f->to_string() + " n=" + std::to_string(row.n) + " z=" + fmt(z));
      o.detail << f->to_string() << " n=" << row.n << " z=" << fmt(z) << "; ";
    }
  }
}

void conjecture_band(Outcome& o) {
  for (const Curve& c : {Curve(-1, 1), Curve(1, 1), Curve(-1, 2)}) {
    const ApSeries& s = series_to_million(c);
    for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
      const SfReport r = pi_sf(s, *f, {{}, 101, true});
      const double gap = std::abs(r.empirical_ratio - r.constant->approx);
      if (gap > 0.05) o.fail("(" + std::to_string(c.a) + "," + std::to_string(c.b) + ") " + f->to_string() + " gap " + fmt(gap));
      o.detail << "(" << c.a << "," << c.b << ") " << f->to_string() << " " << fmt(r.empirical_ratio) << " vs "
               << fmt(r.constant->approx) << "; ";
    }
  }
}

void family(Outcome& o) {
  for (const BiPoly* f : {&frobdisc(), &koblitz()}) {
    FamilyOptions opts;
    opts.ell_max = 101;
    const FamilyReport r = family_average(30, 30, *f, opts);
    const double skipped = static_cast<double>(r.skipped) / static_cast<double>(r.box_size);
    if (skipped >= 0.2) o.fail(f->to_string() + " skipped fraction " + fmt(skipped));
    if (std::abs(r.difference) > 0.01) o.fail(f->to_string() + " difference " + fmt(r.difference));
    o.detail << f->to_string() << " avg " << fmt(r.average) << " generic " << fmt(r.generic.approx) << " skipped " << r.skipped
             << "/" << r.box_size << "; ";
  }
}

void ap_oracle(Outcome& o) {
  gen::Gen g(1729);
  std::uint64_t checked = 0;
  for (int i = 0; i < 10; ++i) {
    const Curve c = g.curve(10'000);
    for (std::uint64_t p : primes_up_to(200)) {
      if (p < 5 || detail::reduce(c.delta(), p) == 0) continue;
      const auto want = static_cast<std::int64_t>(p) - static_cast<std::int64_t>(naive_affine_points(c, p));
      if (ap(c, p) != want) o.fail("(" + std::to_string(c.a) + "," + std::to_string(c.b) + ") p=" + std::to_string(p));
      ++checked;
    }
  }
  std::uint64_t hasse = 0;
  for (const Curve& c : {Curve(-1, 1), Curve(1, 1), Curve(-1, 2)}) {
    for (const ApEntry& e : series_to_million(c).entries) {
      if (e.ap * e.ap > static_cast<std::int64_t>(4 * e.p)) o.fail("Hasse at p=" + std::to_string(e.p));
      ++hasse;
    }
  }
  if (o.pass) o.detail << checked << " naive comparisons; Hasse on " << hasse << " values to 10^6";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact local-factor identities", 10, local_identities},
      {2, "trace-determinant fiber formula", 5, fiber_formula},
      {3, "count_cf equals enumeration oracle", 60, oracle_equivalence},
      {4, "scaled local densities bounded", 300, key_lemma},
      {5, "Serre subgroup enumeration at level 36", 300, serre_oracle},
      {6, "Moebius-series truncation", 300, moebius_form},
      {7, "Chebotarev divisibility frequencies", 900, chebotarev},
      {8, "squarefree ratio against constant", 1200, conjecture_band},
      {9, "family average of constants", 1800, family},
      {10, "a_p oracle and Hasse bound", 300, ap_oracle},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) o.fail("took " + fmt(secs) + " s, limit " + fmt(c.limit_seconds) + " s");
    failures += !o.pass;
    std::printf("%s [%d] %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
