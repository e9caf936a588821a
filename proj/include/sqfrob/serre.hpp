// Serre-curve data and the squarefree-density constants.
//
// For a Serre curve E the adelic image is the index-2 subgroup
//   H_E = ker( g -> eps(g mod 2) * chi_d(det g) )
// where eps is the sign character of GL2(F_2) = S_3 acting on the nonzero
// vectors of F_2^2 and chi_d is the Kronecker character of the fundamental
// discriminant d of Q(sqrt(Delta)). Its conductor lcm(2, |d|) is M_E.
//
// Local densities away from M_E are generic. At a squarefree n | M_E the
// density |C_{E,f}(n^2)| / |G_E(n^2)| is computed at the level L = lcm(n^2, M_E)
// where G_E(L) is the full preimage of ker psi:
//
//   ratio = (P + S) / |GL2(Z/L)|,   P = #{h : f(h) = 0 mod n^2},
//                                   S = sum over the same h of psi(h).
//
// psi factors over the primes of M_E (Legendre symbols at odd p, eps times a
// 2-adic character of det at 2), so P and S are products of local counts.
// At a prime of M_E not dividing n the local character sum is zero, so only
// n = rad(M_E) can differ from the generic density.
//
// All constants here are valid under the hypothesis that E is a Serre curve;
// Serre-hood is not checked.
#pragma once

#include "sqfrob/bipoly.hpp"
#include "sqfrob/gl2.hpp"
#include "sqfrob/integers.hpp"
#include "sqfrob/rational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sqfrob {

/// y^2 = x^3 + a x + b.
struct Curve {
  static constexpr std::int64_t kMaxA = 1'000'000;
  static constexpr std::int64_t kMaxB = 100'000'000;

  std::int64_t a = 0;
  std::int64_t b = 0;

  Curve() : Curve(0, 1) {}
  Curve(std::int64_t a_, std::int64_t b_) : a(a_), b(b_) {
    if (a < -kMaxA || a > kMaxA || b < -kMaxB || b > kMaxB) {
      throw std::invalid_argument("curve coefficients outside |a| <= 10^6, |b| <= 10^8");
    }
    if (delta() == 0) {
      throw std::invalid_argument("singular curve (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }

  /// Discriminant of the cubic, -(4a^3 + 27b^2).
  std::int64_t delta() const { return -(4 * a * a * a + 27 * b * b); }

  friend bool operator==(const Curve&, const Curve&) = default;
};

struct SerreData {
  std::int64_t delta = 0;
  std::int64_t delta_sf = 0;
  std::int64_t d_fund = 0;
  std::uint64_t m_e = 0;
  std::vector<PrimePower> m_e_factors;
  DetCharacter two_part = DetCharacter::trivial();  // 2-adic component of chi_d

  int two_adic_valuation() const { return m_e_factors.front().exponent; }
};

inline SerreData serre_data(const Curve& curve) {
  SerreData sd;
  sd.delta = curve.delta();
  sd.delta_sf = squarefree_part(sd.delta);
  const std::uint64_t abs_sf = detail::abs_u64(sd.delta_sf);
  if (detail::reduce(sd.delta_sf, 4) == 1) {
    sd.d_fund = sd.delta_sf;
    sd.m_e = 2 * abs_sf;
  } else {
    sd.d_fund = 4 * sd.delta_sf;
    sd.m_e = 4 * abs_sf;
    if (sd.delta_sf % 2 != 0) {
      sd.two_part = DetCharacter::minus4();
    } else {
      const std::int64_t odd = sd.delta_sf / 2;
      sd.two_part = detail::reduce(odd, 4) == 1 ? DetCharacter::plus8() : DetCharacter::minus8();
    }
  }
  sd.m_e_factors = factorize(static_cast<std::int64_t>(sd.m_e)).factors;
  return sd;
}

/// Sign of the permutation g induces on the three nonzero vectors of F_2^2.
inline int mod2_sign(const Mat2& g) {
  const auto bit = [](std::int64_t v) { return static_cast<int>(((v % 2) + 2) % 2); };
  const int a = bit(g.a), b = bit(g.b), c = bit(g.c), d = bit(g.d);
  if (((a * d + b * c) & 1) == 0) throw std::invalid_argument("mod2_sign: matrix not invertible mod 2");
  // nonzero vectors (1,0), (0,1), (1,1) encoded as x + 2y - 1
  const std::array<std::pair<int, int>, 3> vs{{{1, 0}, {0, 1}, {1, 1}}};
  std::array<int, 3> perm{};
  for (int i = 0; i < 3; ++i) {
    const int x = (a * vs[i].first + b * vs[i].second) & 1;
    const int y = (c * vs[i].first + d * vs[i].second) & 1;
    perm[i] = x + 2 * y - 1;
  }
  int inversions = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) inversions += perm[i] > perm[j];
  return inversions % 2 ? -1 : 1;
}

/// psi(g) = eps(g mod 2) * kronecker(d_fund, det g); G_E(M_E) = ker psi.
inline int psi(const Mat2& g, const SerreData& sd) {
  const std::uint64_t det = detail::reduce(g.det(), sd.m_e);
  if (std::gcd(det, sd.m_e) != 1) throw std::invalid_argument("psi: matrix not invertible mod M_E");
  return mod2_sign(g) * kronecker(sd.d_fund, static_cast<std::int64_t>(det));
}

/// Local data at a prime of M_E: P_p and S_p divided by |GL2(Z/L_p)|.
struct CurvePrimeFactor {
  std::uint64_t prime = 2;
  std::uint64_t level = 1;
  bool conditioned = false;  // whether p | n, i.e. f = 0 mod p^2 is imposed
  Rational plain = 1;
  Rational twisted = 0;
};

inline CurvePrimeFactor curve_prime_factor(const SerreData& sd, const BiPoly& f, std::uint64_t p, bool conditioned) {
  CurvePrimeFactor out;
  out.prime = p;
  out.conditioned = conditioned;
  if (p != 2) {
    if (!conditioned) {
      // Legendre symbol of det sums to zero over GL2(F_p).
      out.level = p;
      return out;
    }
    const PrimePower q{p, 2};
    const BigInt order = gl2_order(q.value());
    out.level = q.value();
    out.plain = Rational(to_bigint(local_cf_count(f, q)), order);
    out.twisted = Rational(to_bigint(local_cf_count(f, q, DetCharacter::legendre(p))), order);
    return out;
  }
  const int nu = sd.two_adic_valuation();
  std::uint64_t level = std::uint64_t{1} << nu;
  if (conditioned) level = std::max<std::uint64_t>(level, 4);
  const std::uint64_t cond = conditioned ? 4 : 1;
  std::int64_t plain = 0, twisted = 0;
  for_each_gl2(level, [&](const Mat2& h) {
    if (f.eval_mod(h.trace(), h.det(), cond) != 0) return;
    ++plain;
    twisted += mod2_sign(h) * sd.two_part(detail::reduce(h.det(), level));
  });
  const BigInt order = gl2_order(level);
  out.level = level;
  out.plain = Rational(BigInt(plain), order);
  out.twisted = Rational(BigInt(twisted), order);
  return out;
}

/// Divisor-indexed term of the finite sum over n | M_E.
struct DivisorTerm {
  std::uint64_t n = 1;
  int mu = 1;
  Rational ratio = 1;
  Rational generic_ratio = 1;
};

/// Densities |C_{E,f}(n^2)| / |G_E(n^2)| for one (curve, f), with caches for
/// the local pieces.
class CurveDensities {
 public:
  CurveDensities(const Curve& curve, BiPoly f) : curve_(curve), f_(std::move(f)), sd_(serre_data(curve)) {}

  const SerreData& serre() const { return sd_; }
  const BiPoly& poly() const { return f_; }

  /// count_cf(f, l^2) / |GL2(Z/l^2)| for a prime l.
  const Rational& generic(std::uint64_t ell) {
    auto it = generic_.find(ell);
    if (it == generic_.end()) it = generic_.emplace(ell, generic_local_density(f_, ell).density()).first;
    return it->second;
  }

  void seed_generic(std::uint64_t ell, Rational r) { generic_.emplace(ell, std::move(r)); }

  /// Curve part at n2 | M_E (n2 squarefree).
  Rational curve_part(std::uint64_t n2) {
    if (sd_.m_e % n2 != 0) throw std::invalid_argument("curve_part: n does not divide M_E");
    Rational plain = 1, twisted = 1;
    for (const PrimePower& pe : sd_.m_e_factors) {
      const CurvePrimeFactor& lf = local(pe.prime, n2 % pe.prime == 0);
      plain *= lf.plain;
      twisted *= lf.twisted;
    }
    return plain + twisted;
  }

  /// |C_{E,f}(n^2)| / |G_E(n^2)| for squarefree n.
  Rational ratio(std::uint64_t n) {
    if (n == 0 || moebius(n) == 0) throw std::invalid_argument("ratio_cef: n must be squarefree and positive");
    if (n == 1) return 1;
    std::uint64_t n2 = 1;
    Rational out = 1;
    for (const PrimePower& pe : factorize(static_cast<std::int64_t>(n)).factors) {
      if (sd_.m_e % pe.prime == 0) {
        n2 *= pe.prime;
      } else {
        out *= generic(pe.prime);
      }
    }
    if (n2 > 1) out *= curve_part(n2);
    return out;
  }

  /// The terms mu(n) ratio(n) over squarefree n | M_E.
  std::vector<DivisorTerm> divisor_terms() {
    std::vector<DivisorTerm> terms;
    const std::size_t k = sd_.m_e_factors.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      DivisorTerm t;
      Rational generic_ratio = 1;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask >> i & 1) {
          const std::uint64_t p = sd_.m_e_factors[i].prime;
          t.n *= p;
          t.mu = -t.mu;
          generic_ratio *= generic(p);
        }
      }
      t.ratio = t.n == 1 ? Rational(1) : curve_part(t.n);
      t.generic_ratio = generic_ratio;
      terms.push_back(std::move(t));
    }
    std::sort(terms.begin(), terms.end(), [](const DivisorTerm& a, const DivisorTerm& b) { return a.n < b.n; });
    return terms;
  }

 private:
  const CurvePrimeFactor& local(std::uint64_t p, bool conditioned) {
    const auto key = std::make_pair(p, conditioned);
    auto it = local_.find(key);
    if (it == local_.end()) it = local_.emplace(key, curve_prime_factor(sd_, f_, p, conditioned)).first;
    return it->second;
  }

  Curve curve_;
  BiPoly f_;
  SerreData sd_;
  std::map<std::uint64_t, Rational> generic_;
  std::map<std::pair<std::uint64_t, bool>, CurvePrimeFactor> local_;
};

inline Rational ratio_cef(const Curve& curve, const BiPoly& f, std::uint64_t n) {
  return CurveDensities(curve, f).ratio(n);
}

inline constexpr std::uint64_t kMaxEllMax = 5000;

/// sum over primes l > ell_max of 1 / l^2: exact to 10^6, integral bound beyond.
inline double prime_square_tail(std::uint64_t ell_max) {
  static const std::vector<std::uint64_t> primes = primes_up_to(1'000'000);
  constexpr double kCut = 1e6;
  double s = 1.0 / (kCut * std::log(kCut));
  if (ell_max >= 1'000'000) return 1.0 / (static_cast<double>(ell_max) * std::log(static_cast<double>(ell_max)));
  for (auto it = std::upper_bound(primes.begin(), primes.end(), ell_max); it != primes.end(); ++it) {
    const double l = static_cast<double>(*it);
    s += 1.0 / (l * l);
  }
  return s;
}

/// Generic local factors |C_f(l^2)| / |GL2(Z/l^2)| for all primes l <= ell_max.
class GenericFactors {
 public:
  GenericFactors(BiPoly f, std::uint64_t ell_max) : f_(std::move(f)), ell_max_(ell_max) {
    if (ell_max < 2 || ell_max > kMaxEllMax) {
      throw BudgetError("ell_max must lie in [2, " + std::to_string(kMaxEllMax) + "]");
    }
    if (f_.is_constant()) throw std::invalid_argument("constant polynomial does not define a sequence");
    for (std::uint64_t ell : primes_up_to(ell_max)) {
      factors_.push_back(generic_local_density(f_, ell));
      const Rational r = factors_.back().density();
      product_ *= 1 - r;
      key_lemma_ = std::max(key_lemma_, to_double(r) * static_cast<double>(ell * ell));
    }
  }

  const BiPoly& poly() const { return f_; }
  std::uint64_t ell_max() const { return ell_max_; }
  const std::vector<LocalDensity>& factors() const { return factors_; }
  /// prod over l <= ell_max of (1 - r_l).
  const Rational& product() const { return product_; }
  /// max over l <= ell_max of l^2 r_l.
  double key_lemma_constant() const { return key_lemma_; }
  double tail_estimate() const { return key_lemma_ * prime_square_tail(ell_max_); }

 private:
  BiPoly f_;
  std::uint64_t ell_max_;
  std::vector<LocalDensity> factors_;
  Rational product_ = 1;
  double key_lemma_ = 0.0;
};

struct SerreConstant {
  Rational value = 1;
  double approx = 1.0;
  std::uint64_t ell_max = 0;
  double tail_estimate = 0.0;
  double key_lemma_constant = 0.0;
  Rational finite_part = 1;
  Rational generic_part = 1;
  std::vector<LocalDensity> local_factors;  // factors entering generic_part
  std::vector<DivisorTerm> divisor_terms;   // empty for the generic constant
  std::optional<SerreData> serre;
};

inline SerreConstant constant_generic(const GenericFactors& table) {
  SerreConstant c;
  c.ell_max = table.ell_max();
  c.generic_part = table.product();
  c.finite_part = 1;
  c.value = c.generic_part;
  c.approx = to_double(c.value);
  c.key_lemma_constant = table.key_lemma_constant();
  c.tail_estimate = table.tail_estimate();
  c.local_factors = table.factors();
  return c;
}

inline SerreConstant constant_generic(const BiPoly& f, std::uint64_t ell_max) {
  return constant_generic(GenericFactors(f, ell_max));
}

/// Truncated constant for a curve assumed to be a Serre curve.
inline SerreConstant constant_serre(const Curve& curve, const GenericFactors& table) {
  CurveDensities densities(curve, table.poly());
  for (const LocalDensity& ld : table.factors()) densities.seed_generic(ld.modulus, ld.density());
  const SerreData& sd = densities.serre();

  SerreConstant c;
  c.ell_max = table.ell_max();
  c.serre = sd;
  for (const LocalDensity& ld : table.factors()) {
    if (sd.m_e % ld.modulus == 0) continue;
    c.generic_part *= 1 - ld.density();
    c.local_factors.push_back(ld);
  }
  c.divisor_terms = densities.divisor_terms();
  c.finite_part = 0;
  for (const DivisorTerm& t : c.divisor_terms) c.finite_part += t.mu * t.ratio;
  c.value = c.finite_part * c.generic_part;
  c.approx = to_double(c.value);
  c.key_lemma_constant = table.key_lemma_constant();
  c.tail_estimate = table.tail_estimate();
  return c;
}

inline SerreConstant constant_serre(const Curve& curve, const BiPoly& f, std::uint64_t ell_max) {
  return constant_serre(curve, GenericFactors(f, ell_max));
}

}  // namespace sqfrob
