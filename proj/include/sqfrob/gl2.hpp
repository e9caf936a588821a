// Exact counting in GL2(Z/mZ): group orders, trace/determinant fibers, and
// the sets C_f(m) = { g : f(tr g, det g) = 0 mod m }.
//
// Counts factor over the prime powers of m by CRT. For a prime power q the
// count is a sum over (trace, det) pairs of the fiber size M_q(T, D), so the
// work is polynomial in q rather than the q^4 of matrix enumeration. Two
// independent routes compute a local count:
//
//   * fiber route: tabulate M_q(T, D) from #{(b, c) : bc = k mod q}, then sum.
//     Any prime power, bounded by kFiberLimit.
//   * lift route (odd p, q = p or p^2): walk the zeros of f mod p and count
//     their lifts to Z/p^2 by linear algebra over F_p, using the closed form
//     of M_{p^2} in terms of the discriminant T^2 - 4D. Work is O(p) when f is
//     linear in y and O(p^2) otherwise.
//
// count_cf dispatches to the lift route whenever it applies; the tests pin the
// two routes against each other and against brute-force enumeration.
#pragma once

#include "sqfrob/bipoly.hpp"
#include "sqfrob/integers.hpp"
#include "sqfrob/rational.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqfrob {

struct Mat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t trace() const { return a + d; }
  std::int64_t det() const { return a * d - b * c; }
};

inline constexpr std::uint64_t kFiberLimit = 2500;      // odd prime powers
inline constexpr std::uint64_t kFiberLimitTwo = 512;    // powers of two (cubic build)
inline constexpr std::uint64_t kLiftWorkLimit = 400'000'000;
inline constexpr std::uint64_t kOracleLimit = 16;

/// |GL2(Z/mZ)| = prod over p^e || m of p^(4e-3) (p-1) (p^2-1). m = 1 gives 1.
inline BigInt gl2_order(std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("gl2_order: modulus must be positive");
  BigInt r = 1;
  if (m == 1) return r;
  for (const PrimePower& pe : factorize(static_cast<std::int64_t>(m)).factors) {
    const BigInt p = pe.prime;
    r *= boost::multiprecision::pow(p, static_cast<unsigned>(4 * pe.exponent - 3)) * (p - 1) * (p * p - 1);
  }
  return r;
}

/// #{(b, c) mod q : bc = k mod q} for q = p^e.
inline std::uint64_t count_bc_pairs(std::uint64_t k, PrimePower q) {
  const std::uint64_t p = q.prime, Q = q.value();
  std::uint64_t unit_part = (p - 1);
  for (int i = 1; i < q.exponent; ++i) unit_part *= p;  // (p-1) p^(e-1)
  k %= Q;
  if (k == 0) return static_cast<std::uint64_t>(q.exponent) * unit_part + Q;
  int v = 0;
  while (k % p == 0) {
    k /= p;
    ++v;
  }
  return static_cast<std::uint64_t>(v + 1) * unit_part;
}

/// Real characters of the determinant used for twisted counts.
class DetCharacter {
 public:
  enum class Kind { trivial, legendre, minus4, plus8, minus8 };

  static DetCharacter trivial() { return DetCharacter(Kind::trivial, 1); }
  static DetCharacter legendre(std::uint64_t p) {
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("DetCharacter::legendre: need an odd prime");
    return DetCharacter(Kind::legendre, p);
  }
  static DetCharacter minus4() { return DetCharacter(Kind::minus4, 2); }
  static DetCharacter plus8() { return DetCharacter(Kind::plus8, 2); }
  static DetCharacter minus8() { return DetCharacter(Kind::minus8, 2); }

  Kind kind() const { return kind_; }
  std::uint64_t prime() const { return prime_; }

  std::uint64_t conductor() const {
    switch (kind_) {
      case Kind::trivial: return 1;
      case Kind::legendre: return prime_;
      case Kind::minus4: return 4;
      case Kind::plus8:
      case Kind::minus8: return 8;
    }
    return 1;
  }

  /// Value at a unit residue d.
  int operator()(std::uint64_t d) const {
    switch (kind_) {
      case Kind::trivial: return 1;
      case Kind::legendre: return jacobi(d % prime_, prime_);
      case Kind::minus4: return d % 4 == 1 ? 1 : -1;
      case Kind::plus8: return (d % 8 == 1 || d % 8 == 7) ? 1 : -1;
      case Kind::minus8: return (d % 8 == 1 || d % 8 == 3) ? 1 : -1;
    }
    return 1;
  }

  /// Whether the character is defined modulo q.
  bool compatible_with(PrimePower q) const {
    if (kind_ == Kind::trivial) return true;
    if (q.prime != prime_) return false;
    return conductor() <= q.value();
  }

  friend bool operator==(const DetCharacter&, const DetCharacter&) = default;

 private:
  DetCharacter(Kind kind, std::uint64_t prime) : kind_(kind), prime_(prime) {}
  Kind kind_;
  std::uint64_t prime_;
};

/// M_q(T, D) = #{g in GL2(Z/qZ) : tr g = T, det g = D}, dense q x q table
/// (zero on non-unit D).
class TraceDetFiber {
 public:
  PrimePower modulus() const { return modulus_; }
  std::uint64_t size() const { return q_; }

  std::uint64_t operator()(std::uint64_t t, std::uint64_t d) const { return counts_[(t % q_) * q_ + d % q_]; }

  BigInt total() const {
    BigInt s = 0;
    for (std::uint64_t v : counts_) s += v;
    return s;
  }

 private:
  friend TraceDetFiber trace_det_fiber(PrimePower q);
  TraceDetFiber(PrimePower m, std::uint64_t q) : modulus_(m), q_(q), counts_(q * q, 0) {}

  PrimePower modulus_;
  std::uint64_t q_;
  std::vector<std::uint64_t> counts_;
};

/// Builds M_q(T, D) = sum over a mod q of #{bc = a(T - a) - D}. For odd p the
/// substitution a = T/2 + s makes the summand depend on (T^2 - 4D)/4 - s^2
/// only, so one table over discriminant classes serves every (T, D).
inline TraceDetFiber trace_det_fiber(PrimePower pp) {
  const std::uint64_t q = pp.value(), p = pp.prime;
  if ((p == 2 && q > kFiberLimitTwo) || q > kFiberLimit) {
    throw BudgetError("trace_det_fiber: modulus " + std::to_string(q) + " exceeds fiber budget");
  }
  TraceDetFiber fiber(pp, q);
  std::vector<std::uint64_t> bc(q);
  for (std::uint64_t k = 0; k < q; ++k) bc[k] = count_bc_pairs(k, pp);

  if (p == 2) {
    for (std::uint64_t t = 0; t < q; ++t) {
      for (std::uint64_t d = 1; d < q; d += 2) {
        std::uint64_t m = 0;
        for (std::uint64_t a = 0; a < q; ++a) {
          const std::uint64_t ad = a * ((t + q - a) % q) % q;
          m += bc[(ad + q - d) % q];
        }
        fiber.counts_[t * q + d] = m;
      }
    }
    return fiber;
  }

  std::vector<std::uint64_t> squares(q, 0);
  for (std::uint64_t s = 0; s < q; ++s) ++squares[s * s % q];
  std::vector<std::uint64_t> by_disc(q, 0);
  for (std::uint64_t r = 0; r < q; ++r) {
    if (squares[r] == 0) continue;
    for (std::uint64_t delta = 0; delta < q; ++delta) by_disc[delta] += squares[r] * bc[(delta + q - r) % q];
  }
  const std::uint64_t inv4 = detail::powmod(4, q - q / p - 1, q);  // 4^(phi(q) - 1)
  for (std::uint64_t t = 0; t < q; ++t) {
    for (std::uint64_t d = 0; d < q; ++d) {
      if (d % p == 0) continue;
      const std::uint64_t disc = (t * t % q + q - 4 * d % q) % q;
      fiber.counts_[t * q + d] = by_disc[disc * inv4 % q];
    }
  }
  return fiber;
}

namespace detail {

inline void checked_add(__int128& acc, __int128 v) {
  if (__builtin_add_overflow(acc, v, &acc)) throw BudgetError("local count exceeds 128-bit range");
}

/// #{(i, j) in F_p^2 : a i + b j + c = 0}.
inline std::uint64_t affine_solutions(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t p) {
  if (a != 0 || b != 0) return p;
  return c == 0 ? p * p : 0;
}

/// Solutions of the pair of affine equations a_k i + b_k j + c_k = 0 over F_p.
inline std::uint64_t affine_solutions(std::uint64_t a1, std::uint64_t b1, std::uint64_t c1, std::uint64_t a2,
                                      std::uint64_t b2, std::uint64_t c2, std::uint64_t p) {
  auto cross = [p](std::uint64_t u1, std::uint64_t v1, std::uint64_t u2, std::uint64_t v2) {
    return (mulmod(u1, v2, p) + p - mulmod(u2, v1, p)) % p;
  };
  if (cross(a1, b1, a2, b2) != 0) return 1;
  const bool zero1 = a1 == 0 && b1 == 0, zero2 = a2 == 0 && b2 == 0;
  if (zero1 && zero2) return (c1 == 0 && c2 == 0) ? p * p : 0;
  if (zero1) return c1 == 0 ? p : 0;
  if (zero2) return c2 == 0 ? p : 0;
  return (cross(a1, c1, a2, c2) == 0 && cross(b1, c1, b2, c2) == 0) ? p : 0;
}

/// Calls fn(T, D) for every T in [0, p), D in [1, p) with f(T, D) = 0 mod p.
template <class Fn>
void for_each_zero_mod_p(const BiPoly& f, std::uint64_t p, Fn&& fn) {
  if (f.deg_y() <= 1) {
    std::vector<Term> lead, rest;
    for (const Term& t : f.terms()) (t.deg_y == 1 ? lead : rest).push_back({t.deg_x, 0, t.coeff});
    const BiPoly g(std::move(lead)), h(std::move(rest));
    for (std::uint64_t t = 0; t < p; ++t) {
      const auto T = static_cast<std::int64_t>(t);
      const std::uint64_t gt = g.eval_mod(T, 0, p), ht = h.eval_mod(T, 0, p);
      if (gt != 0) {
        const std::uint64_t d = mulmod((p - ht) % p, powmod(gt, p - 2, p), p);
        if (d != 0) fn(t, d);
      } else if (ht == 0) {
        for (std::uint64_t d = 1; d < p; ++d) fn(t, d);
      }
    }
    return;
  }
  if (p * (p - 1) > kLiftWorkLimit) {
    throw BudgetError("zero enumeration mod " + std::to_string(p) + " exceeds work budget");
  }
  for (std::uint64_t t = 0; t < p; ++t) {
    for (std::uint64_t d = 1; d < p; ++d) {
      if (f.eval_mod(static_cast<std::int64_t>(t), static_cast<std::int64_t>(d), p) == 0) fn(t, d);
    }
  }
}

/// sum over T, unit D with f(T, D) = 0 mod q of chi(D) M_q(T, D), via the fiber table.
inline __int128 local_count_fiber(const BiPoly& f, PrimePower pp, const DetCharacter& chi) {
  const TraceDetFiber fiber = trace_det_fiber(pp);
  const std::uint64_t q = fiber.size(), p = pp.prime;
  __int128 acc = 0;
  for (std::uint64_t t = 0; t < q; ++t) {
    for (std::uint64_t d = 1; d < q; ++d) {
      if (d % p == 0) continue;
      if (f.eval_mod(static_cast<std::int64_t>(t), static_cast<std::int64_t>(d), q) != 0) continue;
      acc += static_cast<__int128>(chi(d)) * fiber(t, d);
    }
  }
  return acc;
}

/// Same sum for odd p and q in {p, p^2}, by counting lifts of zeros mod p.
///   M_p(T, D)    = p^2 + p (disc | p)
///   M_{p^2}(T,D) = p^4 - p^3 + (p^2 - p) p (1 + l) + p^2 N2
/// where l = (disc | p) and N2 = #{s mod p^2 : s^2 = disc/4}.
inline __int128 local_count_lift(const BiPoly& f, PrimePower pp, const DetCharacter& chi) {
  const std::uint64_t p = pp.prime;
  if (p == 2 || pp.exponent > 2) throw std::invalid_argument("local_count_lift: needs odd p and exponent <= 2");
  const __int128 P = p, P2 = P * P, P3 = P2 * P, P4 = P2 * P2;
  __int128 acc = 0;

  if (pp.exponent == 1) {
    for_each_zero_mod_p(f, p, [&](std::uint64_t t, std::uint64_t d) {
      const auto disc = static_cast<std::int64_t>(mulmod(t, t, p) + 4 * (p - d)) % static_cast<std::int64_t>(p);
      checked_add(acc, chi(d) * (P2 + P * legendre(disc, p)));
    });
    return acc;
  }

  const std::uint64_t q = p * p;
  const BiPoly fx = f.partial(Var::x), fy = f.partial(Var::y);
  const std::uint64_t minus4 = (p - 4 % p) % p;
  for_each_zero_mod_p(f, p, [&](std::uint64_t t, std::uint64_t d) {
    const auto T = static_cast<std::int64_t>(t), D = static_cast<std::int64_t>(d);
    const std::uint64_t c1 = f.eval_mod(T, D, q) / p;
    const std::uint64_t a1 = fx.eval_mod(T, D, p), b1 = fy.eval_mod(T, D, p);
    const std::uint64_t lifts = affine_solutions(a1, b1, c1, p);
    if (lifts == 0) return;
    const std::uint64_t disc = (mulmod(t, t, q) + mulmod(4, q - d, q)) % q;
    const int w = chi(d);
    if (disc % p != 0) {
      const int l = jacobi(disc % p, p);
      const __int128 m = P4 - P3 + (P2 - P) * P * (1 + l) + P2 * (1 + l);
      checked_add(acc, w * static_cast<__int128>(lifts) * m);
      return;
    }
    // p | disc: the lift's discriminant is divisible by p^2 iff
    // 2T i - 4 j + disc/p = 0 mod p.
    const std::uint64_t both = affine_solutions(a1, b1, c1, (2 * t) % p, minus4, (disc / p) % p, p);
    const __int128 m_v1 = P4 - P2;       // v_p(disc) = 1
    const __int128 m_v2 = P4 + P3 - P2;  // p^2 | disc
    checked_add(acc, w * (static_cast<__int128>(lifts - both) * m_v1 + static_cast<__int128>(both) * m_v2));
  });
  return acc;
}

}  // namespace detail

/// Signed local count sum over g mod q with f(tr g, det g) = 0 of chi(det g).
inline __int128 local_cf_count(const BiPoly& f, PrimePower q, const DetCharacter& chi = DetCharacter::trivial()) {
  if (!chi.compatible_with(q)) throw std::invalid_argument("invalid character for modulus " + std::to_string(q.value()));
  if (q.prime != 2 && q.exponent <= 2) return detail::local_count_lift(f, q, chi);
  return detail::local_count_fiber(f, q, chi);
}

/// |C_f(m)|.
inline BigInt count_cf(const BiPoly& f, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("count_cf: modulus must be positive");
  BigInt total = 1;
  if (m == 1) return total;
  for (const PrimePower& pe : factorize(static_cast<std::int64_t>(m)).factors) total *= to_bigint(local_cf_count(f, pe));
  return total;
}

/// sum over g in C_f(q) of chi(det g).
inline BigInt count_cf_twisted(const BiPoly& f, PrimePower q, const DetCharacter& chi) {
  return to_bigint(local_cf_count(f, q, chi));
}

/// Visits every invertible matrix mod m.
template <class Fn>
void for_each_gl2(std::uint64_t m, Fn&& fn) {
  const auto M = static_cast<std::int64_t>(m);
  for (std::int64_t a = 0; a < M; ++a)
    for (std::int64_t b = 0; b < M; ++b)
      for (std::int64_t c = 0; c < M; ++c)
        for (std::int64_t d = 0; d < M; ++d) {
          const std::int64_t det = ((a * d - b * c) % M + M) % M;
          if (std::gcd(det, M) == 1) fn(Mat2{a, b, c, d});
        }
}

/// Brute-force |{g in GL2(Z/mZ) : f(tr g, det g) = 0 mod m, pred(g)}|, m <= 16.
inline std::uint64_t enumerate_oracle(const BiPoly& f, std::uint64_t m,
                                      const std::function<bool(const Mat2&)>& pred = {}) {
  if (m == 0) throw std::invalid_argument("enumerate_oracle: modulus must be positive");
  if (m > kOracleLimit) throw CapacityError("enumerate_oracle: modulus " + std::to_string(m) + " > 16");
  std::uint64_t n = 0;
  for_each_gl2(m, [&](const Mat2& g) {
    if (f.eval_mod(g.trace(), g.det(), m) == 0 && (!pred || pred(g))) ++n;
  });
  return n;
}

enum class DensityKind { generic, curve };

/// |C(n^2)| / |G(n^2)| kept as an exact pair.
struct LocalDensity {
  std::uint64_t modulus = 1;
  BigInt numerator = 0;
  BigInt denominator = 1;
  DensityKind kind = DensityKind::generic;

  Rational density() const { return Rational(numerator, denominator); }
};

inline LocalDensity generic_local_density(const BiPoly& f, std::uint64_t n) {
  return {n, count_cf(f, n * n), gl2_order(n * n), DensityKind::generic};
}

}  // namespace sqfrob
