// Integer bivariate polynomials f(x, y) defining the sequences f(a_p, p).
#pragma once

#include "sqfrob/integers.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace sqfrob {

enum class Var { x, y };

struct Term {
  int deg_x = 0;
  int deg_y = 0;
  std::int64_t coeff = 0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Canonical sparse polynomial in Z[x, y]: terms sorted by (deg_x, deg_y),
/// no duplicate monomials, no zero coefficients. Degrees are capped at
/// kMaxDegree in each variable so modular evaluation stays in 128-bit range.
class BiPoly {
 public:
  static constexpr int kMaxDegree = 8;

  BiPoly() = default;

  explicit BiPoly(std::vector<Term> terms) {
    for (const Term& t : terms) {
      if (t.deg_x < 0 || t.deg_y < 0 || t.deg_x > kMaxDegree || t.deg_y > kMaxDegree) {
        throw std::invalid_argument("BiPoly: degree outside [0, " + std::to_string(kMaxDegree) + "]");
      }
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
      return std::tie(a.deg_x, a.deg_y) < std::tie(b.deg_x, b.deg_y);
    });
    for (const Term& t : terms) {
      if (!terms_.empty() && terms_.back().deg_x == t.deg_x && terms_.back().deg_y == t.deg_y) {
        if (__builtin_add_overflow(terms_.back().coeff, t.coeff, &terms_.back().coeff)) {
          throw std::overflow_error("BiPoly: coefficient overflow");
        }
      } else {
        terms_.push_back(t);
      }
    }
    std::erase_if(terms_, [](const Term& t) { return t.coeff == 0; });
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int deg_x() const {
    int d = 0;
    for (const Term& t : terms_) d = std::max(d, t.deg_x);
    return d;
  }
  int deg_y() const {
    int d = 0;
    for (const Term& t : terms_) d = std::max(d, t.deg_y);
    return d;
  }
  bool is_constant() const { return deg_x() == 0 && deg_y() == 0; }

  /// f(x, y) mod m in [0, m).
  std::uint64_t eval_mod(std::int64_t x, std::int64_t y, std::uint64_t m) const {
    if (m == 0) throw std::invalid_argument("eval_mod: modulus must be positive");
    if (m == 1) return 0;
    std::array<std::uint64_t, kMaxDegree + 1> xp{}, yp{};
    xp[0] = yp[0] = 1 % m;
    const std::uint64_t xr = detail::reduce(x, m), yr = detail::reduce(y, m);
    for (int i = 1; i <= kMaxDegree; ++i) {
      xp[i] = detail::mulmod(xp[i - 1], xr, m);
      yp[i] = detail::mulmod(yp[i - 1], yr, m);
    }
    std::uint64_t acc = 0;
    for (const Term& t : terms_) {
      const std::uint64_t c = detail::reduce(t.coeff, m);
      const std::uint64_t v = detail::mulmod(c, detail::mulmod(xp[t.deg_x], yp[t.deg_y], m), m);
      acc += v;
      if (acc >= m) acc -= m;
    }
    return acc;
  }

  /// Exact value over Z; throws std::overflow_error if it leaves 128-bit range.
  __int128 eval(std::int64_t x, std::int64_t y) const {
    __int128 acc = 0;
    for (const Term& t : terms_) {
      __int128 v = t.coeff;
      for (int i = 0; i < t.deg_x; ++i) {
        if (__builtin_mul_overflow(v, static_cast<__int128>(x), &v)) throw std::overflow_error("BiPoly::eval overflow");
      }
      for (int i = 0; i < t.deg_y; ++i) {
        if (__builtin_mul_overflow(v, static_cast<__int128>(y), &v)) throw std::overflow_error("BiPoly::eval overflow");
      }
      if (__builtin_add_overflow(acc, v, &acc)) throw std::overflow_error("BiPoly::eval overflow");
    }
    return acc;
  }

  BiPoly partial(Var v) const {
    std::vector<Term> out;
    for (const Term& t : terms_) {
      const int d = v == Var::x ? t.deg_x : t.deg_y;
      if (d == 0) continue;
      Term n = t;
      if (__builtin_mul_overflow(t.coeff, static_cast<std::int64_t>(d), &n.coeff)) {
        throw std::overflow_error("BiPoly::partial: coefficient overflow");
      }
      (v == Var::x ? n.deg_x : n.deg_y) -= 1;
      out.push_back(n);
    }
    return BiPoly(std::move(out));
  }

  /// Canonical text in the CLI grammar, highest-degree terms first, e.g. "x^2-4*y".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const Term& t = *it;
      const bool monomial = t.deg_x > 0 || t.deg_y > 0;
      std::int64_t c = t.coeff;
      if (c < 0) {
        s += '-';
      } else if (!s.empty()) {
        s += '+';
      }
      const std::uint64_t mag = detail::abs_u64(c);
      std::string body;
      if (!monomial || mag != 1) body = std::to_string(mag);
      auto var = [&](char name, int d) {
        if (d == 0) return;
        if (!body.empty()) body += '*';
        body += name;
        if (d > 1) body += "^" + std::to_string(d);
      };
      var('x', t.deg_x);
      var('y', t.deg_y);
      s += body;
    }
    return s;
  }

  friend bool operator==(const BiPoly&, const BiPoly&) = default;

 private:
  std::vector<Term> terms_;
};

/// The two sequences of interest: "koblitz" (y + 1 - x, the group order
/// p + 1 - a_p) and "frobdisc" (x^2 - 4y, the Frobenius discriminant).
inline BiPoly builtin(std::string_view name) {
  if (name == "koblitz") return BiPoly({{0, 1, 1}, {0, 0, 1}, {1, 0, -1}});
  if (name == "frobdisc") return BiPoly({{2, 0, 1}, {0, 1, -4}});
  throw std::invalid_argument("unknown builtin polynomial '" + std::string(name) + "'");
}

/// #{(T, D) in Z/p x (Z/p)^* : f = f_x = f_y = 0 mod p}.
inline std::uint64_t count_singular_pairs(const BiPoly& f, std::uint64_t p) {
  if (p < 3 || p > 200 || !is_prime(p)) throw std::invalid_argument("count_singular_pairs: need an odd prime p <= 200");
  const BiPoly fx = f.partial(Var::x), fy = f.partial(Var::y);
  std::uint64_t n = 0;
  for (std::uint64_t t = 0; t < p; ++t) {
    for (std::uint64_t d = 1; d < p; ++d) {
      const auto T = static_cast<std::int64_t>(t), D = static_cast<std::int64_t>(d);
      if (f.eval_mod(T, D, p) == 0 && fx.eval_mod(T, D, p) == 0 && fy.eval_mod(T, D, p) == 0) ++n;
    }
  }
  return n;
}

}  // namespace sqfrob
