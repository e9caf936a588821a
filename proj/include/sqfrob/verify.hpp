// Built-in self-check suite behind `sqfrob verify`.
#pragma once

#include "sqfrob/bipoly.hpp"
#include "sqfrob/frobenius.hpp"
#include "sqfrob/gl2.hpp"
#include "sqfrob/serre.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sqfrob {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// #{(x, y) in F_p^2 : y^2 = x^3 + a x + b}, by direct enumeration.
inline std::uint64_t naive_affine_points(const Curve& c, std::uint64_t p) {
  std::uint64_t n = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t rhs = (x * x % p * x + detail::reduce(c.a, p) * x + detail::reduce(c.b, p)) % p;
    for (std::uint64_t y = 0; y < p; ++y) n += y * y % p == rhs;
  }
  return n;
}

namespace detail {

inline Rational frobdisc_identity(std::uint64_t l) {
  if (l == 2) return Rational(2, 3);
  const BigInt L(l);
  return Rational(L * L + L - 1, L * L * (L * L - 1));
}

inline Rational koblitz_identity(std::uint64_t l) {
  const BigInt L(l);
  return Rational(L * L * L - L - 1, L * L * (L * L - 1) * (L - 1));
}

/// |{h mod level in ker psi : f(tr h, det h) = 0 mod level}| / |ker psi mod level|.
inline Rational serre_enumeration(const SerreData& sd, const BiPoly& f, std::uint64_t level) {
  std::uint64_t hits = 0, size = 0;
  for_each_gl2(level, [&](const Mat2& h) {
    if (psi(h, sd) != 1) return;
    ++size;
    hits += f.eval_mod(h.trace(), h.det(), level) == 0;
  });
  return Rational(BigInt(hits), BigInt(size));
}

}  // namespace detail

inline std::vector<VerifyCheck> run_verification() {
  std::vector<VerifyCheck> out;
  auto check = [&](std::string name, const std::function<std::string()>& body) {
    VerifyCheck c{std::move(name), false, {}};
    try {
      c.detail = body();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(c));
  };
  const BiPoly fd = builtin("frobdisc"), kb = builtin("koblitz");

  check("local identity x^2-4*y", [&]() -> std::string {
    for (std::uint64_t l : {2, 3, 5, 7}) {
      const Rational got(count_cf(fd, l * l), gl2_order(l * l));
      if (got != detail::frobdisc_identity(l)) return "l = " + std::to_string(l) + ": " + to_string(got);
    }
    return {};
  });
  check("local identity y+1-x", [&]() -> std::string {
    for (std::uint64_t l : {2, 3, 5, 7}) {
      const Rational got(count_cf(kb, l * l), gl2_order(l * l));
      if (got != detail::koblitz_identity(l)) return "l = " + std::to_string(l) + ": " + to_string(got);
    }
    return {};
  });
  for (const BiPoly* f : {&fd, &kb}) {
    check("count_cf against enumeration, " + f->to_string(), [&]() -> std::string {
      for (std::uint64_t m : {2, 3, 4, 5, 6, 7, 8, 9, 12}) {
        if (count_cf(*f, m) != enumerate_oracle(*f, m)) return "m = " + std::to_string(m);
      }
      return {};
    });
  }
  check("trace-determinant fibers mod p", []() -> std::string {
    for (std::uint64_t p : {3, 5, 7, 11}) {
      const TraceDetFiber fib = trace_det_fiber({p, 1});
      for (std::uint64_t t = 0; t < p; ++t)
        for (std::uint64_t d = 1; d < p; ++d) {
          const std::int64_t disc = static_cast<std::int64_t>(t * t) - 4 * static_cast<std::int64_t>(d);
          const std::int64_t want = static_cast<std::int64_t>(p * p) + static_cast<std::int64_t>(p) * legendre(disc, p);
          if (static_cast<std::int64_t>(fib(t, d)) != want) return "p = " + std::to_string(p);
        }
    }
    return {};
  });
  check("Legendre-twisted counts mod 9", [&]() -> std::string {
    const DetCharacter chi = DetCharacter::legendre(3);
    for (const BiPoly* f : {&fd, &kb}) {
      std::int64_t signed_count = 0;
      for_each_gl2(9, [&](const Mat2& g) {
        if (f->eval_mod(g.trace(), g.det(), 9) == 0) signed_count += chi(detail::reduce(g.det(), 9));
      });
      if (count_cf_twisted(*f, {3, 2}, chi) != signed_count) return f->to_string();
    }
    return {};
  });
  check("Serre curve (0,1) against level-36 enumeration", [&]() -> std::string {
    const Curve c(0, 1);
    const SerreData sd = serre_data(c);
    for (const BiPoly* f : {&fd, &kb}) {
      const Rational want = detail::serre_enumeration(sd, *f, 36);
      const Rational got = ratio_cef(c, *f, 6);
      if (got != want) return f->to_string() + ": " + to_string(got) + " vs " + to_string(want);
    }
    return {};
  });
  check("a_p against point enumeration", []() -> std::string {
    for (const Curve& c : {Curve(-1, 0), Curve(1, 1), Curve(-3, 5)}) {
      for (std::uint64_t p : primes_up_to(100)) {
        if (p < 5 || detail::reduce(c.delta(), p) == 0) continue;
        const std::int64_t want = static_cast<std::int64_t>(p) - static_cast<std::int64_t>(naive_affine_points(c, p));
        if (ap(c, p) != want) return "(" + std::to_string(c.a) + "," + std::to_string(c.b) + ") p = " + std::to_string(p);
      }
    }
    return {};
  });
  return out;
}

}  // namespace sqfrob
