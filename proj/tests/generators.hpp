// Seeded generators for the property tests.
#pragma once

#include "sqfrob/bipoly.hpp"
#include "sqfrob/serre.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace sqfrob::gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  std::uint64_t natural(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }

  std::uint64_t prime(std::uint64_t lo, std::uint64_t hi) {
    for (;;) {
      const std::uint64_t p = natural(lo, hi);
      if (is_prime(p)) return p;
    }
  }

  Curve curve(std::int64_t bound) {
    for (;;) {
      const std::int64_t a = integer(-bound, bound), b = integer(-bound, bound);
      if (4 * a * a * a + 27 * b * b != 0) return Curve(a, b);
    }
  }

  /// Random polynomial with deg_x, deg_y bounded and small coefficients.
  BiPoly poly(int max_dx, int max_dy, std::int64_t coeff_bound, int max_terms) {
    for (;;) {
      std::vector<Term> terms;
      const int n = static_cast<int>(integer(1, max_terms));
      for (int i = 0; i < n; ++i) {
        terms.push_back({static_cast<int>(integer(0, max_dx)), static_cast<int>(integer(0, max_dy)),
                         integer(-coeff_bound, coeff_bound)});
      }
      BiPoly f(terms);
      if (!f.is_constant()) return f;
    }
  }

  /// c*y + g(x) with c != 0 and g of odd degree <= 3; linear in y, so squarefree over Q.
  BiPoly linear_in_y(std::int64_t coeff_bound) {
    for (;;) {
      const std::int64_t c = integer(-coeff_bound, coeff_bound);
      const int deg = integer(0, 1) ? 3 : 1;
      std::vector<Term> terms{{0, 1, c}, {deg, 0, integer(1, coeff_bound)}};
      for (int i = 0; i < deg; ++i) terms.push_back({i, 0, integer(-coeff_bound, coeff_bound)});
      BiPoly f(terms);
      if (c != 0) return f;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace sqfrob::gen
