// Number-theoretic substrate: primes, factorization, squarefree detection and
// quadratic symbols.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqfrob {

/// A requested table or sieve does not fit the memory budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A computation would exceed its configured work budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kSieveLimit = 400'000'000;
inline constexpr std::uint64_t kTrialDivisionLimit = 1'000'000;

struct PrimePower {
  std::uint64_t prime = 2;
  int exponent = 1;

  std::uint64_t value() const {
    std::uint64_t v = 1;
    for (int i = 0; i < exponent; ++i) v *= prime;
    return v;
  }
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  std::int64_t value = 1;
  int sign = 1;
  std::vector<PrimePower> factors;  // primes strictly increasing

  std::uint64_t radical() const {
    std::uint64_t r = 1;
    for (const auto& f : factors) r *= f.prime;
    return r;
  }
};

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Residue of a signed integer in [0, m).
inline std::uint64_t reduce(std::int64_t v, std::uint64_t m) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % m;
  const std::uint64_t r = (static_cast<std::uint64_t>(-(v + 1)) + 1) % m;
  return r == 0 ? 0 : m - r;
}

inline std::uint64_t reduce128(__int128 v, std::uint64_t m) {
  const __int128 r = v % static_cast<__int128>(m);
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

inline std::uint64_t abs_u64(std::int64_t n) {
  return n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
}

// Brent's variant of Pollard rho; n odd composite.
inline std::uint64_t pollard_brent(std::uint64_t n) {
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    const std::uint64_t block = 128;
    std::uint64_t r = 1;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(block, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += block;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1 && r < (1ull << 40));
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
}

}  // namespace detail

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
    std::uint64_t x = detail::powmod(a % n, d, n);
    if (a % n == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// All primes in [2, x], ascending.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t x) {
  if (x < 2) throw std::invalid_argument("primes_up_to: bound must be at least 2");
  if (x > kSieveLimit) throw CapacityError("primes_up_to: bound " + std::to_string(x) + " exceeds sieve limit");
  // composite[i] describes the odd number 2i+1
  std::vector<bool> composite((x + 1) / 2, false);
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= x; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    for (std::uint64_t j = p * p / 2; j < composite.size(); j += p) composite[j] = true;
  }
  std::vector<std::uint64_t> primes{2};
  for (std::uint64_t i = 1; i < composite.size(); ++i) {
    if (!composite[i]) primes.push_back(2 * i + 1);
  }
  return primes;
}

inline Factorization factorize(std::int64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: zero has no factorization");
  Factorization out;
  out.value = n;
  out.sign = n < 0 ? -1 : 1;
  std::uint64_t m = detail::abs_u64(n);

  std::vector<std::uint64_t> primes;
  auto take = [&](std::uint64_t p) {
    while (m % p == 0) {
      m /= p;
      primes.push_back(p);
    }
  };
  take(2);
  for (std::uint64_t p = 3; p <= kTrialDivisionLimit && p * p <= m; p += 2) take(p);

  if (m > 1) {
    std::vector<std::uint64_t> stack{m};
    while (!stack.empty()) {
      const std::uint64_t c = stack.back();
      stack.pop_back();
      if (c == 1) continue;
      if (is_prime(c)) {
        primes.push_back(c);
        continue;
      }
      const std::uint64_t r = detail::isqrt(c);
      if (r * r == c) {
        stack.push_back(r);
        stack.push_back(r);
        continue;
      }
      const std::uint64_t d = detail::pollard_brent(c);
      if (d == 1 || d == c) throw BudgetError("factorize: could not split " + std::to_string(c));
      stack.push_back(d);
      stack.push_back(c / d);
    }
  }

  std::sort(primes.begin(), primes.end());
  for (std::uint64_t p : primes) {
    if (!out.factors.empty() && out.factors.back().prime == p) {
      ++out.factors.back().exponent;
    } else {
      out.factors.push_back({p, 1});
    }
  }
  return out;
}

/// The squarefree d with n = d * m^2 and sign(d) = sign(n).
inline std::int64_t squarefree_part(std::int64_t n) {
  const Factorization f = factorize(n);
  std::int64_t d = 1;
  for (const auto& pe : f.factors) {
    if (pe.exponent % 2) d *= static_cast<std::int64_t>(pe.prime);
  }
  return f.sign * d;
}

/// Squarefreeness of |n|; zero is not squarefree.
inline bool is_squarefree(std::int64_t n) {
  if (n == 0) return false;
  std::uint64_t m = detail::abs_u64(n);
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
    if (m % (p * p) == 0) return false;
  }
  const Factorization f = factorize(n);
  return std::all_of(f.factors.begin(), f.factors.end(), [](const PrimePower& pe) { return pe.exponent == 1; });
}

inline int moebius(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("moebius: zero");
  if (n == 1) return 1;
  const Factorization f = factorize(static_cast<std::int64_t>(n));
  for (const auto& pe : f.factors) {
    if (pe.exponent > 1) return 0;
  }
  return f.factors.size() % 2 ? -1 : 1;
}

/// Jacobi symbol (a | n) for odd n >= 1.
inline int jacobi(std::uint64_t a, std::uint64_t n) {
  a %= n;
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const std::uint64_t r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

/// Kronecker symbol (a | n).
inline int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  std::uint64_t m = detail::abs_u64(n);
  if (n < 0 && a < 0) result = -result;
  if ((m & 1) == 0) {
    if ((detail::abs_u64(a) & 1) == 0) return 0;
    const std::uint64_t r = detail::reduce(a, 8);
    while ((m & 1) == 0) {
      m >>= 1;
      if (r == 3 || r == 5) result = -result;
    }
  }
  if (m == 1) return result;
  return result * jacobi(detail::reduce(a, m), m);
}

/// Legendre symbol for an odd prime p.
inline int legendre(std::int64_t a, std::uint64_t p) { return jacobi(detail::reduce(a, p), p); }

/// Bitmap of squarefree integers in [1, bound].
class SquarefreeTable {
 public:
  explicit SquarefreeTable(std::uint64_t bound) : bound_(bound) {
    if (bound == 0) throw std::invalid_argument("squarefree_table: bound must be positive");
    if (bound > kSieveLimit) throw CapacityError("squarefree_table: bound " + std::to_string(bound) + " exceeds limit");
    flags_.assign(bound + 1, true);
    flags_[0] = false;
    const std::uint64_t root = detail::isqrt(bound);
    if (root >= 2) {
      for (std::uint64_t q : primes_up_to(root)) {
        for (std::uint64_t k = q * q; k <= bound; k += q * q) flags_[k] = false;
      }
    }
  }

  std::uint64_t bound() const { return bound_; }

  /// Squarefreeness of |n| for |n| <= bound.
  bool operator()(std::int64_t n) const {
    const std::uint64_t m = detail::abs_u64(n);
    if (m > bound_) throw std::out_of_range("SquarefreeTable: " + std::to_string(n) + " outside table");
    return flags_[m];
  }

  bool covers(std::int64_t n) const { return detail::abs_u64(n) <= bound_; }

  std::uint64_t count() const { return static_cast<std::uint64_t>(std::count(flags_.begin(), flags_.end(), true)); }

 private:
  std::uint64_t bound_;
  std::vector<bool> flags_;
};

inline SquarefreeTable squarefree_table(std::uint64_t bound) { return SquarefreeTable(bound); }

}  // namespace sqfrob
