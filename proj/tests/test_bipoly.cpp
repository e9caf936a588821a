#include "sqfrob/bipoly.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

using namespace sqfrob;

TEST(BiPoly, Builtins) {
  EXPECT_EQ(builtin("koblitz").terms(), (std::vector<Term>{{0, 0, 1}, {0, 1, 1}, {1, 0, -1}}));
  EXPECT_EQ(builtin("frobdisc").terms(), (std::vector<Term>{{0, 1, -4}, {2, 0, 1}}));
  EXPECT_THROW(builtin("lang-trotter"), std::invalid_argument);
}

TEST(BiPoly, CanonicalForm) {
  const BiPoly f({{1, 0, 3}, {0, 0, 2}, {1, 0, -3}, {0, 2, 0}});
  EXPECT_EQ(f.terms(), (std::vector<Term>{{0, 0, 2}}));
  EXPECT_TRUE(BiPoly({{1, 1, 5}, {1, 1, -5}}).is_zero());
  EXPECT_THROW(BiPoly({{9, 0, 1}}), std::invalid_argument);
  EXPECT_EQ(builtin("frobdisc").to_string(), "x^2-4*y");
  EXPECT_EQ(BiPoly({{0, 0, -7}}).to_string(), "-7");
}

TEST(BiPoly, EvalModExamples) {
  EXPECT_EQ(builtin("koblitz").eval_mod(3, 7, 5), 0u);
  EXPECT_EQ(builtin("frobdisc").eval_mod(2, 1, 12), 0u);
  EXPECT_EQ(builtin("frobdisc").eval_mod(1, 3, 9), 7u);
  EXPECT_EQ(builtin("frobdisc").eval_mod(-5, -5, 1), 0u);
}

TEST(BiPoly, Partials) {
  const BiPoly fd = builtin("frobdisc"), kb = builtin("koblitz");
  EXPECT_EQ(fd.partial(Var::x), BiPoly({{1, 0, 2}}));
  EXPECT_EQ(fd.partial(Var::y), BiPoly({{0, 0, -4}}));
  EXPECT_EQ(kb.partial(Var::x), BiPoly({{0, 0, -1}}));
  EXPECT_EQ(kb.partial(Var::y), BiPoly({{0, 0, 1}}));
}

TEST(BiPoly, FiniteDifferenceMatchesPartial) {
  // degree <= 2 in x: f(x+1, y) - f(x, y) = f_x(x, y) + f_xx / 2
  for (const char* name : {"frobdisc", "koblitz"}) {
    const BiPoly f = builtin(name);
    const BiPoly fx = f.partial(Var::x), fxx = fx.partial(Var::x);
    for (std::int64_t x = -6; x <= 6; ++x)
      for (std::int64_t y = -6; y <= 6; ++y) {
        ASSERT_EQ(2 * (f.eval(x + 1, y) - f.eval(x, y)), 2 * fx.eval(x, y) + fxx.eval(x, y)) << name;
        ASSERT_EQ(f.eval(x, y + 1) - f.eval(x, y), f.partial(Var::y).eval(x, y)) << name;
      }
  }
}

TEST(BiPoly, EvalModRespectsCrt) {
  gen::Gen g(21);
  for (int i = 0; i < 500; ++i) {
    const BiPoly f = g.poly(8, 8, 1'000'000'000, 6);
    std::uint64_t m1 = g.natural(2, 1u << 16), m2 = g.natural(2, 1u << 16);
    while (std::gcd(m1, m2) != 1) m2 = g.natural(2, 1u << 16);
    const std::int64_t x = g.integer(-1'000'000'000'000, 1'000'000'000'000);
    const std::int64_t y = g.integer(-1'000'000'000'000, 1'000'000'000'000);
    const std::uint64_t v = f.eval_mod(x, y, m1 * m2);
    ASSERT_EQ(v % m1, f.eval_mod(x, y, m1));
    ASSERT_EQ(v % m2, f.eval_mod(x, y, m2));
  }
}

TEST(BiPoly, EvalModMatchesExactEval) {
  gen::Gen g(22);
  for (int i = 0; i < 500; ++i) {
    const BiPoly f = g.poly(3, 3, 1000, 5);
    const std::int64_t x = g.integer(-1000, 1000), y = g.integer(-1000, 1000);
    const std::uint64_t m = g.natural(1, 1'000'000'007);
    const __int128 v = f.eval(x, y);
    const auto want = static_cast<std::uint64_t>(((v % m) + m) % m);
    ASSERT_EQ(f.eval_mod(x, y, m), want);
  }
}

TEST(BiPoly, ExactEvalOverflowDetected) {
  const BiPoly f({{8, 8, 1}});
  EXPECT_THROW(f.eval(1'000'000, 1'000'000), std::overflow_error);
}

TEST(SingularPairs, BuiltinsHaveNone) {
  for (std::uint64_t p : primes_up_to(200)) {
    if (p == 2) continue;
    EXPECT_EQ(count_singular_pairs(builtin("frobdisc"), p), 0u) << p;
    EXPECT_EQ(count_singular_pairs(builtin("koblitz"), p), 0u) << p;
  }
}

TEST(SingularPairs, Examples) {
  EXPECT_EQ(count_singular_pairs(BiPoly({{2, 1, 1}, {1, 0, 1}}), 3), 0u);
  // (x - y)^2 is singular along the whole diagonal
  EXPECT_EQ(count_singular_pairs(BiPoly({{2, 0, 1}, {1, 1, -2}, {0, 2, 1}}), 5), 4u);
  EXPECT_THROW(count_singular_pairs(builtin("koblitz"), 2), std::invalid_argument);
  EXPECT_THROW(count_singular_pairs(builtin("koblitz"), 211), std::invalid_argument);
}
