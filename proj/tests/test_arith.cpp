#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ergo/arith.hpp"
#include "ergo/folner.hpp"

using namespace ergo;

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("3/8") == rat(3, 8));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(rat_string(rat(6, 4)) == "3/2");
  CHECK(rat_string(Rational(5)) == "5");
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
}

TEST_CASE("pow2 and to_ll guard rails") {
  CHECK(pow2(10) == 1024);
  CHECK_THROWS_AS(pow2(-1), InputError);
  CHECK_THROWS_AS(to_ll(pow2(70)), ResourceError);
}

TEST_CASE("quadratic values normalize and order correctly") {
  QuadVal s2(0, 1, 2);  // sqrt(2)
  CHECK(s2.sign() == 1);
  CHECK((s2 * s2).is_rational());
  CHECK((s2 * s2).rat_part() == 2);
  // perfect squares fold away
  QuadVal s9(0, 1, 9);
  CHECK(s9.is_rational());
  CHECK(s9.rat_part() == 3);
  // 1 + sqrt(2) vs 17/7: (17/7 - 1)^2 = 100/49 > 2, so 17/7 wins
  QuadVal x(1, 1, 2);
  CHECK(x.cmp(rat(17, 7)) < 0);
  CHECK(x.cmp(rat(12, 5)) > 0);
  CHECK((x * x.recip()).cmp(Rational(1)) == 0);
  CHECK(QuadVal(0, 1, 2).floor() == 1);
  CHECK(QuadVal(0, -1, 2).floor() == -2);
}

TEST_CASE("convexity gap reciprocal pins down known integer parts") {
  // u(eps) = 1 - sqrt(1 - eps^2/4) at p = 2
  QuadVal uHalf(1, -1, rat(15, 16));
  CHECK(floor_div_surd(4, 1, uHalf) == 125);
  QuadVal uQuarter(1, -1, rat(63, 64));
  CHECK(floor_div_surd(4, 1, uQuarter) == 509);
}

TEST_CASE("surd quotients bracket exactly") {
  std::vector<QuadVal> us = {QuadVal(1, -1, rat(15, 16)), QuadVal(0, 1, 2), QuadVal(rat(3, 7)),
                             QuadVal(2, -1, rat(9, 5))};
  std::vector<Rational> cs = {rat(1, 3), Rational(2), Rational(5)};
  std::vector<Rational> qs = {Rational(1), rat(4, 9), rat(3, 2)};
  for (const auto& u : us)
    for (const auto& c : cs)
      for (const auto& q : qs) {
        Int f = floor_div_surd(c, q, u);
        Int cl = ceil_div_surd(c, q, u);
        // t <= c*sqrt(q)/u  iff  t*u <= c*sqrt(q)
        CHECK(surd_quotient_sign(f, u, c, q) <= 0);
        CHECK(surd_quotient_sign(f + 1, u, c, q) > 0);
        CHECK(surd_quotient_sign(cl, u, c, q) >= 0);
        CHECK(surd_quotient_sign(cl - 1, u, c, q) < 0);
        CHECK(cl - f <= 1);
      }
  CHECK_THROWS_AS(ceil_div_surd(Rational(1), Rational(1), QuadVal(Rational(0))), InputError);
}

TEST_CASE("rng is deterministic and split seeds decorrelate") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(Rng(cell_seed(1, 2)).next() != Rng(cell_seed(1, 3)).next());
  CHECK(cell_seed(9, 4) == cell_seed(9, 4));
  Rng g(7);
  for (int i = 0; i < 200; ++i) {
    Rational v = g.grid64(false);
    CHECK(v >= Rational(-1));
    CHECK(v <= Rational(1));
    CHECK(denominator(Rational(v * 64)) == 1);
    Rational w = g.grid64(true);
    CHECK(w >= 0);
    CHECK(w <= Rational(2));
  }
  (void)c;
}
