#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ergo/modes.hpp"

#include <algorithm>

using namespace ergo;

namespace {

std::vector<Rational> bits_to_seq(unsigned mask, int len) {
  std::vector<Rational> x;
  for (int i = 0; i < len; ++i) x.push_back(Rational((mask >> i) & 1u));
  return x;
}

std::vector<Rational> random_seq(Rng& rng, int len) {
  std::vector<Rational> x;
  for (int i = 0; i < len; ++i) x.push_back(rng.grid64(false));
  return x;
}

long long iterate_growth(const std::function<long long(long long)>& F, long long from,
                         long long times) {
  long long v = from;
  for (long long i = 0; i < times; ++i) v = F(v);
  return v;
}

}  // namespace

TEST_CASE("chain counter matches brute force on every short binary sequence") {
  for (int len = 1; len <= 10; ++len)
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::vector<Rational> x = bits_to_seq(mask, len);
      CHECK(count_fluctuations(x, Rational(1)).count == brute_fluctuations(x, Rational(1)));
      CHECK(count_fluctuations(x, rat(1, 2)).count == brute_fluctuations(x, rat(1, 2)));
    }
}

TEST_CASE("chain counter matches brute force on random rational sequences") {
  Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    int len = 2 + static_cast<int>(rng.below(11));
    std::vector<Rational> x = random_seq(rng, len);
    Rational eps = rat(1 + static_cast<long long>(rng.below(40)), 20);
    FluctuationReport rep = count_fluctuations(x, eps);
    CHECK(rep.count == brute_fluctuations(x, eps));
    // witness chain realizes the count
    for (size_t i = 1; i < rep.chain.size(); ++i) {
      Rational gap = x[static_cast<size_t>(rep.chain[i] - 1)] -
                     x[static_cast<size_t>(rep.chain[i - 1] - 1)];
      CHECK((gap >= eps || -gap >= eps));
    }
  }
}

TEST_CASE("spaced chains match brute force and never beat plain chains") {
  Rng rng(29);
  auto beta2 = [](long long n) { return n + 2; };
  auto beta2n = [](long long n) { return 2 * n; };
  for (int t = 0; t < 200; ++t) {
    int len = 2 + static_cast<int>(rng.below(9));
    std::vector<Rational> x = random_seq(rng, len);
    Rational eps = rat(1 + static_cast<long long>(rng.below(30)), 20);
    CHECK(count_fluctuations_at_distance(x, eps, beta2).count ==
          brute_fluctuations_at_distance(x, eps, beta2));
    CHECK(count_fluctuations_at_distance(x, eps, beta2n).count ==
          brute_fluctuations_at_distance(x, eps, beta2n));
    CHECK(count_fluctuations_at_distance(x, eps, beta2).count <=
          count_fluctuations(x, eps).count);
  }
}

TEST_CASE("minimal spacing changes nothing, exhaustively") {
  auto succ = [](long long n) { return n + 1; };
  for (int len = 1; len <= 10; ++len)
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::vector<Rational> x = bits_to_seq(mask, len);
      CHECK(count_fluctuations_at_distance(x, Rational(1), succ).count ==
            count_fluctuations(x, Rational(1)).count);
    }
}

TEST_CASE("counts shrink as the threshold grows") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    std::vector<Rational> x = random_seq(rng, 12);
    long long prev = -1;
    for (long long d = 1; d <= 8; ++d) {
      long long c = count_fluctuations(x, rat(d, 4)).count;
      if (prev >= 0) CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("the oscillating family realizes its advertised counts") {
  CHECK(seq_prefix(family_S(1), 5) == std::vector<Rational>{1, 0, 0, 0, 0});
  for (long long j = 1; j <= 50; ++j) {
    std::vector<Rational> x = seq_prefix(family_S(j), 2 * j + 4);
    CHECK(count_fluctuations(x, Rational(1)).count == j);
  }
  // blockified variant: spaced counts equal the plain counts of the source
  for (long long j = 1; j <= 6; ++j) {
    long long plain = count_fluctuations(seq_prefix(family_S(j), 2 * j + 4), Rational(1)).count;
    for (auto beta : {std::function<long long(long long)>([](long long n) { return n + 2; }),
                      std::function<long long(long long)>([](long long n) { return 2 * n; })}) {
      std::vector<Rational> y = seq_prefix(family_S_prime(j, beta), 4096);
      CHECK(count_fluctuations_at_distance(y, Rational(1), beta).count == plain);
    }
  }
}

TEST_CASE("superaffine members oscillate plainly but not at a distance") {
  auto nseq = [](long long k) { return k * k; };
  std::vector<Rational> x = seq_prefix(family_superaffine(8, nseq), 80);
  CHECK(count_fluctuations(x, Rational(1)).count >= 8);
  auto beta = [](long long n) { return n + (n + 1) / 2; };  // superaffine spacing
  CHECK(count_fluctuations_at_distance(x, Rational(1), beta).count <= 2);
}

TEST_CASE("metastability indices on pinned inputs") {
  std::vector<Rational> s2 = seq_prefix(family_S(2), 40);
  CHECK(metastable_index(s2, [](long long n) { return 4 * n; }, Rational(1)).index == 3);
  std::vector<Rational> s3 = seq_prefix(family_S(3), 40);
  CHECK(metastable_index(s3, [](long long n) { return n + 1; }, Rational(1)).index == 1);
  std::vector<Rational> step = seq_prefix(family_step(4), 40);
  CHECK(count_fluctuations(step, Rational(1)).count == 1);
  // the flat stretch before the step is already a stable window
  CHECK(metastable_index(step, [](long long n) { return 2 * n; }, Rational(1)).index == 1);
  std::vector<Rational> alt = {0, 1, 0, 1, 0};
  CHECK(count_fluctuations(alt, Rational(1)).count == 4);
  MetastabilityReport none = metastable_index(alt, [](long long n) { return n + 1; }, Rational(1));
  CHECK(!none.found);
}

TEST_CASE("metastable indices respect the iterated growth bound") {
  Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    long long a = 1 + static_cast<long long>(rng.below(2));
    long long b = 1 + static_cast<long long>(rng.below(3));
    long long j = 1 + static_cast<long long>(rng.below(12));
    auto F = [a, b](long long n) { return a * n + b; };
    long long bound = iterate_growth(F, 1, F(1) + 1);
    std::vector<Rational> x = seq_prefix(family_S(j), F(bound) + 2);
    MetastabilityReport rep = metastable_index(x, F, Rational(1));
    REQUIRE(rep.found);
    CHECK(rep.index <= bound);
  }
}

TEST_CASE("distance to metastability iterates the combined growth") {
  auto betaSucc = [](const Int& n, const Rational&) { return n + 1; };
  CHECK(distance_to_metastability(
            0, betaSucc, [](const Int& n) { return n + 1; }, rat(1, 2), Int(100000)) == 4);
  CHECK(distance_to_metastability(
            1, betaSucc, [](const Int& n) { return 2 * n; }, rat(1, 2), Int(100000)) == 32);
  CHECK_THROWS_AS(distance_to_metastability(
                      0, betaSucc, [](const Int& n) { return 2 * n; }, rat(1, 2), Int(7)),
                  ResourceError);
}

TEST_CASE("upcrossing counts: pinned, brute-forced, and banded") {
  std::vector<Rational> x = {0, 1, 0, 1};
  CHECK(count_upcrossings(x, rat(1, 4), rat(3, 4)).count == 2);
  for (int len = 1; len <= 10; ++len)
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::vector<Rational> b = bits_to_seq(mask, len);
      CHECK(count_upcrossings(b, rat(1, 4), rat(3, 4)).count ==
            brute_upcrossings(b, rat(1, 4), rat(3, 4)));
    }
  Rng rng(41);
  for (int t = 0; t < 200; ++t) {
    std::vector<Rational> r = random_seq(rng, 2 + static_cast<int>(rng.below(9)));
    Rational alpha = rng.grid64(false), beta = alpha + rat(1 + static_cast<long long>(rng.below(8)), 8);
    UpcrossingReport rep = count_upcrossings(r, alpha, beta);
    CHECK(rep.count == brute_upcrossings(r, alpha, beta));
    for (auto [lo, hi] : rep.pairs) {
      CHECK(r[static_cast<size_t>(lo - 1)] <= alpha);
      CHECK(r[static_cast<size_t>(hi - 1)] >= beta);
    }
  }
  // k unit fluctuations of a binary sequence force ceil(k/2) band crossings
  for (int len = 1; len <= 10; ++len)
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::vector<Rational> b = bits_to_seq(mask, len);
      long long k = count_fluctuations(b, Rational(1)).count;
      long long u = count_upcrossings(b, rat(1, 4), rat(3, 4)).count;
      CHECK(u >= k / 2);  // one down-jump may precede the first rise
    }
}

TEST_CASE("rate functions convert to fluctuation bounds unchanged at the diagonal") {
  RateFn r = [](const Rational& eps) { return to_ll(ceil_rat(Rational(1) / eps)); };
  RateFn f = rate_to_fluctuation(r);
  for (long long d = 1; d <= 12; ++d) CHECK(f(rat(1, d)) == r(rat(1, d)));
}

TEST_CASE("the limit learner settles with few mind changes") {
  std::vector<Rational> s3 = seq_prefix(family_S(3), 30);
  LearnReport rep = learn_limit(s3, 0, [](long long) { return 0LL; });
  CHECK(rep.mindChanges == 3);
  CHECK(rep.transcript.front() == 0);
  Rng rng(43);
  for (int t = 0; t < 500; ++t) {
    std::vector<Rational> x = random_seq(rng, 2 + static_cast<int>(rng.below(13)));
    long long k = static_cast<long long>(rng.below(3));
    auto beta = [](long long n) { return n + 1; };
    LearnReport lr = learn_limit(x, k, beta);
    // every mind change certifies a spaced fluctuation of size 2^-k
    Rational eps(Int(1), pow2(k));
    CHECK(lr.mindChanges <= count_fluctuations_at_distance(x, eps, beta).count);
  }
}
