#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ergo/group.hpp"
#include "ergo/subset.hpp"

using namespace ergo;

namespace {

GroupElement random_word(Rng& rng, const GroupDescriptor& g, int len) {
  auto gens = standard_generators(g);
  GroupElement w = identity(g);
  for (int i = 0; i < len; ++i) {
    const GroupElement& s = gens[static_cast<size_t>(rng.below(gens.size()))];
    w = multiply(w, rng.below(2) ? s : inverse(s));
  }
  return w;
}

void check_axioms(const GroupDescriptor& g, uint64_t seed) {
  Rng rng(seed);
  for (int trial = 0; trial < 200; ++trial) {
    GroupElement a = random_word(rng, g, static_cast<int>(rng.range(0, 6)));
    GroupElement b = random_word(rng, g, static_cast<int>(rng.range(0, 6)));
    GroupElement c = random_word(rng, g, static_cast<int>(rng.range(0, 6)));
    CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
    CHECK(is_identity(multiply(a, inverse(a))));
    CHECK(is_identity(multiply(inverse(a), a)));
    CHECK(multiply(a, identity(g)) == a);
    CHECK(inverse(multiply(a, b)) == multiply(inverse(b), inverse(a)));
  }
}

}  // namespace

TEST_CASE("group axioms hold on random words") {
  check_axioms(lattice_group(2), 1);
  check_axioms(bs12_group(), 2);
  check_axioms(free_group(2), 3);
  check_axioms(product_group(lattice_group(1), bs12_group()), 4);
}

TEST_CASE("defining relation of the dilation group") {
  // b a^k b^-1 = a^(2k)
  GroupElement a = bs(1, 0, 0);
  GroupElement b = bs(0, 0, 1);
  for (long long k = -40; k <= 40; ++k) {
    GroupElement lhs = multiply(multiply(b, power(a, k)), inverse(b));
    CHECK(lhs == power(a, 2 * k));
  }
  // and powers of b act as repeated doubling
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    long long k = rng.range(-30, 30), m = rng.range(1, 4);
    GroupElement conj = multiply(multiply(power(b, m), power(a, k)), power(b, -m));
    CHECK(conj == power(a, k * (1LL << m)));
  }
}

TEST_CASE("free words reduce and stay reduced") {
  GroupElement w = free_word({1, -1, 2, -2, 1});
  CHECK(w == free_word({1}));
  CHECK(is_identity(multiply(w, inverse(w))));
  // squaring a reduced word never cancels fully unless trivial
  GroupElement v = free_word({1, 2});
  CHECK(!is_identity(multiply(v, v)));
}

TEST_CASE("word balls match closed counts") {
  // free rank 2: 1, 1+4, 1+4+12
  auto fg = free_group(2);
  auto fgens = standard_generators(fg);
  CHECK(ball(fg, fgens, 0).size() == 1);
  CHECK(ball(fg, fgens, 1).size() == 5);
  CHECK(ball(fg, fgens, 2).size() == 17);
  // lattice rank 2: l1 diamonds 2r^2 + 2r + 1
  auto z2 = lattice_group(2);
  auto zgens = standard_generators(z2);
  for (int r = 0; r <= 3; ++r) CHECK(ball(z2, zgens, r).size() == 2 * r * r + 2 * r + 1);
  auto growth = growth_sequence(fg, fgens, 3);
  CHECK(growth.size() == 4);
  CHECK(growth[3] == 53);
}

TEST_CASE("element strings separate a sample of elements") {
  std::vector<GroupElement> sample = {lat({0, 0}), lat({1, 0}),  lat({0, 1}),
                                      bs(1, 0, 0), bs(1, 1, 0),  bs(1, 0, 1),
                                      bs(0, 0, 0), free_word({1, 2, -1})};
  for (size_t i = 0; i < sample.size(); ++i)
    for (size_t j = i + 1; j < sample.size(); ++j)
      CHECK(element_string(sample[i]) != element_string(sample[j]));
}
