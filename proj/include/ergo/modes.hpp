#pragma once

// Finitary convergence modes on rational sequences: fluctuation counting
// (plain and at-distance), metastability, upcrossings, and the limit learner.
// Positions are 1-based throughout; a vector v stores x_1..x_N as v[0..N-1].

#include "ergo/folner.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace ergo {

using SequenceFn = std::function<Rational(long long)>;  // 1-based index

std::vector<Rational> seq_prefix(const SequenceFn& x, long long n);

struct FluctuationReport {
  long long count = 0;
  std::vector<long long> chain;  // positions n_1 < ... < n_{count+1}; empty iff input empty
};

// longest chain with |x_{n_{i+1}} - x_{n_i}| >= eps between consecutive
// entries, minus one; O(N^2) dynamic program
FluctuationReport count_fluctuations(const std::vector<Rational>& x, const Rational& eps);
// exhaustive oracle over all subsequences, N <= 18
long long brute_fluctuations(const std::vector<Rational>& x, const Rational& eps);

// additionally requires n_{i+1} >= beta(n_i); beta(n) > n enforced on [1, N];
// beta(n) = n+1 reproduces the plain counter
FluctuationReport count_fluctuations_at_distance(const std::vector<Rational>& x,
                                                 const Rational& eps,
                                                 const std::function<long long(long long)>& beta);
long long brute_fluctuations_at_distance(const std::vector<Rational>& x, const Rational& eps,
                                         const std::function<long long(long long)>& beta);

// x_i = 0 for i < j, alternating 1,0,1,... on [j, 2j), constant x_{2j-1} on;
// the j = 1 member is 1,0,0,...; exactly j unit fluctuations either way
SequenceFn family_S(long long j);
// y_i = x_t of family_S(j) for i in [btilde^{t-1}(1), btilde^t(1))
SequenceFn family_S_prime(long long j, const std::function<long long(long long)>& btilde);
// member k: for even k, alternation 0,1,...,0 on [nSeq(k), nSeq(k)+k];
// odd members vanish
SequenceFn family_superaffine(long long k, const std::function<long long(long long)>& nSeq);
// 0 before position n, 1 from n on
SequenceFn family_step(long long n);

struct MetastabilityReport {
  bool found = false;
  long long index = 0;  // least N with max - min < eps over positions [N, F(N)]
};
// scans N = 1, 2, ... while the window fits inside the prefix; a prefix too
// short for even the first window is an input error
MetastabilityReport metastable_index(const std::vector<Rational>& x,
                                     const std::function<long long(long long)>& F,
                                     const Rational& eps);

using GrowthFn = std::function<Int(const Int&)>;
// Phi = Ftilde^(2*lambda+3)(1) with Ftilde(n) = max(F(n), beta(n, eps/2));
// ResourceError past cap
Int distance_to_metastability(long long lambda,
                              const std::function<Int(const Int&, const Rational&)>& beta,
                              const GrowthFn& F, const Rational& eps, const Int& cap);

using RateFn = std::function<long long(const Rational&)>;
// a convergence rate bounds fluctuations at the same eps
RateFn rate_to_fluctuation(RateFn r);

struct UpcrossingReport {
  long long count = 0;
  std::vector<std::pair<long long, long long>> pairs;  // (at-most-alpha pos, at-least-beta pos)
};
// disjoint pairs i < j with x_i <= alpha, x_j >= beta, greedy left-to-right;
// alpha < beta enforced
UpcrossingReport count_upcrossings(const std::vector<Rational>& x, const Rational& alpha,
                                   const Rational& beta);
long long brute_upcrossings(const std::vector<Rational>& x, const Rational& alpha,
                            const Rational& beta);

struct LearnReport {
  long long mindChanges = 0;
  std::vector<long long> transcript;  // anchors; leading 0 sentinel, then 1
};
// anchor c is abandoned at stage j when j >= beta(c) and |x_j - x_c| >= 2^-k;
// the learner then re-anchors at j; adopting the first anchor is free
LearnReport learn_limit(const std::vector<Rational>& x, long long k,
                        const std::function<long long(long long)>& beta);

}  // namespace ergo
