#include "ergo/modes.hpp"

#include <algorithm>
#include <memory>

namespace ergo {

std::vector<Rational> seq_prefix(const SequenceFn& x, long long n) {
  if (n < 0) throw InputError("prefix length must be nonnegative");
  std::vector<Rational> out;
  out.reserve(static_cast<size_t>(n));
  for (long long i = 1; i <= n; ++i) out.push_back(x(i));
  return out;
}

namespace {

void require_positive_eps(const Rational& eps) {
  if (eps <= 0) throw InputError("fluctuation size must be positive");
}

Rational abs_gap(const Rational& a, const Rational& b) {
  Rational d = a - b;
  if (d < 0) d = -d;
  return d;
}

// shared chain DP; spaced == nullptr means no position constraint
FluctuationReport chain_dp(const std::vector<Rational>& x, const Rational& eps,
                           const std::function<long long(long long)>* spaced) {
  require_positive_eps(eps);
  FluctuationReport rep;
  const long long n = static_cast<long long>(x.size());
  if (n == 0) return rep;
  std::vector<long long> len(static_cast<size_t>(n), 1);
  std::vector<long long> par(static_cast<size_t>(n), -1);
  std::vector<long long> minNext;  // beta(pos) cache for the spaced variant
  if (spaced != nullptr) {
    minNext.resize(static_cast<size_t>(n));
    for (long long p = 1; p <= n; ++p) {
      long long b = (*spaced)(p);
      if (b <= p) throw InputError("distance function must map n strictly above n");
      minNext[static_cast<size_t>(p - 1)] = b;
    }
  }
  for (long long i = 1; i < n; ++i) {
    for (long long j = 0; j < i; ++j) {
      if (spaced != nullptr && i + 1 < minNext[static_cast<size_t>(j)]) continue;
      if (len[static_cast<size_t>(j)] + 1 <= len[static_cast<size_t>(i)]) continue;
      if (abs_gap(x[static_cast<size_t>(i)], x[static_cast<size_t>(j)]) < eps) continue;
      len[static_cast<size_t>(i)] = len[static_cast<size_t>(j)] + 1;
      par[static_cast<size_t>(i)] = j;
    }
  }
  long long best = 0;
  for (long long i = 1; i < n; ++i)
    if (len[static_cast<size_t>(i)] > len[static_cast<size_t>(best)]) best = i;
  rep.count = len[static_cast<size_t>(best)] - 1;
  for (long long i = best; i >= 0; i = par[static_cast<size_t>(i)]) rep.chain.push_back(i + 1);
  std::reverse(rep.chain.begin(), rep.chain.end());
  return rep;
}

long long chain_brute(const std::vector<Rational>& x, const Rational& eps,
                      const std::function<long long(long long)>* spaced) {
  require_positive_eps(eps);
  const long long n = static_cast<long long>(x.size());
  if (n == 0) return 0;
  if (n > 18) throw ResourceError("exhaustive fluctuation search capped at length 18");
  long long best = 0;
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    long long prev = -1;
    long long picked = 0;
    bool ok = true;
    for (long long i = 0; i < n && ok; ++i) {
      if (((mask >> i) & 1ul) == 0) continue;
      if (prev >= 0) {
        if (abs_gap(x[static_cast<size_t>(i)], x[static_cast<size_t>(prev)]) < eps) ok = false;
        if (ok && spaced != nullptr && i + 1 < (*spaced)(prev + 1)) ok = false;
      }
      prev = i;
      ++picked;
    }
    if (ok && picked - 1 > best) best = picked - 1;
  }
  return best;
}

}  // namespace

FluctuationReport count_fluctuations(const std::vector<Rational>& x, const Rational& eps) {
  return chain_dp(x, eps, nullptr);
}

long long brute_fluctuations(const std::vector<Rational>& x, const Rational& eps) {
  return chain_brute(x, eps, nullptr);
}

FluctuationReport count_fluctuations_at_distance(
    const std::vector<Rational>& x, const Rational& eps,
    const std::function<long long(long long)>& beta) {
  if (!beta) throw InputError("missing distance function");
  return chain_dp(x, eps, &beta);
}

long long brute_fluctuations_at_distance(const std::vector<Rational>& x, const Rational& eps,
                                         const std::function<long long(long long)>& beta) {
  if (!beta) throw InputError("missing distance function");
  const long long n = static_cast<long long>(x.size());
  for (long long p = 1; p <= n; ++p)
    if (beta(p) <= p) throw InputError("distance function must map n strictly above n");
  return chain_brute(x, eps, &beta);
}

SequenceFn family_S(long long j) {
  if (j < 1) throw InputError("family index must be at least 1");
  return [j](long long i) -> Rational {
    if (i < 1) throw InputError("sequence positions are 1-based");
    if (j == 1) return Rational(i == 1 ? 1 : 0);
    if (i < j) return Rational(0);
    long long p = std::min(i, 2 * j - 1);
    return Rational((p - j) % 2 == 0 ? 1 : 0);
  };
}

SequenceFn family_S_prime(long long j, const std::function<long long(long long)>& btilde) {
  if (!btilde) throw InputError("missing distance function");
  SequenceFn base = family_S(j);
  auto bounds = std::make_shared<std::vector<long long>>(1, 1ll);
  return [base, btilde, bounds](long long i) -> Rational {
    if (i < 1) throw InputError("sequence positions are 1-based");
    while (bounds->back() <= i) {
      long long cur = bounds->back();
      long long nxt = btilde(cur);
      if (nxt <= cur) throw InputError("distance function must map n strictly above n");
      if (bounds->size() > 4096) throw ResourceError("block boundary iteration cap exceeded");
      bounds->push_back(nxt);
    }
    auto it = std::upper_bound(bounds->begin(), bounds->end(), i);
    long long t = static_cast<long long>(it - bounds->begin());
    return base(t);
  };
}

SequenceFn family_superaffine(long long k, const std::function<long long(long long)>& nSeq) {
  if (k < 0) throw InputError("member index must be nonnegative");
  if (!nSeq) throw InputError("missing position sequence");
  if (k % 2 == 1) {
    return [](long long i) -> Rational {
      if (i < 1) throw InputError("sequence positions are 1-based");
      return Rational(0);
    };
  }
  long long nk = nSeq(k);
  if (nk < 1) throw InputError("position sequence must stay at least 1");
  return [k, nk](long long i) -> Rational {
    if (i < 1) throw InputError("sequence positions are 1-based");
    if (i < nk || i > nk + k) return Rational(0);
    return Rational((i - nk) % 2);
  };
}

SequenceFn family_step(long long n) {
  if (n < 1) throw InputError("step position must be at least 1");
  return [n](long long i) -> Rational {
    if (i < 1) throw InputError("sequence positions are 1-based");
    return Rational(i >= n ? 1 : 0);
  };
}

MetastabilityReport metastable_index(const std::vector<Rational>& x,
                                     const std::function<long long(long long)>& F,
                                     const Rational& eps) {
  if (!F) throw InputError("missing window function");
  require_positive_eps(eps);
  const long long n = static_cast<long long>(x.size());
  MetastabilityReport rep;
  for (long long cand = 1; cand <= n; ++cand) {
    long long hi = F(cand);
    if (hi < cand) throw InputError("window function must satisfy F(n) >= n");
    if (hi > n) {
      if (cand == 1) throw InputError("prefix too short for the first window");
      return rep;
    }
    Rational lo = x[static_cast<size_t>(cand - 1)];
    Rational up = lo;
    for (long long p = cand + 1; p <= hi; ++p) {
      const Rational& v = x[static_cast<size_t>(p - 1)];
      if (v < lo) lo = v;
      if (v > up) up = v;
    }
    if (up - lo < eps) {
      rep.found = true;
      rep.index = cand;
      return rep;
    }
  }
  return rep;
}

Int distance_to_metastability(long long lambda,
                              const std::function<Int(const Int&, const Rational&)>& beta,
                              const GrowthFn& F, const Rational& eps, const Int& cap) {
  if (lambda < 0) throw InputError("fluctuation bound must be nonnegative");
  if (!beta || !F) throw InputError("missing distance or window function");
  require_positive_eps(eps);
  if (cap < 1) throw InputError("index cap must be at least 1");
  Rational half = eps / 2;
  Int v = 1;
  for (long long step = 0; step < 2 * lambda + 3; ++step) {
    Int fv = F(v);
    Int bv = beta(v, half);
    Int nxt = fv > bv ? fv : bv;
    if (nxt < v) throw InputError("window function must satisfy F(n) >= n");
    v = nxt;
    if (v > cap) throw ResourceError("metastability iterate exceeded the index cap");
  }
  return v;
}

RateFn rate_to_fluctuation(RateFn r) {
  if (!r) throw InputError("missing rate function");
  return r;
}

UpcrossingReport count_upcrossings(const std::vector<Rational>& x, const Rational& alpha,
                                   const Rational& beta) {
  if (alpha >= beta) throw InputError("band requires alpha < beta");
  UpcrossingReport rep;
  long long low = -1;
  for (long long i = 0; i < static_cast<long long>(x.size()); ++i) {
    const Rational& v = x[static_cast<size_t>(i)];
    if (low < 0) {
      if (v <= alpha) low = i;
    } else if (v >= beta) {
      rep.pairs.emplace_back(low + 1, i + 1);
      ++rep.count;
      low = -1;
    }
  }
  return rep;
}

long long brute_upcrossings(const std::vector<Rational>& x, const Rational& alpha,
                            const Rational& beta) {
  if (alpha >= beta) throw InputError("band requires alpha < beta");
  const long long n = static_cast<long long>(x.size());
  if (n > 14) throw ResourceError("exhaustive upcrossing search capped at length 14");
  long long best = 0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    long long picked = 0;
    bool ok = true;
    for (long long i = 0; i < n && ok; ++i) {
      if (((mask >> i) & 1ul) == 0) continue;
      const Rational& v = x[static_cast<size_t>(i)];
      if (picked % 2 == 0) {
        if (v > alpha) ok = false;
      } else {
        if (v < beta) ok = false;
      }
      ++picked;
    }
    if (ok && picked % 2 == 0 && picked / 2 > best) best = picked / 2;
  }
  return best;
}

LearnReport learn_limit(const std::vector<Rational>& x, long long k,
                        const std::function<long long(long long)>& beta) {
  if (!beta) throw InputError("missing distance function");
  Rational eps = k >= 0 ? Rational(Int(1), pow2(k)) : Rational(pow2(-k));
  LearnReport rep;
  rep.transcript.push_back(0);
  if (x.empty()) return rep;
  long long anchor = 1;
  rep.transcript.push_back(anchor);
  for (long long j = 2; j <= static_cast<long long>(x.size()); ++j) {
    if (j < beta(anchor)) continue;
    if (abs_gap(x[static_cast<size_t>(j - 1)], x[static_cast<size_t>(anchor - 1)]) < eps) continue;
    anchor = j;
    ++rep.mindChanges;
    rep.transcript.push_back(j);
  }
  return rep;
}

}  // namespace ergo
