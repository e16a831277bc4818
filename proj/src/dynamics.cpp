#include "ergo/dynamics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ergo {

namespace {

long long mulmod(long long a, long long b, long long q) {
  return static_cast<long long>(static_cast<unsigned __int128>(a) * static_cast<unsigned long long>(b) %
                                static_cast<unsigned long long>(q));
}

long long powmod(long long base, long long e, long long q) {
  long long acc = 1 % q;
  long long b = base % q;
  while (e > 0) {
    if (e & 1) acc = mulmod(acc, b, q);
    b = mulmod(b, b, q);
    e >>= 1;
  }
  return acc;
}

// 2^e mod q for odd q, either sign of e
long long pow2_mod(long long e, long long q) {
  if (q == 1) return 0;
  if (e >= 0) return powmod(2, e, q);
  return powmod((q + 1) / 2, -e, q);
}

long long fdiv(long long a, long long b) {
  long long q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

Int int_fdiv(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

Int int_from_u128(unsigned __int128 v) {
  Int hi(static_cast<unsigned long long>(v >> 64));
  return (hi << 64) + Int(static_cast<unsigned long long>(v));
}

}  // namespace

struct MeasureSystem::Impl {
  GroupDescriptor grp;
  long long pts = 1;
  std::string nm;
  bool torus = false;
  int dim = 1;
  long long mod = 1;  // torus side length, or the affine modulus
};

GroupDescriptor MeasureSystem::group() const { return impl_->grp; }
long long MeasureSystem::npoints() const { return impl_->pts; }
std::string MeasureSystem::name() const { return impl_->nm; }
bool MeasureSystem::is_torus() const { return impl_->torus; }
int MeasureSystem::torus_dim() const {
  if (!impl_->torus) throw InputError("not a torus system");
  return impl_->dim;
}
long long MeasureSystem::torus_mod() const {
  if (!impl_->torus) throw InputError("not a torus system");
  return impl_->mod;
}
bool MeasureSystem::is_bs12_affine() const { return !impl_->torus; }
long long MeasureSystem::affine_mod() const {
  if (impl_->torus) throw InputError("not an affine system");
  return impl_->mod;
}

long long MeasureSystem::act(const GroupElement& g, long long x) const {
  if (x < 0 || x >= impl_->pts) throw InputError("point out of range");
  if (!element_matches(impl_->grp, g)) throw InputError("element outside the acting group");
  if (impl_->torus) {
    const auto& e = std::get<LatticeElt>(g.v);
    long long rem = x;
    long long out = 0;
    long long stride = 1;
    for (int i = 0; i < impl_->dim; ++i) {
      long long c = rem % impl_->mod;
      rem /= impl_->mod;
      long long shift = e.c[static_cast<size_t>(i)] % impl_->mod;
      long long nc = ((c + shift) % impl_->mod + impl_->mod) % impl_->mod;
      out += nc * stride;
      stride *= impl_->mod;
    }
    return out;
  }
  const auto& e = std::get<Bs12Elt>(g.v);
  long long q = impl_->mod;
  long long scaled = mulmod(pow2_mod(e.n, q), x % q, q);
  return (scaled + dy_mod(e.x, q)) % q;
}

MeasureSystem make_torus_system(int d, long long N) {
  if (d < 1) throw InputError("torus dimension must be at least 1");
  if (N < 1) throw InputError("torus side must be at least 1");
  long long pts = 1;
  for (int i = 0; i < d; ++i) {
    if (pts > kDefaultElementBudget / N) throw ResourceError("state space exceeds the element budget");
    pts *= N;
  }
  auto impl = std::make_shared<MeasureSystem::Impl>();
  impl->grp = lattice_group(d);
  impl->pts = pts;
  impl->nm = "torus-" + std::to_string(d) + "d-" + std::to_string(N);
  impl->torus = true;
  impl->dim = d;
  impl->mod = N;
  return MeasureSystem(impl);
}

MeasureSystem make_bs12_affine_system(long long q) {
  if (q < 1 || q % 2 == 0) throw InputError("affine modulus must be odd and positive");
  auto impl = std::make_shared<MeasureSystem::Impl>();
  impl->grp = bs12_group();
  impl->pts = q;
  impl->nm = "bs12affine-" + std::to_string(q);
  impl->torus = false;
  impl->mod = q;
  return MeasureSystem(impl);
}

SystemReport validate_system(const MeasureSystem& sys, long long pairSamples, Rng& rng) {
  SystemReport rep;
  const long long n = sys.npoints();
  GroupElement id = identity(sys.group());
  for (long long x = 0; x < n; ++x) {
    if (sys.act(id, x) != x) {
      rep.ok = false;
      rep.detail = "identity moved point " + std::to_string(x);
      return rep;
    }
  }
  std::vector<GroupElement> gens = standard_generators(sys.group());
  std::vector<GroupElement> probes;
  for (const auto& g : gens) {
    probes.push_back(g);
    probes.push_back(inverse(g));
  }
  for (const auto& g : probes) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (long long x = 0; x < n; ++x) {
      long long y = sys.act(g, x);
      if (seen[static_cast<size_t>(y)]) {
        rep.ok = false;
        rep.detail = "generator " + element_string(g) + " is not injective";
        return rep;
      }
      seen[static_cast<size_t>(y)] = 1;
    }
  }
  auto random_element = [&]() {
    GroupElement e = id;
    long long len = rng.range(0, 3);
    for (long long i = 0; i < len; ++i) {
      const GroupElement& g = probes[static_cast<size_t>(rng.below(static_cast<long long>(probes.size())))];
      e = multiply(e, g);
    }
    return e;
  };
  for (long long i = 0; i < pairSamples; ++i) {
    GroupElement a = random_element();
    GroupElement b = random_element();
    long long x = rng.below(n);
    if (sys.act(multiply(a, b), x) != sys.act(a, sys.act(b, x))) {
      rep.ok = false;
      rep.detail = "action is not a homomorphism at " + element_string(a) + ", " + element_string(b);
      return rep;
    }
  }
  return rep;
}

namespace {

void require_observable(const MeasureSystem& sys, const Observable& f) {
  if (static_cast<long long>(f.size()) != sys.npoints())
    throw InputError("observable size must match the point count");
}

}  // namespace

Rational obs_norm_sq(const MeasureSystem& sys, const Observable& f) {
  require_observable(sys, f);
  Rational s = 0;
  for (const auto& v : f) s += v * v;
  return s / sys.npoints();
}

Rational obs_l1(const MeasureSystem& sys, const Observable& f) {
  require_observable(sys, f);
  Rational s = 0;
  for (const auto& v : f) s += (v < 0 ? -v : v);
  return s / sys.npoints();
}

Rational obs_mean(const MeasureSystem& sys, const Observable& f) {
  require_observable(sys, f);
  Rational s = 0;
  for (const auto& v : f) s += v;
  return s / sys.npoints();
}

Observable obs_sub(const Observable& f, const Observable& g) {
  if (f.size() != g.size()) throw InputError("observable sizes differ");
  Observable out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = f[i] - g[i];
  return out;
}

Observable obs_scale(const Observable& f, const Rational& c) {
  Observable out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = f[i] * c;
  return out;
}

Rational obs_dist_sq(const MeasureSystem& sys, const Observable& f, const Observable& g) {
  return obs_norm_sq(sys, obs_sub(f, g));
}

Observable koopman(const MeasureSystem& sys, const GroupElement& g, const Observable& f) {
  require_observable(sys, f);
  Observable out(f.size());
  for (long long x = 0; x < sys.npoints(); ++x)
    out[static_cast<size_t>(x)] = f[static_cast<size_t>(sys.act(g, x))];
  return out;
}

namespace {

Observable interval_average(const MeasureSystem& sys, long long lo, long long hi,
                            const Observable& f) {
  const long long N = sys.torus_mod();
  if (hi < lo) throw InputError("empty averaging window");
  Rational L(hi - lo + 1);
  std::vector<long long> cnt(static_cast<size_t>(N));
  for (long long r = 0; r < N; ++r)
    cnt[static_cast<size_t>(r)] = fdiv(hi - r, N) - fdiv(lo - 1 - r, N);
  Observable out(f.size());
  for (long long x = 0; x < N; ++x) {
    Rational acc = 0;
    for (long long r = 0; r < N; ++r) {
      if (cnt[static_cast<size_t>(r)] == 0) continue;
      acc += f[static_cast<size_t>((x + r) % N)] * Rational(cnt[static_cast<size_t>(r)]);
    }
    out[static_cast<size_t>(x)] = acc / L;
  }
  return out;
}

Observable box_average(const MeasureSystem& sys, long long radius, const Observable& f) {
  const long long N = sys.torus_mod();
  const int d = sys.torus_dim();
  std::vector<long long> cnt(static_cast<size_t>(N));
  for (long long r = 0; r < N; ++r)
    cnt[static_cast<size_t>(r)] = fdiv(radius - r, N) - fdiv(-radius - 1 - r, N);
  Rational side(2 * radius + 1);
  Observable cur = f;
  long long stride = 1;
  for (int axis = 0; axis < d; ++axis) {
    Observable nxt(cur.size());
    for (long long x = 0; x < sys.npoints(); ++x) {
      long long c = (x / stride) % N;
      long long base = x - c * stride;
      Rational acc = 0;
      for (long long r = 0; r < N; ++r) {
        if (cnt[static_cast<size_t>(r)] == 0) continue;
        long long nc = (c + r) % N;
        acc += cur[static_cast<size_t>(base + nc * stride)] * Rational(cnt[static_cast<size_t>(r)]);
      }
      nxt[static_cast<size_t>(x)] = acc / side;
    }
    cur = std::move(nxt);
    stride *= N;
  }
  return cur;
}

// level profile: residue weights per dilation level, never materialized
Observable bs12_average(const MeasureSystem& sys, const Int& M, long long n,
                        const Observable& f) {
  const long long q = sys.affine_mod();
  // residue counts over [-M, M] split into a flat part plus a 0/1 excess, so
  // the giant flat factor enters the sum once per level, not once per term
  std::vector<Int> cnt(static_cast<size_t>(q));
  for (long long t = 0; t < q; ++t)
    cnt[static_cast<size_t>(t)] = int_fdiv(M - t, Int(q)) - int_fdiv(-M - 1 - t, Int(q));
  Int C = cnt[0];
  for (const auto& c : cnt) C = std::min(C, c);
  std::vector<long long> d(static_cast<size_t>(q));
  for (long long t = 0; t < q; ++t) d[static_cast<size_t>(t)] = to_ll(cnt[static_cast<size_t>(t)] - C);
  Int D = 1;
  for (const auto& v : f) {
    Int den = denominator(v);
    D = D / gcd(D, den) * den;
  }
  std::vector<Int> fnum(static_cast<size_t>(q));
  Int S = 0;
  for (long long j = 0; j < q; ++j) {
    fnum[static_cast<size_t>(j)] =
        numerator(f[static_cast<size_t>(j)]) * (D / denominator(f[static_cast<size_t>(j)]));
    S += fnum[static_cast<size_t>(j)];
  }
  std::vector<Int> acc(static_cast<size_t>(q), Int(0));
  std::vector<long long> e(static_cast<size_t>(q));
  for (long long level = -n; level <= n; ++level) {
    long long w = pow2_mod(level - n, q);
    long long p = pow2_mod(level, q);
    std::fill(e.begin(), e.end(), 0ll);
    for (long long t = 0; t < q; ++t) e[static_cast<size_t>(mulmod(t % q, w, q))] += d[static_cast<size_t>(t)];
    for (long long y = 0; y < q; ++y) {
      long long py = mulmod(p, y, q);
      Int s = 0;
      for (long long r = 0; r < q; ++r) {
        if (e[static_cast<size_t>(r)] == 0) continue;
        s += fnum[static_cast<size_t>((py + r) % q)] * e[static_cast<size_t>(r)];
      }
      acc[static_cast<size_t>(y)] += s;
    }
  }
  Int flat = C * S * (2 * n + 1);
  Int total = (2 * M + 1) * (2 * n + 1) * D;
  Observable out(f.size());
  for (long long y = 0; y < q; ++y)
    out[static_cast<size_t>(y)] = Rational(flat + acc[static_cast<size_t>(y)], total);
  return out;
}

}  // namespace

Observable ergodic_average(const MeasureSystem& sys, const FolnerSchedule& s, long long n,
                           const Observable& f, long long budget) {
  require_observable(sys, f);
  if (!same_group(sys.group(), s.group())) throw InputError("schedule group does not act here");
  if (n < 1) throw InputError("schedule index must be at least 1");
  if (s.kind() == FolnerSchedule::Kind::Refined)
    return ergodic_average(sys, s.refined_base(), s.refined_index(n), f, budget);
  if (sys.is_torus() && s.kind() == FolnerSchedule::Kind::Interval && sys.torus_dim() == 1) {
    auto [lo, hi] = s.interval_at(n);
    return interval_average(sys, lo, hi, f);
  }
  if (sys.is_torus() && s.kind() == FolnerSchedule::Kind::Box && s.box_dim() == sys.torus_dim())
    return box_average(sys, n, f);
  if (sys.is_bs12_affine() && s.kind() == FolnerSchedule::Kind::Bs12) {
    auto [M, levels] = s.bs12_params(n);
    return bs12_average(sys, M, levels, f);
  }
  if (s.cardinality_at(n) > budget) throw ResourceError("averaging set exceeds the element budget");
  FiniteSubset F = s.set_at(n);
  Rational size(static_cast<long long>(F.size()));
  Observable out(f.size());
  for (long long x = 0; x < sys.npoints(); ++x) {
    Rational acc = 0;
    for (const auto& g : F.elements()) acc += f[static_cast<size_t>(sys.act(g, x))];
    out[static_cast<size_t>(x)] = acc / size;
  }
  return out;
}

Observable mean_projection(const MeasureSystem& sys, const Observable& f) {
  require_observable(sys, f);
  const long long n = sys.npoints();
  std::vector<GroupElement> probes;
  for (const auto& g : standard_generators(sys.group())) {
    probes.push_back(g);
    probes.push_back(inverse(g));
  }
  Observable out(f.size());
  std::vector<long long> orbit;
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (long long x0 = 0; x0 < n; ++x0) {
    if (seen[static_cast<size_t>(x0)]) continue;
    orbit.clear();
    orbit.push_back(x0);
    seen[static_cast<size_t>(x0)] = 1;
    for (size_t head = 0; head < orbit.size(); ++head) {
      for (const auto& g : probes) {
        long long y = sys.act(g, orbit[head]);
        if (!seen[static_cast<size_t>(y)]) {
          seen[static_cast<size_t>(y)] = 1;
          orbit.push_back(y);
        }
      }
    }
    Rational mean = 0;
    for (long long p : orbit) mean += f[static_cast<size_t>(p)];
    mean /= static_cast<long long>(orbit.size());
    for (long long p : orbit) out[static_cast<size_t>(p)] = mean;
  }
  return out;
}

QuadVal uc_modulus_hilbert(const Rational& eps) {
  if (eps <= 0 || eps > 2) throw InputError("separation must lie in (0, 2]");
  return QuadVal(Rational(1), Rational(-1), Rational(1) - eps * eps / 4);
}

Rational uc_modulus_hanner(const Rational& p, const Rational& eps) {
  if (p <= 1 || p >= 2) throw InputError("this modulus covers 1 < p < 2");
  if (eps <= 0 || eps > 2) throw InputError("separation must lie in (0, 2]");
  return (p - 1) * eps * eps / 8;
}

double uc_modulus_clarkson(double p, double eps) {
  if (!(p >= 2)) throw InputError("this modulus covers p >= 2");
  if (!(eps > 0) || !(eps <= 2)) throw InputError("separation must lie in (0, 2]");
  return 1.0 - std::pow(1.0 - std::pow(eps / 2.0, p), 1.0 / p);
}

namespace {

double pnorm(const std::vector<double>& v, double p) {
  double s = 0;
  for (double t : v) s += std::pow(std::abs(t), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

UcCheck uc_midpoint_check(const std::vector<double>& x, const std::vector<double>& y, double p,
                          double eps) {
  if (x.size() != y.size() || x.empty()) throw InputError("vectors must share a nonzero size");
  if (!(p > 1)) throw InputError("exponent must exceed 1");
  if (!(eps > 0)) throw InputError("separation must be positive");
  const double slack = 1e-9;
  double nx = pnorm(x, p), ny = pnorm(y, p);
  std::vector<double> diff(x.size()), mid(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    diff[i] = x[i] - y[i];
    mid[i] = (x[i] + y[i]) / 2;
  }
  if (nx > ny + slack || ny > 1 + slack || pnorm(diff, p) < eps - slack)
    throw InputError("premises violated: need |x| <= |y| <= 1 and |x-y| >= eps");
  double u = p >= 2 ? uc_modulus_clarkson(p, eps) : (p - 1) * eps * eps / 8;
  UcCheck chk;
  chk.mid = pnorm(mid, p);
  chk.rhs = ny - u;
  chk.ok = chk.mid <= chk.rhs + slack;
  return chk;
}

namespace {

// beta(n, eta / (3 sqrt(Q))) for the closed forms, where eta mixes a second
// radical; values beyond sentinelAbove come back as sentinelAbove + 1
long long scaled_modulus(const ClosedFormModulus& cf, long long n, const QuadVal& eta,
                         const Rational& Q, long long sentinelAbove) {
  Int sentinel(sentinelAbove);
  switch (cf.kind) {
    case ClosedFormModulus::Kind::BoxZd: {
      Rational c = Rational(3 * static_cast<long long>(cf.dim)) * n;
      if (surd_quotient_sign(sentinel, eta, c, Q) < 0) return sentinelAbove + 1;
      return to_ll(ceil_div_surd(c, Q, eta));
    }
    case ClosedFormModulus::Kind::Bs12Rect: {
      Rational c = Rational(pow_int(Int(4), static_cast<unsigned long long>(n)) + n) * 3;
      if (surd_quotient_sign(sentinel, eta, c, Q) < 0) return sentinelAbove + 1;
      return to_ll(ceil_div_surd(c, Q, eta));
    }
    case ClosedFormModulus::Kind::CesaroInterval: {
      Rational c = Rational(6 * (n - 1));
      if (surd_quotient_sign(sentinel, eta, c, Q) <= 0) return sentinelAbove + 1;
      return to_ll(floor_div_surd(c, Q, eta)) + 1;
    }
    case ClosedFormModulus::Kind::GreedyReciprocal: {
      long long r;
      if (surd_quotient_sign(sentinel, eta, Rational(3), Q) < 0)
        r = sentinelAbove + 1;
      else
        r = to_ll(ceil_div_surd(Rational(3), Q, eta));
      return std::min(std::max(n + 1, r), sentinelAbove + 1);
    }
  }
  throw InputError("unknown closed form");
}

// longest chain DP over exact squared gaps; next[j] == 0 means unconstrained
std::pair<long long, std::vector<long long>> gap_chain(
    const std::vector<std::vector<Rational>>& gapSq, const Rational& epsSq,
    const std::vector<long long>* next) {
  const long long n = static_cast<long long>(gapSq.size());
  std::vector<long long> len(static_cast<size_t>(n), 1), par(static_cast<size_t>(n), -1);
  for (long long i = 1; i < n; ++i) {
    for (long long j = 0; j < i; ++j) {
      if (next != nullptr && i + 1 < (*next)[static_cast<size_t>(j)]) continue;
      if (len[static_cast<size_t>(j)] + 1 <= len[static_cast<size_t>(i)]) continue;
      if (gapSq[static_cast<size_t>(i)][static_cast<size_t>(j)] < epsSq) continue;
      len[static_cast<size_t>(i)] = len[static_cast<size_t>(j)] + 1;
      par[static_cast<size_t>(i)] = j;
    }
  }
  long long best = 0;
  for (long long i = 1; i < n; ++i)
    if (len[static_cast<size_t>(i)] > len[static_cast<size_t>(best)]) best = i;
  std::vector<long long> chain;
  for (long long i = best; i >= 0; i = par[static_cast<size_t>(i)]) chain.push_back(i + 1);
  std::reverse(chain.begin(), chain.end());
  return {len[static_cast<size_t>(best)] - 1, chain};
}

std::vector<std::vector<Rational>> pairwise_gaps(const MeasureSystem& sys,
                                                 const std::vector<Observable>& avgs) {
  const size_t n = avgs.size();
  std::vector<std::vector<Rational>> gapSq(n, std::vector<Rational>(n, Rational(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < i; ++j) gapSq[i][j] = gapSq[j][i] = obs_dist_sq(sys, avgs[i], avgs[j]);
  return gapSq;
}

}  // namespace

MainBoundReport verify_main_bound(const MeasureSystem& sys, const FolnerSchedule& s,
                                  const Observable& f, const Rational& eps, const QuadVal& eta,
                                  long long nMax, const std::vector<Observable>* precomputedAvgs) {
  require_observable(sys, f);
  if (nMax < 1) throw InputError("horizon must be at least 1");
  QuadVal u = uc_modulus_hilbert(eps);
  if (eta.sign() <= 0) throw InputError("eta must be positive");
  if ((u - eta * Rational(2)).sign() <= 0)
    throw InputError("eta must stay below half the convexity modulus");
  MainBoundReport rep;
  rep.nMax = nMax;
  rep.normSq = obs_norm_sq(sys, f);
  if (rep.normSq > 1) throw InputError("observable norm must stay at most 1");
  if (rep.normSq == 0) {
    rep.bound = 0;
    rep.chain.push_back(1);
    return rep;
  }
  auto cf = s.closed_form();
  if (!cf) throw InputError("schedule lacks a closed-form modulus");
  rep.bound = floor_div_surd(Rational(2), rep.normSq, u - eta * Rational(2));
  std::vector<long long> nextIdx(static_cast<size_t>(nMax));
  for (long long n = 1; n <= nMax; ++n)
    nextIdx[static_cast<size_t>(n - 1)] = scaled_modulus(*cf, n, eta, rep.normSq, nMax);
  rep.vacuous = nextIdx[0] > nMax;
  std::vector<Observable> avgs;
  const std::vector<Observable>* use = precomputedAvgs;
  if (use == nullptr) {
    avgs.reserve(static_cast<size_t>(nMax));
    for (long long n = 1; n <= nMax; ++n) avgs.push_back(ergodic_average(sys, s, n, f));
    use = &avgs;
  } else if (static_cast<long long>(use->size()) < nMax) {
    throw InputError("precomputed averages run short of the horizon");
  }
  std::vector<Observable> window(use->begin(), use->begin() + static_cast<long long>(nMax));
  auto gapSq = pairwise_gaps(sys, window);
  auto [count, chain] = gap_chain(gapSq, eps * eps, &nextIdx);
  rep.count = count;
  rep.chain = std::move(chain);
  rep.pass = Int(rep.count) <= rep.bound;
  return rep;
}

AveragingReport averaging_lemma_check(const MeasureSystem& sys, const FolnerSchedule& s,
                                      const DistanceFn& beta, long long N, const Rational& eta,
                                      const Observable& f) {
  require_observable(sys, f);
  if (N < 1) throw InputError("index must be at least 1");
  if (eta <= 0) throw InputError("eta must be positive");
  AveragingReport rep;
  rep.K = beta(N, eta);
  Observable aN = ergodic_average(sys, s, N, f);
  Observable aK = ergodic_average(sys, s, rep.K, f);
  Observable aKN = ergodic_average(sys, s, rep.K, aN);
  rep.gapSq = obs_dist_sq(sys, aK, aKN);
  rep.rhsSq = eta * eta * obs_norm_sq(sys, f);
  rep.pass = rep.gapSq < rep.rhsSq || (rep.gapSq == 0 && rep.rhsSq == 0);
  return rep;
}

FastCorollaryReport verify_fast_corollary(const MeasureSystem& sys, const FolnerSchedule& fast,
                                          long long lambda, const Observable& f,
                                          const Rational& eps, const QuadVal& eta, long long len) {
  require_observable(sys, f);
  if (lambda < 0) throw InputError("fluctuation scale must be nonnegative");
  if (len < 1) throw InputError("prefix length must be at least 1");
  QuadVal u = uc_modulus_hilbert(eps);
  if (eta.sign() <= 0) throw InputError("eta must be positive");
  if ((u - eta * Rational(2)).sign() <= 0)
    throw InputError("eta must stay below half the convexity modulus");
  Rational Q = obs_norm_sq(sys, f);
  if (Q > 1) throw InputError("observable norm must stay at most 1");
  FastCorollaryReport rep;
  rep.fastness = is_fast_scaled(fast, len, lambda, eta * Rational(1, 3), Q);
  rep.precondition = rep.fastness.ok;
  rep.bound = Int(lambda) * floor_div_surd(Rational(2), Q, u - eta * Rational(2)) + lambda;
  std::vector<Observable> avgs;
  avgs.reserve(static_cast<size_t>(len));
  for (long long n = 1; n <= len; ++n) avgs.push_back(ergodic_average(sys, fast, n, f));
  auto gapSq = pairwise_gaps(sys, avgs);
  auto [count, chain] = gap_chain(gapSq, eps * eps, nullptr);
  rep.count = count;
  rep.chain = std::move(chain);
  rep.pass = rep.precondition && Int(rep.count) <= rep.bound;
  return rep;
}

namespace {

// integer box blur along one axis of a flat 2-d array, window [-n, n]
std::vector<long long> blur_axis(const std::vector<long long>& a, long long w1, long long w2,
                                 long long n, bool axis1) {
  std::vector<long long> out(a.size(), 0);
  if (axis1) {
    for (long long j = 0; j < w2; ++j) {
      long long run = 0;
      for (long long i = 0; i < w1; ++i) {
        run += a[static_cast<size_t>(i * w2 + j)];
        if (i - 2 * n - 1 >= 0) run -= a[static_cast<size_t>((i - 2 * n - 1) * w2 + j)];
        if (i - n >= 0) out[static_cast<size_t>((i - n) * w2 + j)] = run;
      }
    }
  } else {
    for (long long i = 0; i < w1; ++i) {
      long long run = 0;
      for (long long j = 0; j < w2; ++j) {
        run += a[static_cast<size_t>(i * w2 + j)];
        if (j - 2 * n - 1 >= 0) run -= a[static_cast<size_t>(i * w2 + (j - 2 * n - 1))];
        if (j - n >= 0) out[static_cast<size_t>(i * w2 + (j - n))] = run;
      }
    }
  }
  return out;
}

}  // namespace

SlowRateReport slow_rate_witness(int d, long long n, const Rational& alpha) {
  if (d != 1 && d != 2) throw InputError("witnesses cover dimensions 1 and 2");
  if (n < 1) throw InputError("index must be at least 1");
  if (alpha <= 0 || alpha >= 1) throw InputError("rate level must lie in (0, 1)");
  SlowRateReport rep;
  rep.d = d;
  rep.n = n;
  rep.alpha = alpha;
  rep.eps = (Rational(1) - alpha) / 2;
  Rational delta = rep.eps * rep.eps / 9;
  long long m;
  if (d == 1)
    m = to_ll(floor_rat(Rational(2 * (n - 1)) / delta)) + 1;
  else
    m = to_ll(ceil_rat(Rational(2 * n) / delta));
  rep.m = m;
  if (m > 100000) throw ResourceError("witness scale exceeds the supported range");
  Int diffSum = 0, avgSum = 0;
  Int denom;
  if (d == 1) {
    // h = 1 on [0, m), -1 on [m, 2m); averages over [0, n-1]
    long long lo = -n, hi = 2 * m + n;
    long long W = hi - lo + 1;
    std::vector<long long> h(static_cast<size_t>(W), 0);
    for (long long i = 0; i < m; ++i) h[static_cast<size_t>(i - lo)] = 1;
    for (long long i = m; i < 2 * m; ++i) h[static_cast<size_t>(i - lo)] = -1;
    std::vector<long long> pre(static_cast<size_t>(W + 1), 0);
    for (long long i = 0; i < W; ++i) pre[static_cast<size_t>(i + 1)] = pre[static_cast<size_t>(i)] + h[static_cast<size_t>(i)];
    long long dd = 0, aa = 0;
    for (long long i = 0; i + n <= W; ++i) {
      long long avg = pre[static_cast<size_t>(i + n)] - pre[static_cast<size_t>(i)];
      long long diff = avg - n * h[static_cast<size_t>(i)];
      dd += diff * diff;
      aa += avg * avg;
    }
    diffSum = dd;
    avgSum = aa;
    denom = Int(n) * n * 2 * m;
  } else {
    // h = 1 on [-m, m]^2, -1 on the copy shifted by (2m+1, 0)
    long long lo1 = -m - 2 * n, hi1 = 3 * m + 1 + 2 * n;
    long long lo2 = -m - 2 * n, hi2 = m + 2 * n;
    long long w1 = hi1 - lo1 + 1, w2 = hi2 - lo2 + 1;
    if (w1 * w2 > 50'000'000) throw ResourceError("witness grid exceeds the supported range");
    std::vector<long long> h(static_cast<size_t>(w1 * w2), 0);
    for (long long i = -m; i <= m; ++i)
      for (long long j = -m; j <= m; ++j) {
        h[static_cast<size_t>((i - lo1) * w2 + (j - lo2))] = 1;
        h[static_cast<size_t>((i + 2 * m + 1 - lo1) * w2 + (j - lo2))] = -1;
      }
    std::vector<long long> g1 = blur_axis(h, w1, w2, n, true);
    std::vector<long long> g = blur_axis(g1, w1, w2, n, false);
    long long D = (2 * n + 1) * (2 * n + 1);
    long long dd = 0, aa = 0;
    for (long long idx = 0; idx < w1 * w2; ++idx) {
      long long diff = g[static_cast<size_t>(idx)] - D * h[static_cast<size_t>(idx)];
      dd += diff * diff;
      aa += g[static_cast<size_t>(idx)] * g[static_cast<size_t>(idx)];
    }
    diffSum = dd;
    avgSum = aa;
    denom = Int(D) * D * 2 * (Int(2 * m + 1) * (2 * m + 1));
  }
  rep.diffSq = Rational(diffSum) / Rational(denom);
  rep.avgSq = Rational(avgSum) / Rational(denom);
  Rational keep = Rational(1) - rep.eps;
  rep.pass = rep.diffSq < rep.eps * rep.eps && rep.avgSq > keep * keep && keep > alpha;
  return rep;
}

BishopReport bishop_upcrossing_check(const MeasureSystem& sys, const Observable& f,
                                     const Rational& alpha, const Rational& beta, long long k,
                                     long long horizon) {
  require_observable(sys, f);
  if (alpha < 0 || alpha >= beta) throw InputError("band requires 0 <= alpha < beta");
  if (k < 1) throw InputError("crossing count must be at least 1");
  if (horizon < 1) throw InputError("horizon must be at least 1");
  for (const auto& v : f)
    if (v < 0) throw InputError("observable must be nonnegative");
  GroupElement g = standard_generators(sys.group())[0];
  long long hits = 0;
  std::vector<Rational> avgs;
  avgs.reserve(static_cast<size_t>(horizon));
  for (long long x = 0; x < sys.npoints(); ++x) {
    avgs.clear();
    Rational sum = 0;
    long long y = x;
    for (long long t = 1; t <= horizon; ++t) {
      sum += f[static_cast<size_t>(y)];
      avgs.push_back(sum / t);
      y = sys.act(g, y);
    }
    if (count_upcrossings(avgs, alpha, beta).count >= k) ++hits;
  }
  BishopReport rep;
  rep.lhs = Rational(hits) / sys.npoints();
  rep.rhs = obs_l1(sys, f) / (Rational(k) * (beta - alpha));
  rep.pass = rep.lhs <= rep.rhs;
  return rep;
}

RateCertificate rate_from_limit_norm(const MeasureSystem& sys, const Observable& f,
                                     const Rational& eps) {
  require_observable(sys, f);
  if (!sys.is_torus() || sys.torus_dim() != 1)
    throw InputError("rate certificates cover rank-one torus systems only");
  if (eps <= 0) throw InputError("target accuracy must be positive");
  const long long N = sys.npoints();
  Observable proj = mean_projection(sys, f);
  Observable g = obs_sub(f, proj);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd b(N);
  for (long long i = 0; i < N; ++i) {
    M(i, i) += 1;
    M(i, (i + 1) % N) -= 1;
    b(i) = to_double(g[static_cast<size_t>(i)]);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  Eigen::VectorXd u = cod.solve(b);
  double residual = (M * u - b).norm();
  if (!(residual <= 1e-9)) throw CertificateError("coboundary solve left a visible residual");
  RateCertificate rep;
  rep.iUsed = 1;
  rep.uNorm = std::sqrt(u.squaredNorm() / static_cast<double>(N));
  double target = to_double(eps);
  double mEst = std::floor(8.0 * rep.uNorm / target) + 1.0;
  if (!(mEst < 1048576.0)) throw ResourceError("certified index out of supported range");
  long long m = std::max(1ll, static_cast<long long>(mEst));
  rep.m = m;
  long long horizon = 10 * m;
  Int L = 1;
  for (const auto& v : f) {
    Int den = denominator(v);
    L = L / gcd(L, den) * den;
  }
  if (L > 1048576) throw ResourceError("observable denominators too large for the certificate loop");
  long long Lv = to_ll(L);
  std::vector<long long> fnum(static_cast<size_t>(N));
  long long maxAbs = 0;
  for (long long i = 0; i < N; ++i) {
    fnum[static_cast<size_t>(i)] = to_ll(Int(numerator(f[static_cast<size_t>(i)]) *
                                              (L / denominator(f[static_cast<size_t>(i)]))));
    maxAbs = std::max(maxAbs, std::abs(fnum[static_cast<size_t>(i)]));
  }
  if (maxAbs > (1ll << 20) || horizon > (1ll << 21))
    throw ResourceError("observable scale too large for the certificate loop");
  std::vector<long long> pre(static_cast<size_t>(horizon + N + 1), 0);
  for (long long i = 1; i < horizon + N + 1; ++i)
    pre[static_cast<size_t>(i)] = pre[static_cast<size_t>(i - 1)] + fnum[static_cast<size_t>((i - 1) % N)];
  auto window = [&](long long x, long long w) {
    return pre[static_cast<size_t>(x + w)] - pre[static_cast<size_t>(x)];
  };
  const Int epsNum = numerator(eps), epsDen = denominator(eps);
  unsigned __int128 worstS = 0;
  long long worstN = m;
  bool ok = true;
  for (long long n = m; n <= horizon; ++n) {
    unsigned __int128 S = 0;
    for (long long x = 0; x < N; ++x) {
      __int128 diff = static_cast<__int128>(m) * window(x, n) - static_cast<__int128>(n) * window(x, m);
      S += static_cast<unsigned __int128>(diff * diff);
    }
    // compare S / (n^2 m^2 L^2 N) against eps^2 without leaving integers
    Int lhs = int_from_u128(S) * epsDen * epsDen;
    Int rhs = epsNum * epsNum * Int(n) * n * Int(m) * m * Int(Lv) * Lv * N;
    if (lhs >= rhs) ok = false;
    // worst gap maximizes S / n^2
    if (int_from_u128(S) * (Int(worstN) * worstN) > int_from_u128(worstS) * (Int(n) * n)) {
      worstS = S;
      worstN = n;
    }
  }
  rep.worstN = worstN;
  rep.worstGapSq = Rational(int_from_u128(worstS)) /
                   Rational(Int(worstN) * worstN * Int(m) * m * Int(Lv) * Lv * N);
  rep.pass = ok;
  return rep;
}

}  // namespace ergo
