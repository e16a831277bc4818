#include "ergo/folner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace ergo {

long long DistanceFn::operator()(long long n, const Rational& eps) const {
  if (!at_rat) throw InputError("distance function has no rational evaluation");
  return at_rat(n, eps);
}

long long DistanceFn::operator()(long long n, const QuadVal& eps) const {
  if (at_quad) return at_quad(n, eps);
  if (at_rat && eps.is_rational()) return at_rat(n, eps.rat_part());
  throw InputError("distance function has no quadratic evaluation");
}

DistanceFn monotone_envelope(DistanceFn beta) {
  DistanceFn out;
  out.at_rat = [beta](long long n, const Rational& eps) {
    long long cur = 0;
    for (long long i = 1; i <= n; ++i) {
      long long b = beta(i, eps);
      cur = (i == 1) ? b : std::max(b, cur + 1);
    }
    return cur;
  };
  out.at_quad = [beta](long long n, const QuadVal& eps) {
    long long cur = 0;
    for (long long i = 1; i <= n; ++i) {
      long long b = beta(i, eps);
      cur = (i == 1) ? b : std::max(b, cur + 1);
    }
    return cur;
  };
  return out;
}

std::vector<long long> distance_prefix(const DistanceFn& beta, const Rational& eps,
                                       long long nmax) {
  if (nmax < 0) throw InputError("negative prefix length");
  std::vector<long long> out;
  out.reserve(static_cast<size_t>(nmax));
  long long cur = 0;
  for (long long i = 1; i <= nmax; ++i) {
    long long b = beta(i, eps);
    cur = (i == 1) ? b : std::max(b, cur + 1);
    out.push_back(cur);
  }
  return out;
}

namespace {

// [lo, hi] enclosure of sqrt(x) with denominator d * 2^prec
void sqrt_bounds(const Rational& x, long long prec, Rational* lo, Rational* hi) {
  Int n = numerator(x), d = denominator(x);
  Int t = isqrt(n * d << static_cast<unsigned>(2 * prec));
  Int den = d << static_cast<unsigned>(prec);
  *lo = Rational(t, den);
  *hi = Rational(t + 1, den);
}

// exact sign of a + b*sqrt(r) + g*sqrt(s) for r, s >= 0
int sign_three(const Rational& a, const Rational& b, const Rational& r, const Rational& g,
               const Rational& s) {
  if (r < 0 || s < 0) throw InputError("negative radicand");
  if (b == 0 || r == 0) return QuadVal(a, g, s).sign();
  if (g == 0 || s == 0) return QuadVal(a, b, r).sign();
  Int sn, sd;
  if (is_square(numerator(r), &sn) && is_square(denominator(r), &sd))
    return QuadVal(a + b * Rational(sn, sd), g, s).sign();
  if (is_square(numerator(s), &sn) && is_square(denominator(s), &sd))
    return QuadVal(a + g * Rational(sn, sd), b, r).sign();
  if (r == s) return QuadVal(a, b + g, r).sign();
  Rational rs = r * s;
  if (is_square(numerator(rs), &sn) && is_square(denominator(rs), &sd)) {
    // sqrt(r) = w / sqrt(s) = (w/s) sqrt(s) with w = sqrt(r s)
    Rational w(sn, sd);
    return QuadVal(a, g + b * w / s, s).sign();
  }
  // sqrt(r) and sqrt(s) are independent over the rationals, so the value is
  // nonzero and interval refinement terminates
  for (long long prec = 64; prec <= 65536; prec *= 2) {
    Rational rl, rh, sl, sh;
    sqrt_bounds(r, prec, &rl, &rh);
    sqrt_bounds(s, prec, &sl, &sh);
    Rational lo = a + (b >= 0 ? b * rl : b * rh) + (g >= 0 ? g * sl : g * sh);
    Rational hi = a + (b >= 0 ? b * rh : b * rl) + (g >= 0 ? g * sh : g * sl);
    if (lo > 0) return 1;
    if (hi < 0) return -1;
  }
  throw InputError("sign refinement failed to converge");
}

// sign of t*u - c*sqrt(q)
int quotient_sign(const Int& t, const QuadVal& u, const Rational& c, const Rational& q) {
  Rational tr(t);
  return sign_three(tr * u.rat_part(), tr * u.surd_coeff(), u.radicand(), -c, q);
}

Int surd_quotient_start(const Rational& c, const Rational& q, const QuadVal& u) {
  double est = to_double(c) * std::sqrt(to_double(q)) / u.approx();
  if (!(std::abs(est) < 8e18)) throw ResourceError("surd quotient out of supported range");
  return Int(static_cast<long long>(std::floor(est)));
}

}  // namespace

int surd_quotient_sign(const Int& t, const QuadVal& u, const Rational& c, const Rational& q) {
  if (q < 0) throw InputError("negative radicand");
  return quotient_sign(t, u, c, q);
}

Int ceil_div_surd(const Rational& c, const Rational& q, const QuadVal& u) {
  if (q < 0) throw InputError("negative radicand");
  if (u.sign() <= 0) throw InputError("surd quotient needs a positive divisor");
  if (c == 0 || q == 0) return 0;
  if (c < 0) return -floor_div_surd(-c, q, u);
  Int sn, sd;
  if (is_square(numerator(q), &sn) && is_square(denominator(q), &sd))
    return (QuadVal(c * Rational(sn, sd)) * u.recip()).ceil();
  if (u.is_rational()) return QuadVal(Rational(0), c / u.rat_part(), q).ceil();
  // least t with t*u >= c*sqrt(q)
  Int t = surd_quotient_start(c, q, u) - 2;
  while (quotient_sign(t, u, c, q) >= 0) --t;
  while (quotient_sign(t, u, c, q) < 0) ++t;
  return t;
}

Int floor_div_surd(const Rational& c, const Rational& q, const QuadVal& u) {
  if (q < 0) throw InputError("negative radicand");
  if (u.sign() <= 0) throw InputError("surd quotient needs a positive divisor");
  if (c == 0 || q == 0) return 0;
  if (c < 0) return -ceil_div_surd(-c, q, u);
  Int sn, sd;
  if (is_square(numerator(q), &sn) && is_square(denominator(q), &sd))
    return (QuadVal(c * Rational(sn, sd)) * u.recip()).floor();
  if (u.is_rational()) return QuadVal(Rational(0), c / u.rat_part(), q).floor();
  // greatest t with t*u <= c*sqrt(q)
  Int t = surd_quotient_start(c, q, u) - 2;
  while (quotient_sign(t, u, c, q) > 0) --t;
  while (quotient_sign(t, u, c, q) <= 0) ++t;
  return t - 1;
}

namespace {

Int box_cardinality(long long n, int d) { return pow_int(Int(2 * n + 1), static_cast<unsigned long long>(d)); }

Int bs12_m_bound(long long n) { return pow_int(Int(4), static_cast<unsigned long long>(n)); }

Int bs12_cardinality(long long n) { return (2 * bs12_m_bound(n) + 1) * (2 * n + 1); }

// |S_n delta g S_n| / |S_n| for g = (num * 2^-exp, l0), with S_n the level
// set {(k 2^(l-n), l) : |k| <= 4^n, |l| <= n}
Rational bs12_defect(long long n, const Int& num, long long exp, long long l0) {
  Int m = bs12_m_bound(n);
  Int levelCount = 2 * m + 1;
  Int total = levelCount * (2 * n + 1);
  long long lo = std::max(-n, l0 - n), hi = std::min(n, l0 + n);
  Int overlap = 0;
  if (lo <= hi) {
    if (num == 0) {
      overlap = Int(hi - lo + 1) * levelCount;
    } else {
      // level l keeps max(0, levelCount - t) points where t = |x0| * 2^(n-l),
      // and only when t is an integer; t runs over a geometric range, so the
      // surviving levels and their total shortfall close up
      Int a_num = abs(num);
      long long hiAligned = std::min(hi, n - exp);
      if (a_num < levelCount && hiAligned >= lo) {
        long long eLo = n - hiAligned - exp;
        long long eHi = n - lo - exp;
        long long eMax =
            static_cast<long long>(boost::multiprecision::msb((levelCount - 1) / a_num));
        long long c = std::min(eHi, eMax);
        if (c >= eLo) {
          Int sumT = a_num * ((Int(1) << static_cast<unsigned>(c + 1)) -
                              (Int(1) << static_cast<unsigned>(eLo)));
          overlap = Int(c - eLo + 1) * levelCount - sumT;
        }
      }
    }
  }
  return Rational(2 * (total - overlap), total);
}

}  // namespace

long long ClosedFormModulus::at(long long n, const Rational& eps) const {
  return to_ll(at_exact(n, eps));
}

long long ClosedFormModulus::at(long long n, const QuadVal& eps) const {
  return to_ll(at_exact(n, eps));
}

Int ClosedFormModulus::at_exact(long long n, const Rational& eps) const {
  if (n < 1) throw InputError("modulus index must be positive");
  if (eps <= 0) throw InputError("modulus needs positive eps");
  switch (kind) {
    case Kind::BoxZd:
      return ceil_rat(Rational(Int(dim) * n) / eps);
    case Kind::Bs12Rect:
      return ceil_rat(Rational(bs12_m_bound(n) + n) / eps);
    case Kind::CesaroInterval:
      return floor_rat(Rational(2 * (n - 1)) / eps) + 1;
    case Kind::GreedyReciprocal:
      return std::max(Int(n + 1), ceil_rat(Rational(1) / eps));
  }
  throw InputError("bad modulus kind");
}

Int ClosedFormModulus::at_exact(long long n, const QuadVal& eps) const {
  if (eps.is_rational()) return at_exact(n, eps.rat_part());
  if (n < 1) throw InputError("modulus index must be positive");
  if (eps.sign() <= 0) throw InputError("modulus needs positive eps");
  QuadVal inv = eps.recip();
  switch (kind) {
    case Kind::BoxZd:
      return (inv * Rational(Int(dim) * n)).ceil();
    case Kind::Bs12Rect:
      return (inv * Rational(bs12_m_bound(n) + n)).ceil();
    case Kind::CesaroInterval:
      return (inv * Rational(2 * (n - 1))).floor() + 1;
    case Kind::GreedyReciprocal:
      return std::max(Int(n + 1), inv.ceil());
  }
  throw InputError("bad modulus kind");
}

DistanceFn ClosedFormModulus::fn() const {
  ClosedFormModulus self = *this;
  DistanceFn out;
  out.at_rat = [self](long long n, const Rational& eps) { return self.at(n, eps); };
  out.at_quad = [self](long long n, const QuadVal& eps) { return self.at(n, eps); };
  return out;
}

struct FolnerSchedule::Impl {
  Kind kind = Kind::Interval;
  GroupDescriptor group;
  std::string name;
  long long budget = kDefaultElementBudget;
  std::optional<ClosedFormModulus> cf;

  std::function<long long(long long)> lo, hi;          // Interval
  int dim = 1;                                         // Box
  std::shared_ptr<const FolnerSchedule> left, right;   // Product
  std::function<FiniteSubset(long long)> make;         // Explicit
  std::shared_ptr<const FolnerSchedule> base;          // Refined
  std::vector<long long> indices;                      // Refined

  mutable std::mutex mu;
  mutable std::map<long long, FiniteSubset> cache;
  mutable std::map<std::pair<long long, long long>, std::pair<Rational, GroupElement>> defectMemo;
};

GroupDescriptor FolnerSchedule::group() const { return impl_->group; }
std::string FolnerSchedule::name() const { return impl_->name; }
FolnerSchedule::Kind FolnerSchedule::kind() const { return impl_->kind; }
long long FolnerSchedule::element_budget() const { return impl_->budget; }
std::optional<ClosedFormModulus> FolnerSchedule::closed_form() const { return impl_->cf; }
bool FolnerSchedule::has_analytic_defect() const {
  switch (impl_->kind) {
    case Kind::Interval:
    case Kind::Box:
    case Kind::Bs12:
      return true;
    case Kind::Product:
      return impl_->left->has_analytic_defect() && impl_->right->has_analytic_defect();
    case Kind::Refined:
      return impl_->base->has_analytic_defect();
    case Kind::Explicit:
      return false;
  }
  return false;
}

DistanceFn FolnerSchedule::modulus_fn() const {
  if (!impl_->cf) throw InputError("schedule has no closed-form modulus");
  return impl_->cf->fn();
}

std::pair<long long, long long> FolnerSchedule::interval_at(long long n) const {
  if (impl_->kind != Kind::Interval) throw InputError("not an interval schedule");
  if (n < 1) throw InputError("schedule index must be positive");
  long long a = impl_->lo(n), b = impl_->hi(n);
  if (a > b) throw InputError("empty interval in schedule");
  return {a, b};
}

int FolnerSchedule::box_dim() const {
  if (impl_->kind != Kind::Box) throw InputError("not a box schedule");
  return impl_->dim;
}

std::pair<Int, long long> FolnerSchedule::bs12_params(long long n) const {
  if (impl_->kind != Kind::Bs12) throw InputError("not a BS(1,2) schedule");
  if (n < 1) throw InputError("schedule index must be positive");
  return {bs12_m_bound(n), n};
}

const FolnerSchedule& FolnerSchedule::product_left() const {
  if (impl_->kind != Kind::Product) throw InputError("not a product schedule");
  return *impl_->left;
}

const FolnerSchedule& FolnerSchedule::product_right() const {
  if (impl_->kind != Kind::Product) throw InputError("not a product schedule");
  return *impl_->right;
}

const FolnerSchedule& FolnerSchedule::refined_base() const {
  if (impl_->kind != Kind::Refined) throw InputError("not a refined schedule");
  return *impl_->base;
}

long long FolnerSchedule::refined_index(long long n) const {
  if (impl_->kind != Kind::Refined) throw InputError("not a refined schedule");
  if (n < 1 || n > static_cast<long long>(impl_->indices.size()))
    throw InputError("refined index out of range");
  return impl_->indices[static_cast<size_t>(n - 1)];
}

Int FolnerSchedule::cardinality_at(long long n) const {
  if (n < 1) throw InputError("schedule index must be positive");
  switch (impl_->kind) {
    case Kind::Interval: {
      auto [a, b] = interval_at(n);
      return Int(b) - a + 1;
    }
    case Kind::Box:
      return box_cardinality(n, impl_->dim);
    case Kind::Bs12:
      return bs12_cardinality(n);
    case Kind::Product:
      return impl_->left->cardinality_at(n) * impl_->right->cardinality_at(n);
    case Kind::Refined:
      return impl_->base->cardinality_at(refined_index(n));
    case Kind::Explicit:
      return Int(set_at(n).size());
  }
  throw InputError("bad schedule kind");
}

bool FolnerSchedule::materializable(long long n) const {
  if (impl_->kind == Kind::Explicit) return true;
  return cardinality_at(n) <= impl_->budget;
}

FiniteSubset FolnerSchedule::set_at(long long n) const {
  if (n < 1) throw InputError("schedule index must be positive");
  {
    std::lock_guard<std::mutex> lk(impl_->mu);
    auto it = impl_->cache.find(n);
    if (it != impl_->cache.end()) return it->second;
  }
  if (impl_->kind != Kind::Explicit && cardinality_at(n) > impl_->budget)
    throw ResourceError("element budget exceeded materializing " + impl_->name);
  FiniteSubset out;
  switch (impl_->kind) {
    case Kind::Interval: {
      auto [a, b] = interval_at(n);
      std::vector<GroupElement> v;
      v.reserve(static_cast<size_t>(b - a + 1));
      for (long long x = a; x <= b; ++x) v.push_back(lat({x}));
      out = FiniteSubset::from_sorted(impl_->group, std::move(v));
      break;
    }
    case Kind::Box: {
      int d = impl_->dim;
      std::vector<long long> c(static_cast<size_t>(d), -n);
      std::vector<GroupElement> v;
      v.reserve(static_cast<size_t>(to_ll(box_cardinality(n, d))));
      while (true) {
        v.push_back(lat(c));
        int i = d - 1;
        while (i >= 0 && c[static_cast<size_t>(i)] == n) {
          c[static_cast<size_t>(i)] = -n;
          --i;
        }
        if (i < 0) break;
        ++c[static_cast<size_t>(i)];
      }
      out = FiniteSubset::from_sorted(impl_->group, std::move(v));
      break;
    }
    case Kind::Bs12: {
      long long mIdx = n;
      Int m = bs12_m_bound(mIdx);
      std::vector<GroupElement> v;
      v.reserve(static_cast<size_t>(to_ll(bs12_cardinality(mIdx))));
      for (long long l = -mIdx; l <= mIdx; ++l)
        for (Int k = -m; k <= m; ++k) v.push_back(bs(k, mIdx - l, l));
      out = FiniteSubset::from_sorted(impl_->group, std::move(v));
      break;
    }
    case Kind::Product: {
      FiniteSubset a = impl_->left->set_at(n), b = impl_->right->set_at(n);
      std::vector<GroupElement> v;
      v.reserve(a.elements().size() * b.elements().size());
      for (const auto& x : a.elements())
        for (const auto& y : b.elements()) v.push_back(pair_elt(x, y));
      out = FiniteSubset::from_sorted(impl_->group, std::move(v));
      break;
    }
    case Kind::Refined:
      out = impl_->base->set_at(refined_index(n));
      break;
    case Kind::Explicit:
      out = impl_->make(n);
      if (out.size() > impl_->budget)
        throw ResourceError("element budget exceeded materializing " + impl_->name);
      if (out.empty()) throw InputError("schedule produced an empty set");
      break;
  }
  std::lock_guard<std::mutex> lk(impl_->mu);
  auto [it, ok] = impl_->cache.emplace(n, std::move(out));
  (void)ok;
  return it->second;
}

namespace {

const LatticeElt& lattice_of(const GroupElement& g) {
  auto* x = std::get_if<LatticeElt>(&g.v);
  if (!x) throw InputError("lattice element expected");
  return *x;
}

Rational interval_defect(long long len, long long shift) {
  long long k = std::abs(shift);
  return Rational(2 * std::min(k, len), len);
}

Rational box_defect(long long n, const std::vector<long long>& g) {
  Int side = 2 * n + 1;
  Int keep = 1;
  for (long long gi : g) {
    long long a = std::abs(gi);
    keep *= a >= 2 * n + 1 ? Int(0) : side - a;
  }
  Int total = pow_int(side, g.size());
  return Rational(2 * (total - keep), total);
}

}  // namespace

Rational FolnerSchedule::defect(long long m, const GroupElement& g) const {
  if (m < 1) throw InputError("schedule index must be positive");
  switch (impl_->kind) {
    case Kind::Interval: {
      auto [a, b] = interval_at(m);
      return interval_defect(b - a + 1, lattice_of(g).c.at(0));
    }
    case Kind::Box: {
      const auto& c = lattice_of(g).c;
      if (static_cast<int>(c.size()) != impl_->dim) throw InputError("lattice rank mismatch");
      return box_defect(m, c);
    }
    case Kind::Bs12: {
      auto* e = std::get_if<Bs12Elt>(&g.v);
      if (!e) throw InputError("BS(1,2) element expected");
      return bs12_defect(m, e->x.num, e->x.exp, e->n);
    }
    case Kind::Product: {
      auto* p = std::get_if<ProductElt>(&g.v);
      if (!p) throw InputError("product element expected");
      Rational da = impl_->left->defect(m, *p->a);
      Rational db = impl_->right->defect(m, *p->b);
      // shared fraction multiplies across factors
      return 2 * (1 - (1 - da / 2) * (1 - db / 2));
    }
    case Kind::Refined:
      return impl_->base->defect(refined_index(m), g);
    case Kind::Explicit:
      return symdiff_ratio(set_at(m), g);
  }
  throw InputError("bad schedule kind");
}

std::pair<Rational, GroupElement> FolnerSchedule::max_defect(long long m, long long j) const {
  if (m < 1 || j < 1) throw InputError("schedule index must be positive");
  {
    std::lock_guard<std::mutex> lk(impl_->mu);
    auto it = impl_->defectMemo.find({m, j});
    if (it != impl_->defectMemo.end()) return it->second;
  }
  auto out = max_defect_uncached(m, j);
  std::lock_guard<std::mutex> lk(impl_->mu);
  return impl_->defectMemo.emplace(std::make_pair(m, j), std::move(out)).first->second;
}

std::pair<Rational, GroupElement> FolnerSchedule::max_defect_uncached(long long m,
                                                                      long long j) const {
  switch (impl_->kind) {
    case Kind::Interval: {
      auto [a, b] = interval_at(j);
      long long worst = std::abs(a) >= std::abs(b) ? a : b;
      auto [fa, fb] = interval_at(m);
      return {interval_defect(fb - fa + 1, worst), lat({worst})};
    }
    case Kind::Box: {
      // the per-axis overlap shrinks as any coordinate grows, so the corner
      // dominates the whole box
      std::vector<long long> corner(static_cast<size_t>(impl_->dim), j);
      return {box_defect(m, corner), lat(corner)};
    }
    case Kind::Bs12: {
      if (j > 30000) throw ResourceError("BS(1,2) test grid too large");
      Int mj = bs12_m_bound(j);
      // for a fixed level shift and a fixed 2-adic valuation of k the defect
      // grows with |k| (same aligned levels, larger translation), so the top
      // element of each valuation class decides the maximum
      Rational best = -1;
      GroupElement arg;
      auto consider = [&](const Int& k, long long l) {
        Dyadic x = Dyadic::make(k, j - l);
        Rational r = bs12_defect(m, x.num, x.exp, l);
        if (r > best) {
          best = r;
          arg = bs(k, j - l, l);
        }
      };
      for (long long l = -j; l <= j; ++l) {
        consider(Int(0), l);
        for (long long v = 0; v < 2 * j; ++v) consider(mj - (Int(1) << static_cast<unsigned>(v)), l);
        consider(mj, l);
      }
      return {best, arg};
    }
    case Kind::Product: {
      auto [da, ga] = impl_->left->max_defect(m, j);
      auto [db, gb] = impl_->right->max_defect(m, j);
      return {2 * (1 - (1 - da / 2) * (1 - db / 2)), pair_elt(ga, gb)};
    }
    case Kind::Refined:
      return impl_->base->max_defect(refined_index(m), refined_index(j));
    case Kind::Explicit: {
      GroupElement worst;
      Rational r = folner_defect(set_at(m), set_at(j), &worst);
      return {r, worst};
    }
  }
  throw InputError("bad schedule kind");
}

FolnerSchedule interval_schedule(std::function<long long(long long)> lo,
                                 std::function<long long(long long)> hi, std::string name,
                                 long long budget) {
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Interval;
  impl->group = lattice_group(1);
  impl->name = std::move(name);
  impl->budget = budget;
  impl->lo = std::move(lo);
  impl->hi = std::move(hi);
  return FolnerSchedule(std::move(impl));
}

FolnerSchedule cesaro_schedule(long long budget) {
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Interval;
  impl->group = lattice_group(1);
  impl->name = "cesaro";
  impl->budget = budget;
  impl->lo = [](long long) { return 0LL; };
  impl->hi = [](long long n) { return n - 1; };
  impl->cf = ClosedFormModulus{ClosedFormModulus::Kind::CesaroInterval, 1};
  return FolnerSchedule(std::move(impl));
}

FolnerSchedule box_schedule(int d, long long budget) {
  if (d < 1) throw InputError("box dimension must be positive");
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Box;
  impl->group = lattice_group(d);
  impl->name = "box" + std::to_string(d);
  impl->budget = budget;
  impl->dim = d;
  impl->cf = ClosedFormModulus{ClosedFormModulus::Kind::BoxZd, d};
  return FolnerSchedule(std::move(impl));
}

FolnerSchedule bs12_schedule(long long budget) {
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Bs12;
  impl->group = bs12_group();
  impl->name = "bs12rect";
  impl->budget = budget;
  impl->cf = ClosedFormModulus{ClosedFormModulus::Kind::Bs12Rect, 1};
  return FolnerSchedule(std::move(impl));
}

FolnerSchedule product_schedule(const FolnerSchedule& a, const FolnerSchedule& b) {
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Product;
  impl->group = product_group(a.group(), b.group());
  impl->name = a.name() + "x" + b.name();
  impl->budget = std::min(a.element_budget(), b.element_budget());
  impl->left = std::make_shared<const FolnerSchedule>(a);
  impl->right = std::make_shared<const FolnerSchedule>(b);
  return FolnerSchedule(std::move(impl));
}

FolnerSchedule explicit_schedule(GroupDescriptor g, std::function<FiniteSubset(long long)> setAt,
                                 std::string name, long long budget,
                                 std::optional<ClosedFormModulus> cf) {
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Explicit;
  impl->group = std::move(g);
  impl->name = std::move(name);
  impl->budget = budget;
  impl->make = std::move(setAt);
  impl->cf = std::move(cf);
  return FolnerSchedule(std::move(impl));
}

FolnerSchedule refine_to_indices(const FolnerSchedule& base, std::vector<long long> indices,
                                 std::string nameSuffix) {
  if (indices.empty()) throw InputError("refinement needs at least one index");
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1) throw InputError("refinement index must be positive");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw InputError("refinement indices must increase strictly");
  }
  auto impl = std::make_shared<FolnerSchedule::Impl>();
  impl->kind = FolnerSchedule::Kind::Refined;
  impl->group = base.group();
  impl->name = base.name() + ":" + std::move(nameSuffix);
  impl->budget = base.element_budget();
  impl->base = std::make_shared<const FolnerSchedule>(base);
  impl->indices = std::move(indices);
  return FolnerSchedule(std::move(impl));
}

ModulusReport verify_modulus(const FolnerSchedule& s, const DistanceFn& beta, long long n,
                             const Rational& eps, long long horizon) {
  ModulusReport rep;
  rep.n = n;
  rep.witness = identity(s.group());
  rep.firstM = beta(n, eps);
  rep.lastM = horizon;
  for (long long m = rep.firstM; m <= horizon; ++m) {
    auto [d, g] = s.max_defect(m, n);
    rep.cells += to_ll(s.cardinality_at(n));
    if (d >= eps) {
      rep.pass = false;
      rep.failM = m;
      rep.witness = g;
      rep.witnessDefect = d;
      break;
    }
  }
  return rep;
}

EmpiricalModulus empirical_modulus(const FolnerSchedule& s, long long n, const Rational& eps,
                                   long long horizon) {
  EmpiricalModulus rep;
  rep.horizon = horizon;
  long long least = horizon + 1;
  for (long long m = horizon; m >= 1; --m) {
    if (s.max_defect(m, n).first < eps)
      least = m;
    else
      break;
  }
  if (least <= horizon) {
    rep.found = true;
    rep.least = least;
  }
  return rep;
}

namespace {

FastReport is_fast_by(const FolnerSchedule& s, long long len, long long lambda,
                      const std::function<bool(const Rational&)>& below) {
  if (lambda < 1) throw InputError("fastness needs lambda >= 1");
  if (len < 1) throw InputError("fastness needs a nonempty prefix");
  FastReport rep;
  rep.witness = identity(s.group());
  for (long long k = 1; k <= len; ++k)
    for (long long m = k + lambda; m <= len; ++m) {
      auto [d, g] = s.max_defect(m, k);
      if (!below(d)) {
        rep.ok = false;
        rep.k = k;
        rep.m = m;
        rep.witness = g;
        rep.defect = d;
        return rep;
      }
    }
  return rep;
}

}  // namespace

FastReport is_fast(const FolnerSchedule& s, long long len, long long lambda,
                   const Rational& eps) {
  if (eps <= 0) throw InputError("fastness needs positive eps");
  return is_fast_by(s, len, lambda, [&](const Rational& d) { return d < eps; });
}

FastReport is_fast(const FolnerSchedule& s, long long len, long long lambda, const QuadVal& eps) {
  if (eps.sign() <= 0) throw InputError("fastness needs positive eps");
  return is_fast_by(s, len, lambda, [&](const Rational& d) { return eps.cmp(d) > 0; });
}

FastReport is_fast_scaled(const FolnerSchedule& s, long long len, long long lambda,
                          const QuadVal& eps, const Rational& q) {
  if (eps.sign() <= 0) throw InputError("fastness needs positive eps");
  if (q < 0) throw InputError("negative norm square");
  QuadVal epsSq = eps * eps;
  // d * sqrt(q) < eps, both sides nonnegative, compared through squares
  return is_fast_by(s, len, lambda,
                    [&](const Rational& d) { return d == 0 || epsSq.cmp(d * d * q) > 0; });
}

FolnerSchedule fast_refine(const FolnerSchedule& s, long long lambda, const Rational& eps,
                           long long count, long long scanHorizon) {
  if (lambda < 1) throw InputError("fast refinement needs lambda >= 1");
  if (eps <= 0) throw InputError("fast refinement needs positive eps");
  if (count < 1) throw InputError("fast refinement needs a positive length");
  std::vector<long long> idx{1};
  while (static_cast<long long>(idx.size()) < count) {
    long long n = idx.back();
    bool found = false;
    while (!found) {
      ++n;
      if (n > scanHorizon) throw StallError("fast refinement exceeded its scan horizon");
      found = true;
      for (long long c : idx) {
        if (s.max_defect(n, c).first >= eps) {
          found = false;
          break;
        }
      }
    }
    idx.push_back(n);
  }
  return refine_to_indices(s, std::move(idx), "fast");
}

SubsetEnumerator interval_enumerator() {
  GroupDescriptor z = lattice_group(1);
  return [z](long long idx) -> std::optional<FiniteSubset> {
    if (idx < 0) throw InputError("negative enumeration index");
    auto materialize = [&z](long long a, long long b) {
      std::vector<GroupElement> v;
      v.reserve(static_cast<size_t>(b - a + 1));
      for (long long x = a; x <= b; ++x) v.push_back(lat({x}));
      return FiniteSubset::from_sorted(z, std::move(v));
    };
    if (idx == 0) return materialize(0, 0);
    // entries with max|endpoint| <= r number (2r+1)(r+1)
    long long r = 1;
    while ((2 * r + 1) * (r + 1) <= idx) ++r;
    long long off = idx - (2 * r - 1) * r;
    long long size = off / 2 + 1;
    if (off == 4 * r) return materialize(-r, r);
    if (off % 2 == 0) return materialize(-r, -r + size - 1);
    return materialize(r - size + 1, r);
  };
}

FolnerSchedule greedy_computable_folner(const GroupDescriptor& g, const SubsetEnumerator& en,
                                        long long count, long long scanHorizon,
                                        long long budget) {
  if (count < 1) throw InputError("greedy construction needs a positive length");
  struct State {
    std::mutex mu;
    std::vector<FiniteSubset> sets;
    long long nextIdx = 0;
  };
  auto st = std::make_shared<State>();
  auto makeSet = [st, en, scanHorizon, budget](long long n) {
    std::lock_guard<std::mutex> lk(st->mu);
    while (static_cast<long long>(st->sets.size()) < n) {
      long long step = static_cast<long long>(st->sets.size()) + 1;
      const FiniteSubset* prev = st->sets.empty() ? nullptr : &st->sets.back();
      Rational thresh = Rational(1, step);
      long long scanned = 0;
      bool found = false;
      for (long long idx = st->nextIdx; !found; ++idx, ++scanned) {
        if (scanned > scanHorizon)
          throw StallError("greedy construction exceeded its scan horizon");
        auto cand = en(idx);
        if (!cand) throw StallError("enumeration exhausted during greedy construction");
        if (cand->size() > budget)
          throw ResourceError("element budget exceeded during greedy construction");
        if (cand->empty()) continue;
        if (prev) {
          if (cand->size() < prev->size()) continue;
          if (!cand->contains_all(*prev)) continue;
          bool ok = true;
          for (const auto& h : prev->elements()) {
            if (symdiff_ratio(*cand, h) >= thresh) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
        }
        st->sets.push_back(std::move(*cand));
        st->nextIdx = idx + 1;
        found = true;
      }
    }
    return st->sets[static_cast<size_t>(n - 1)];
  };
  return explicit_schedule(g, makeSet, "greedy", budget,
                           ClosedFormModulus{ClosedFormModulus::Kind::GreedyReciprocal, 1});
}

}  // namespace ergo
