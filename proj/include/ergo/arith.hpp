#pragma once

// Exact arithmetic: big integers, rationals, and values of the form
// a + b*sqrt(r) closed under the operations the verifiers need.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace ergo {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct ErgoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// malformed or out-of-contract input
struct InputError : ErgoError {
  using ErgoError::ErgoError;
};
// a configured cap or budget was exceeded; message names the cap
struct ResourceError : ErgoError {
  using ErgoError::ErgoError;
};
// a greedy search ran out of candidates before finishing
struct StallError : ErgoError {
  using ErgoError::ErgoError;
};
// a floating-point certificate failed its residual check
struct CertificateError : ErgoError {
  using ErgoError::ErgoError;
};

inline Rational rat(long long n, long long d) {
  if (d == 0) throw InputError("rational with zero denominator");
  return Rational(Int(n), Int(d));
}

inline Int floor_rat(const Rational& q) {
  Int n = numerator(q), d = denominator(q);
  Int quo = n / d;
  if (n % d != 0 && n < 0) --quo;
  return quo;
}

inline Int ceil_rat(const Rational& q) { return -floor_rat(-q); }

inline Int pow_int(const Int& base, unsigned long long e) {
  Int acc = 1, b = base;
  while (e) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline Int pow2(long long e) {
  if (e < 0) throw InputError("pow2 with negative exponent");
  return Int(1) << static_cast<unsigned>(e);
}

// floor of sqrt; exact
inline Int isqrt(const Int& x) {
  if (x < 0) throw InputError("isqrt of negative value");
  return boost::multiprecision::sqrt(x);
}

inline bool is_square(const Int& x, Int* root = nullptr) {
  if (x < 0) return false;
  Int s = isqrt(x);
  if (s * s != x) return false;
  if (root) *root = s;
  return true;
}

inline long long to_ll(const Int& x) {
  if (x > Int(INT64_MAX) || x < Int(INT64_MIN))
    throw ResourceError("value exceeds 64-bit range: " + x.str());
  return static_cast<long long>(x);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string rat_string(const Rational& q) {
  Int n = numerator(q), d = denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw InputError("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Int(s));
    Int n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw InputError("rational with zero denominator: " + s);
    return Rational(n, d);
  } catch (const std::exception&) {
    throw InputError("bad rational literal: " + s);
  }
}

// Exact value a + b*sqrt(r) with a,b,r rational, r >= 0.
// Normal form: perfect rational squares are folded into the rational part,
// and b == 0 implies r == 0.  Values sharing one radicand form a field,
// which is all the uniform-convexity computations need at p = 2.
class QuadVal {
 public:
  QuadVal() : a_(0), b_(0), r_(0) {}
  QuadVal(const Rational& a) : a_(a), b_(0), r_(0) {}
  QuadVal(const Rational& a, const Rational& b, const Rational& r) : a_(a), b_(b), r_(r) {
    normalize();
  }

  const Rational& rat_part() const { return a_; }
  const Rational& surd_coeff() const { return b_; }
  const Rational& radicand() const { return r_; }
  bool is_rational() const { return b_ == 0; }

  QuadVal operator-() const { return raw(-a_, -b_, r_); }

  friend QuadVal operator+(const QuadVal& x, const QuadVal& y) {
    require_compatible(x, y);
    return raw(x.a_ + y.a_, x.b_ + y.b_, common_r(x, y));
  }
  friend QuadVal operator-(const QuadVal& x, const QuadVal& y) { return x + (-y); }
  friend QuadVal operator*(const QuadVal& x, const QuadVal& y) {
    require_compatible(x, y);
    Rational r = common_r(x, y);
    return raw(x.a_ * y.a_ + x.b_ * y.b_ * r, x.a_ * y.b_ + x.b_ * y.a_, r);
  }
  friend QuadVal operator*(const QuadVal& x, const Rational& c) {
    return raw(x.a_ * c, x.b_ * c, x.r_);
  }
  friend QuadVal operator*(const Rational& c, const QuadVal& x) { return x * c; }

  QuadVal recip() const {
    if (b_ == 0) {
      if (a_ == 0) throw InputError("reciprocal of zero");
      return QuadVal(Rational(1) / a_);
    }
    Rational d = a_ * a_ - b_ * b_ * r_;
    if (d == 0) throw InputError("reciprocal of zero");  // unreachable in normal form
    return raw(a_ / d, -b_ / d, r_);
  }

  // sign of the value: -1, 0, +1
  int sign() const {
    if (b_ == 0) return a_ == 0 ? 0 : (a_ > 0 ? 1 : -1);
    if (a_ == 0) return b_ > 0 ? 1 : -1;
    if (a_ > 0 && b_ > 0) return 1;
    if (a_ < 0 && b_ < 0) return -1;
    // opposite signs: compare a^2 with b^2 r; equality would make sqrt(r) rational
    Rational lhs = a_ * a_, rhs = b_ * b_ * r_;
    if (a_ > 0) return lhs > rhs ? 1 : -1;
    return rhs > lhs ? 1 : -1;
  }

  int cmp(const QuadVal& o) const { return (*this - o).sign(); }
  int cmp(const Rational& q) const { return (*this - QuadVal(q)).sign(); }

  friend bool operator<(const QuadVal& x, const QuadVal& y) { return x.cmp(y) < 0; }
  friend bool operator<=(const QuadVal& x, const QuadVal& y) { return x.cmp(y) <= 0; }
  friend bool operator>(const QuadVal& x, const QuadVal& y) { return x.cmp(y) > 0; }
  friend bool operator>=(const QuadVal& x, const QuadVal& y) { return x.cmp(y) >= 0; }
  friend bool operator==(const QuadVal& x, const QuadVal& y) { return x.cmp(y) == 0; }

  Int floor() const {
    if (b_ == 0) return floor_rat(a_);
    double est = approx();
    if (est > 8e18 || est < -8e18)
      throw ResourceError("floor of quadratic value out of supported range");
    Int n = Int(static_cast<long long>(std::floor(est))) - 2;
    while (cmp(Rational(n + 1)) >= 0) ++n;
    while (cmp(Rational(n)) < 0) --n;  // defensive; est error is tiny
    return n;
  }
  Int ceil() const { return -(-*this).floor(); }

  double approx() const {
    double v = to_double(a_);
    if (b_ != 0) v += to_double(b_) * std::sqrt(to_double(r_));
    return v;
  }

  std::string str() const {
    if (b_ == 0) return rat_string(a_);
    return rat_string(a_) + " + " + rat_string(b_) + "*sqrt(" + rat_string(r_) + ")";
  }

 private:
  Rational a_, b_, r_;

  static QuadVal raw(Rational a, Rational b, Rational r) {
    QuadVal v;
    v.a_ = std::move(a);
    v.b_ = std::move(b);
    v.r_ = std::move(r);
    if (v.b_ == 0) v.r_ = 0;
    return v;
  }

  void normalize() {
    if (r_ < 0) throw InputError("negative radicand");
    if (b_ == 0 || r_ == 0) {
      b_ = 0;
      r_ = 0;
      return;
    }
    Int sn, sd;
    if (is_square(numerator(r_), &sn) && is_square(denominator(r_), &sd)) {
      a_ += b_ * Rational(sn, sd);
      b_ = 0;
      r_ = 0;
    }
  }

  static void require_compatible(const QuadVal& x, const QuadVal& y) {
    if (x.b_ != 0 && y.b_ != 0 && x.r_ != y.r_)
      throw InputError("mixing square roots of different radicands");
  }
  static Rational common_r(const QuadVal& x, const QuadVal& y) {
    return x.b_ != 0 ? x.r_ : y.r_;
  }
};

inline QuadVal operator+(const QuadVal& x, const Rational& q) { return x + QuadVal(q); }
inline QuadVal operator-(const QuadVal& x, const Rational& q) { return x - QuadVal(q); }
inline QuadVal operator-(const Rational& q, const QuadVal& x) { return QuadVal(q) - x; }

// Deterministic RNG: raw mt19937_64 draws only, so streams are identical
// across platforms (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // uniform in [0, n) by modulo; the bias is irrelevant for test vectors
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw InputError("Rng::below(0)");
    return gen_() % n;
  }

  long long range(long long lo, long long hi) {  // inclusive
    if (hi < lo) throw InputError("Rng::range with hi < lo");
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // value k/64 with k uniform in [-64, 64], or [0, 128] when nonneg
  Rational grid64(bool nonneg = false) {
    long long k = nonneg ? range(0, 128) : range(-64, 64);
    return Rational(Int(k), Int(64));
  }

 private:
  std::mt19937_64 gen_;
};

// seed for one grid cell, derived from the base seed and the cell's position
inline std::uint64_t cell_seed(std::uint64_t base, std::uint64_t cell) {
  std::uint64_t x = base ^ (0x9e3779b97f4a7c15ULL * (cell + 1));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace ergo
