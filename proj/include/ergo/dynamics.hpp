#pragma once

// Finite measure-preserving systems with uniform measure, exact ergodic
// averages, the mean projection, uniform-convexity moduli, and the
// quantitative convergence checks built on them.

#include "ergo/modes.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ergo {

class MeasureSystem {
 public:
  GroupDescriptor group() const;
  long long npoints() const;
  std::string name() const;
  long long act(const GroupElement& g, long long x) const;

  bool is_torus() const;
  int torus_dim() const;
  long long torus_mod() const;
  bool is_bs12_affine() const;
  long long affine_mod() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit MeasureSystem(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend MeasureSystem make_torus_system(int, long long);
  friend MeasureSystem make_bs12_affine_system(long long);
};

// points = residue vectors mod N, flattened with axis i at stride N^i;
// g acts by coordinatewise addition
MeasureSystem make_torus_system(int d, long long N);
// q odd; (x, n) sends y to 2^n y + x mod q, so a: y+1 and b: 2y
MeasureSystem make_bs12_affine_system(long long q);

struct SystemReport {
  bool ok = true;
  std::string detail;
};
// generator bijectivity (hence measure preservation) plus the homomorphism
// law on sampled element pairs
SystemReport validate_system(const MeasureSystem& sys, long long pairSamples, Rng& rng);

// exact observable, one value per point
using Observable = std::vector<Rational>;

Rational obs_norm_sq(const MeasureSystem& sys, const Observable& f);  // mean of squares
Rational obs_l1(const MeasureSystem& sys, const Observable& f);
Rational obs_mean(const MeasureSystem& sys, const Observable& f);
Observable obs_sub(const Observable& f, const Observable& g);
Observable obs_scale(const Observable& f, const Rational& c);
Rational obs_dist_sq(const MeasureSystem& sys, const Observable& f, const Observable& g);

// (T_g f)(x) = f(g.x)
Observable koopman(const MeasureSystem& sys, const GroupElement& g, const Observable& f);

// (A_n f)(x) = |F_n|^-1 sum_{g in F_n} f(g.x); residue-count fast paths for
// torus actions under interval/box/bs12 schedules, element-by-element
// otherwise (budget-guarded)
Observable ergodic_average(const MeasureSystem& sys, const FolnerSchedule& s, long long n,
                           const Observable& f, long long budget = kDefaultElementBudget);

// orbit averages; the conditional expectation onto invariant functions
Observable mean_projection(const MeasureSystem& sys, const Observable& f);

// modulus of uniform convexity at eps in (0, 2]
QuadVal uc_modulus_hilbert(const Rational& eps);                      // 1 - sqrt(1 - eps^2/4)
Rational uc_modulus_hanner(const Rational& p, const Rational& eps);   // (p-1) eps^2 / 8, 1 < p < 2
double uc_modulus_clarkson(double p, double eps);                     // 1 - (1 - (eps/2)^p)^(1/p), p >= 2

struct UcCheck {
  bool ok = true;
  double mid = 0, rhs = 0;
};
// ||x|| <= ||y|| <= 1 and ||x - y|| >= eps force ||(x+y)/2|| <= ||y|| - u(eps);
// double precision with a 1e-9 slack on the comparison
UcCheck uc_midpoint_check(const std::vector<double>& x, const std::vector<double>& y, double p,
                          double eps);

struct MainBoundReport {
  bool pass = true;
  bool vacuous = false;  // first admissible gap already exceeds nMax
  long long count = 0;
  Int bound;
  std::vector<long long> chain;
  Rational normSq;
  long long nMax = 0;
};
// counts eps-fluctuations of n -> A_n f in L2 norm along chains obeying
// n_{i+1} >= beta(n_i, eta / (3 ||f||)), against floor(2||f|| / (u - 2 eta));
// requires ||f|| <= 1 and 0 < 2*eta < u = uc_modulus_hilbert(eps)
MainBoundReport verify_main_bound(const MeasureSystem& sys, const FolnerSchedule& s,
                                  const Observable& f, const Rational& eps, const QuadVal& eta,
                                  long long nMax,
                                  const std::vector<Observable>* precomputedAvgs = nullptr);

struct AveragingReport {
  bool pass = true;
  long long K = 0;
  Rational gapSq;  // ||A_K f - A_K A_N f||^2
  Rational rhsSq;  // eta^2 ||f||^2
};
// K = beta(N, eta); the two averages must be eta||f||-close
AveragingReport averaging_lemma_check(const MeasureSystem& sys, const FolnerSchedule& s,
                                      const DistanceFn& beta, long long N, const Rational& eta,
                                      const Observable& f);

struct FastCorollaryReport {
  bool pass = true;
  bool precondition = true;
  long long count = 0;
  Int bound;
  FastReport fastness;
  std::vector<long long> chain;
};
// along a (lambda, eta/(3||f||))-fast prefix of length len, plain
// eps-fluctuations of A_n f stay below lambda * floor(2||f||/(u-2 eta)) + lambda
FastCorollaryReport verify_fast_corollary(const MeasureSystem& sys, const FolnerSchedule& fast,
                                          long long lambda, const Observable& f,
                                          const Rational& eps, const QuadVal& eta, long long len);

struct SlowRateReport {
  bool pass = true;
  int d = 1;
  long long n = 0;
  long long m = 0;       // the witness scale fed back through the modulus
  Rational alpha, eps;
  Rational diffSq;       // ||A_n f - f||^2 for the unit-norm witness
  Rational avgSq;        // ||A_n f||^2
};
// a mean-zero unit vector on Z^d whose average at time n still has norm
// above 1 - eps > alpha: rates below alpha are unattainable uniformly
SlowRateReport slow_rate_witness(int d, long long n, const Rational& alpha);

struct BishopReport {
  bool pass = true;
  Rational lhs;  // measure of { upcrossing count >= k } up to the horizon
  Rational rhs;  // ||f||_1 / (k (beta - alpha))
};
// orbit averages of the first standard generator, pointwise upcrossing
// counts; truncation only undercounts, so the inequality must hold
BishopReport bishop_upcrossing_check(const MeasureSystem& sys, const Observable& f,
                                     const Rational& alpha, const Rational& beta, long long k,
                                     long long horizon);

struct RateCertificate {
  bool pass = true;
  long long m = 0;        // certified index: ||A_n f - A_m f|| < eps for n in [m, 10m]
  long long iUsed = 0;    // coboundary approximation depth
  double uNorm = 0;
  Rational worstGapSq;
  long long worstN = 0;
};
// resolves f against the invariant part, approximates the rest by a
// coboundary (least-squares in doubles, certificate re-checked exactly),
// and validates the produced rate index over a tenfold
// horizon; rank-one torus systems only
RateCertificate rate_from_limit_norm(const MeasureSystem& sys, const Observable& f,
                                     const Rational& eps);

}  // namespace ergo
