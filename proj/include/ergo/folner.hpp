#pragma once

// Folner schedules for the concrete groups, exact defects (closed-form where
// the set shapes allow, brute-force otherwise), convergence moduli, and
// (lambda, eps)-fast refinement.

#include "ergo/subset.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ergo {

// (index, eps) -> index; exact in eps.  at_quad may be null when no exact
// quadratic-argument evaluation exists; rational eps always works.
struct DistanceFn {
  std::function<long long(long long, const Rational&)> at_rat;
  std::function<long long(long long, const QuadVal&)> at_quad;

  long long operator()(long long n, const Rational& eps) const;
  long long operator()(long long n, const QuadVal& eps) const;
};

// max over i <= n of beta(i, eps), bumped minimally to be strictly increasing
DistanceFn monotone_envelope(DistanceFn beta);
// envelope values beta(1..nmax) as a vector (strictly increasing)
std::vector<long long> distance_prefix(const DistanceFn& beta, const Rational& eps,
                                       long long nmax);

// exact ceil/floor of c * sqrt(q) / u for rational c, q >= 0 and a positive
// quadratic value u = a + b*sqrt(r); covers the eta/(3||f||) distances where
// two distinct square roots meet one expression
Int ceil_div_surd(const Rational& c, const Rational& q, const QuadVal& u);
Int floor_div_surd(const Rational& c, const Rational& q, const QuadVal& u);
// sign of t*u - c*sqrt(q); lets callers clamp a quotient against a horizon
// without evaluating it
int surd_quotient_sign(const Int& t, const QuadVal& u, const Rational& c, const Rational& q);

struct ClosedFormModulus {
  enum class Kind {
    BoxZd,             // ceil(d*n / eps)
    Bs12Rect,          // ceil((4^n + n) / eps)
    CesaroInterval,    // floor(2(n-1)/eps) + 1
    GreedyReciprocal,  // max(n+1, ceil(1/eps))
  };
  Kind kind;
  int dim = 1;

  long long at(long long n, const Rational& eps) const;  // clamped to 64-bit
  long long at(long long n, const QuadVal& eps) const;
  Int at_exact(long long n, const Rational& eps) const;
  Int at_exact(long long n, const QuadVal& eps) const;
  DistanceFn fn() const;  // raw form (nondecreasing in n)
};

class FolnerSchedule {
 public:
  enum class Kind { Interval, Box, Bs12, Product, Explicit, Refined };

  GroupDescriptor group() const;
  std::string name() const;
  Kind kind() const;
  long long element_budget() const;

  Int cardinality_at(long long n) const;        // no materialization needed
  FiniteSubset set_at(long long n) const;       // memoized; budget-guarded
  bool materializable(long long n) const;

  std::optional<ClosedFormModulus> closed_form() const;
  DistanceFn modulus_fn() const;                // closed form + monotone envelope

  // symdiff_ratio(setAt(m), g), via shape formulas when available
  Rational defect(long long m, const GroupElement& g) const;
  // max over g in setAt(j) of defect(m, g); exact, witness included
  std::pair<Rational, GroupElement> max_defect(long long m, long long j) const;
  std::pair<Rational, GroupElement> max_defect_uncached(long long m, long long j) const;
  bool has_analytic_defect() const;

  // structure accessors
  std::pair<long long, long long> interval_at(long long n) const;  // Interval kind
  int box_dim() const;                                             // Box kind
  std::pair<Int, long long> bs12_params(long long n) const;        // (M, n'), set = (R_{M,n'})^-1
  const FolnerSchedule& product_left() const;
  const FolnerSchedule& product_right() const;
  const FolnerSchedule& refined_base() const;
  long long refined_index(long long n) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit FolnerSchedule(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  friend FolnerSchedule interval_schedule(std::function<long long(long long)>,
                                          std::function<long long(long long)>, std::string,
                                          long long);
  friend FolnerSchedule cesaro_schedule(long long);
  friend FolnerSchedule box_schedule(int, long long);
  friend FolnerSchedule bs12_schedule(long long);
  friend FolnerSchedule product_schedule(const FolnerSchedule&, const FolnerSchedule&);
  friend FolnerSchedule explicit_schedule(GroupDescriptor,
                                          std::function<FiniteSubset(long long)>, std::string,
                                          long long, std::optional<ClosedFormModulus>);
  friend FolnerSchedule refine_to_indices(const FolnerSchedule&, std::vector<long long>,
                                          std::string);
};

// setAt(i) = [lo(i), hi(i)] in Z
FolnerSchedule interval_schedule(std::function<long long(long long)> lo,
                                 std::function<long long(long long)> hi, std::string name,
                                 long long budget = kDefaultElementBudget);
// setAt(n) = [0, n-1], the Cesaro intervals, with the derived closed-form modulus
FolnerSchedule cesaro_schedule(long long budget = kDefaultElementBudget);
// setAt(n) = [-n, n]^d with the corrected box modulus ceil(d*n/eps)
FolnerSchedule box_schedule(int d, long long budget = kDefaultElementBudget);
// setAt(n) = (R_{4^n, n})^-1 in BS(1,2) with modulus ceil((4^n + n)/eps);
// the rectangles themselves are right-Folner, their inverses left-Folner,
// and the pinned averaging convention consumes left defects
FolnerSchedule bs12_schedule(long long budget = kDefaultElementBudget);
FolnerSchedule product_schedule(const FolnerSchedule& a, const FolnerSchedule& b);
FolnerSchedule explicit_schedule(GroupDescriptor g,
                                 std::function<FiniteSubset(long long)> setAt, std::string name,
                                 long long budget = kDefaultElementBudget,
                                 std::optional<ClosedFormModulus> cf = std::nullopt);
FolnerSchedule refine_to_indices(const FolnerSchedule& base, std::vector<long long> indices,
                                 std::string nameSuffix);

struct ModulusReport {
  bool pass = true;
  long long n = 0;
  long long firstM = 0, lastM = 0;  // checked range
  long long failM = 0;
  GroupElement witness;
  Rational witnessDefect;
  long long cells = 0;
};
ModulusReport verify_modulus(const FolnerSchedule& s, const DistanceFn& beta, long long n,
                             const Rational& eps, long long horizon);

struct EmpiricalModulus {
  bool found = false;
  long long least = 0;
  long long horizon = 0;  // certified only up to here; closed forms carry the tail
};
EmpiricalModulus empirical_modulus(const FolnerSchedule& s, long long n, const Rational& eps,
                                   long long horizon);

struct FastReport {
  bool ok = true;
  long long k = 0, m = 0;  // witness pair on failure
  GroupElement witness;
  Rational defect;
};
// for all k <= len, m in [k+lambda, len], g in setAt(k): defect(m, g) < eps
FastReport is_fast(const FolnerSchedule& s, long long len, long long lambda,
                   const Rational& eps);
FastReport is_fast(const FolnerSchedule& s, long long len, long long lambda, const QuadVal& eps);
// eps compared against defect * sqrt(q): threshold eps / sqrt(q), exact
FastReport is_fast_scaled(const FolnerSchedule& s, long long len, long long lambda,
                          const QuadVal& eps, const Rational& q);

// greedy (1,eps)-fast refinement per the refinement proposition; the result
// is (lambda,eps)-fast for every lambda >= 1
FolnerSchedule fast_refine(const FolnerSchedule& s, long long lambda, const Rational& eps,
                           long long count, long long scanHorizon = 100000);

// enumerator of finite subsets in a fixed computable order; nullopt = exhausted
using SubsetEnumerator = std::function<std::optional<FiniteSubset>(long long)>;
// all integer intervals ordered by (max |endpoint|, size, lower endpoint);
// agrees stepwise with full subset enumeration for the greedy construction
// because the first qualifying size always forces the full interval
SubsetEnumerator interval_enumerator();

// F_n = least enumerated superset of F_{n-1} with |F_n delta g F_n| < |F_n|/n
// for all g in F_{n-1}; attaches the modulus max(n+1, ceil(1/eps))
FolnerSchedule greedy_computable_folner(const GroupDescriptor& g, const SubsetEnumerator& en,
                                        long long count, long long scanHorizon = 1000000,
                                        long long budget = kDefaultElementBudget);

}  // namespace ergo
