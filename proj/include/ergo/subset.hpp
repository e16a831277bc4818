#pragma once

// Finite sets of group elements with exact cardinality arithmetic,
// translation, symmetric differences, K-boundaries, and word-metric balls.

#include "ergo/group.hpp"

#include <vector>

namespace ergo {

inline constexpr long long kDefaultElementBudget = 1'000'000;

class FiniteSubset {
 public:
  FiniteSubset() = default;

  // sorts, deduplicates, and checks every element against the descriptor
  static FiniteSubset of(const GroupDescriptor& g, std::vector<GroupElement> elems);
  // trusts the input to be sorted, unique, and well-formed (hot paths)
  static FiniteSubset from_sorted(const GroupDescriptor& g, std::vector<GroupElement> elems);

  const GroupDescriptor& group() const { return g_; }
  const std::vector<GroupElement>& elements() const { return v_; }
  long long size() const { return static_cast<long long>(v_.size()); }
  bool empty() const { return v_.empty(); }
  bool contains(const GroupElement& e) const;
  bool contains_all(const FiniteSubset& other) const;

  FiniteSubset translated(const GroupElement& g) const;  // { g*f : f in this }
  FiniteSubset inverted() const;                         // { f^-1 : f in this }

 private:
  GroupDescriptor g_;
  std::vector<GroupElement> v_;
};

Int intersection_size(const FiniteSubset& a, const FiniteSubset& b);
Int symdiff_size(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b);

// |F delta gF| / |F|
Rational symdiff_ratio(const FiniteSubset& f, const GroupElement& g);

// { g : Kg meets F and Kg meets the complement of F }
FiniteSubset k_boundary(const FiniteSubset& f, const FiniteSubset& k);

// max over g in K of symdiff_ratio(F, g); optionally reports the maximizer
Rational folner_defect(const FiniteSubset& f, const FiniteSubset& k,
                       GroupElement* worst = nullptr);

// closed word-metric ball; gens are symmetrized silently
FiniteSubset ball(const GroupDescriptor& g, const std::vector<GroupElement>& gens,
                  int radius, long long budget = kDefaultElementBudget);
std::vector<Int> growth_sequence(const GroupDescriptor& g,
                                 const std::vector<GroupElement>& gens, int maxRadius,
                                 long long budget = kDefaultElementBudget);

}  // namespace ergo
