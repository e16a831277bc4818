#include "ergo/subset.hpp"

#include <algorithm>
#include <set>

namespace ergo {

FiniteSubset FiniteSubset::of(const GroupDescriptor& g, std::vector<GroupElement> elems) {
  for (const auto& e : elems)
    if (!element_matches(g, e)) throw InputError("element does not belong to the group");
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end(),
                          [](const GroupElement& a, const GroupElement& b) { return a == b; }),
              elems.end());
  FiniteSubset s;
  s.g_ = g;
  s.v_ = std::move(elems);
  return s;
}

FiniteSubset FiniteSubset::from_sorted(const GroupDescriptor& g, std::vector<GroupElement> elems) {
  FiniteSubset s;
  s.g_ = g;
  s.v_ = std::move(elems);
  return s;
}

bool FiniteSubset::contains(const GroupElement& e) const {
  return std::binary_search(v_.begin(), v_.end(), e);
}

bool FiniteSubset::contains_all(const FiniteSubset& other) const {
  return std::includes(v_.begin(), v_.end(), other.v_.begin(), other.v_.end());
}

FiniteSubset FiniteSubset::translated(const GroupElement& g) const {
  std::vector<GroupElement> out;
  out.reserve(v_.size());
  for (const auto& e : v_) out.push_back(multiply(g, e));
  std::sort(out.begin(), out.end());
  return from_sorted(g_, std::move(out));
}

FiniteSubset FiniteSubset::inverted() const {
  std::vector<GroupElement> out;
  out.reserve(v_.size());
  for (const auto& e : v_) out.push_back(inverse(e));
  std::sort(out.begin(), out.end());
  return from_sorted(g_, std::move(out));
}

Int intersection_size(const FiniteSubset& a, const FiniteSubset& b) {
  const auto& x = a.elements();
  const auto& y = b.elements();
  size_t i = 0, j = 0;
  Int n = 0;
  while (i < x.size() && j < y.size()) {
    int c = cmp_elements(x[i], y[j]);
    if (c == 0) {
      ++n;
      ++i;
      ++j;
    } else if (c < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

Int symdiff_size(const FiniteSubset& a, const FiniteSubset& b) {
  return Int(a.size()) + Int(b.size()) - 2 * intersection_size(a, b);
}

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  if (!same_group(a.group(), b.group())) throw InputError("union across different groups");
  std::vector<GroupElement> out;
  out.reserve(a.elements().size() + b.elements().size());
  std::set_union(a.elements().begin(), a.elements().end(), b.elements().begin(),
                 b.elements().end(), std::back_inserter(out));
  return FiniteSubset::from_sorted(a.group(), std::move(out));
}

Rational symdiff_ratio(const FiniteSubset& f, const GroupElement& g) {
  if (f.empty()) throw InputError("symmetric-difference ratio of an empty set");
  return Rational(symdiff_size(f, f.translated(g)), Int(f.size()));
}

FiniteSubset k_boundary(const FiniteSubset& f, const FiniteSubset& k) {
  if (!same_group(f.group(), k.group())) throw InputError("boundary across different groups");
  // Kg meets F iff g lies in K^-1 F, so those are the only candidates
  std::set<GroupElement> cand;
  for (const auto& kk : k.elements()) {
    GroupElement ki = inverse(kk);
    for (const auto& ff : f.elements()) cand.insert(multiply(ki, ff));
  }
  std::vector<GroupElement> out;
  for (const auto& g : cand) {
    bool inside = false, outside = false;
    for (const auto& kk : k.elements()) {
      if (f.contains(multiply(kk, g)))
        inside = true;
      else
        outside = true;
      if (inside && outside) break;
    }
    if (inside && outside) out.push_back(g);
  }
  return FiniteSubset::from_sorted(f.group(), std::move(out));
}

Rational folner_defect(const FiniteSubset& f, const FiniteSubset& k, GroupElement* worst) {
  if (k.empty()) throw InputError("defect against an empty test set");
  Rational best = -1;
  for (const auto& g : k.elements()) {
    Rational r = symdiff_ratio(f, g);
    if (r > best) {
      best = r;
      if (worst) *worst = g;
    }
  }
  return best;
}

FiniteSubset ball(const GroupDescriptor& g, const std::vector<GroupElement>& gens, int radius,
                  long long budget) {
  if (radius < 0) throw InputError("negative ball radius");
  std::vector<GroupElement> sym;
  for (const auto& s : gens) {
    sym.push_back(s);
    sym.push_back(inverse(s));
  }
  std::set<GroupElement> seen;
  seen.insert(identity(g));
  std::vector<GroupElement> frontier(seen.begin(), seen.end());
  for (int r = 0; r < radius; ++r) {
    std::vector<GroupElement> next;
    for (const auto& e : frontier)
      for (const auto& s : sym) {
        GroupElement x = multiply(e, s);
        if (seen.insert(x).second) {
          if (static_cast<long long>(seen.size()) > budget)
            throw ResourceError("element budget exceeded while growing a ball");
          next.push_back(std::move(x));
        }
      }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return FiniteSubset::from_sorted(g, std::vector<GroupElement>(seen.begin(), seen.end()));
}

std::vector<Int> growth_sequence(const GroupDescriptor& g, const std::vector<GroupElement>& gens,
                                 int maxRadius, long long budget) {
  if (maxRadius < 0) throw InputError("negative ball radius");
  std::vector<GroupElement> sym;
  for (const auto& s : gens) {
    sym.push_back(s);
    sym.push_back(inverse(s));
  }
  std::set<GroupElement> seen;
  seen.insert(identity(g));
  std::vector<GroupElement> frontier(seen.begin(), seen.end());
  std::vector<Int> sizes;
  sizes.push_back(Int(seen.size()));
  for (int r = 0; r < maxRadius; ++r) {
    std::vector<GroupElement> next;
    for (const auto& e : frontier)
      for (const auto& s : sym) {
        GroupElement x = multiply(e, s);
        if (seen.insert(x).second) {
          if (static_cast<long long>(seen.size()) > budget)
            throw ResourceError("element budget exceeded while growing a ball");
          next.push_back(std::move(x));
        }
      }
    frontier = std::move(next);
    sizes.push_back(Int(seen.size()));
  }
  return sizes;
}

}  // namespace ergo
