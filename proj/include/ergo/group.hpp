#pragma once

// Exact normal-form arithmetic for the concrete groups: integer lattices,
// BS(1,2) as dyadic pairs, free groups as reduced words, cyclic groups,
// and finite products.

#include "ergo/arith.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace ergo {

enum class GroupKind { Lattice, Bs12, Free, Cyclic, Product };

struct GroupDescriptor {
  GroupKind kind = GroupKind::Lattice;
  int rank = 1;            // lattice dimension or free rank
  long long modulus = 1;   // cyclic order
  std::shared_ptr<const GroupDescriptor> left, right;  // product factors
};

GroupDescriptor lattice_group(int d);
GroupDescriptor bs12_group();
GroupDescriptor free_group(int rank);
GroupDescriptor cyclic_group(long long q);
GroupDescriptor product_group(const GroupDescriptor& a, const GroupDescriptor& b);
bool same_group(const GroupDescriptor& a, const GroupDescriptor& b);
std::string group_name(const GroupDescriptor& g);

// num * 2^-exp with num odd, or num = 0 and exp = 0; exp may be negative
struct Dyadic {
  Int num;
  long long exp = 0;

  static Dyadic make(Int n, long long e);
  static Dyadic zero() { return Dyadic{}; }
  bool is_zero() const { return num == 0; }
  bool is_integer() const { return exp <= 0; }
  Int integer_value() const;  // requires is_integer
};
Dyadic dy_add(const Dyadic& a, const Dyadic& b);
Dyadic dy_neg(const Dyadic& a);
Dyadic dy_scale2(const Dyadic& a, long long k);  // value * 2^k
int dy_cmp(const Dyadic& a, const Dyadic& b);
long long dy_mod(const Dyadic& a, long long q);  // q odd
std::string dy_string(const Dyadic& a);

struct LatticeElt {
  std::vector<long long> c;
};
struct Bs12Elt {  // (x, n) in Z[1/2] x| Z, product (x,n)(y,m) = (x + 2^n y, n+m)
  Dyadic x;
  long long n = 0;
};
struct FreeElt {  // reduced word; letter +i / -i is generator i or its inverse
  std::vector<int> w;
};
struct CyclicElt {
  long long q = 1;
  long long r = 0;
};
struct GroupElement;
struct ProductElt {
  std::shared_ptr<const GroupElement> a, b;
};

struct GroupElement {
  std::variant<LatticeElt, Bs12Elt, FreeElt, CyclicElt, ProductElt> v;
};

int cmp_elements(const GroupElement& a, const GroupElement& b);
inline bool operator<(const GroupElement& a, const GroupElement& b) {
  return cmp_elements(a, b) < 0;
}
inline bool operator==(const GroupElement& a, const GroupElement& b) {
  return cmp_elements(a, b) == 0;
}
inline bool operator!=(const GroupElement& a, const GroupElement& b) {
  return cmp_elements(a, b) != 0;
}

GroupElement identity(const GroupDescriptor& g);
GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);
GroupElement power(const GroupElement& a, long long k);
bool is_identity(const GroupElement& a);
bool element_matches(const GroupDescriptor& g, const GroupElement& a);
std::vector<GroupElement> standard_generators(const GroupDescriptor& g);
std::string element_string(const GroupElement& a);

// constructors
GroupElement lat(std::vector<long long> coords);
GroupElement bs(const Int& num, long long exp, long long n);  // x = num * 2^-exp
GroupElement free_word(std::vector<int> letters);             // reduced on construction
GroupElement cyc(long long q, long long r);
GroupElement pair_elt(const GroupElement& a, const GroupElement& b);

}  // namespace ergo
