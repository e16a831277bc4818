#include "ergo/group.hpp"

#include <algorithm>
#include <sstream>

namespace ergo {

GroupDescriptor lattice_group(int d) {
  if (d < 1) throw InputError("lattice dimension must be positive");
  GroupDescriptor g;
  g.kind = GroupKind::Lattice;
  g.rank = d;
  return g;
}

GroupDescriptor bs12_group() {
  GroupDescriptor g;
  g.kind = GroupKind::Bs12;
  return g;
}

GroupDescriptor free_group(int rank) {
  if (rank < 1) throw InputError("free rank must be positive");
  GroupDescriptor g;
  g.kind = GroupKind::Free;
  g.rank = rank;
  return g;
}

GroupDescriptor cyclic_group(long long q) {
  if (q < 1) throw InputError("cyclic order must be positive");
  GroupDescriptor g;
  g.kind = GroupKind::Cyclic;
  g.modulus = q;
  return g;
}

GroupDescriptor product_group(const GroupDescriptor& a, const GroupDescriptor& b) {
  GroupDescriptor g;
  g.kind = GroupKind::Product;
  g.left = std::make_shared<const GroupDescriptor>(a);
  g.right = std::make_shared<const GroupDescriptor>(b);
  return g;
}

bool same_group(const GroupDescriptor& a, const GroupDescriptor& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case GroupKind::Lattice:
    case GroupKind::Free:
      return a.rank == b.rank;
    case GroupKind::Bs12:
      return true;
    case GroupKind::Cyclic:
      return a.modulus == b.modulus;
    case GroupKind::Product:
      return same_group(*a.left, *b.left) && same_group(*a.right, *b.right);
  }
  return false;
}

std::string group_name(const GroupDescriptor& g) {
  switch (g.kind) {
    case GroupKind::Lattice:
      return g.rank == 1 ? "Z" : "Z^" + std::to_string(g.rank);
    case GroupKind::Bs12:
      return "BS(1,2)";
    case GroupKind::Free:
      return "F_" + std::to_string(g.rank);
    case GroupKind::Cyclic:
      return "Z/" + std::to_string(g.modulus);
    case GroupKind::Product:
      return group_name(*g.left) + " x " + group_name(*g.right);
  }
  return "?";
}

Dyadic Dyadic::make(Int n, long long e) {
  if (n == 0) return Dyadic{};
  while ((n & 1) == 0) {
    n >>= 1;
    --e;
  }
  Dyadic d;
  d.num = std::move(n);
  d.exp = e;
  return d;
}

Int Dyadic::integer_value() const {
  if (!is_integer()) throw InputError("dyadic is not an integer");
  return num << static_cast<unsigned>(-exp);
}

Dyadic dy_add(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  long long e = std::max(a.exp, b.exp);
  Int n = (a.num << static_cast<unsigned>(e - a.exp)) + (b.num << static_cast<unsigned>(e - b.exp));
  return Dyadic::make(std::move(n), e);
}

Dyadic dy_neg(const Dyadic& a) {
  Dyadic d = a;
  d.num = -d.num;
  return d;
}

Dyadic dy_scale2(const Dyadic& a, long long k) {
  if (a.is_zero()) return a;
  Dyadic d = a;
  d.exp -= k;
  return d;
}

int dy_cmp(const Dyadic& a, const Dyadic& b) {
  Dyadic d = dy_add(a, dy_neg(b));
  if (d.num == 0) return 0;
  return d.num > 0 ? 1 : -1;
}

namespace {

long long mod_pos(Int v, long long q) {
  Int r = v % q;
  if (r < 0) r += q;
  return static_cast<long long>(r);
}

long long mulmod(long long a, long long b, long long q) {
  return static_cast<long long>(static_cast<unsigned __int128>(a) * b % q);
}

long long powmod(long long base, unsigned long long e, long long q) {
  long long acc = 1 % q, b = base % q;
  while (e) {
    if (e & 1) acc = mulmod(acc, b, q);
    b = mulmod(b, b, q);
    e >>= 1;
  }
  return acc;
}

}  // namespace

long long dy_mod(const Dyadic& a, long long q) {
  if (q <= 0 || q % 2 == 0) throw InputError("dyadic residue needs odd positive modulus");
  if (a.is_zero()) return 0;
  long long base = a.exp > 0 ? (q + 1) / 2 : 2 % q;  // inverse of 2 when exp > 0
  unsigned long long e = a.exp > 0 ? static_cast<unsigned long long>(a.exp)
                                   : static_cast<unsigned long long>(-a.exp);
  return mulmod(mod_pos(a.num, q), powmod(base, e, q), q);
}

std::string dy_string(const Dyadic& a) {
  if (a.is_integer()) return a.integer_value().str();
  return a.num.str() + "/2^" + std::to_string(a.exp);
}

namespace {

void reduce_tail(std::vector<int>& w) {
  while (w.size() >= 2 && w[w.size() - 1] == -w[w.size() - 2]) {
    w.pop_back();
    w.pop_back();
  }
}

std::vector<int> reduce_word(const std::vector<int>& in) {
  std::vector<int> out;
  out.reserve(in.size());
  for (int c : in) {
    if (c == 0) throw InputError("free-group letter 0");
    if (!out.empty() && out.back() == -c)
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

}  // namespace

int cmp_elements(const GroupElement& a, const GroupElement& b) {
  if (a.v.index() != b.v.index())
    return a.v.index() < b.v.index() ? -1 : 1;
  if (auto* x = std::get_if<LatticeElt>(&a.v)) {
    const auto& y = std::get<LatticeElt>(b.v);
    if (x->c.size() != y.c.size()) return x->c.size() < y.c.size() ? -1 : 1;
    for (size_t i = 0; i < x->c.size(); ++i)
      if (x->c[i] != y.c[i]) return x->c[i] < y.c[i] ? -1 : 1;
    return 0;
  }
  if (auto* x = std::get_if<Bs12Elt>(&a.v)) {
    const auto& y = std::get<Bs12Elt>(b.v);
    if (x->n != y.n) return x->n < y.n ? -1 : 1;
    return dy_cmp(x->x, y.x);
  }
  if (auto* x = std::get_if<FreeElt>(&a.v)) {
    const auto& y = std::get<FreeElt>(b.v);
    if (x->w.size() != y.w.size()) return x->w.size() < y.w.size() ? -1 : 1;
    for (size_t i = 0; i < x->w.size(); ++i)
      if (x->w[i] != y.w[i]) return x->w[i] < y.w[i] ? -1 : 1;
    return 0;
  }
  if (auto* x = std::get_if<CyclicElt>(&a.v)) {
    const auto& y = std::get<CyclicElt>(b.v);
    if (x->q != y.q) return x->q < y.q ? -1 : 1;
    if (x->r != y.r) return x->r < y.r ? -1 : 1;
    return 0;
  }
  const auto& x = std::get<ProductElt>(a.v);
  const auto& y = std::get<ProductElt>(b.v);
  int c = cmp_elements(*x.a, *y.a);
  if (c != 0) return c;
  return cmp_elements(*x.b, *y.b);
}

GroupElement identity(const GroupDescriptor& g) {
  switch (g.kind) {
    case GroupKind::Lattice:
      return GroupElement{LatticeElt{std::vector<long long>(g.rank, 0)}};
    case GroupKind::Bs12:
      return GroupElement{Bs12Elt{Dyadic::zero(), 0}};
    case GroupKind::Free:
      return GroupElement{FreeElt{}};
    case GroupKind::Cyclic:
      return GroupElement{CyclicElt{g.modulus, 0}};
    case GroupKind::Product:
      return pair_elt(identity(*g.left), identity(*g.right));
  }
  throw InputError("bad group descriptor");
}

GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  if (a.v.index() != b.v.index()) throw InputError("multiplying elements of different groups");
  if (auto* x = std::get_if<LatticeElt>(&a.v)) {
    const auto& y = std::get<LatticeElt>(b.v);
    if (x->c.size() != y.c.size()) throw InputError("lattice rank mismatch");
    LatticeElt out = *x;
    for (size_t i = 0; i < out.c.size(); ++i) out.c[i] += y.c[i];
    return GroupElement{std::move(out)};
  }
  if (auto* x = std::get_if<Bs12Elt>(&a.v)) {
    const auto& y = std::get<Bs12Elt>(b.v);
    return GroupElement{Bs12Elt{dy_add(x->x, dy_scale2(y.x, x->n)), x->n + y.n}};
  }
  if (auto* x = std::get_if<FreeElt>(&a.v)) {
    const auto& y = std::get<FreeElt>(b.v);
    FreeElt out = *x;
    for (int c : y.w) {
      out.w.push_back(c);
      reduce_tail(out.w);
    }
    return GroupElement{std::move(out)};
  }
  if (auto* x = std::get_if<CyclicElt>(&a.v)) {
    const auto& y = std::get<CyclicElt>(b.v);
    if (x->q != y.q) throw InputError("cyclic modulus mismatch");
    return GroupElement{CyclicElt{x->q, (x->r + y.r) % x->q}};
  }
  const auto& x = std::get<ProductElt>(a.v);
  const auto& y = std::get<ProductElt>(b.v);
  return pair_elt(multiply(*x.a, *y.a), multiply(*x.b, *y.b));
}

GroupElement inverse(const GroupElement& a) {
  if (auto* x = std::get_if<LatticeElt>(&a.v)) {
    LatticeElt out = *x;
    for (auto& c : out.c) c = -c;
    return GroupElement{std::move(out)};
  }
  if (auto* x = std::get_if<Bs12Elt>(&a.v))
    return GroupElement{Bs12Elt{dy_scale2(dy_neg(x->x), -x->n), -x->n}};
  if (auto* x = std::get_if<FreeElt>(&a.v)) {
    FreeElt out;
    out.w.reserve(x->w.size());
    for (auto it = x->w.rbegin(); it != x->w.rend(); ++it) out.w.push_back(-*it);
    return GroupElement{std::move(out)};
  }
  if (auto* x = std::get_if<CyclicElt>(&a.v))
    return GroupElement{CyclicElt{x->q, x->r == 0 ? 0 : x->q - x->r}};
  const auto& x = std::get<ProductElt>(a.v);
  return pair_elt(inverse(*x.a), inverse(*x.b));
}

GroupElement power(const GroupElement& a, long long k) {
  if (k < 0) return power(inverse(a), -k);
  GroupElement acc{a};  // placeholder shape; reset to identity of the right type below
  switch (a.v.index()) {
    case 0:
      acc = GroupElement{LatticeElt{std::vector<long long>(std::get<LatticeElt>(a.v).c.size(), 0)}};
      break;
    case 1:
      acc = GroupElement{Bs12Elt{}};
      break;
    case 2:
      acc = GroupElement{FreeElt{}};
      break;
    case 3:
      acc = GroupElement{CyclicElt{std::get<CyclicElt>(a.v).q, 0}};
      break;
    case 4: {
      const auto& p = std::get<ProductElt>(a.v);
      acc = pair_elt(power(*p.a, 0), power(*p.b, 0));
      break;
    }
  }
  GroupElement base = a;
  while (k) {
    if (k & 1) acc = multiply(acc, base);
    k >>= 1;
    if (k) base = multiply(base, base);
  }
  return acc;
}

bool is_identity(const GroupElement& a) {
  if (auto* x = std::get_if<LatticeElt>(&a.v))
    return std::all_of(x->c.begin(), x->c.end(), [](long long c) { return c == 0; });
  if (auto* x = std::get_if<Bs12Elt>(&a.v)) return x->x.is_zero() && x->n == 0;
  if (auto* x = std::get_if<FreeElt>(&a.v)) return x->w.empty();
  if (auto* x = std::get_if<CyclicElt>(&a.v)) return x->r == 0;
  const auto& x = std::get<ProductElt>(a.v);
  return is_identity(*x.a) && is_identity(*x.b);
}

bool element_matches(const GroupDescriptor& g, const GroupElement& a) {
  switch (g.kind) {
    case GroupKind::Lattice: {
      auto* x = std::get_if<LatticeElt>(&a.v);
      return x && static_cast<int>(x->c.size()) == g.rank;
    }
    case GroupKind::Bs12:
      return std::holds_alternative<Bs12Elt>(a.v);
    case GroupKind::Free: {
      auto* x = std::get_if<FreeElt>(&a.v);
      if (!x) return false;
      for (int c : x->w)
        if (c == 0 || std::abs(c) > g.rank) return false;
      return true;
    }
    case GroupKind::Cyclic: {
      auto* x = std::get_if<CyclicElt>(&a.v);
      return x && x->q == g.modulus && 0 <= x->r && x->r < x->q;
    }
    case GroupKind::Product: {
      auto* x = std::get_if<ProductElt>(&a.v);
      return x && element_matches(*g.left, *x->a) && element_matches(*g.right, *x->b);
    }
  }
  return false;
}

std::vector<GroupElement> standard_generators(const GroupDescriptor& g) {
  std::vector<GroupElement> out;
  switch (g.kind) {
    case GroupKind::Lattice:
      for (int i = 0; i < g.rank; ++i) {
        std::vector<long long> c(g.rank, 0);
        c[i] = 1;
        out.push_back(lat(std::move(c)));
      }
      break;
    case GroupKind::Bs12:
      out.push_back(bs(1, 0, 0));  // a: x -> x+1
      out.push_back(bs(0, 0, 1));  // b: conjugation doubles a
      break;
    case GroupKind::Free:
      for (int i = 1; i <= g.rank; ++i) out.push_back(free_word({i}));
      break;
    case GroupKind::Cyclic:
      out.push_back(cyc(g.modulus, g.modulus == 1 ? 0 : 1));
      break;
    case GroupKind::Product: {
      GroupElement el = identity(*g.left), er = identity(*g.right);
      for (const auto& a : standard_generators(*g.left)) out.push_back(pair_elt(a, er));
      for (const auto& b : standard_generators(*g.right)) out.push_back(pair_elt(el, b));
      break;
    }
  }
  return out;
}

std::string element_string(const GroupElement& a) {
  std::ostringstream os;
  if (auto* x = std::get_if<LatticeElt>(&a.v)) {
    os << "(";
    for (size_t i = 0; i < x->c.size(); ++i) os << (i ? "," : "") << x->c[i];
    os << ")";
  } else if (auto* x = std::get_if<Bs12Elt>(&a.v)) {
    os << "(" << dy_string(x->x) << ";" << x->n << ")";
  } else if (auto* x = std::get_if<FreeElt>(&a.v)) {
    if (x->w.empty()) os << "e";
    for (size_t i = 0; i < x->w.size(); ++i) {
      if (i) os << ".";
      int c = x->w[i];
      os << "x" << std::abs(c);
      if (c < 0) os << "'";
    }
  } else if (auto* x = std::get_if<CyclicElt>(&a.v)) {
    os << x->r << "%" << x->q;
  } else {
    const auto& pr = std::get<ProductElt>(a.v);
    os << "[" << element_string(*pr.a) << "|" << element_string(*pr.b) << "]";
  }
  return os.str();
}

GroupElement lat(std::vector<long long> coords) {
  if (coords.empty()) throw InputError("empty lattice coordinate vector");
  return GroupElement{LatticeElt{std::move(coords)}};
}

GroupElement bs(const Int& num, long long exp, long long n) {
  return GroupElement{Bs12Elt{Dyadic::make(num, exp), n}};
}

GroupElement free_word(std::vector<int> letters) {
  return GroupElement{FreeElt{reduce_word(letters)}};
}

GroupElement cyc(long long q, long long r) {
  if (q < 1) throw InputError("cyclic order must be positive");
  r %= q;
  if (r < 0) r += q;
  return GroupElement{CyclicElt{q, r}};
}

GroupElement pair_elt(const GroupElement& a, const GroupElement& b) {
  return GroupElement{ProductElt{std::make_shared<const GroupElement>(a),
                                 std::make_shared<const GroupElement>(b)}};
}

}  // namespace ergo
