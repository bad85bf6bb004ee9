#pragma once

// Concrete finite p-groups behind one element interface:
//   * ExpGroup  -- vectors over Z/p^2 with  l o m = l + m + p [pi(l), pi(m)]
//   * GammaGroup -- kernel of GL_n(Z/p^{k+1}) -> GL_n(F_p), matrices I + pA
//   * AbelianGroup -- products of cyclic p-groups (tower end-pieces and
//     counterexamples)
// plus the group-theoretic layer: Omega_1, power subgroups, Frattini,
// p-central/powerful predicates, extraction of the commutator form and
// p-power map of a central extension, the Log bracket, and uniform-tower
// verification.
//
// Everything here is enumeration-based and budgeted: operations that need
// the element list raise BudgetError beyond the configured cap instead of
// silently sampling.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "plie/algebra.hpp"
#include "plie/modp.hpp"

namespace plie {

using GroupElt = Vec;

constexpr uint64_t kDefaultBudget = 1'000'000;

struct EltHash {
  size_t operator()(const GroupElt& v) const {
    size_t h = 1469598103934665603ull;
    for (uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

class GroupView {
 public:
  virtual ~GroupView() = default;

  virtual unsigned prime() const = 0;
  virtual uint64_t order() const = 0;
  virtual GroupElt identity() const = 0;
  virtual GroupElt multiply(const GroupElt& a, const GroupElt& b) const = 0;
  virtual GroupElt inverse(const GroupElt& a) const = 0;
  virtual std::vector<GroupElt> generators() const = 0;
  virtual GroupElt sample(std::mt19937& rng) const = 0;
  virtual std::string describe() const = 0;

  // Full element list in a fixed odometer order; BudgetError if too large.
  virtual std::vector<GroupElt> elements(uint64_t budget = kDefaultBudget) const = 0;

  // Lifts of a distinguished basis of G/Omega_1(G), when the group carries
  // a canonical section; empty otherwise.
  virtual std::vector<GroupElt> canonical_basis_lifts() const { return {}; }
  virtual std::vector<std::string> basis_labels() const { return {}; }

  GroupElt power(const GroupElt& g, uint64_t e) const {
    GroupElt acc = identity(), base = g;
    while (e) {
      if (e & 1) acc = multiply(acc, base);
      base = multiply(base, base);
      e >>= 1;
    }
    return acc;
  }
  GroupElt pth_power(const GroupElt& g) const { return power(g, prime()); }

  // Order of g as a power of p.
  uint64_t element_order(const GroupElt& g) const {
    GroupElt x = g;
    uint64_t ord = 1;
    while (x != identity()) {
      x = pth_power(x);
      ord *= prime();
      if (ord > order()) throw ComputationError("element_order: runaway (not a p-group?)");
    }
    return ord;
  }

  GroupElt commutator(const GroupElt& a, const GroupElt& b) const {
    return multiply(multiply(a, b), multiply(inverse(a), inverse(b)));
  }
};

// ---- Exp of a bracket algebra ----

class ExpGroup final : public GroupView {
 public:
  explicit ExpGroup(const BracketAlgebra& L) : L_(L) {
    if (L.mod().k != 1) throw ValidationError("ExpGroup: base algebra must be over F_p");
    p_ = L.mod().p;
    mod2_ = p_ * p_;
  }

  const BracketAlgebra& algebra() const { return L_; }
  unsigned prime() const override { return p_; }
  uint64_t order() const override {
    uint64_t o = 1;
    for (size_t i = 0; i < 2 * L_.dim(); ++i) o *= p_;
    return o;
  }
  GroupElt identity() const override { return GroupElt(L_.dim(), 0); }

  GroupElt multiply(const GroupElt& a, const GroupElt& b) const override {
    const size_t n = L_.dim();
    Vec pa(n), pb(n);
    for (size_t i = 0; i < n; ++i) {
      pa[i] = a[i] % p_;
      pb[i] = b[i] % p_;
    }
    Vec br = L_.bracket(pa, pb);
    GroupElt c(n);
    for (size_t i = 0; i < n; ++i) c[i] = (a[i] + b[i] + p_ * br[i]) % mod2_;
    return c;
  }

  GroupElt inverse(const GroupElt& a) const override {
    GroupElt c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = (mod2_ - a[i]) % mod2_;
    return c;
  }

  std::vector<GroupElt> generators() const override { return canonical_basis_lifts(); }

  std::vector<GroupElt> canonical_basis_lifts() const override {
    std::vector<GroupElt> g;
    for (size_t i = 0; i < L_.dim(); ++i) {
      GroupElt e(L_.dim(), 0);
      e[i] = 1;
      g.push_back(e);
    }
    return g;
  }

  std::vector<std::string> basis_labels() const override { return L_.labels(); }

  GroupElt sample(std::mt19937& rng) const override {
    GroupElt e(L_.dim());
    std::uniform_int_distribution<uint32_t> dist(0, mod2_ - 1);
    for (auto& x : e) x = dist(rng);
    return e;
  }

  std::vector<GroupElt> elements(uint64_t budget = kDefaultBudget) const override {
    if (order() > budget)
      throw BudgetError("ExpGroup: order " + std::to_string(order()) + " exceeds budget");
    std::vector<GroupElt> all;
    all.reserve(order());
    GroupElt v(L_.dim(), 0);
    while (true) {
      all.push_back(v);
      size_t i = 0;
      while (i < v.size() && ++v[i] == mod2_) v[i++] = 0;
      if (i == v.size()) break;
    }
    return all;
  }

  std::string describe() const override {
    return "Exp group of a dim-" + std::to_string(L_.dim()) + " bracket algebra over F_" +
           std::to_string(p_);
  }

 private:
  BracketAlgebra L_;
  unsigned p_;
  uint32_t mod2_;
};

// ---- Gamma_{n,k}(p) ----

class GammaGroup final : public GroupView {
 public:
  GammaGroup(size_t n, unsigned k, unsigned p) : n_(n), k_(k), p_(p) {
    if (n < 1 || k < 1) throw ValidationError("GammaGroup: need n, k >= 1");
    PrimePower check(p, k + 1);  // validates p odd prime and representability
    mod_ = check.modulus();
    pk_ = mod_ / p_;
  }

  size_t n() const { return n_; }
  unsigned k() const { return k_; }
  uint32_t modulus() const { return mod_; }

  unsigned prime() const override { return p_; }
  uint64_t order() const override {
    uint64_t o = 1;
    for (size_t i = 0; i < k_ * n_ * n_; ++i) o *= p_;
    return o;
  }

  GroupElt identity() const override {
    GroupElt e(n_ * n_, 0);
    for (size_t i = 0; i < n_; ++i) e[i * n_ + i] = 1;
    return e;
  }

  bool contains(const GroupElt& m) const {
    if (m.size() != n_ * n_) return false;
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) {
        uint32_t want = (i == j) ? 1 : 0;
        if (m[i * n_ + j] % p_ != want) return false;
        if (m[i * n_ + j] >= mod_) return false;
      }
    return true;
  }

  GroupElt multiply(const GroupElt& a, const GroupElt& b) const override {
    GroupElt c(n_ * n_, 0);
    for (size_t i = 0; i < n_; ++i)
      for (size_t l = 0; l < n_; ++l) {
        uint64_t ail = a[i * n_ + l];
        if (!ail) continue;
        for (size_t j = 0; j < n_; ++j)
          c[i * n_ + j] = static_cast<uint32_t>((c[i * n_ + j] + ail * b[l * n_ + j]) % mod_);
      }
    return c;
  }

  GroupElt inverse(const GroupElt& a) const override {
    // (I + B)^{-1} = I - B + B^2 - ... with B = a - I nilpotent mod p^{k+1}
    GroupElt b(n_ * n_);
    for (size_t i = 0; i < n_ * n_; ++i) b[i] = a[i];
    for (size_t i = 0; i < n_; ++i) b[i * n_ + i] = sub_mod(b[i * n_ + i], 1, mod_);
    GroupElt acc = identity(), term = identity();
    for (unsigned j = 1; j <= k_; ++j) {
      term = mat_mul(term, b);
      for (size_t i = 0; i < n_ * n_; ++i) {
        uint32_t t = term[i];
        acc[i] = (j % 2) ? sub_mod(acc[i], t, mod_) : add_mod(acc[i], t, mod_);
      }
    }
    return acc;
  }

  std::vector<GroupElt> generators() const override { return canonical_basis_lifts(); }

  // I + p E_ij in row-major (i,j) order: the canonical identification of
  // Gamma/Omega_1 with gl_n.
  std::vector<GroupElt> canonical_basis_lifts() const override {
    std::vector<GroupElt> g;
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) {
        GroupElt e = identity();
        e[i * n_ + j] = add_mod(e[i * n_ + j], p_, mod_);
        g.push_back(e);
      }
    return g;
  }

  std::vector<std::string> basis_labels() const override {
    std::vector<std::string> l;
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j)
        l.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
    return l;
  }

  GroupElt sample(std::mt19937& rng) const override {
    std::uniform_int_distribution<uint32_t> dist(0, pk_ - 1);
    GroupElt e = identity();
    for (size_t i = 0; i < n_ * n_; ++i) e[i] = (e[i] + p_ * dist(rng)) % mod_;
    return e;
  }

  std::vector<GroupElt> elements(uint64_t budget = kDefaultBudget) const override {
    if (order() > budget)
      throw BudgetError("GammaGroup: order " + std::to_string(order()) + " exceeds budget");
    std::vector<GroupElt> all;
    all.reserve(order());
    Vec a(n_ * n_, 0);  // entries of A over Z/p^k
    while (true) {
      GroupElt e = identity();
      for (size_t i = 0; i < n_ * n_; ++i) e[i] = (e[i] + p_ * a[i]) % mod_;
      all.push_back(e);
      size_t i = 0;
      while (i < a.size() && ++a[i] == pk_) a[i++] = 0;
      if (i == a.size()) break;
    }
    return all;
  }

  std::string describe() const override {
    return "Gamma_{" + std::to_string(n_) + "," + std::to_string(k_) + "}(" +
           std::to_string(p_) + ")";
  }

 private:
  GroupElt mat_mul(const GroupElt& a, const GroupElt& b) const { return multiply(a, b); }

  size_t n_;
  unsigned k_, p_;
  uint32_t mod_, pk_;
};

// Reduction Gamma_{n,k} -> Gamma_{n,k-1} (entries mod p^k).
inline std::function<GroupElt(const GroupElt&)> gamma_projection(const GammaGroup& from) {
  uint32_t target_mod = from.modulus() / from.prime();
  return [target_mod](const GroupElt& g) {
    GroupElt h(g.size());
    for (size_t i = 0; i < g.size(); ++i) h[i] = g[i] % target_mod;
    return h;
  };
}

// ---- products of cyclic p-groups ----

class AbelianGroup final : public GroupView {
 public:
  AbelianGroup(unsigned p, std::vector<uint32_t> moduli) : p_(p), moduli_(std::move(moduli)) {
    PrimePower(p, 1);
    for (uint32_t m : moduli_) {
      uint32_t x = m;
      while (x > 1 && x % p_ == 0) x /= p_;
      if (x != 1) throw ValidationError("AbelianGroup: moduli must be powers of p");
    }
  }

  unsigned prime() const override { return p_; }
  uint64_t order() const override {
    uint64_t o = 1;
    for (uint32_t m : moduli_) o *= m;
    return o;
  }
  GroupElt identity() const override { return GroupElt(moduli_.size(), 0); }
  GroupElt multiply(const GroupElt& a, const GroupElt& b) const override {
    GroupElt c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = (a[i] + b[i]) % moduli_[i];
    return c;
  }
  GroupElt inverse(const GroupElt& a) const override {
    GroupElt c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = (moduli_[i] - a[i]) % moduli_[i];
    return c;
  }
  std::vector<GroupElt> generators() const override {
    std::vector<GroupElt> g;
    for (size_t i = 0; i < moduli_.size(); ++i) {
      GroupElt e = identity();
      e[i] = 1 % moduli_[i];
      g.push_back(e);
    }
    return g;
  }
  std::vector<GroupElt> canonical_basis_lifts() const override {
    // meaningful only in the homogeneous Z/p^2 case, where the unit
    // vectors lift a basis of G/Omega_1
    for (uint32_t m : moduli_)
      if (m != p_ * p_) return {};
    return generators();
  }
  GroupElt sample(std::mt19937& rng) const override {
    GroupElt e(moduli_.size());
    for (size_t i = 0; i < e.size(); ++i)
      e[i] = std::uniform_int_distribution<uint32_t>(0, moduli_[i] - 1)(rng);
    return e;
  }
  std::vector<GroupElt> elements(uint64_t budget = kDefaultBudget) const override {
    if (order() > budget) throw BudgetError("AbelianGroup: order exceeds budget");
    std::vector<GroupElt> all;
    all.reserve(order());
    GroupElt v = identity();
    while (true) {
      all.push_back(v);
      size_t i = 0;
      while (i < v.size() && ++v[i] == moduli_[i]) v[i++] = 0;
      if (i == v.size()) break;
    }
    return all;
  }
  std::string describe() const override {
    std::string s = "abelian group";
    for (uint32_t m : moduli_) s += " Z/" + std::to_string(m);
    return s;
  }

 private:
  unsigned p_;
  std::vector<uint32_t> moduli_;
};

// ---- subgroups ----

struct Subgroup {
  std::set<GroupElt> elems;

  uint64_t order() const { return elems.size(); }
  bool contains(const GroupElt& g) const { return elems.count(g) > 0; }
  bool subset_of(const Subgroup& o) const {
    for (const auto& g : elems)
      if (!o.contains(g)) return false;
    return true;
  }
  bool operator==(const Subgroup& o) const { return elems == o.elems; }
};

inline Subgroup subgroup_closure(const GroupView& G, const std::vector<GroupElt>& gens,
                                 uint64_t budget = kDefaultBudget) {
  Subgroup s;
  s.elems.insert(G.identity());
  std::vector<GroupElt> queue{G.identity()};
  while (!queue.empty()) {
    GroupElt x = queue.back();
    queue.pop_back();
    for (const auto& g : gens) {
      GroupElt y = G.multiply(x, g);
      if (s.elems.insert(y).second) {
        if (s.elems.size() > budget) throw BudgetError("subgroup_closure: budget exceeded");
        queue.push_back(y);
      }
    }
  }
  return s;
}

// Omega_1(G): subgroup generated by the elements of order dividing p.
inline Subgroup omega1(const GroupView& G, uint64_t budget = kDefaultBudget) {
  std::vector<GroupElt> gens;
  for (const auto& g : G.elements(budget))
    if (G.pth_power(g) == G.identity()) gens.push_back(g);
  return subgroup_closure(G, gens, budget);
}

// G^{p^e}: subgroup generated by the p^e-th powers.
inline Subgroup power_subgroup(const GroupView& G, unsigned e,
                               uint64_t budget = kDefaultBudget) {
  uint64_t q = 1;
  for (unsigned i = 0; i < e; ++i) q *= G.prime();
  std::vector<GroupElt> gens;
  for (const auto& g : G.elements(budget)) gens.push_back(G.power(g, q));
  return subgroup_closure(G, gens, budget);
}

// Normal closure of the commutators of the generators.
inline Subgroup commutator_subgroup(const GroupView& G, uint64_t budget = kDefaultBudget) {
  auto top_gens = G.generators();
  std::vector<GroupElt> gens;
  for (const auto& a : top_gens)
    for (const auto& b : top_gens) gens.push_back(G.commutator(a, b));
  Subgroup s = subgroup_closure(G, gens, budget);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& x : std::vector<GroupElt>(s.elems.begin(), s.elems.end()))
      for (const auto& g : top_gens) {
        GroupElt y = G.multiply(G.multiply(G.inverse(g), x), g);
        if (!s.contains(y)) {
          gens.push_back(y);
          s = subgroup_closure(G, gens, budget);
          grew = true;
        }
      }
  }
  return s;
}

inline bool is_central(const GroupView& G, const Subgroup& s) {
  for (const auto& v : s.elems)
    for (const auto& g : G.generators())
      if (G.multiply(v, g) != G.multiply(g, v)) return false;
  return true;
}

struct GroupPredicates {
  bool p_central = false;
  bool powerful = false;
  uint64_t exponent = 1;
  uint64_t omega1_order = 1;
  uint64_t frattini_order = 1;
  bool omega1_eq_pth_powers = false;
  bool omega1_eq_frattini = false;
  std::string witness;  // set when a predicate fails
};

inline GroupPredicates predicates(const GroupView& G, uint64_t budget = kDefaultBudget) {
  GroupPredicates r;
  Subgroup o1 = omega1(G, budget);
  Subgroup gp = power_subgroup(G, 1, budget);
  Subgroup comm = commutator_subgroup(G, budget);
  std::vector<GroupElt> frat_gens(gp.elems.begin(), gp.elems.end());
  frat_gens.insert(frat_gens.end(), comm.elems.begin(), comm.elems.end());
  Subgroup frat = subgroup_closure(G, frat_gens, budget);

  r.omega1_order = o1.order();
  r.frattini_order = frat.order();
  r.p_central = is_central(G, o1);
  r.powerful = comm.subset_of(gp);
  r.omega1_eq_pth_powers = (o1 == gp);
  r.omega1_eq_frattini = (o1 == frat);
  if (!r.p_central) r.witness = "Omega_1 is not central";
  if (!r.powerful) r.witness += std::string(r.witness.empty() ? "" : "; ") + "[G,G] not in G^p";

  uint64_t exp = 1;
  for (const auto& g : G.elements(budget)) exp = std::max(exp, G.element_order(g));
  r.exponent = exp;
  return r;
}

struct AssocReport {
  bool exhaustive = false;
  bool ok = false;
  std::string witness;
};

// (a b) c = a (b c), exhaustively when |G|^3 fits the budget, else sampled.
inline AssocReport associativity_check(const GroupView& G, uint64_t budget = kDefaultBudget,
                                       size_t samples = 100000, uint32_t seed = 12345) {
  AssocReport rep;
  uint64_t n = G.order();
  auto check_triple = [&](const GroupElt& a, const GroupElt& b, const GroupElt& c) {
    if (G.multiply(G.multiply(a, b), c) != G.multiply(a, G.multiply(b, c))) {
      rep.witness = "associativity fails";
      return false;
    }
    return true;
  };
  if (n * n * n <= budget) {
    rep.exhaustive = true;
    auto all = G.elements(budget);
    for (const auto& a : all)
      for (const auto& b : all)
        for (const auto& c : all)
          if (!check_triple(a, b, c)) return rep;
  } else {
    std::mt19937 rng(seed);
    for (size_t i = 0; i < samples; ++i)
      if (!check_triple(G.sample(rng), G.sample(rng), G.sample(rng))) return rep;
  }
  rep.ok = true;
  return rep;
}

// ---- the commutator form and p-power map of 1 -> V -> G -> W -> 1 ----

struct CentralExtensionForms {
  unsigned p = 3;
  size_t wdim = 0, vdim = 0;
  std::vector<std::string> labels;         // of the chosen W basis
  std::vector<GroupElt> w_basis_lifts;     // lifts of the W basis to G
  std::vector<GroupElt> v_basis;           // basis of V = Omega_1(G)
  std::vector<std::vector<Vec>> com;       // <w_i, w_j> in V coordinates
  ModMatrix phi;                           // vdim x wdim, phi(w_i) in V coords
  bool phi_bijective = false;
};

namespace groups_detail {

// coordinates of every V element with respect to a basis, by enumeration
inline std::unordered_map<GroupElt, Vec, EltHash> v_coordinate_table(
    const GroupView& G, const std::vector<GroupElt>& basis, unsigned p) {
  std::unordered_map<GroupElt, Vec, EltHash> table;
  Vec c(basis.size(), 0);
  while (true) {
    GroupElt e = G.identity();
    for (size_t i = 0; i < basis.size(); ++i)
      if (c[i]) e = G.multiply(e, G.power(basis[i], c[i]));
    table.emplace(e, c);
    size_t i = 0;
    while (i < c.size() && ++c[i] == p) c[i++] = 0;
    if (i == c.size()) break;
  }
  return table;
}

}  // namespace groups_detail

// Extract < , > and phi for a p-central group with elementary abelian
// Omega_1 and quotient.  When the group provides canonical basis lifts,
// those are used (the canonical section); otherwise minimal coset
// representatives.  `twist_seed` multiplies each lift by a random Omega_1
// element first; the forms must not change.
inline CentralExtensionForms extract_forms(const GroupView& G,
                                           uint64_t budget = kDefaultBudget,
                                           std::optional<uint32_t> twist_seed = std::nullopt) {
  const unsigned p = G.prime();
  auto all = G.elements(budget);
  Subgroup V = omega1(G, budget);

  // V must be elementary abelian and central
  for (const auto& v : V.elems)
    if (G.pth_power(v) != G.identity())
      throw ValidationError("extract_forms: Omega_1 is not elementary abelian");
  if (!is_central(G, V)) throw ValidationError("extract_forms: group is not p-central");

  size_t vdim = 0;
  for (uint64_t t = V.order(); t > 1; t /= p) {
    if (t % p) throw ComputationError("extract_forms: |Omega_1| not a p-power");
    ++vdim;
  }

  // cosets of V: canonical (minimal) representative for each element
  std::unordered_map<GroupElt, GroupElt, EltHash> rep;
  std::vector<GroupElt> reps;
  for (const auto& g : all) {
    if (rep.count(g)) continue;
    GroupElt best = g;
    std::vector<GroupElt> coset;
    for (const auto& v : V.elems) {
      GroupElt gv = G.multiply(g, v);
      coset.push_back(gv);
      if (gv < best) best = gv;
    }
    for (auto& gv : coset) rep.emplace(std::move(gv), best);
    reps.push_back(best);
  }
  const GroupElt idrep = rep.at(G.identity());

  // W = G/V must be elementary abelian for the forms to be W x W -> V
  for (const auto& r : reps)
    if (rep.at(G.pth_power(r)) != idrep)
      throw ValidationError("extract_forms: G/Omega_1 is not elementary abelian");

  // choose the W basis: canonical lifts when provided, greedy otherwise
  std::vector<GroupElt> lifts = G.canonical_basis_lifts();
  std::vector<std::string> labels = G.basis_labels();
  if (!lifts.empty()) {
    std::set<GroupElt> span{idrep};
    for (const auto& l : lifts) {
      std::set<GroupElt> next = span;
      for (const auto& s : span)
        for (unsigned e = 1; e < p; ++e) next.insert(rep.at(G.multiply(s, G.power(l, e))));
      span = std::move(next);
    }
    if (span.size() != reps.size())
      throw ComputationError("extract_forms: canonical lifts do not span the quotient");
  } else {
    std::set<GroupElt> span{idrep};
    for (const auto& r : reps) {
      if (span.count(r)) continue;
      std::set<GroupElt> next = span;
      for (const auto& s : span)
        for (unsigned e = 1; e < p; ++e) next.insert(rep.at(G.multiply(s, G.power(r, e))));
      span = std::move(next);
      lifts.push_back(r);
      if (span.size() == reps.size()) break;
    }
  }
  const size_t wdim = lifts.size();
  if (labels.size() != wdim) {
    labels.clear();
    for (size_t i = 1; i <= wdim; ++i) labels.push_back("e" + std::to_string(i));
  }
  if (twist_seed) {
    std::mt19937 rng(*twist_seed);
    std::vector<GroupElt> velems(V.elems.begin(), V.elems.end());
    for (auto& l : lifts)
      l = G.multiply(l, velems[rng() % velems.size()]);
  }

  // p-power images phi(w_i); they always land in V here
  std::vector<GroupElt> phi_img;
  for (const auto& l : lifts) {
    GroupElt f = G.pth_power(l);
    if (!V.contains(f)) throw ComputationError("extract_forms: p-th power escapes Omega_1");
    phi_img.push_back(f);
  }

  // V basis: prefer phi(basis) (the canonical choice when phi is iso)
  auto independent_spanning = [&](const std::vector<GroupElt>& cand) {
    if (cand.size() != vdim) return false;
    std::set<GroupElt> span{G.identity()};
    for (const auto& b : cand) {
      std::set<GroupElt> next = span;
      for (const auto& s : span)
        for (unsigned e = 1; e < p; ++e) next.insert(G.multiply(s, G.power(b, e)));
      span = std::move(next);
    }
    return span.size() == V.order();
  };
  std::vector<GroupElt> v_basis;
  if (wdim == vdim && independent_spanning(phi_img)) {
    v_basis = phi_img;
  } else {
    std::set<GroupElt> span{G.identity()};
    for (const auto& v : V.elems) {
      if (span.count(v)) continue;
      std::set<GroupElt> next = span;
      for (const auto& s : span)
        for (unsigned e = 1; e < p; ++e) next.insert(G.multiply(s, G.power(v, e)));
      span = std::move(next);
      v_basis.push_back(v);
      if (span.size() == V.order()) break;
    }
    if (v_basis.size() != vdim) throw ComputationError("extract_forms: V basis extraction failed");
  }

  auto vcoords = groups_detail::v_coordinate_table(G, v_basis, p);
  auto coords_of = [&](const GroupElt& v) {
    auto it = vcoords.find(v);
    if (it == vcoords.end())
      throw ValidationError("extract_forms: commutator escapes Omega_1 (not a central extension)");
    return it->second;
  };

  CentralExtensionForms F;
  F.p = p;
  F.wdim = wdim;
  F.vdim = vdim;
  F.labels = labels;
  F.w_basis_lifts = lifts;
  F.v_basis = v_basis;
  F.com.assign(wdim, std::vector<Vec>(wdim));
  for (size_t i = 0; i < wdim; ++i)
    for (size_t j = 0; j < wdim; ++j) F.com[i][j] = coords_of(G.commutator(lifts[i], lifts[j]));
  F.phi = ModMatrix(PrimePower(p, 1), vdim, wdim);
  for (size_t i = 0; i < wdim; ++i) {
    Vec c = coords_of(phi_img[i]);
    for (size_t r = 0; r < vdim; ++r) F.phi.set(r, i, c[r]);
  }
  F.phi_bijective = (wdim == vdim) && rank_fp(F.phi) == vdim;

  // consistency: alternating, lift-independent, bilinear / linear
  for (size_t i = 0; i < wdim; ++i) {
    if (!vec_is_zero(F.com[i][i]))
      throw ValidationError("extract_forms: commutator form is not alternating");
    for (size_t j = 0; j < wdim; ++j) {
      Vec neg(F.com[i][j].size());
      for (size_t t = 0; t < neg.size(); ++t) neg[t] = neg_mod(F.com[j][i][t], p);
      if (F.com[i][j] != neg)
        throw ValidationError("extract_forms: commutator form is not antisymmetric");
    }
  }
  {
    std::mt19937 rng(987654u + (twist_seed ? *twist_seed : 0));
    std::vector<GroupElt> velems(V.elems.begin(), V.elems.end());
    for (int trial = 0; trial < 24; ++trial) {
      size_t i = rng() % wdim, j = rng() % wdim;
      const GroupElt& v = velems[rng() % velems.size()];
      const GroupElt& w = velems[rng() % velems.size()];
      GroupElt li = G.multiply(lifts[i], v), lj = G.multiply(lifts[j], w);
      if (coords_of(G.commutator(li, lj)) != F.com[i][j])
        throw ValidationError("extract_forms: commutator form depends on the lift");
      if (coords_of(G.pth_power(li)) != F.phi.col(i))
        throw ValidationError("extract_forms: p-power map depends on the lift");
      // bilinearity in the first slot: lift of w_i w_j is lifts[i] lifts[j]
      size_t kk = rng() % wdim;
      Vec lhs = coords_of(G.commutator(G.multiply(lifts[i], lifts[j]), lifts[kk]));
      Vec rhs = vec_add(F.com[i][kk], F.com[j][kk], p);
      if (lhs != rhs) throw ValidationError("extract_forms: commutator form is not bilinear");
      Vec plhs = coords_of(G.pth_power(G.multiply(lifts[i], lifts[j])));
      Vec prhs = vec_add(F.phi.col(i), F.phi.col(j), p);
      if (plhs != prhs) throw ValidationError("extract_forms: p-power map is not linear");
    }
  }
  return F;
}

// Log(G): bracket [w_i, w_j] = (1/2) phi^{-1}( <w_i, w_j> ).
inline BracketAlgebra log_bracket(const GroupView& G, uint64_t budget = kDefaultBudget) {
  CentralExtensionForms F = extract_forms(G, budget);
  if (!F.phi_bijective)
    throw ValidationError("log_bracket: p-power map is not an isomorphism");
  const unsigned p = F.p;
  const size_t n = F.wdim;
  const uint32_t half = half_mod(p);
  std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      auto sol = solve_fp(F.phi, F.com[i][j]);
      if (!sol) throw ComputationError("log_bracket: phi preimage missing");
      std::vector<int64_t> c(n);
      for (size_t t = 0; t < n; ++t) c[t] = mul_mod(half, (*sol)[t], p);
      pairs.emplace_back(i, j, c);
    }
  return BracketAlgebra::from_lower_pairs(PrimePower(p, 1), n, F.labels, pairs);
}

// ---- uniform towers ----

struct TowerStageReport {
  std::string from, to;
  bool surjective = false;
  bool kernel_is_omega1 = false;
  bool phi_bijective = false;
  bool p_central = false;
};

struct TowerReport {
  std::vector<TowerStageReport> stages;
  bool bottom_elementary_abelian = false;
  bool uniform = false;
};

// groups = {G_N, ..., G_1} (top first), projections[i] : groups[i] -> groups[i+1].
inline TowerReport uniform_tower_check(
    const std::vector<const GroupView*>& groups,
    const std::vector<std::function<GroupElt(const GroupElt&)>>& projections,
    uint64_t budget = kDefaultBudget) {
  if (groups.empty() || projections.size() + 1 != groups.size())
    throw ValidationError("uniform_tower_check: need one projection per consecutive pair");
  TowerReport rep;
  bool all_ok = true;

  for (size_t i = 0; i + 1 < groups.size(); ++i) {
    const GroupView& Gi = *groups[i];
    const GroupView& Gq = *groups[i + 1];
    TowerStageReport st;
    st.from = Gi.describe();
    st.to = Gq.describe();
    st.p_central = is_central(Gi, omega1(Gi, budget));

    // image, first-found lifts, kernel
    std::unordered_map<GroupElt, GroupElt, EltHash> lift_of;
    Subgroup kernel;
    for (const auto& g : Gi.elements(budget)) {
      GroupElt img = projections[i](g);
      lift_of.emplace(img, g);
      if (img == Gq.identity()) kernel.elems.insert(g);
    }
    st.surjective = lift_of.size() == Gq.order();
    st.kernel_is_omega1 = (kernel == omega1(Gi, budget));

    // phi : Omega_1(G_{i+1}) -> Omega_1(G_i), x -> lift(x)^p
    if (st.surjective) {
      Subgroup o_top = omega1(Gi, budget);
      Subgroup o_bot = omega1(Gq, budget);
      std::set<GroupElt> image;
      bool well_defined = true;
      for (const auto& x : o_bot.elems) {
        auto it = lift_of.find(x);
        if (it == lift_of.end()) {
          well_defined = false;
          break;
        }
        GroupElt y = Gi.pth_power(it->second);
        if (!o_top.contains(y)) {
          well_defined = false;
          break;
        }
        image.insert(y);
      }
      st.phi_bijective = well_defined && image.size() == o_bot.order() &&
                         image.size() == o_top.order();
    }
    all_ok = all_ok && st.surjective && st.kernel_is_omega1 && st.phi_bijective && st.p_central;
    rep.stages.push_back(std::move(st));
  }

  const GroupView& last = *groups.back();
  rep.bottom_elementary_abelian = (omega1(last, budget).order() == last.order());
  rep.uniform = all_ok && rep.bottom_elementary_abelian;
  return rep;
}

}  // namespace plie
