#pragma once

// The lifting obstruction: given a Lie algebra L over Z/p^{k-1}, decide
// whether it lifts to a Lie algebra over Z/p^k.
//
// Procedure: lift the structure constants canonically (same residue
// representatives on i<j, extended antisymmetrically), measure the Jacobi
// defect J(lift) = p^{k-1} eta, read eta as an ad-valued 3-form over F_p
// on the mod-p reduction, and test whether it is a coboundary d mu.  The
// corrected constants lift + p^{k-1} mu must then satisfy Jacobi mod p^k;
// that round trip is re-verified on every run.  A brute-force search over
// all perturbations serves as the independent oracle at desk scale.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plie/algebra.hpp"
#include "plie/cohomology.hpp"
#include "plie/modp.hpp"

namespace plie {

struct LiftProblem {
  BracketAlgebra algebra;  // over Z/p^{k-1}, Jacobi = 0
  unsigned target_k = 2;   // must be algebra.mod().k + 1

  LiftProblem(BracketAlgebra L, unsigned k) : algebra(std::move(L)), target_k(k) {
    if (target_k != algebra.mod().k + 1)
      throw ValidationError("LiftProblem: target exponent must be one above the algebra's");
    if (!jacobi_form(algebra).is_zero())
      throw ValidationError("LiftProblem: algebra must satisfy Jacobi mod p^{k-1}");
  }
};

struct LiftReport {
  unsigned p = 3;
  unsigned k_from = 1, k_to = 2;
  bool obstruction_zero = false;
  std::vector<ExteriorElement> eta;              // eta_t in Lambda^3, over F_p
  std::optional<std::vector<ExteriorElement>> mu;  // mu_t in Lambda^2 with d mu = eta
  std::optional<BracketAlgebra> corrected;       // over Z/p^k, reduces to the input
  std::string tower_verdict;
};

namespace lift_detail {

// Canonical lift of the i<j constants to Z/p^k (same representatives).
inline BracketAlgebra canonical_lift(const BracketAlgebra& L) {
  PrimePower up(L.mod().p, L.mod().k + 1);
  std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
  for (size_t i = 0; i < L.dim(); ++i)
    for (size_t j = i + 1; j < L.dim(); ++j) {
      Vec c = L.bracket_basis(i, j);
      pairs.emplace_back(i, j, std::vector<int64_t>(c.begin(), c.end()));
    }
  return BracketAlgebra::from_lower_pairs(up, L.dim(), L.labels(), pairs);
}

inline std::vector<ModMatrix> ad_matrices(const BracketAlgebra& L) {
  const size_t n = L.dim();
  std::vector<ModMatrix> rho;
  for (size_t i = 0; i < n; ++i) {
    ModMatrix a(L.mod(), n, n);
    for (size_t j = 0; j < n; ++j)
      for (size_t t = 0; t < n; ++t)
        if (L.c(i, j, t)) a.set(t, j, L.c(i, j, t));
    rho.push_back(std::move(a));
  }
  return rho;
}

// Coordinates of an ad-valued l-form in the (sorted subset) x (target)
// layout used by ce_differential.
inline Vec forms_to_coords(const std::vector<ExteriorElement>& forms, size_t n, unsigned l) {
  auto basis = exterior_basis(n, l);
  Vec coords(basis.size() * n, 0);
  for (size_t t = 0; t < n; ++t)
    for (auto& [mask, c] : forms[t].terms()) {
      size_t pos = std::lower_bound(basis.begin(), basis.end(), mask) - basis.begin();
      coords[pos * n + t] = c;
    }
  return coords;
}

inline std::vector<ExteriorElement> coords_to_forms(const Vec& coords, size_t n, unsigned l,
                                                    unsigned p) {
  auto basis = exterior_basis(n, l);
  std::vector<ExteriorElement> forms(n, ExteriorElement(p, n));
  for (size_t pos = 0; pos < basis.size(); ++pos)
    for (size_t t = 0; t < n; ++t)
      if (coords[pos * n + t]) forms[t].add_term(basis[pos], coords[pos * n + t]);
  return forms;
}

}  // namespace lift_detail

// The eta forms of the canonical lift shifted by p^{k-1} * delta, where
// delta is an ad-valued 2-form over F_p (empty = canonical lift itself).
inline std::vector<ExteriorElement> lift_eta_forms(
    const LiftProblem& problem, const std::vector<ExteriorElement>& delta = {}) {
  const BracketAlgebra& L = problem.algebra;
  const size_t n = L.dim();
  const unsigned p = L.mod().p;
  const uint32_t small = L.mod().modulus();          // p^{k-1}
  BracketAlgebra hat = lift_detail::canonical_lift(L);
  if (!delta.empty()) {
    PrimePower up = hat.mod();
    std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        Vec c = hat.bracket_basis(i, j);
        std::vector<int64_t> cc(c.begin(), c.end());
        for (size_t t = 0; t < n; ++t)
          cc[t] += static_cast<int64_t>(small) * delta[t].coeff((1u << i) | (1u << j));
        pairs.emplace_back(i, j, cc);
      }
    hat = BracketAlgebra::from_lower_pairs(up, n, L.labels(), pairs);
  }
  JacobiTensor J = jacobi_form(hat);
  std::vector<ExteriorElement> eta(n, ExteriorElement(p, n));
  for (auto& [ijk, value] : J.values)
    for (size_t t = 0; t < n; ++t) {
      if (value[t] % small)
        throw ComputationError("lift_eta_forms: Jacobi defect not divisible by p^{k-1}");
      uint32_t digit = (value[t] / small) % p;
      if (digit) eta[t].add_term((1u << ijk[0]) | (1u << ijk[1]) | (1u << ijk[2]), digit);
    }
  return eta;
}

inline LiftReport obstruction(const LiftProblem& problem) {
  const BracketAlgebra& L = problem.algebra;
  const size_t n = L.dim();
  const unsigned p = L.mod().p;
  const uint32_t small = L.mod().modulus();
  BracketAlgebra Lbar = reduce(L, 1);

  LiftReport rep;
  rep.p = p;
  rep.k_from = L.mod().k;
  rep.k_to = problem.target_k;
  rep.eta = lift_eta_forms(problem);

  // eta must be a cocycle in C^3(Lbar; ad)
  auto rho = lift_detail::ad_matrices(Lbar);
  Vec eta_coords = lift_detail::forms_to_coords(rep.eta, n, 3);
  auto d3 = ce_differential(Lbar, rho, n, 3);
  if (!vec_is_zero(d3.apply(eta_coords)))
    throw ComputationError("obstruction: eta is not a cocycle (convention bug)");

  auto d2 = ce_differential(Lbar, rho, n, 2);
  auto mu = solve_fp(d2, eta_coords);
  rep.obstruction_zero = mu.has_value();
  if (!mu) {
    rep.tower_verdict = "no lift to Z/p^" + std::to_string(problem.target_k) +
                        ": [eta] != 0 in H^3(L;ad); the uniform tower stops here";
    return rep;
  }
  rep.mu = lift_detail::coords_to_forms(*mu, n, 2, p);

  // corrected constants: hat + p^{k-1} mu, then re-verify Jacobi mod p^k
  BracketAlgebra hat = lift_detail::canonical_lift(L);
  std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      Vec c = hat.bracket_basis(i, j);
      std::vector<int64_t> cc(c.begin(), c.end());
      for (size_t t = 0; t < n; ++t)
        cc[t] += static_cast<int64_t>(small) * (*rep.mu)[t].coeff((1u << i) | (1u << j));
      pairs.emplace_back(i, j, cc);
    }
  BracketAlgebra corrected = BracketAlgebra::from_lower_pairs(hat.mod(), n, L.labels(), pairs);
  if (!jacobi_form(corrected).is_zero())
    throw ComputationError("obstruction: corrected constants fail Jacobi (round trip)");
  if (!(reduce(corrected, L.mod().k) == L))
    throw ComputationError("obstruction: corrected constants do not reduce to the input");
  rep.corrected = std::move(corrected);
  rep.tower_verdict = "lifts to Z/p^" + std::to_string(problem.target_k) +
                      ": [eta] = 0; the uniform tower extends two more stages";
  return rep;
}

// Independent oracle: search every perturbation hat + p^{k-1} delta.
inline bool brute_force_lift_oracle(const LiftProblem& problem,
                                    uint64_t budget = 2'000'000) {
  const BracketAlgebra& L = problem.algebra;
  const size_t n = L.dim();
  const unsigned p = L.mod().p;
  const uint32_t small = L.mod().modulus();
  const uint32_t big = small * p;

  const size_t slots = n * (n - 1) / 2 * n;  // (i<j) pairs, n targets each
  uint64_t space = 1;
  for (size_t i = 0; i < slots; ++i) {
    space *= p;
    if (space > budget)
      throw BudgetError("brute_force_lift_oracle: search space exceeds budget");
  }

  // base tensor over Z/p^k, full ordered storage
  BracketAlgebra hat = lift_detail::canonical_lift(L);
  std::vector<uint32_t> base(n * n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t t = 0; t < n; ++t) base[(i * n + j) * n + t] = hat.c(i, j, t);

  std::vector<std::pair<size_t, size_t>> ij;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) ij.emplace_back(i, j);

  std::vector<uint32_t> digits(slots, 0);
  std::vector<uint32_t> c(base.size());
  while (true) {
    c = base;
    for (size_t s = 0; s < slots; ++s) {
      if (!digits[s]) continue;
      auto [i, j] = ij[s / n];
      size_t t = s % n;
      uint32_t add = (small * digits[s]) % big;
      c[(i * n + j) * n + t] = add_mod(c[(i * n + j) * n + t], add, big);
      c[(j * n + i) * n + t] = sub_mod(c[(j * n + i) * n + t], add, big);
    }
    // Jacobi on all i<j<k triples
    bool lie = true;
    for (size_t i = 0; i < n && lie; ++i)
      for (size_t j = i + 1; j < n && lie; ++j)
        for (size_t k = j + 1; k < n && lie; ++k)
          for (size_t s = 0; s < n && lie; ++s) {
            uint64_t acc = 0;
            for (size_t t = 0; t < n; ++t) {
              acc += static_cast<uint64_t>(c[(i * n + j) * n + t]) * c[(t * n + k) * n + s];
              acc += static_cast<uint64_t>(c[(j * n + k) * n + t]) * c[(t * n + i) * n + s];
              acc += static_cast<uint64_t>(c[(k * n + i) * n + t]) * c[(t * n + j) * n + s];
            }
            if (acc % big) lie = false;
          }
    if (lie) return true;
    size_t pos = 0;
    while (pos < slots && ++digits[pos] == p) digits[pos++] = 0;
    if (pos == slots) break;
  }
  return false;
}

struct TowerVerdict {
  bool extends_to_length_3 = false;
  std::optional<bool> extends_to_length_4;
  std::string text;
};

// Staged verdict for a bracket algebra L2 = Log(G_2) over F_p.
inline TowerVerdict tower_extension_verdict(const BracketAlgebra& L2) {
  if (L2.mod().k != 1) throw ValidationError("tower_extension_verdict: algebra must be over F_p");
  TowerVerdict v;
  v.extends_to_length_3 = jacobi_form(L2).is_zero();
  if (!v.extends_to_length_3) {
    v.text = "not a Lie algebra: the uniform tower stops at length 2";
    return v;
  }
  LiftProblem prob(L2, 2);
  LiftReport rep = obstruction(prob);
  v.extends_to_length_4 = rep.obstruction_zero;
  v.text = rep.obstruction_zero
               ? "Lie with [eta] = 0: extends to a uniform tower of length 4"
               : "Lie but [eta] != 0: extends to length 3 and no further";
  return v;
}

// ---- JSON ----

inline nlohmann::ordered_json exterior_forms_to_json(const std::vector<ExteriorElement>& forms) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : forms) {
    auto terms = nlohmann::ordered_json::array();
    for (auto& [mask, c] : f.terms()) {
      auto bits = mask_bits(mask);
      nlohmann::ordered_json t;
      const char* keys[] = {"i", "j", "k", "l"};
      for (size_t b = 0; b < bits.size(); ++b) t[keys[b]] = bits[b] + 1;
      t["c"] = c;
      terms.push_back(t);
    }
    arr.push_back(terms);
  }
  return arr;
}

inline nlohmann::ordered_json lift_report_to_json(const LiftReport& rep) {
  nlohmann::ordered_json j;
  j["p"] = rep.p;
  j["k_from"] = rep.k_from;
  j["k_to"] = rep.k_to;
  j["obstruction_zero"] = rep.obstruction_zero;
  j["eta"] = exterior_forms_to_json(rep.eta);
  if (rep.mu) j["mu"] = exterior_forms_to_json(*rep.mu);
  if (rep.corrected) j["corrected"] = algebra_to_json(*rep.corrected);
  j["tower_verdict"] = rep.tower_verdict;
  return j;
}

}  // namespace plie
