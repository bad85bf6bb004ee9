#pragma once

// Chevalley-Eilenberg (Koszul) cohomology of an F_p Lie algebra with
// finite-dimensional coefficients.  Modules are given by explicit action
// matrices; the library knows the trivial module, the adjoint module and
// the modules S^k of symmetric k-forms.
//
// A symmetric k-form is stored by its values on sorted basis tuples
// i_1 <= ... <= i_k (no division by multiplicities anywhere), and the
// action is evaluated straight off
//   (u.f)(u_1,...,u_k) = sum_i f(u_1,...,[u_i,u],...,u_k).
//
// The differential follows the displayed sum
//   (dw)(u_0..u_l) = sum_{i<j} (-1)^{i+j} w([u_i,u_j],...)
//                  + sum_i (-1)^i u_i . w(...)
// evaluated on basis tuples.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plie/algebra.hpp"
#include "plie/modp.hpp"

namespace plie {

// Sorted k-multisets of {0..n-1}, lexicographic.  Basis of S^k value tables.
inline std::vector<std::vector<unsigned>> sorted_tuples(size_t n, unsigned k) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur;
  auto rec = [&](auto&& self, unsigned start, unsigned left) -> void {
    if (!left) {
      out.push_back(cur);
      return;
    }
    for (unsigned i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i, left - 1);
      cur.pop_back();
    }
  };
  rec(rec, 0, k);
  return out;
}

struct LieModule {
  BracketAlgebra algebra;        // over F_p, Jacobi = 0
  size_t dim = 0;                // module dimension m
  std::vector<ModMatrix> rho;    // action of each basis element, m x m
  std::string tag;               // "trivial" | "ad" | "sym:k" | "custom"

  // rho([e_i,e_j]) = rho(e_i) rho(e_j) - rho(e_j) rho(e_i), all pairs.
  bool satisfies_module_axiom() const {
    const size_t n = algebra.dim();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        ModMatrix lhs(rho[i].mod(), dim, dim);
        for (size_t t = 0; t < n; ++t)
          if (algebra.c(i, j, t)) lhs = lhs.add(rho[t].scale(algebra.c(i, j, t)));
        ModMatrix rhs = rho[i].mul(rho[j]).sub(rho[j].mul(rho[i]));
        if (!(lhs == rhs)) return false;
      }
    return true;
  }
};

namespace detail {

inline void require_lie_fp(const BracketAlgebra& L, const char* who) {
  if (L.mod().k != 1) throw ValidationError(std::string(who) + ": requires k = 1");
  if (!jacobi_form(L).is_zero())
    throw ValidationError(std::string(who) + ": requires a Lie algebra (Jacobi = 0)");
}

inline LieModule finish_module(LieModule m, const char* who) {
  if (!m.satisfies_module_axiom())
    throw ComputationError(std::string(who) + ": module axiom failed");
  return m;
}

}  // namespace detail

inline LieModule module_trivial(const BracketAlgebra& L) {
  detail::require_lie_fp(L, "module_trivial");
  LieModule m{L, 1, std::vector<ModMatrix>(L.dim(), ModMatrix(L.mod(), 1, 1)), "trivial"};
  return detail::finish_module(std::move(m), "module_trivial");
}

inline LieModule module_ad(const BracketAlgebra& L) {
  detail::require_lie_fp(L, "module_ad");
  const size_t n = L.dim();
  std::vector<ModMatrix> rho;
  rho.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    ModMatrix a(L.mod(), n, n);
    for (size_t j = 0; j < n; ++j)
      for (size_t t = 0; t < n; ++t)
        if (L.c(i, j, t)) a.set(t, j, L.c(i, j, t));  // ad(e_i) e_j = [e_i, e_j]
    rho.push_back(std::move(a));
  }
  return detail::finish_module({L, n, std::move(rho), "ad"}, "module_ad");
}

// Symmetric k-forms with the displayed action; k = 0 is the trivial module.
inline LieModule module_sym(const BracketAlgebra& L, unsigned k) {
  detail::require_lie_fp(L, "module_sym");
  const size_t n = L.dim();
  auto tuples = sorted_tuples(n, k);
  std::map<std::vector<unsigned>, size_t> index;
  for (size_t i = 0; i < tuples.size(); ++i) index[tuples[i]] = i;
  const size_t m = tuples.size();
  std::vector<ModMatrix> rho;
  rho.reserve(n);
  for (size_t j = 0; j < n; ++j) {
    ModMatrix a(L.mod(), m, m);
    for (size_t row = 0; row < m; ++row) {
      const auto& tau = tuples[row];
      // (e_j . f)(tau) = sum over slots s: f(tau with tau_s -> [tau_s, e_j])
      for (size_t s = 0; s < tau.size(); ++s)
        for (size_t t = 0; t < n; ++t) {
          uint32_t c = L.c(tau[s], j, t);
          if (!c) continue;
          std::vector<unsigned> sigma = tau;
          sigma[s] = static_cast<unsigned>(t);
          std::sort(sigma.begin(), sigma.end());
          a.add_at(row, index.at(sigma), c);
        }
    }
    rho.push_back(std::move(a));
  }
  return detail::finish_module({L, m, std::move(rho), "sym:" + std::to_string(k)}, "module_sym");
}

// Matrix of the Koszul differential C^l -> C^{l+1} for an action given by
// matrices `rho`; no Lie/module checks (callers that want them use
// build_complex).  Columns indexed by (l-subset, module coordinate).
inline ModMatrix ce_differential(const BracketAlgebra& L, const std::vector<ModMatrix>& rho,
                                 size_t mdim, unsigned l) {
  const size_t n = L.dim();
  auto dom = exterior_basis(n, l);
  auto cod = exterior_basis(n, l + 1);
  std::map<uint32_t, size_t> dom_index;
  for (size_t i = 0; i < dom.size(); ++i) dom_index[dom[i]] = i;
  ModMatrix d(L.mod(), cod.size() * mdim, dom.size() * mdim);

  for (size_t J = 0; J < cod.size(); ++J) {
    auto bits = mask_bits(cod[J]);
    const size_t rows0 = J * mdim;
    // bracket part: sum_{r<s} (-1)^{r+s} w([u_r,u_s], rest)
    for (size_t r = 0; r < bits.size(); ++r)
      for (size_t s = r + 1; s < bits.size(); ++s) {
        int base_sign = ((r + s) % 2 == 0) ? 1 : -1;
        std::vector<unsigned> rest;
        for (size_t q = 0; q < bits.size(); ++q)
          if (q != r && q != s) rest.push_back(bits[q]);
        for (size_t t = 0; t < n; ++t) {
          uint32_t c = L.c(bits[r], bits[s], t);
          if (!c) continue;
          std::vector<unsigned> tuple;
          tuple.push_back(static_cast<unsigned>(t));
          tuple.insert(tuple.end(), rest.begin(), rest.end());
          // w = x_I (x) v evaluated on (e_t, rest)
          uint32_t tgt_mask = 0;
          bool dup = false;
          for (unsigned b : tuple) {
            if (tgt_mask & (1u << b)) dup = true;
            tgt_mask |= 1u << b;
          }
          if (dup) continue;
          auto it = dom_index.find(tgt_mask);
          if (it == dom_index.end()) continue;
          std::vector<unsigned> sorted_ref = mask_bits(tgt_mask);
          int ev = eval_basis_form(sorted_ref, tuple);
          if (!ev) continue;
          for (size_t v = 0; v < mdim; ++v)
            d.add_at(rows0 + v, it->second * mdim + v,
                     base_sign * ev * static_cast<int64_t>(c));
        }
      }
    // action part: sum_r (-1)^r  e_{a_r} . w(rest)
    for (size_t r = 0; r < bits.size(); ++r) {
      int sign = (r % 2 == 0) ? 1 : -1;
      std::vector<unsigned> rest;
      for (size_t q = 0; q < bits.size(); ++q)
        if (q != r) rest.push_back(bits[q]);
      uint32_t rest_mask = 0;
      for (unsigned b : rest) rest_mask |= 1u << b;
      auto it = dom_index.find(rest_mask);
      if (it == dom_index.end()) continue;
      const ModMatrix& act = rho[bits[r]];
      for (size_t v = 0; v < mdim; ++v)
        for (size_t w = 0; w < mdim; ++w)
          if (act.at(w, v))
            d.add_at(rows0 + w, it->second * mdim + v, sign * static_cast<int64_t>(act.at(w, v)));
    }
  }
  return d;
}

struct CochainComplex {
  BracketAlgebra algebra;
  LieModule module;
  std::vector<ModMatrix> d;  // d[l] : C^l -> C^{l+1}, l = 0..n

  size_t dim(unsigned l) const {
    return l > algebra.dim() ? 0 : binom(algebra.dim(), l) * module.dim;
  }
};

inline CochainComplex build_complex(const BracketAlgebra& L, const LieModule& M) {
  detail::require_lie_fp(L, "build_complex");
  if (!(M.algebra == L)) throw ValidationError("build_complex: module is over a different algebra");
  CochainComplex cx{L, M, {}};
  const size_t n = L.dim();
  for (unsigned l = 0; l <= n; ++l) cx.d.push_back(ce_differential(L, M.rho, M.dim, l));
  for (unsigned l = 0; l + 1 <= n; ++l)
    if (!cx.d[l + 1].mul(cx.d[l]).is_zero())
      throw ComputationError("build_complex: d o d != 0 at degree " + std::to_string(l));
  return cx;
}

struct CohomologyReport {
  std::string module_tag;
  std::vector<size_t> dims;                  // H^0 .. H^n
  std::vector<std::vector<Vec>> representatives;  // per degree, optional
};

inline CohomologyReport cohomology(const BracketAlgebra& L, const LieModule& M,
                                   bool want_representatives = false) {
  CochainComplex cx = build_complex(L, M);
  const size_t n = L.dim();
  CohomologyReport rep;
  rep.module_tag = M.tag;
  std::vector<size_t> rank(n + 1, 0);
  for (unsigned l = 0; l <= n; ++l) rank[l] = rank_fp(cx.d[l]);
  rep.dims.resize(n + 1);
  for (unsigned l = 0; l <= n; ++l) {
    size_t prev = l == 0 ? 0 : rank[l - 1];
    rep.dims[l] = cx.dim(l) - rank[l] - prev;
  }
  if (want_representatives) {
    rep.representatives.resize(n + 1);
    for (unsigned l = 0; l <= n; ++l) {
      if (!rep.dims[l]) continue;
      // rows = image of d^{l-1}; grow by kernel vectors that extend the span
      std::vector<Vec> rows;
      if (l > 0)
        for (size_t j = 0; j < cx.d[l - 1].cols(); ++j) rows.push_back(cx.d[l - 1].col(j));
      auto base = Subspace::from_spanning(L.mod(), cx.dim(l), rows);
      size_t have = base.dim();
      std::vector<Vec> span_rows(base.basis);
      for (const Vec& kv : kernel_fp(cx.d[l]).basis) {
        std::vector<Vec> trial = span_rows;
        trial.push_back(kv);
        auto s = Subspace::from_spanning(L.mod(), cx.dim(l), trial);
        if (s.dim() > have) {
          rep.representatives[l].push_back(kv);
          span_rows = s.basis;
          have = s.dim();
        }
        if (rep.representatives[l].size() == rep.dims[l]) break;
      }
    }
  }
  return rep;
}

// Solve d mu = cocycle one degree down; rejects non-cocycles.
inline std::optional<Vec> is_coboundary(const CochainComplex& cx, unsigned l, const Vec& cocycle) {
  if (l < 1 || l > cx.algebra.dim()) throw ValidationError("is_coboundary: degree out of range");
  if (cocycle.size() != cx.dim(l)) throw ValidationError("is_coboundary: cochain size mismatch");
  if (!vec_is_zero(cx.d[l].apply(cocycle)))
    throw ValidationError("is_coboundary: input is not a cocycle");
  return solve_fp(cx.d[l - 1], cocycle);
}

inline std::optional<Vec> is_coboundary(const BracketAlgebra& L, const LieModule& M, unsigned l,
                                        const Vec& cocycle) {
  return is_coboundary(build_complex(L, M), l, cocycle);
}

}  // namespace plie
