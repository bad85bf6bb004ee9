#pragma once

// The truncated ring Lambda(x_1..x_n) (x) F_p[s_1..s_n] carrying the
// Bockstein derivation
//     beta(x_t) = - sum_{i<j} c_ij^t x_i x_j
//     beta(s_t) =   sum_{i,j} c_ij^t s_i x_j  +  eta_t
// for a bracket algebra with constants c_ij^t and an optional list of
// degree-3 exterior forms eta_t.  Provides the second Bockstein page B_2
// two independent ways (directly from the ring differential, and assembled
// from the Lie-algebra cohomologies H^{*-2k}(L; S^k)), the comodule map
// Delta, the four-factor E_2 desk check, and the regauging that moves the
// eta forms by a coboundary.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "plie/algebra.hpp"
#include "plie/cohomology.hpp"
#include "plie/graded_ring.hpp"
#include "plie/modp.hpp"

namespace plie {

struct B2Report {
  bool eta_zero = true;
  struct Row {
    unsigned d = 0;
    size_t b1 = 0;  // dim of the mod-p page in this degree
    size_t b2 = 0;
    std::vector<std::pair<unsigned, size_t>> by_weight;  // (k, dim), nonzero only
  };
  std::vector<Row> degrees;  // d = 0 .. D-1

  std::vector<size_t> b2_dims() const {
    std::vector<size_t> v;
    v.reserve(degrees.size());
    for (const auto& r : degrees) v.push_back(r.b2);
    return v;
  }
};

inline nlohmann::ordered_json b2_report_to_json(const B2Report& rep) {
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rep.degrees) {
    nlohmann::ordered_json r;
    r["d"] = row.d;
    r["b1"] = row.b1;
    r["b2"] = row.b2;
    auto bw = nlohmann::ordered_json::array();
    for (auto& [k, dim] : row.by_weight) {
      nlohmann::ordered_json e;
      e["k"] = k;
      e["dim"] = dim;
      bw.push_back(e);
    }
    r["by_weight"] = bw;
    arr.push_back(r);
  }
  j["degrees"] = arr;
  j["eta_zero"] = rep.eta_zero;
  return j;
}

class BocksteinRing {
 public:
  // eta: one degree-3 exterior form per basis element, or empty for zero.
  BocksteinRing(const BracketAlgebra& L, std::vector<ExteriorElement> eta = {},
                unsigned truncation = 12)
      : algebra_(L), eta_(std::move(eta)), trunc_(truncation) {
    if (L.mod().k != 1) throw ValidationError("BocksteinRing: algebra must be over F_p");
    if (trunc_ < 4) throw ValidationError("BocksteinRing: truncation must be >= 4");
    const size_t n = L.dim();
    if (eta_.empty()) eta_.assign(n, ExteriorElement(L.mod().p, n));
    if (eta_.size() != n) throw ValidationError("BocksteinRing: need one eta form per generator");
    for (const auto& e : eta_) {
      if (e.p() != L.mod().p || e.dim() != n)
        throw ValidationError("BocksteinRing: eta form over wrong algebra");
      if (!e.is_zero() && (!e.is_homogeneous() || e.degree() != 3))
        throw ValidationError("BocksteinRing: eta forms must be homogeneous of degree 3");
    }
    std::vector<std::string> odd_names = L.labels();
    std::vector<std::string> even_names;
    for (const auto& l : L.labels()) even_names.push_back("s_" + l);
    ring_ = std::make_unique<GradedRing>(L.mod().p, trunc_, odd_names, even_names);

    std::vector<GradedRing::Element> odd_imgs, even_imgs;
    for (size_t t = 0; t < n; ++t) odd_imgs.push_back(beta_of_x_image(t));
    for (size_t t = 0; t < n; ++t) even_imgs.push_back(beta_of_s_image(t));
    beta_.emplace(*ring_, std::move(odd_imgs), std::move(even_imgs));
  }

  const BracketAlgebra& algebra() const { return algebra_; }
  const GradedRing& ring() const { return *ring_; }
  const RingDerivation& beta() const { return *beta_; }
  unsigned truncation() const { return trunc_; }
  const std::vector<ExteriorElement>& eta() const { return eta_; }

  bool eta_zero() const {
    for (const auto& e : eta_)
      if (!e.is_zero()) return false;
    return true;
  }

  GradedRing::Element apply_beta(const GradedRing::Element& e) const {
    if (e.degree + 1 > trunc_)
      throw ValidationError("beta: element degree exceeds truncation - 1");
    return beta_->apply(e);
  }

  // Lift a pure exterior form into the ring.
  GradedRing::Element exterior_to_ring(const ExteriorElement& w, unsigned degree) const {
    GradedRing::Element out = ring_->zero(degree);
    for (auto& [mask, c] : w.terms()) {
      RingMonomial m;
      m.mask = mask;
      m.exp.assign(ring_->even_count(), 0);
      out.coeffs[ring_->index_of(degree, m)] = c;
    }
    return out;
  }

  // beta on all 2n generators vanishes twice, or a witness is returned.
  struct DefectWitness {
    std::string generator;
    std::string image;
  };
  std::optional<DefectWitness> beta_squared_defect() const {
    const size_t n = algebra_.dim();
    for (size_t t = 0; t < n; ++t) {
      auto sq = beta_->apply(beta_->apply(ring_->generator(true, t)));
      if (!ring_->is_zero(sq))
        return DefectWitness{algebra_.labels()[t], ring_->element_string(sq)};
    }
    for (size_t t = 0; t < n; ++t) {
      auto sq = beta_->apply(beta_->apply(ring_->generator(false, t)));
      if (!ring_->is_zero(sq))
        return DefectWitness{"s_" + algebra_.labels()[t], ring_->element_string(sq)};
    }
    return std::nullopt;
  }

  // Cohomology of (ring, beta) in degrees <= D-1; bigraded by polynomial
  // weight when the eta forms vanish.
  B2Report b2_direct() const {
    if (auto w = beta_squared_defect())
      throw ValidationError("b2_direct: beta^2 != 0 (witness on " + w->generator + ")");
    const unsigned maxd = trunc_ - 1;
    std::vector<size_t> ranks(maxd + 1);
    for (unsigned d = 0; d <= maxd; ++d) ranks[d] = rank_fp(beta_->matrix(d));

    B2Report rep;
    rep.eta_zero = eta_zero();
    for (unsigned d = 0; d <= maxd; ++d) {
      B2Report::Row row;
      row.d = d;
      row.b1 = ring_->dim(d);
      row.b2 = ring_->dim(d) - ranks[d] - (d ? ranks[d - 1] : 0);
      rep.degrees.push_back(row);
    }
    if (rep.eta_zero) {
      // beta preserves polynomial weight; split each degree accordingly.
      for (unsigned d = 0; d <= maxd; ++d) {
        size_t total = 0;
        for (unsigned w = 0; 2 * w <= d; ++w) {
          size_t dim_dw = weight_dim(d, w);
          if (!dim_dw) continue;
          size_t r1 = weight_rank(d, w);
          size_t r0 = d ? weight_rank(d - 1, w) : 0;
          size_t h = dim_dw - r1 - r0;
          if (h) rep.degrees[d].by_weight.emplace_back(w, h);
          total += h;
        }
        if (total != rep.degrees[d].b2)
          throw ComputationError("b2_direct: weight splitting disagrees with total");
      }
    }
    return rep;
  }

 private:
  GradedRing::Element beta_of_x_image(size_t t) const {
    const size_t n = algebra_.dim();
    GradedRing::Element img = ring_->zero(2);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        uint32_t c = algebra_.c(i, j, t);
        if (!c) continue;
        RingMonomial m;
        m.mask = (1u << i) | (1u << j);
        m.exp.assign(n, 0);
        size_t idx = ring_->index_of(2, m);
        img.coeffs[idx] = sub_mod(img.coeffs[idx], c, ring_->p());
      }
    return img;
  }

  GradedRing::Element beta_of_s_image(size_t t) const {
    const size_t n = algebra_.dim();
    GradedRing::Element img = exterior_to_ring(eta_[t], 3);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        uint32_t c = algebra_.c(i, j, t);
        if (!c || i == j) continue;
        RingMonomial m;
        m.mask = 1u << j;
        m.exp.assign(n, 0);
        m.exp[i] = 1;
        size_t idx = ring_->index_of(3, m);
        img.coeffs[idx] = add_mod(img.coeffs[idx], c, ring_->p());
      }
    return img;
  }

  size_t weight_dim(unsigned d, unsigned w) const {
    size_t cnt = 0;
    for (const auto& m : ring_->basis(d))
      if (m.weight() == w) ++cnt;
    return cnt;
  }

  // Rank of beta restricted to the weight-w part of degree d.
  size_t weight_rank(unsigned d, unsigned w) const {
    std::vector<size_t> cols, rows;
    const auto& bd = ring_->basis(d);
    for (size_t i = 0; i < bd.size(); ++i)
      if (bd[i].weight() == w) cols.push_back(i);
    const auto& bd1 = ring_->basis(d + 1);
    std::vector<size_t> row_pos(bd1.size(), SIZE_MAX);
    for (size_t i = 0; i < bd1.size(); ++i)
      if (bd1[i].weight() == w) {
        row_pos[i] = rows.size();
        rows.push_back(i);
      }
    ModMatrix sub(PrimePower(ring_->p(), 1), rows.size(), cols.size());
    for (size_t cj = 0; cj < cols.size(); ++cj) {
      auto img = beta_->apply_monomial(bd[cols[cj]]);
      for (size_t i = 0; i < img.coeffs.size(); ++i) {
        if (!img.coeffs[i]) continue;
        if (row_pos[i] == SIZE_MAX)
          throw ComputationError("b2_direct: beta does not preserve weight with eta = 0");
        sub.set(row_pos[i], cj, img.coeffs[i]);
      }
    }
    return rank_fp(sub);
  }

  BracketAlgebra algebra_;
  std::vector<ExteriorElement> eta_;
  unsigned trunc_;
  std::unique_ptr<GradedRing> ring_;
  std::optional<RingDerivation> beta_;
};

// B_2 assembled from Lie-algebra cohomology: degree d collects
// H^{d-2k}(L; S^k) over all weights k.
inline B2Report b2_via_lie(const BracketAlgebra& L, unsigned truncation = 12) {
  if (L.mod().k != 1) throw ValidationError("b2_via_lie: algebra must be over F_p");
  detail::require_lie_fp(L, "b2_via_lie");
  const size_t n = L.dim();
  const unsigned maxd = truncation - 1;
  B2Report rep;
  rep.eta_zero = true;
  rep.degrees.resize(maxd + 1);
  std::vector<std::vector<size_t>> hdims;  // per weight k
  for (unsigned k = 0; 2 * k <= maxd; ++k)
    hdims.push_back(cohomology(L, module_sym(L, k)).dims);
  for (unsigned d = 0; d <= maxd; ++d) {
    auto& row = rep.degrees[d];
    row.d = d;
    row.b1 = free_ring_dim(n, n, d);
    for (unsigned k = 0; 2 * k <= d; ++k) {
      unsigned l = d - 2 * k;
      if (l > n) continue;
      size_t h = hdims[k][l];
      if (h) row.by_weight.emplace_back(k, h);
      row.b2 += h;
    }
  }
  return rep;
}

// Regauging s_t -> s_t + mu_t for degree-2 exterior forms mu_t replaces the
// eta forms by eta_t - br*(mu_t) - sum_{i,j} c_ij^t mu_i ^ x_j and leaves
// every B_2 dimension unchanged.
inline BocksteinRing regauge(const BocksteinRing& bd, const std::vector<ExteriorElement>& mu) {
  const BracketAlgebra& L = bd.algebra();
  const size_t n = L.dim();
  const unsigned p = L.mod().p;
  if (mu.size() != n) throw ValidationError("regauge: need one mu form per generator");
  for (const auto& m : mu)
    if (!m.is_zero() && (!m.is_homogeneous() || m.degree() != 2))
      throw ValidationError("regauge: mu forms must be homogeneous of degree 2");
  std::vector<ExteriorElement> eta2;
  for (size_t t = 0; t < n; ++t) {
    ExteriorElement e = bd.eta()[t].sub(cobracket(L, mu[t]));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        uint32_t c = L.c(i, j, t);
        if (!c) continue;
        ExteriorElement xj = ExteriorElement::basis_term(p, n, 1u << j);
        e = e.sub(mu[i].wedge(xj).scale(c));
      }
    eta2.push_back(std::move(e));
  }
  return BocksteinRing(L, std::move(eta2), bd.truncation());
}

// ---- comodule structure ----
//
// Delta : H*(G) -> H*(Omega_1) (x) H*(G) on generators:
//   Delta(x_k) = 1 (x) x_k
//   Delta(s_k) = sbar_k (x) 1 + 1 (x) s_k + sum_{i,j} c_ij^k t_i (x) x_j
// realized inside one free graded-commutative ring on t, x (odd) and
// sbar, s (even).

class ComoduleStructure {
 public:
  ComoduleStructure(const BracketAlgebra& L, unsigned truncation = 8)
      : algebra_(L), trunc_(truncation) {
    detail::require_lie_fp(L, "ComoduleStructure");
    const size_t n = L.dim();
    std::vector<std::string> g_odd = L.labels(), g_even;
    for (const auto& l : L.labels()) g_even.push_back("s_" + l);
    std::vector<std::string> t_odd, t_even;
    for (const auto& l : L.labels()) t_odd.push_back("t_" + l);
    for (const auto& l : L.labels()) t_odd.push_back(l);
    for (const auto& l : L.labels()) t_even.push_back("sbar_" + l);
    for (const auto& l : L.labels()) t_even.push_back("s_" + l);
    source_ = std::make_unique<GradedRing>(L.mod().p, trunc_, g_odd, g_even);
    target_ = std::make_unique<GradedRing>(L.mod().p, trunc_, t_odd, t_even);

    std::vector<GradedRing::Element> oi, ei;
    for (size_t k = 0; k < n; ++k) oi.push_back(target_->generator(true, n + k));
    for (size_t k = 0; k < n; ++k) {
      auto img = target_->add(target_->generator(false, k), target_->generator(false, n + k));
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
          uint32_t c = L.c(i, j, k);
          if (!c) continue;
          auto term = target_->mul(target_->generator(true, i), target_->generator(true, n + j));
          img = target_->add(img, target_->scale(c, term));
        }
      ei.push_back(img);
    }
    delta_.emplace(*source_, *target_, std::move(oi), std::move(ei));

    // Bockstein on both rings (eta = 0 on the G side; Omega_1 side is
    // elementary abelian: beta(t_i) = sbar_i, beta(sbar_i) = 0).
    std::vector<GradedRing::Element> s_oi, s_ei, t_oi, t_ei;
    for (size_t t = 0; t < n; ++t) s_oi.push_back(beta_x_in(*source_, 0, t));
    for (size_t t = 0; t < n; ++t) s_ei.push_back(beta_s_in(*source_, 0, 0, t));
    for (size_t t = 0; t < n; ++t) t_oi.push_back(target_->generator(false, t));
    for (size_t t = 0; t < n; ++t) t_oi.push_back(beta_x_in(*target_, n, t));
    for (size_t t = 0; t < n; ++t) t_ei.push_back(target_->zero(3));
    for (size_t t = 0; t < n; ++t) t_ei.push_back(beta_s_in(*target_, n, n, t));
    beta_source_.emplace(*source_, std::move(s_oi), std::move(s_ei));
    beta_target_.emplace(*target_, std::move(t_oi), std::move(t_ei));
  }

  const GradedRing& source() const { return *source_; }
  const GradedRing& target() const { return *target_; }

  GradedRing::Element delta_of_x(size_t k) const {
    return delta_->apply(source_->generator(true, k));
  }
  GradedRing::Element delta_of_s(size_t k) const {
    return delta_->apply(source_->generator(false, k));
  }
  GradedRing::Element delta(const GradedRing::Element& e) const { return delta_->apply(e); }

  // Delta o beta = (beta (x) 1 + 1 (x) beta) o Delta on all generators.
  void verify_beta_compatibility() const {
    const size_t n = algebra_.dim();
    for (size_t k = 0; k < n; ++k) {
      auto lhs_x = delta_->apply(beta_source_->apply(source_->generator(true, k)));
      auto rhs_x = beta_target_->apply(delta_of_x(k));
      if (lhs_x.coeffs != rhs_x.coeffs)
        throw ComputationError("comodule: Delta and beta disagree on x_" + std::to_string(k + 1));
      auto lhs_s = delta_->apply(beta_source_->apply(source_->generator(false, k)));
      auto rhs_s = beta_target_->apply(delta_of_s(k));
      if (lhs_s.coeffs != rhs_s.coeffs)
        throw ComputationError("comodule: Delta and beta disagree on s_" + std::to_string(k + 1));
    }
  }

 private:
  // beta(x_t) in a ring whose x-block starts at odd offset `off`.
  GradedRing::Element beta_x_in(const GradedRing& R, size_t off, size_t t) const {
    const size_t n = algebra_.dim();
    GradedRing::Element img = R.zero(2);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        uint32_t c = algebra_.c(i, j, t);
        if (!c) continue;
        auto term = R.mul(R.generator(true, off + i), R.generator(true, off + j));
        img = R.add(img, R.scale(neg_mod(c, R.p()), term));
      }
    return img;
  }
  // beta(s_t) with the s-block at even offset `soff` and x-block at odd `xoff`.
  GradedRing::Element beta_s_in(const GradedRing& R, size_t soff, size_t xoff, size_t t) const {
    const size_t n = algebra_.dim();
    GradedRing::Element img = R.zero(3);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        uint32_t c = algebra_.c(i, j, t);
        if (!c) continue;
        auto term = R.mul(R.generator(false, soff + i), R.generator(true, xoff + j));
        img = R.add(img, R.scale(c, term));
      }
    return img;
  }

  BracketAlgebra algebra_;
  unsigned trunc_;
  std::unique_ptr<GradedRing> source_, target_;
  std::optional<RingHom> delta_;
  std::optional<RingDerivation> beta_source_, beta_target_;
};

// ---- LHS E_3 desk check ----
//
// The four-factor E_2 ring Lambda(t) (x) F_p[sig] (x) Lambda(x) (x) F_p[y]
// with the extension-element differential d2(t_i) = y_i + br*(x_i) and
// d2 = 0 on the other generators.  Its cohomology must have the graded
// dimensions of Lambda(x) (x) F_p[sig] for every bracket algebra.
inline std::vector<size_t> lhs_e3_dims(const BracketAlgebra& L, unsigned truncation) {
  if (L.mod().k != 1) throw ValidationError("lhs_e3_dims: algebra must be over F_p");
  if (truncation < 2) throw ValidationError("lhs_e3_dims: truncation must be >= 2");
  const size_t n = L.dim();
  std::vector<std::string> odd, even;
  for (const auto& l : L.labels()) odd.push_back("t_" + l);
  for (const auto& l : L.labels()) odd.push_back(l);
  for (const auto& l : L.labels()) even.push_back("sig_" + l);
  for (const auto& l : L.labels()) even.push_back("y_" + l);
  GradedRing R(L.mod().p, truncation, odd, even);

  std::vector<GradedRing::Element> oi, ei;
  for (size_t t = 0; t < n; ++t) {
    // d2(t_i) = y_i + sum_{a<b} c_ab^i x_a x_b
    auto img = R.generator(false, n + t);
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a + 1; b < n; ++b) {
        uint32_t c = L.c(a, b, t);
        if (!c) continue;
        auto term = R.mul(R.generator(true, n + a), R.generator(true, n + b));
        img = R.add(img, R.scale(c, term));
      }
    oi.push_back(img);
  }
  for (size_t t = 0; t < n; ++t) oi.push_back(GradedRing::Element{});  // d2(x_i) = 0
  for (size_t t = 0; t < 2 * n; ++t) ei.push_back(GradedRing::Element{});
  RingDerivation d2(R, oi, ei);
  return derivation_cohomology_dims(d2, truncation - 1);
}

}  // namespace plie
