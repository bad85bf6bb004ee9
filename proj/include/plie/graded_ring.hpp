#pragma once

// Truncated free graded-commutative ring over F_p on degree-1 (exterior)
// and degree-2 (polynomial) generators, with monomial bases per total
// degree, derivations given on generators, and ring maps given on
// generators.  The Bockstein ring Lambda(x_1..x_n) (x) F_p[s_1..s_n], the
// four-factor E_2 ring of the LHS desk check and the comodule tensor ring
// are all instances.
//
// Monomial order within a degree: exterior mask as little-endian bitset
// ascending, then exponent vector lexicographic ascending.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "plie/algebra.hpp"
#include "plie/modp.hpp"

namespace plie {

struct RingMonomial {
  uint32_t mask = 0;             // subset of odd generators
  std::vector<uint8_t> exp;      // exponents of even generators

  bool operator==(const RingMonomial&) const = default;
  bool operator<(const RingMonomial& o) const {
    if (mask != o.mask) return mask < o.mask;
    return exp < o.exp;
  }
  unsigned weight() const { return std::accumulate(exp.begin(), exp.end(), 0u); }
};

// Closed-form monomial count in degree d: sum_j C(n_odd, d-2j) C(n_even+j-1, j).
inline size_t free_ring_dim(size_t n_odd, size_t n_even, unsigned d) {
  size_t total = 0;
  for (unsigned j = 0; 2 * j <= d; ++j) {
    unsigned rest = d - 2 * j;
    if (rest > n_odd) continue;
    size_t evens = (j == 0) ? 1 : (n_even == 0 ? 0 : binom(n_even + j - 1, j));
    total += binom(n_odd, rest) * evens;
  }
  return total;
}

class GradedRing {
 public:
  GradedRing(unsigned p, unsigned truncation, std::vector<std::string> odd_names,
             std::vector<std::string> even_names)
      : p_(p),
        trunc_(truncation),
        odd_names_(std::move(odd_names)),
        even_names_(std::move(even_names)) {
    if (odd_names_.size() > 31) throw ValidationError("GradedRing: too many odd generators");
    basis_.resize(trunc_ + 1);
    index_.resize(trunc_ + 1);
    for (unsigned d = 0; d <= trunc_; ++d) {
      build_degree(d);
      for (size_t i = 0; i < basis_[d].size(); ++i) index_[d][basis_[d][i]] = i;
    }
  }

  unsigned p() const { return p_; }
  unsigned truncation() const { return trunc_; }
  size_t odd_count() const { return odd_names_.size(); }
  size_t even_count() const { return even_names_.size(); }
  const std::vector<std::string>& odd_names() const { return odd_names_; }
  const std::vector<std::string>& even_names() const { return even_names_; }

  size_t dim(unsigned d) const { return d > trunc_ ? 0 : basis_[d].size(); }
  const std::vector<RingMonomial>& basis(unsigned d) const { return basis_.at(d); }
  size_t index_of(unsigned d, const RingMonomial& m) const { return index_.at(d).at(m); }

  static unsigned degree_of(const RingMonomial& m) {
    return mask_degree(m.mask) + 2 * m.weight();
  }

  std::string monomial_string(const RingMonomial& m) const {
    std::string s;
    for (unsigned b : mask_bits(m.mask)) {
      if (!s.empty()) s += ".";
      s += odd_names_[b];
    }
    for (size_t t = 0; t < m.exp.size(); ++t) {
      if (!m.exp[t]) continue;
      if (!s.empty()) s += ".";
      s += even_names_[t];
      if (m.exp[t] > 1) s += "^" + std::to_string(static_cast<int>(m.exp[t]));
    }
    return s.empty() ? "1" : s;
  }

  // ---- elements: homogeneous dense coefficient vectors ----

  struct Element {
    unsigned degree = 0;
    Vec coeffs;  // size dim(degree)
  };

  Element zero(unsigned d) const { return {d, Vec(dim(d), 0)}; }

  Element monomial_element(const RingMonomial& m, uint32_t c = 1) const {
    unsigned d = degree_of(m);
    Element e = zero(d);
    e.coeffs[index_of(d, m)] = c % p_;
    return e;
  }

  Element generator(bool odd, size_t idx) const {
    RingMonomial m;
    m.exp.assign(even_count(), 0);
    if (odd)
      m.mask = 1u << idx;
    else
      m.exp[idx] = 1;
    return monomial_element(m);
  }

  Element add(const Element& a, const Element& b) const {
    if (a.degree != b.degree) throw ValidationError("GradedRing::add: degree mismatch");
    Element r = a;
    for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = add_mod(r.coeffs[i], b.coeffs[i], p_);
    return r;
  }
  Element sub(const Element& a, const Element& b) const {
    if (a.degree != b.degree) throw ValidationError("GradedRing::sub: degree mismatch");
    Element r = a;
    for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = sub_mod(r.coeffs[i], b.coeffs[i], p_);
    return r;
  }
  Element scale(uint32_t f, const Element& a) const {
    Element r = a;
    for (auto& c : r.coeffs) c = mul_mod(f % p_, c, p_);
    return r;
  }
  bool is_zero(const Element& a) const { return vec_is_zero(a.coeffs); }

  // Product of basis monomials; false when it vanishes (shared odd letter).
  bool monomial_mul(const RingMonomial& a, const RingMonomial& b, RingMonomial& out,
                    int& sign) const {
    if (a.mask & b.mask) return false;
    sign = merge_sign(a.mask, b.mask);
    out.mask = a.mask | b.mask;
    out.exp.resize(even_count());
    for (size_t t = 0; t < even_count(); ++t)
      out.exp[t] = static_cast<uint8_t>(a.exp[t] + b.exp[t]);
    return true;
  }

  Element mul(const Element& a, const Element& b) const {
    unsigned d = a.degree + b.degree;
    if (d > trunc_) throw ValidationError("GradedRing::mul: degree exceeds truncation");
    Element r = zero(d);
    const auto& ba = basis(a.degree);
    const auto& bb = basis(b.degree);
    for (size_t i = 0; i < ba.size(); ++i) {
      if (!a.coeffs[i]) continue;
      for (size_t j = 0; j < bb.size(); ++j) {
        if (!b.coeffs[j]) continue;
        RingMonomial m;
        int sign;
        if (!monomial_mul(ba[i], bb[j], m, sign)) continue;
        uint32_t c = mul_mod(a.coeffs[i], b.coeffs[j], p_);
        size_t idx = index_of(d, m);
        r.coeffs[idx] = mod_reduce(static_cast<int64_t>(r.coeffs[idx]) + sign * static_cast<int64_t>(c), p_);
      }
    }
    return r;
  }

  Element power(const Element& a, unsigned e) const {
    RingMonomial one;
    one.exp.assign(even_count(), 0);
    Element r = monomial_element(one);
    for (unsigned i = 0; i < e; ++i) r = mul(r, a);
    return r;
  }

  std::string element_string(const Element& e) const {
    std::string s;
    const auto& bs = basis(e.degree);
    for (size_t i = 0; i < bs.size(); ++i) {
      if (!e.coeffs[i]) continue;
      if (!s.empty()) s += " + ";
      if (e.coeffs[i] != 1 || (bs[i].mask == 0 && bs[i].weight() == 0))
        s += std::to_string(e.coeffs[i]) + (degree_of(bs[i]) ? "*" : "");
      if (degree_of(bs[i])) s += monomial_string(bs[i]);
    }
    return s.empty() ? "0" : s;
  }

 private:
  void build_degree(unsigned d) {
    std::vector<uint32_t> masks;
    for (uint32_t m = 0; m < (1u << odd_names_.size()); ++m)
      if (mask_degree(m) <= d && (d - mask_degree(m)) % 2 == 0) masks.push_back(m);
    for (uint32_t m : masks) {
      unsigned w = (d - mask_degree(m)) / 2;
      std::vector<uint8_t> exp(even_names_.size(), 0);
      emit_exponents(d, m, exp, 0, w);
    }
  }
  void emit_exponents(unsigned d, uint32_t mask, std::vector<uint8_t>& exp, size_t pos,
                      unsigned remaining) {
    if (even_names_.empty()) {
      if (remaining == 0) basis_[d].push_back({mask, exp});
      return;
    }
    if (pos + 1 == even_names_.size()) {
      exp[pos] = static_cast<uint8_t>(remaining);
      basis_[d].push_back({mask, exp});
      exp[pos] = 0;
      return;
    }
    for (unsigned e = 0; e <= remaining; ++e) {
      exp[pos] = static_cast<uint8_t>(e);
      emit_exponents(d, mask, exp, pos + 1, remaining - e);
    }
    exp[pos] = 0;
  }

  unsigned p_;
  unsigned trunc_;
  std::vector<std::string> odd_names_, even_names_;
  std::vector<std::vector<RingMonomial>> basis_;
  std::vector<std::map<RingMonomial, size_t>> index_;
};

// Degree-+1 derivation determined by generator images (empty element = 0).
class RingDerivation {
 public:
  RingDerivation(const GradedRing& ring, std::vector<GradedRing::Element> odd_images,
                 std::vector<GradedRing::Element> even_images)
      : ring_(&ring), odd_images_(std::move(odd_images)), even_images_(std::move(even_images)) {
    if (odd_images_.size() != ring.odd_count() || even_images_.size() != ring.even_count())
      throw ValidationError("RingDerivation: one image per generator required");
    for (const auto& e : odd_images_)
      if (!e.coeffs.empty() && e.degree != 2)
        throw ValidationError("RingDerivation: odd-generator image must have degree 2");
    for (const auto& e : even_images_)
      if (!e.coeffs.empty() && e.degree != 3)
        throw ValidationError("RingDerivation: even-generator image must have degree 3");
  }

  const GradedRing& ring() const { return *ring_; }

  GradedRing::Element apply_monomial(const RingMonomial& m) const {
    const GradedRing& R = *ring_;
    unsigned d = GradedRing::degree_of(m);
    if (d + 1 > R.truncation())
      throw ValidationError("RingDerivation: image degree exceeds truncation");
    GradedRing::Element out = R.zero(d + 1);
    auto bits = mask_bits(m.mask);
    // odd letters: m = (-1)^r x_{b_r} ^ (m \ b_r)
    for (size_t r = 0; r < bits.size(); ++r) {
      const auto& img = odd_images_[bits[r]];
      if (img.coeffs.empty() || R.is_zero(img)) continue;
      RingMonomial rest = m;
      rest.mask &= ~(1u << bits[r]);
      GradedRing::Element term = R.mul(img, R.monomial_element(rest));
      if (r % 2) term = R.scale(R.p() - 1, term);
      out = R.add(out, term);
    }
    // even letters: the image has odd parity, so the Leibniz sign past the
    // exterior part cancels against moving the image to the front
    for (size_t t = 0; t < m.exp.size(); ++t) {
      if (!m.exp[t]) continue;
      const auto& img = even_images_[t];
      if (img.coeffs.empty() || R.is_zero(img)) continue;
      RingMonomial rest = m;
      rest.exp[t] -= 1;
      out = R.add(out, R.mul(img, R.monomial_element(rest, m.exp[t] % R.p())));
    }
    return out;
  }

  GradedRing::Element apply(const GradedRing::Element& e) const {
    const GradedRing& R = *ring_;
    GradedRing::Element out = R.zero(e.degree + 1);
    const auto& bs = R.basis(e.degree);
    for (size_t i = 0; i < bs.size(); ++i) {
      if (!e.coeffs[i]) continue;
      out = R.add(out, R.scale(e.coeffs[i], apply_monomial(bs[i])));
    }
    return out;
  }

  // Matrix of the derivation from degree d to d+1 over F_p.
  ModMatrix matrix(unsigned d) const {
    const GradedRing& R = *ring_;
    ModMatrix mat(PrimePower(R.p(), 1), R.dim(d + 1), R.dim(d));
    for (size_t j = 0; j < R.dim(d); ++j) {
      GradedRing::Element img = apply_monomial(R.basis(d)[j]);
      for (size_t i = 0; i < img.coeffs.size(); ++i)
        if (img.coeffs[i]) mat.set(i, j, img.coeffs[i]);
    }
    return mat;
  }

 private:
  const GradedRing* ring_;
  std::vector<GradedRing::Element> odd_images_, even_images_;
};

// Graded map of rings determined by generator images (degree-preserving).
class RingHom {
 public:
  RingHom(const GradedRing& src, const GradedRing& dst,
          std::vector<GradedRing::Element> odd_images,
          std::vector<GradedRing::Element> even_images)
      : src_(&src), dst_(&dst), odd_images_(std::move(odd_images)),
        even_images_(std::move(even_images)) {
    if (odd_images_.size() != src.odd_count() || even_images_.size() != src.even_count())
      throw ValidationError("RingHom: one image per generator required");
    for (const auto& e : odd_images_)
      if (e.degree != 1) throw ValidationError("RingHom: odd images must have degree 1");
    for (const auto& e : even_images_)
      if (e.degree != 2) throw ValidationError("RingHom: even images must have degree 2");
  }

  GradedRing::Element apply_monomial(const RingMonomial& m) const {
    RingMonomial one;
    one.exp.assign(dst_->even_count(), 0);
    GradedRing::Element out = dst_->monomial_element(one);
    for (unsigned b : mask_bits(m.mask)) out = dst_->mul(out, odd_images_[b]);
    for (size_t t = 0; t < m.exp.size(); ++t)
      for (unsigned e = 0; e < m.exp[t]; ++e) out = dst_->mul(out, even_images_[t]);
    return out;
  }

  GradedRing::Element apply(const GradedRing::Element& e) const {
    GradedRing::Element out = dst_->zero(e.degree);
    const auto& bs = src_->basis(e.degree);
    for (size_t i = 0; i < bs.size(); ++i) {
      if (!e.coeffs[i]) continue;
      out = dst_->add(out, dst_->scale(e.coeffs[i], apply_monomial(bs[i])));
    }
    return out;
  }

 private:
  const GradedRing* src_;
  const GradedRing* dst_;
  std::vector<GradedRing::Element> odd_images_, even_images_;
};

// Cohomology dimensions of (ring, D) for degrees 0..max_degree, where
// max_degree must stay below the truncation so boundaries are complete.
inline std::vector<size_t> derivation_cohomology_dims(const RingDerivation& der,
                                                      unsigned max_degree) {
  const GradedRing& R = der.ring();
  if (max_degree + 1 > R.truncation())
    throw ValidationError("cohomology dims need degrees <= truncation - 1");
  std::vector<size_t> ranks(max_degree + 1);
  for (unsigned d = 0; d <= max_degree; ++d) ranks[d] = rank_fp(der.matrix(d));
  std::vector<size_t> dims(max_degree + 1);
  for (unsigned d = 0; d <= max_degree; ++d) {
    size_t prev = d == 0 ? 0 : ranks[d - 1];
    dims[d] = R.dim(d) - ranks[d] - prev;
  }
  return dims;
}

}  // namespace plie
