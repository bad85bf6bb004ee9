#pragma once

// Bracket algebras over Z/p^k: a free module with an alternating bilinear
// product given by structure constants c_ij^t, no Jacobi identity assumed.
// The Jacobi form J measures the failure; J = 0 is what "Lie algebra" means
// here.  The dual picture (co-bracket as a degree-1 derivation on the
// exterior algebra of the dual) lives here too, since several consumers
// need br* and its square.
//
// Dual-basis conventions, fixed once and reused everywhere:
//   (x_i ^ x_j)(e_a, e_b) = d_ia d_jb - d_ib d_ja
//   br*(x_t) = sum_{i<j} c_ij^t x_i ^ x_j
// so that <br*(x_t), e_a ^ e_b> = c_ab^t for a < b.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plie/modp.hpp"

namespace plie {

// ---- sorted index subsets of {0..n-1} encoded as bit masks ----

inline unsigned mask_degree(uint32_t mask) { return static_cast<unsigned>(__builtin_popcount(mask)); }

// Bits of `mask` in ascending order.
inline std::vector<unsigned> mask_bits(uint32_t mask) {
  std::vector<unsigned> bits;
  while (mask) {
    unsigned b = static_cast<unsigned>(__builtin_ctz(mask));
    bits.push_back(b);
    mask &= mask - 1;
  }
  return bits;
}

// Koszul sign of merging two disjoint ascending words: (-1)^{#inversions}.
inline int merge_sign(uint32_t a, uint32_t b) {
  int inv = 0;
  for (unsigned bit : mask_bits(a)) inv += __builtin_popcount(b & ((1u << bit) - 1));
  return (inv % 2 == 0) ? 1 : -1;
}

// All degree-l masks on n letters, ascending numeric order.
inline std::vector<uint32_t> exterior_basis(size_t n, unsigned l) {
  std::vector<uint32_t> out;
  for (uint32_t m = 0; m < (1u << n); ++m)
    if (mask_degree(m) == l) out.push_back(m);
  return out;
}

// Element of the exterior algebra Lambda*(W*) over F_p.  Keys are masks,
// values are nonzero residues; may be inhomogeneous.
class ExteriorElement {
 public:
  ExteriorElement() = default;
  ExteriorElement(unsigned p, size_t dim) : p_(p), dim_(dim) {}

  unsigned p() const { return p_; }
  size_t dim() const { return dim_; }
  const std::map<uint32_t, uint32_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // True when every term has the same exterior degree (vacuously for 0).
  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    unsigned d = mask_degree(terms_.begin()->first);
    for (auto& [m, c] : terms_)
      if (mask_degree(m) != d) return false;
    return true;
  }
  unsigned degree() const {
    if (terms_.empty()) return 0;
    return mask_degree(terms_.begin()->first);
  }

  uint32_t coeff(uint32_t mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? 0 : it->second;
  }

  void add_term(uint32_t mask, int64_t c) {
    uint32_t v = mod_reduce(static_cast<int64_t>(coeff(mask)) + c, p_);
    if (v == 0)
      terms_.erase(mask);
    else
      terms_[mask] = v;
  }

  ExteriorElement add(const ExteriorElement& o) const {
    ExteriorElement r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  ExteriorElement sub(const ExteriorElement& o) const {
    ExteriorElement r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, -static_cast<int64_t>(c));
    return r;
  }
  ExteriorElement scale(uint32_t f) const {
    ExteriorElement r(p_, dim_);
    for (auto& [m, c] : terms_) r.add_term(m, mul_mod(f % p_, c, p_));
    return r;
  }

  ExteriorElement wedge(const ExteriorElement& o) const {
    ExteriorElement r(p_, dim_);
    for (auto& [ma, ca] : terms_)
      for (auto& [mb, cb] : o.terms_) {
        if (ma & mb) continue;
        int s = merge_sign(ma, mb);
        r.add_term(ma | mb, s * static_cast<int64_t>(mul_mod(ca, cb, p_)));
      }
    return r;
  }

  bool operator==(const ExteriorElement& o) const {
    return p_ == o.p_ && dim_ == o.dim_ && terms_ == o.terms_;
  }

  std::string to_string(const std::vector<std::string>& labels) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      auto bits = mask_bits(m);
      if (c != 1 || bits.empty()) {
        os << c;
        if (!bits.empty()) os << "*";
      }
      for (size_t i = 0; i < bits.size(); ++i) {
        if (i) os << "^";
        os << labels[bits[i]];
      }
    }
    return os.str();
  }

  static ExteriorElement basis_term(unsigned p, size_t dim, uint32_t mask, uint32_t c = 1) {
    ExteriorElement e(p, dim);
    e.add_term(mask, c);
    return e;
  }

 private:
  unsigned p_ = 3;
  size_t dim_ = 0;
  std::map<uint32_t, uint32_t> terms_;
};

// Sign of the permutation sorting `tuple` (distinct entries), or 0 if the
// sorted tuple differs from `sorted_ref`.
inline int eval_basis_form(const std::vector<unsigned>& sorted_ref, std::vector<unsigned> tuple) {
  int sign = 1;
  for (size_t i = 0; i + 1 < tuple.size(); ++i)
    for (size_t j = 0; j + 1 < tuple.size() - i; ++j)
      if (tuple[j] > tuple[j + 1]) {
        std::swap(tuple[j], tuple[j + 1]);
        sign = -sign;
      } else if (tuple[j] == tuple[j + 1]) {
        return 0;
      }
  return tuple == sorted_ref ? sign : 0;
}

// Alternating bilinear bracket on (Z/p^k)^n given by structure constants.
class BracketAlgebra {
 public:
  BracketAlgebra() = default;

  // `c` indexed by (i*n + j)*n + t, meaning [e_i, e_j] = sum_t c_ij^t e_t.
  BracketAlgebra(PrimePower mod, size_t n, std::vector<std::string> labels, Vec c)
      : mod_(mod), n_(n), labels_(std::move(labels)), c_(std::move(c)) {
    if (labels_.empty()) {
      labels_.reserve(n_);
      for (size_t i = 1; i <= n_; ++i) labels_.push_back("e" + std::to_string(i));
    }
    if (labels_.size() != n_ || c_.size() != n_ * n_ * n_)
      throw ValidationError("BracketAlgebra: shape mismatch");
    const uint32_t m = mod_.modulus();
    for (auto& x : c_) x %= m;
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j)
        for (size_t t = 0; t < n_; ++t) {
          if (i == j && this->c(i, i, t) != 0)
            throw ValidationError("BracketAlgebra: [e_i, e_i] must vanish");
          if (this->c(i, j, t) != neg_mod(this->c(j, i, t), m))
            throw ValidationError("BracketAlgebra: antisymmetry violated");
        }
  }

  // Build from the i<j half of the constants; the rest is forced.
  static BracketAlgebra from_lower_pairs(
      PrimePower mod, size_t n, std::vector<std::string> labels,
      const std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>>& pairs) {
    const uint32_t m = mod.modulus();
    Vec c(n * n * n, 0);
    for (auto& [i, j, coeffs] : pairs) {
      if (i >= j || j >= n) throw ValidationError("bracket pair needs i < j < dim");
      if (coeffs.size() != n) throw ValidationError("bracket coeff vector has wrong length");
      for (size_t t = 0; t < n; ++t) {
        uint32_t v = mod_reduce(coeffs[t], m);
        c[(i * n + j) * n + t] = v;
        c[(j * n + i) * n + t] = neg_mod(v, m);
      }
    }
    return BracketAlgebra(mod, n, std::move(labels), std::move(c));
  }

  PrimePower mod() const { return mod_; }
  uint32_t modulus() const { return mod_.modulus(); }
  size_t dim() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }

  uint32_t c(size_t i, size_t j, size_t t) const { return c_[(i * n_ + j) * n_ + t]; }

  Vec bracket_basis(size_t i, size_t j) const {
    Vec r(n_);
    for (size_t t = 0; t < n_; ++t) r[t] = c(i, j, t);
    return r;
  }

  Vec bracket(const Vec& u, const Vec& v) const {
    const uint32_t m = modulus();
    Vec r(n_, 0);
    for (size_t i = 0; i < n_; ++i) {
      if (!u[i]) continue;
      for (size_t j = 0; j < n_; ++j) {
        if (!v[j]) continue;
        uint32_t f = mul_mod(u[i] % m, v[j] % m, m);
        for (size_t t = 0; t < n_; ++t)
          if (c(i, j, t)) r[t] = add_mod(r[t], mul_mod(f, c(i, j, t), m), m);
      }
    }
    return r;
  }

  bool operator==(const BracketAlgebra& o) const {
    return mod_ == o.mod_ && n_ == o.n_ && c_ == o.c_;
  }

 private:
  PrimePower mod_;
  size_t n_ = 0;
  std::vector<std::string> labels_;
  Vec c_;
};

// J(e_i, e_j, e_k) for i<j<k, stored as coordinate vectors.
struct JacobiTensor {
  size_t dim = 0;
  PrimePower mod;
  // key: (i,j,k) packed in ascending order
  std::map<std::array<size_t, 3>, Vec> values;  // only nonzero entries

  bool is_zero() const { return values.empty(); }

  Vec value(size_t i, size_t j, size_t k) const {
    auto it = values.find({i, j, k});
    return it == values.end() ? Vec(dim, 0) : it->second;
  }
};

// J(x,y,z) = [[x,y],z] + [[y,z],x] + [[z,x],y], evaluated on basis triples.
inline JacobiTensor jacobi_form(const BracketAlgebra& L) {
  JacobiTensor J;
  J.dim = L.dim();
  J.mod = L.mod();
  const uint32_t m = L.modulus();
  const size_t n = L.dim();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        Vec acc(n, 0);
        // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]
        auto add_term = [&](size_t a, size_t b, size_t cidx) {
          for (size_t t = 0; t < n; ++t) {
            uint32_t cab = L.c(a, b, t);
            if (!cab) continue;
            for (size_t s = 0; s < n; ++s)
              if (L.c(t, cidx, s)) acc[s] = add_mod(acc[s], mul_mod(cab, L.c(t, cidx, s), m), m);
          }
        };
        add_term(i, j, k);
        add_term(j, k, i);
        add_term(k, i, j);
        if (!vec_is_zero(acc)) J.values[{i, j, k}] = acc;
      }
  return J;
}

inline bool is_lie(const BracketAlgebra& L) { return jacobi_form(L).is_zero(); }

// br*(x_t) = sum_{i<j} c_ij^t x_i ^ x_j.
inline ExteriorElement cobracket_generator(const BracketAlgebra& L, size_t t) {
  if (L.mod().k != 1) throw ValidationError("cobracket: requires k = 1");
  ExteriorElement e(L.mod().p, L.dim());
  for (size_t i = 0; i < L.dim(); ++i)
    for (size_t j = i + 1; j < L.dim(); ++j)
      if (L.c(i, j, t)) e.add_term((1u << i) | (1u << j), L.c(i, j, t));
  return e;
}

// Degree-+1 derivation extension of br* to the whole exterior algebra.
inline ExteriorElement cobracket(const BracketAlgebra& L, const ExteriorElement& w) {
  if (L.mod().k != 1) throw ValidationError("cobracket: requires k = 1");
  if (w.dim() != L.dim() || w.p() != L.mod().p)
    throw ValidationError("cobracket: element/algebra mismatch");
  ExteriorElement out(w.p(), w.dim());
  for (auto& [mask, coeff] : w.terms()) {
    auto bits = mask_bits(mask);
    for (size_t r = 0; r < bits.size(); ++r) {
      // x_S = (-1)^r x_{b_r} ^ x_{S \ b_r}; the image of x_{b_r} is even,
      // so it can be wedged on the left.
      ExteriorElement img = cobracket_generator(L, bits[r]);
      ExteriorElement rest = ExteriorElement::basis_term(w.p(), w.dim(), mask & ~(1u << bits[r]));
      ExteriorElement prod = img.wedge(rest);
      int sign = (r % 2 == 0) ? 1 : -1;
      for (auto& [m2, c2] : prod.terms())
        out.add_term(m2, sign * static_cast<int64_t>(mul_mod(coeff, c2, w.p())));
    }
  }
  return out;
}

// Matrix of br* o br* : W* -> Lambda^3(W*); zero iff J = 0.
inline ModMatrix colie_defect(const BracketAlgebra& L) {
  if (L.mod().k != 1) throw ValidationError("colie_defect: requires k = 1");
  const size_t n = L.dim();
  auto basis3 = exterior_basis(n, 3);
  std::map<uint32_t, size_t> index3;
  for (size_t i = 0; i < basis3.size(); ++i) index3[basis3[i]] = i;
  ModMatrix m(L.mod(), basis3.size(), n);
  for (size_t t = 0; t < n; ++t) {
    ExteriorElement sq = cobracket(L, cobracket_generator(L, t));
    for (auto& [mask, c] : sq.terms()) m.set(index3.at(mask), t, c);
  }
  return m;
}

// Reduction Z/p^k -> Z/p^t of the structure constants.
inline BracketAlgebra reduce(const BracketAlgebra& L, unsigned t) {
  if (t < 1 || t > L.mod().k) throw ValidationError("reduce: need 1 <= t <= k");
  PrimePower target(L.mod().p, t);
  const uint32_t m = target.modulus();
  const size_t n = L.dim();
  Vec c(n * n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t s = 0; s < n; ++s) c[(i * n + j) * n + s] = L.c(i, j, s) % m;
  return BracketAlgebra(target, n, L.labels(), std::move(c));
}

// ---- the named library ----

namespace detail {

inline BracketAlgebra matrix_algebra(PrimePower mod, size_t n, bool traceless) {
  // Basis of gl_n: E_ij row-major.  For sl_n: E_ij (i != j) then
  // H_i = E_ii - E_{i+1,i+1}.
  struct Entry {
    std::vector<int64_t> diag;   // for matrices supported on the diagonal
    size_t r = 0, c = 0;         // for off-diagonal E_rc
    bool off = false;
  };
  std::vector<Entry> basis;
  std::vector<std::string> labels;
  if (!traceless) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        Entry e;
        if (i == j) {
          e.diag.assign(n, 0);
          e.diag[i] = 1;
        } else {
          e.off = true;
          e.r = i;
          e.c = j;
        }
        basis.push_back(e);
        labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
      }
  } else {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        Entry e;
        e.off = true;
        e.r = i;
        e.c = j;
        basis.push_back(e);
        labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
      }
    for (size_t i = 0; i + 1 < n; ++i) {
      Entry e;
      e.diag.assign(n, 0);
      e.diag[i] = 1;
      e.diag[i + 1] = -1;
      basis.push_back(e);
      labels.push_back("H" + std::to_string(i + 1));
    }
  }
  const size_t dim = basis.size();

  // multiply two basis matrices as integer matrices, return dense n x n
  auto as_matrix = [&](const Entry& e) {
    std::vector<int64_t> m(n * n, 0);
    if (e.off)
      m[e.r * n + e.c] = 1;
    else
      for (size_t i = 0; i < n; ++i) m[i * n + i] = e.diag[i];
    return m;
  };
  auto commutator = [&](const Entry& a, const Entry& b) {
    auto A = as_matrix(a), B = as_matrix(b);
    std::vector<int64_t> r(n * n, 0);
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < n; ++k) {
        if (A[i * n + k])
          for (size_t j = 0; j < n; ++j) r[i * n + j] += A[i * n + k] * B[k * n + j];
        if (B[i * n + k])
          for (size_t j = 0; j < n; ++j) r[i * n + j] -= B[i * n + k] * A[k * n + j];
      }
    return r;
  };
  // express a (trace-zero when traceless) matrix in the chosen basis
  auto coords = [&](const std::vector<int64_t>& m) {
    std::vector<int64_t> out(dim, 0);
    size_t idx = 0;
    if (!traceless) {
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out[idx++] = m[i * n + j];
    } else {
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          if (i != j) out[idx++] = m[i * n + j];
      // diagonal = sum a_i H_i with a_i the partial sums of the diagonal
      int64_t partial = 0;
      for (size_t i = 0; i + 1 < n; ++i) {
        partial += m[i * n + i];
        out[idx++] = partial;
      }
    }
    return out;
  };

  std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
  for (size_t a = 0; a < dim; ++a)
    for (size_t b = a + 1; b < dim; ++b) pairs.emplace_back(a, b, coords(commutator(basis[a], basis[b])));
  return BracketAlgebra::from_lower_pairs(mod, dim, labels, pairs);
}

}  // namespace detail

// The algebras used throughout: exact structure constants over Z/p^k.
// `n` is consulted only by abelian/gln/sln.
inline BracketAlgebra named_algebra(const std::string& name, PrimePower mod, size_t n = 0) {
  if (name == "abelian") {
    if (n < 1) throw ValidationError("abelian(n): need n >= 1");
    return BracketAlgebra::from_lower_pairs(mod, n, {}, {});
  }
  if (name == "heisenberg")
    return BracketAlgebra::from_lower_pairs(mod, 3, {"x", "y", "z"}, {{0, 1, {0, 0, 1}}});
  if (name == "solvable_S")
    return BracketAlgebra::from_lower_pairs(mod, 2, {"x", "y"}, {{0, 1, {1, 0}}});
  if (name == "sl2")
    return BracketAlgebra::from_lower_pairs(
        mod, 3, {"h", "x+", "x-"},
        {{0, 1, {0, 2, 0}}, {0, 2, {0, 0, -2}}, {1, 2, {1, 0, 0}}});
  if (name == "so3")
    return BracketAlgebra::from_lower_pairs(
        mod, 3, {"X", "Y", "Z"},
        {{0, 1, {0, 0, -1}}, {1, 2, {-1, 0, 0}}, {0, 2, {0, 1, 0}}});
  if (name == "gln") {
    if (n < 1) throw ValidationError("gln(n): need n >= 1");
    return detail::matrix_algebra(mod, n, false);
  }
  if (name == "sln") {
    if (n < 2) throw ValidationError("sln(n): need n >= 2");
    return detail::matrix_algebra(mod, n, true);
  }
  throw ValidationError("unknown algebra name: " + name);
}

inline const std::vector<std::string>& named_algebra_names() {
  static const std::vector<std::string> names{"abelian",    "heisenberg", "solvable_S",
                                              "sl2",        "so3",        "gln",
                                              "sln"};
  return names;
}

// ---- algebra file format (JSON) ----
//
// {"p": 5, "k": 1, "dim": 3, "basis": ["h","x+","x-"],
//  "brackets": [{"i": 1, "j": 2, "coeffs": [0,2,0]}, ...]}
// Indices are 1-based and only i < j pairs are listed.

inline nlohmann::ordered_json algebra_to_json(const BracketAlgebra& L) {
  nlohmann::ordered_json j;
  j["p"] = L.mod().p;
  j["k"] = L.mod().k;
  j["dim"] = L.dim();
  j["basis"] = L.labels();
  auto arr = nlohmann::ordered_json::array();
  for (size_t a = 0; a < L.dim(); ++a)
    for (size_t b = a + 1; b < L.dim(); ++b) {
      Vec coeffs = L.bracket_basis(a, b);
      if (vec_is_zero(coeffs)) continue;
      nlohmann::ordered_json e;
      e["i"] = a + 1;
      e["j"] = b + 1;
      e["coeffs"] = coeffs;
      arr.push_back(e);
    }
  j["brackets"] = arr;
  return j;
}

inline BracketAlgebra algebra_from_json(const nlohmann::json& j) {
  try {
    PrimePower mod(j.at("p").get<unsigned>(), j.at("k").get<unsigned>());
    size_t dim = j.at("dim").get<size_t>();
    std::vector<std::string> labels;
    if (j.contains("basis")) labels = j.at("basis").get<std::vector<std::string>>();
    std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
    for (const auto& e : j.value("brackets", nlohmann::json::array())) {
      size_t i = e.at("i").get<size_t>(), jj = e.at("j").get<size_t>();
      if (i < 1 || jj < 1 || i > dim || jj > dim || i >= jj)
        throw ValidationError("algebra file: bracket indices need 1 <= i < j <= dim");
      pairs.emplace_back(i - 1, jj - 1, e.at("coeffs").get<std::vector<int64_t>>());
    }
    return BracketAlgebra::from_lower_pairs(mod, dim, std::move(labels), pairs);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed algebra file: ") + ex.what());
  }
}

}  // namespace plie
