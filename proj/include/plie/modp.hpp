#pragma once

// Exact dense linear algebra over F_p and Z/p^k.
//
// Everything downstream (cochain differentials, group-theoretic form
// extraction, lift searches) reduces to the handful of primitives in this
// header: reduced row echelon form over F_p, kernels, and exact linear
// solving over F_p and over Z/p^k.  All values are immutable after
// construction and every routine is deterministic: pivoting is leftmost
// column / topmost row, so repeated runs produce identical output.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plie {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad user input (unknown name, malformed file, parameter out of range).
struct ValidationError : Error {
  using Error::Error;
};
// An enumeration or search would exceed the configured element budget.
struct BudgetError : Error {
  using Error::Error;
};
// Internal inconsistency (convention bug detectors, failed round trips).
struct ComputationError : Error {
  using Error::Error;
};

// C(n, k) as size_t; small arguments only.
inline size_t binom(size_t n, size_t k) {
  if (k > n) return 0;
  size_t r = 1;
  for (size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// An odd prime power p^k.  The ambient modulus of every ring element here.
struct PrimePower {
  unsigned p = 3;
  unsigned k = 1;

  PrimePower() = default;
  PrimePower(unsigned p_, unsigned k_) : p(p_), k(k_) {
    if (!is_prime(p) || p % 2 == 0)
      throw ValidationError("p must be an odd prime, got " + std::to_string(p));
    if (k < 1) throw ValidationError("exponent k must be >= 1");
    uint64_t m = 1;
    for (unsigned i = 0; i < k; ++i) {
      m *= p;
      if (m > (1u << 24)) throw ValidationError("p^k too large");
    }
  }

  uint32_t modulus() const {
    uint32_t m = 1;
    for (unsigned i = 0; i < k; ++i) m *= p;
    return m;
  }
  bool operator==(const PrimePower&) const = default;
};

// ---- residue arithmetic, all results canonical in [0, m) ----

inline uint32_t mod_reduce(int64_t a, uint32_t m) {
  int64_t r = a % static_cast<int64_t>(m);
  if (r < 0) r += m;
  return static_cast<uint32_t>(r);
}
inline uint32_t add_mod(uint32_t a, uint32_t b, uint32_t m) { return (a + b) % m; }
inline uint32_t sub_mod(uint32_t a, uint32_t b, uint32_t m) { return (a + m - b % m) % m; }
inline uint32_t mul_mod(uint32_t a, uint32_t b, uint32_t m) {
  return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % m);
}
inline uint32_t neg_mod(uint32_t a, uint32_t m) { return a % m == 0 ? 0 : m - a % m; }

// Inverse of a unit mod m (extended Euclid); throws if gcd(a, m) != 1.
inline uint32_t inv_mod(uint32_t a, uint32_t m) {
  int64_t r0 = m, r1 = a % m, s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  if (r0 != 1) throw ComputationError("inv_mod: not a unit");
  return mod_reduce(s0, m);
}

// 1/2 mod p^k for odd p: (p^k + 1)/2.
inline uint32_t half_mod(uint32_t m) { return (m + 1) / 2; }

using Vec = std::vector<uint32_t>;

inline Vec vec_add(const Vec& a, const Vec& b, uint32_t m) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = add_mod(a[i], b[i], m);
  return r;
}
inline Vec vec_sub(const Vec& a, const Vec& b, uint32_t m) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = sub_mod(a[i], b[i], m);
  return r;
}
inline Vec vec_scale(uint32_t c, const Vec& a, uint32_t m) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = mul_mod(c, a[i], m);
  return r;
}
inline bool vec_is_zero(const Vec& a) {
  for (uint32_t x : a)
    if (x) return false;
  return true;
}

// Dense matrix over Z/p^k, row-major, entries canonical in [0, p^k).
class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(PrimePower mod, size_t rows, size_t cols)
      : mod_(mod), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

  ModMatrix(PrimePower mod, size_t rows, size_t cols, std::vector<int64_t> entries)
      : mod_(mod), rows_(rows), cols_(cols), a_(rows * cols) {
    if (entries.size() != rows * cols)
      throw ValidationError("ModMatrix: entry count mismatch");
    for (size_t i = 0; i < entries.size(); ++i) a_[i] = mod_reduce(entries[i], modulus());
  }

  static ModMatrix identity(PrimePower mod, size_t n) {
    ModMatrix m(mod, n, n);
    for (size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  PrimePower mod() const { return mod_; }
  uint32_t modulus() const { return mod_.modulus(); }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  uint32_t at(size_t i, size_t j) const { return a_[i * cols_ + j]; }
  void set(size_t i, size_t j, uint32_t v) { a_[i * cols_ + j] = v % modulus(); }
  void add_at(size_t i, size_t j, int64_t v) {
    a_[i * cols_ + j] = mod_reduce(static_cast<int64_t>(a_[i * cols_ + j]) + v, modulus());
  }

  Vec apply(const Vec& v) const {
    if (v.size() != cols_) throw ValidationError("ModMatrix::apply: dimension mismatch");
    const uint32_t m = modulus();
    Vec r(rows_, 0);
    for (size_t i = 0; i < rows_; ++i) {
      uint64_t acc = 0;
      for (size_t j = 0; j < cols_; ++j) acc += static_cast<uint64_t>(at(i, j)) * v[j];
      r[i] = static_cast<uint32_t>(acc % m);
    }
    return r;
  }

  ModMatrix mul(const ModMatrix& o) const {
    if (cols_ != o.rows_ || !(mod_ == o.mod_))
      throw ValidationError("ModMatrix::mul: dimension/modulus mismatch");
    const uint32_t m = modulus();
    ModMatrix r(mod_, rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t k = 0; k < cols_; ++k) {
        uint64_t aik = at(i, k);
        if (!aik) continue;
        for (size_t j = 0; j < o.cols_; ++j)
          r.a_[i * o.cols_ + j] =
              static_cast<uint32_t>((r.a_[i * o.cols_ + j] + aik * o.at(k, j)) % m);
      }
    return r;
  }

  ModMatrix add(const ModMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || !(mod_ == o.mod_))
      throw ValidationError("ModMatrix::add: shape mismatch");
    ModMatrix r(mod_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = add_mod(a_[i], o.a_[i], modulus());
    return r;
  }

  ModMatrix sub(const ModMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || !(mod_ == o.mod_))
      throw ValidationError("ModMatrix::sub: shape mismatch");
    ModMatrix r(mod_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = sub_mod(a_[i], o.a_[i], modulus());
    return r;
  }

  ModMatrix scale(uint32_t c) const {
    ModMatrix r(mod_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = mul_mod(c, a_[i], modulus());
    return r;
  }

  bool is_zero() const {
    for (uint32_t x : a_)
      if (x) return false;
    return true;
  }

  Vec row(size_t i) const { return Vec(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }
  Vec col(size_t j) const {
    Vec r(rows_);
    for (size_t i = 0; i < rows_; ++i) r[i] = at(i, j);
    return r;
  }

  bool operator==(const ModMatrix& o) const {
    return mod_ == o.mod_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  std::string to_string() const {
    std::string s;
    for (size_t i = 0; i < rows_; ++i) {
      s += "[ ";
      for (size_t j = 0; j < cols_; ++j) s += std::to_string(at(i, j)) + " ";
      s += "]\n";
    }
    return s;
  }

 private:
  PrimePower mod_;
  size_t rows_ = 0, cols_ = 0;
  Vec a_;
};

struct RrefResult {
  ModMatrix echelon;
  size_t rank = 0;
  std::vector<size_t> pivot_cols;
};

inline void require_field(const ModMatrix& m, const char* who) {
  if (m.mod().k != 1)
    throw ValidationError(std::string(who) + ": requires k = 1 (a prime field)");
}

// Reduced row echelon form over F_p.  Pivots: leftmost column, topmost row.
inline RrefResult rref_fp(ModMatrix m) {
  require_field(m, "rref_fp");
  const uint32_t p = m.modulus();
  size_t r = 0;
  std::vector<size_t> pivots;
  for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    size_t sel = r;
    while (sel < m.rows() && m.at(sel, c) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != r)
      for (size_t j = 0; j < m.cols(); ++j) {
        uint32_t t = m.at(r, j);
        m.set(r, j, m.at(sel, j));
        m.set(sel, j, t);
      }
    uint32_t inv = inv_mod(m.at(r, c), p);
    for (size_t j = 0; j < m.cols(); ++j) m.set(r, j, mul_mod(inv, m.at(r, j), p));
    for (size_t i = 0; i < m.rows(); ++i) {
      if (i == r) continue;
      uint32_t f = m.at(i, c);
      if (!f) continue;
      for (size_t j = 0; j < m.cols(); ++j)
        m.set(i, j, sub_mod(m.at(i, j), mul_mod(f, m.at(r, j), p), p));
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), r, std::move(pivots)};
}

inline size_t rank_fp(const ModMatrix& m) { return rref_fp(m).rank; }

// A subspace of F_p^n held by its canonical reduced-echelon basis.
struct Subspace {
  PrimePower mod;                 // k = 1
  size_t ambient_dim = 0;
  std::vector<Vec> basis;         // rows of an RREF matrix, no zero rows

  size_t dim() const { return basis.size(); }

  static Subspace from_spanning(PrimePower mod, size_t ambient, const std::vector<Vec>& vectors) {
    if (mod.k != 1) throw ValidationError("Subspace: requires k = 1");
    ModMatrix m(mod, vectors.size(), ambient);
    for (size_t i = 0; i < vectors.size(); ++i)
      for (size_t j = 0; j < ambient; ++j) m.set(i, j, vectors[i][j]);
    RrefResult rr = rref_fp(m);
    Subspace s{mod, ambient, {}};
    for (size_t i = 0; i < rr.rank; ++i) s.basis.push_back(rr.echelon.row(i));
    return s;
  }

  bool contains(const Vec& v) const {
    // Reduce v against the echelon basis.
    const uint32_t p = mod.modulus();
    Vec w = v;
    for (const Vec& b : basis) {
      size_t lead = 0;
      while (lead < b.size() && b[lead] == 0) ++lead;
      if (lead < w.size() && w[lead] != 0) {
        uint32_t f = w[lead];  // basis leading entries are 1
        for (size_t j = 0; j < w.size(); ++j) w[j] = sub_mod(w[j], mul_mod(f, b[j], p), p);
      }
    }
    return vec_is_zero(w);
  }

  bool operator==(const Subspace& o) const {
    return mod == o.mod && ambient_dim == o.ambient_dim && basis == o.basis;
  }
};

// Kernel {v : m v = 0} as a canonical Subspace.
inline Subspace kernel_fp(const ModMatrix& m) {
  require_field(m, "kernel_fp");
  const uint32_t p = m.modulus();
  RrefResult rr = rref_fp(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (size_t c : rr.pivot_cols) is_pivot[c] = true;
  std::vector<Vec> gens;
  for (size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vec v(m.cols(), 0);
    v[f] = 1;
    for (size_t r = 0; r < rr.rank; ++r) v[rr.pivot_cols[r]] = neg_mod(rr.echelon.at(r, f), p);
    gens.push_back(std::move(v));
  }
  return Subspace::from_spanning(m.mod(), m.cols(), gens);
}

// One solution of m v = b over F_p (free variables set to 0), or nullopt.
inline std::optional<Vec> solve_fp(const ModMatrix& m, const Vec& b) {
  require_field(m, "solve_fp");
  if (b.size() != m.rows()) throw ValidationError("solve_fp: rhs length mismatch");
  ModMatrix aug(m.mod(), m.rows(), m.cols() + 1);
  for (size_t i = 0; i < m.rows(); ++i) {
    for (size_t j = 0; j < m.cols(); ++j) aug.set(i, j, m.at(i, j));
    aug.set(i, m.cols(), b[i] % m.modulus());
  }
  RrefResult rr = rref_fp(aug);
  for (size_t c : rr.pivot_cols)
    if (c == m.cols()) return std::nullopt;
  Vec v(m.cols(), 0);
  for (size_t r = 0; r < rr.rank; ++r) v[rr.pivot_cols[r]] = rr.echelon.at(r, m.cols());
  return v;
}

// Exact solving over Z/p^k, digit layer by digit layer.
//
// Maintains the full affine solution set mod p^j as x = u + N t with integer
// matrices (columns of N are the current homogeneous directions), so later
// layers can still adjust choices made at earlier ones.  Each layer solves
// one F_p system in (t, next digit).
inline std::optional<Vec> solve_mod_pk(const ModMatrix& m, const Vec& b) {
  if (b.size() != m.rows()) throw ValidationError("solve_mod_pk: rhs length mismatch");
  const PrimePower pk = m.mod();
  const unsigned p = pk.p;
  const size_t n = m.cols(), rows = m.rows();
  PrimePower fp(p, 1);

  if (pk.k == 1) return solve_fp(m, b);

  // Layer 1 over F_p.
  ModMatrix m1(fp, rows, n);
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < n; ++j) m1.set(i, j, m.at(i, j) % p);
  Vec b1(rows);
  for (size_t i = 0; i < rows; ++i) b1[i] = b[i] % p;
  auto x0 = solve_fp(m1, b1);
  if (!x0) return std::nullopt;

  // u: particular solution so far; N: homogeneous directions (as columns).
  std::vector<int64_t> u(x0->begin(), x0->end());
  std::vector<std::vector<int64_t>> N;
  for (const Vec& kb : kernel_fp(m1).basis) N.emplace_back(kb.begin(), kb.end());

  uint64_t pj = p;  // modulus already satisfied
  for (unsigned layer = 2; layer <= pk.k; ++layer) {
    const uint64_t pj1 = pj * p;
    // residual a = (M u - b)/p^j  and  B = (M N)/p^j, both over F_p
    const size_t d = N.size();
    ModMatrix sys(fp, rows, d + n);
    Vec rhs(rows);
    for (size_t i = 0; i < rows; ++i) {
      __int128 acc = 0;
      for (size_t j = 0; j < n; ++j) acc += static_cast<__int128>(m.at(i, j)) * u[j];
      acc -= b[i];
      int64_t res = static_cast<int64_t>(acc % static_cast<__int128>(pj1));
      if (res % static_cast<int64_t>(pj) != 0)
        throw ComputationError("solve_mod_pk: layer invariant broken");
      rhs[i] = mod_reduce(-(res / static_cast<int64_t>(pj)), p);
      for (size_t c = 0; c < d; ++c) {
        __int128 acc2 = 0;
        for (size_t j = 0; j < n; ++j) acc2 += static_cast<__int128>(m.at(i, j)) * N[c][j];
        int64_t e = static_cast<int64_t>(acc2 % static_cast<__int128>(pj1));
        if (e % static_cast<int64_t>(pj) != 0)
          throw ComputationError("solve_mod_pk: direction invariant broken");
        sys.set(i, c, mod_reduce(e / static_cast<int64_t>(pj), p));
      }
      for (size_t j = 0; j < n; ++j) sys.set(i, d + j, m1.at(i, j));
    }
    auto sol = solve_fp(sys, rhs);
    if (!sol) return std::nullopt;
    // u <- u + N t + p^j z
    std::vector<int64_t> u2 = u;
    for (size_t c = 0; c < d; ++c)
      if ((*sol)[c])
        for (size_t j = 0; j < n; ++j) u2[j] += static_cast<int64_t>((*sol)[c]) * N[c][j];
    for (size_t j = 0; j < n; ++j) u2[j] += static_cast<int64_t>(pj) * (*sol)[d + j];
    // New homogeneous directions mod p^{j+1}: kernel combinations of the
    // layer system, together with p times the old directions (those stay
    // homogeneous one layer up but are not kernel combinations).
    std::vector<std::vector<int64_t>> N2;
    for (const Vec& kb : kernel_fp(sys).basis) {
      std::vector<int64_t> dir(n, 0);
      for (size_t c = 0; c < d; ++c)
        if (kb[c])
          for (size_t j = 0; j < n; ++j) dir[j] += static_cast<int64_t>(kb[c]) * N[c][j];
      for (size_t j = 0; j < n; ++j) dir[j] += static_cast<int64_t>(pj) * kb[d + j];
      N2.push_back(std::move(dir));
    }
    for (const auto& c : N) {
      std::vector<int64_t> dir(n);
      for (size_t j = 0; j < n; ++j) dir[j] = p * c[j];
      N2.push_back(std::move(dir));
    }
    // Keep entries bounded; only their values mod p^k ever matter.
    const int64_t full = pk.modulus();
    for (auto& dir : N2)
      for (auto& e : dir) e = mod_reduce(e, full);
    std::erase_if(N2, [](const std::vector<int64_t>& dir) {
      for (int64_t e : dir)
        if (e) return false;
      return true;
    });
    for (auto& e : u2) e = mod_reduce(e, full);
    u = std::move(u2);
    N = std::move(N2);
    pj = pj1;
  }

  Vec out(n);
  for (size_t j = 0; j < n; ++j) out[j] = mod_reduce(u[j], pk.modulus());
  return out;
}

}  // namespace plie
