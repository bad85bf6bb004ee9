#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "plie/bockstein.hpp"

using namespace plie;

namespace {

BracketAlgebra nonlie3(unsigned p) {
  return BracketAlgebra::from_lower_pairs(PrimePower(p, 1), 3, {},
                                          {{0, 1, {0, 0, 1}}, {0, 2, {1, 0, 0}}});
}

BracketAlgebra random_bracket(PrimePower mod, size_t n, std::mt19937& rng) {
  std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      std::vector<int64_t> coeffs(n);
      for (auto& c : coeffs) c = rng() % mod.modulus();
      pairs.emplace_back(i, j, coeffs);
    }
  return BracketAlgebra::from_lower_pairs(mod, n, {}, pairs);
}

BracketAlgebra random_lie(PrimePower mod, size_t n, std::mt19937& rng) {
  while (true) {
    auto L = random_bracket(mod, n, rng);
    if (jacobi_form(L).is_zero()) return L;
  }
}

ExteriorElement random_three_form(unsigned p, size_t n, std::mt19937& rng) {
  ExteriorElement e(p, n);
  for (uint32_t mask : exterior_basis(n, 3)) e.add_term(mask, rng() % p);
  return e;
}

uint32_t ring_coeff(const BocksteinRing& B, const GradedRing::Element& e,
                    const RingMonomial& m) {
  return e.coeffs[B.ring().index_of(e.degree, m)];
}

RingMonomial mono(std::initializer_list<unsigned> xbits, std::vector<uint8_t> exp) {
  RingMonomial m;
  for (unsigned b : xbits) m.mask |= 1u << b;
  m.exp = std::move(exp);
  return m;
}

}  // namespace

TEST_CASE("the sl2 Bockstein table") {
  const unsigned p = 5;
  auto sl2 = named_algebra("sl2", PrimePower(p, 1));
  BocksteinRing B(sl2);
  const auto& R = B.ring();

  // beta(h) = -x+x-,  beta(x+) = -2hx+,  beta(x-) = 2hx-
  auto bh = B.apply_beta(R.generator(true, 0));
  CHECK(ring_coeff(B, bh, mono({1, 2}, {0, 0, 0})) == p - 1);
  CHECK(bh.coeffs == B.beta().matrix(1).col(0));
  auto bxp = B.apply_beta(R.generator(true, 1));
  CHECK(ring_coeff(B, bxp, mono({0, 1}, {0, 0, 0})) == p - 2);
  auto bxm = B.apply_beta(R.generator(true, 2));
  CHECK(ring_coeff(B, bxm, mono({0, 2}, {0, 0, 0})) == 2);

  // beta(H) = X+x- - X-x+
  auto bH = B.apply_beta(R.generator(false, 0));
  CHECK(ring_coeff(B, bH, mono({2}, {0, 1, 0})) == 1);
  CHECK(ring_coeff(B, bH, mono({1}, {0, 0, 1})) == p - 1);
  // beta(X+) = 2(Hx+ - X+h)
  auto bXp = B.apply_beta(R.generator(false, 1));
  CHECK(ring_coeff(B, bXp, mono({1}, {1, 0, 0})) == 2);
  CHECK(ring_coeff(B, bXp, mono({0}, {0, 1, 0})) == p - 2);
  // beta(X-) = -2(Hx- - X-h)
  auto bXm = B.apply_beta(R.generator(false, 2));
  CHECK(ring_coeff(B, bXm, mono({2}, {1, 0, 0})) == p - 2);
  CHECK(ring_coeff(B, bXm, mono({0}, {0, 0, 1})) == 2);
}

TEST_CASE("beta is a derivation and squares to zero on Lie input") {
  std::mt19937 rng(71);
  auto sl2 = named_algebra("sl2", PrimePower(5, 1));
  BocksteinRing B(sl2, {}, 9);
  const auto& R = B.ring();
  for (int t = 0; t < 40; ++t) {
    unsigned da = 1 + rng() % 3, db = 1 + rng() % 3;
    auto a = R.zero(da), b = R.zero(db);
    for (auto& c : a.coeffs) c = rng() % 5;
    for (auto& c : b.coeffs) c = rng() % 5;
    auto lhs = B.apply_beta(R.mul(a, b));
    auto rhs = R.mul(B.apply_beta(a), b);
    auto second = R.mul(a, B.apply_beta(b));
    if (da % 2 == 1) second = R.scale(4, second);
    rhs = R.add(rhs, second);
    CHECK(lhs.coeffs == rhs.coeffs);
  }
  CHECK_FALSE(B.beta_squared_defect().has_value());
}

TEST_CASE("abelian bockstein vanishes") {
  auto A = named_algebra("abelian", PrimePower(3, 1), 2);
  BocksteinRing B(A, {}, 8);
  for (unsigned d = 0; d < 8; ++d) CHECK(B.beta().matrix(d).is_zero());
  auto rep = B.b2_direct();
  for (const auto& row : rep.degrees) CHECK(row.b2 == row.b1);
}

TEST_CASE("beta squared defect witnesses") {
  SECTION("non-Lie algebra: witness on an exterior generator") {
    BocksteinRing B(nonlie3(5), {}, 6);
    auto w = B.beta_squared_defect();
    REQUIRE(w.has_value());
    // J(e1,e2,e3) = -e3, so beta^2 first fails on the e3 dual
    CHECK(w->generator == "e3");
  }
  SECTION("Lie algebra with a non-cocycle eta: witness on a polynomial generator") {
    // heisenberg + a 1-dim abelian summand; eta_x = x^z^w fails the
    // degree-4 consistency between beta1 and beta2
    auto L = BracketAlgebra::from_lower_pairs(PrimePower(5, 1), 4, {"x", "y", "z", "w"},
                                              {{0, 1, {0, 0, 1, 0}}});
    std::vector<ExteriorElement> eta(4, ExteriorElement(5, 4));
    eta[0] = ExteriorElement::basis_term(5, 4, 0b1101);  // x ^ z ^ w
    BocksteinRing B(L, eta, 6);
    auto w = B.beta_squared_defect();
    REQUIRE(w.has_value());
    CHECK(w->generator.substr(0, 2) == "s_");
  }
}

TEST_CASE("beta^2 = 0 iff Jacobi vanishes and eta is a cocycle") {
  // the executable form of the degree-4 obstruction identity, n = 4 so the
  // cocycle condition has content
  std::mt19937 rng(73);
  PrimePower f3(3, 1);
  int nontrivial_cocycle_cases = 0;
  for (int trial = 0; trial < 150; ++trial) {
    // random n=4 brackets are essentially never Lie, so alternate with
    // (random Lie of dim 3) + (central line), which is always Lie
    BracketAlgebra L = [&] {
      if (trial % 2) return random_bracket(f3, 4, rng);
      auto L3 = random_lie(f3, 3, rng);
      std::vector<std::tuple<size_t, size_t, std::vector<int64_t>>> pairs;
      for (size_t i = 0; i < 3; ++i)
        for (size_t j = i + 1; j < 3; ++j) {
          Vec c = L3.bracket_basis(i, j);
          pairs.emplace_back(i, j, std::vector<int64_t>{c[0], c[1], c[2], 0});
        }
      return BracketAlgebra::from_lower_pairs(f3, 4, {}, pairs);
    }();
    std::vector<ExteriorElement> eta;
    for (int t = 0; t < 4; ++t)
      eta.push_back(rng() % 2 ? random_three_form(3, 4, rng) : ExteriorElement(3, 4));
    BocksteinRing B(L, eta, 6);
    bool defect_zero = !B.beta_squared_defect().has_value();

    bool jac = jacobi_form(L).is_zero();
    // d(eta) in C^3(L; ad): eta as an ad-valued 3-form, differential built
    // from the displayed Koszul sum with the ad action matrices
    std::vector<ModMatrix> rho;
    for (size_t i = 0; i < 4; ++i) {
      ModMatrix a(f3, 4, 4);
      for (size_t j = 0; j < 4; ++j)
        for (size_t t = 0; t < 4; ++t)
          if (L.c(i, j, t)) a.set(t, j, L.c(i, j, t));
      rho.push_back(std::move(a));
    }
    auto d3 = ce_differential(L, rho, 4, 3);
    auto basis3 = exterior_basis(4, 3);
    Vec coords(basis3.size() * 4, 0);
    for (size_t t = 0; t < 4; ++t)
      for (auto& [mask, c] : eta[t].terms()) {
        size_t pos = std::lower_bound(basis3.begin(), basis3.end(), mask) - basis3.begin();
        coords[pos * 4 + t] = c;
      }
    bool cocycle = vec_is_zero(d3.apply(coords));
    CHECK(defect_zero == (jac && cocycle));
    if (jac && !cocycle) ++nontrivial_cocycle_cases;
  }
  CHECK(nontrivial_cocycle_cases > 0);  // the sample genuinely exercises both sides
}

TEST_CASE("B2 of sl2 via the ring differential") {
  auto sl2 = named_algebra("sl2", PrimePower(5, 1));
  BocksteinRing B(sl2, {}, 8);
  auto rep = B.b2_direct();
  CHECK(rep.eta_zero);
  CHECK(rep.degrees[0].b2 == 1);
  CHECK(rep.degrees[1].b2 == 0);
  CHECK(rep.degrees[2].b2 == 0);
  CHECK(rep.degrees[3].b2 == 1);
  CHECK(rep.degrees[4].b2 == 1);
  // the degree-3 class is h x+ x-; the degree-4 class sits in weight 2
  CHECK(rep.degrees[3].by_weight == std::vector<std::pair<unsigned, size_t>>{{0, 1}});
  CHECK(rep.degrees[4].by_weight == std::vector<std::pair<unsigned, size_t>>{{2, 1}});
}

TEST_CASE("the two B2 routes agree") {
  for (const char* name : {"heisenberg", "solvable_S", "sl2", "so3"}) {
    auto L = named_algebra(name, PrimePower(5, 1));
    BocksteinRing B(L, {}, 8);
    auto direct = B.b2_direct();
    auto via = b2_via_lie(L, 8);
    REQUIRE(direct.degrees.size() == via.degrees.size());
    for (size_t d = 0; d < direct.degrees.size(); ++d) {
      INFO(name << " degree " << d);
      CHECK(direct.degrees[d].b1 == via.degrees[d].b1);
      CHECK(direct.degrees[d].b2 == via.degrees[d].b2);
      CHECK(direct.degrees[d].by_weight == via.degrees[d].by_weight);
    }
  }
}

TEST_CASE("b2 rejects a broken differential") {
  BocksteinRing B(nonlie3(3), {}, 6);
  CHECK_THROWS_AS(B.b2_direct(), ValidationError);
}

TEST_CASE("regauging leaves B2 unchanged") {
  std::mt19937 rng(79);
  auto sl2 = named_algebra("sl2", PrimePower(5, 1));
  BocksteinRing base(sl2, {}, 8);
  auto base_dims = base.b2_direct().b2_dims();
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<ExteriorElement> mu;
    for (int t = 0; t < 3; ++t) {
      ExteriorElement m(5, 3);
      for (uint32_t mask : exterior_basis(3, 2)) m.add_term(mask, rng() % 5);
      mu.push_back(m);
    }
    auto moved = regauge(base, mu);
    CHECK_FALSE(moved.beta_squared_defect().has_value());
    CHECK(moved.b2_direct().b2_dims() == base_dims);
    if (trial == 0) {
      bool nontrivial = !moved.eta_zero();
      CHECK(nontrivial);  // the transformation genuinely moved eta
    }
  }
}

TEST_CASE("comodule structure") {
  SECTION("Delta(x_k) = 1 (x) x_k") {
    auto sl2 = named_algebra("sl2", PrimePower(5, 1));
    ComoduleStructure C(sl2, 6);
    for (size_t k = 0; k < 3; ++k) {
      auto d = C.delta_of_x(k);
      CHECK(d.coeffs == C.target().generator(true, 3 + k).coeffs);
    }
  }
  SECTION("abelian: Delta(s_k) = sbar_k (x) 1 + 1 (x) s_k") {
    auto A = named_algebra("abelian", PrimePower(5, 1), 2);
    ComoduleStructure C(A, 6);
    for (size_t k = 0; k < 2; ++k) {
      auto expect = C.target().add(C.target().generator(false, k),
                                   C.target().generator(false, 2 + k));
      CHECK(C.delta_of_s(k).coeffs == expect.coeffs);
    }
  }
  SECTION("sl2: Delta(s_h) has the structure-constant tail t+ (x) x- - t- (x) x+") {
    auto sl2 = named_algebra("sl2", PrimePower(5, 1));
    ComoduleStructure C(sl2, 6);
    auto d = C.delta_of_s(0);
    const auto& T = C.target();
    RingMonomial tp_xm, tm_xp;
    tp_xm.mask = (1u << 1) | (1u << (3 + 2));  // t_{x+} . x-
    tp_xm.exp.assign(6, 0);
    tm_xp.mask = (1u << 2) | (1u << (3 + 1));  // t_{x-} . x+
    tm_xp.exp.assign(6, 0);
    CHECK(d.coeffs[T.index_of(2, tp_xm)] == 1);
    CHECK(d.coeffs[T.index_of(2, tm_xp)] == 4);
  }
  SECTION("Delta commutes with beta on the generators") {
    for (const char* name : {"sl2", "heisenberg", "solvable_S", "so3"}) {
      ComoduleStructure C(named_algebra(name, PrimePower(5, 1)), 6);
      CHECK_NOTHROW(C.verify_beta_compatibility());
    }
    ComoduleStructure C(named_algebra("abelian", PrimePower(3, 1), 3), 6);
    CHECK_NOTHROW(C.verify_beta_compatibility());
  }
}

TEST_CASE("lhs e3 desk check") {
  SECTION("abelian") {
    auto A = named_algebra("abelian", PrimePower(5, 1), 2);
    auto dims = lhs_e3_dims(A, 6);
    for (unsigned d = 0; d < 6; ++d) CHECK(dims[d] == free_ring_dim(2, 2, d));
  }
  SECTION("sl2 and the non-Lie specimen give the same answer") {
    for (bool lie : {true, false}) {
      auto L = lie ? named_algebra("sl2", PrimePower(5, 1)) : nonlie3(5);
      auto dims = lhs_e3_dims(L, 6);
      for (unsigned d = 0; d < 6; ++d) {
        INFO((lie ? "sl2" : "nonlie") << " degree " << d);
        CHECK(dims[d] == free_ring_dim(3, 3, d));
      }
    }
  }
}

TEST_CASE("bockstein input validation") {
  auto sl2 = named_algebra("sl2", PrimePower(5, 1));
  SECTION("truncation floor") { CHECK_THROWS_AS(BocksteinRing(sl2, {}, 3), ValidationError); }
  SECTION("eta forms must have degree 3") {
    std::vector<ExteriorElement> eta(3, ExteriorElement(5, 3));
    eta[0] = ExteriorElement::basis_term(5, 3, 0b011);  // degree 2
    CHECK_THROWS_AS(BocksteinRing(sl2, eta, 6), ValidationError);
  }
  SECTION("element beyond truncation - 1 cannot be differentiated") {
    BocksteinRing B(sl2, {}, 6);
    auto top = B.ring().zero(6);
    CHECK_THROWS_AS(B.apply_beta(top), ValidationError);
  }
}

TEST_CASE("b2 report json shape") {
  auto sl2 = named_algebra("sl2", PrimePower(5, 1));
  BocksteinRing B(sl2, {}, 6);
  auto j = b2_report_to_json(B.b2_direct());
  CHECK(j["eta_zero"] == true);
  CHECK(j["degrees"].size() == 6);
  CHECK(j["degrees"][3]["b2"] == 1);
  CHECK(j["degrees"][3]["d"] == 3);
}
