#include <gtest/gtest.h>

#include <random>

#include "ltlab/recip.hpp"

using namespace ltlab;

namespace {

std::vector<Character> exact_conductor(const FieldPtr& L, const FieldPtr& K, int n) {
  std::vector<Character> out;
  for (auto& d : all_characters(L, K, n, FieldElem(K, 3L)))
    if (d.conductor() == n) out.push_back(d);
  return out;
}

Measure random_measure(const FieldPtr& L, const FieldPtr& K, int n, std::mt19937& rng) {
  RingPtr R = ResidueRing::make(L, n);
  std::uniform_int_distribution<int> c(-5, 5);
  std::vector<OmegaScalar> m(R->size(), OmegaScalar(K));
  for (auto& x : m) x = OmegaScalar::rational(K, c(rng));
  return Measure::cosets(L, n, m);
}

// Brute-force Gauss sum over (o/pi^n)^x
FieldElem gauss(const Character& d, const AdditiveCharacter& psi) {
  RingPtr R = ResidueRing::make(d.base(), psi.level());
  FieldPtr K = common_field(FieldElem(d.values()), FieldElem(psi.values()));
  FieldElem s(K);
  for (long u : R->units()) s += d.rho(R->elem(u)).coerce_to(K) * psi(R->elem(u)).coerce_to(K);
  return s;
}

}  // namespace

TEST(Descent, RamifiedBranchRandomMeasures) {
  std::mt19937 rng(11);
  struct Cfg {
    FieldPtr L;
    int n;
  };
  for (auto c : {Cfg{catalog::qp(3), 1}, Cfg{catalog::qp(5), 1}, Cfg{catalog::qp(3), 2}}) {
    AdditiveCharacter psi = AdditiveCharacter::standard(c.L, c.n);
    FieldPtr K = psi.values();
    auto chars = exact_conductor(c.L, K, c.n);
    ASSERT_FALSE(chars.empty());
    for (auto& d : chars)
      for (int t = 0; t < 20; ++t) {
        Measure mu = random_measure(c.L, K, c.n, rng);
        EXPECT_EQ(lhs_trace_theta_iota(mu, d, psi), rhs_interpolation(mu, d, psi)) << d.str();
      }
  }
}

TEST(Descent, DiracAtUnitIsAGaussSum) {
  FieldPtr L = catalog::qp(5);
  AdditiveCharacter psi = AdditiveCharacter::standard(L, 1);
  FieldPtr K = psi.values();
  for (auto& d : exact_conductor(L, K, 1)) {
    Measure one = Measure::dirac(FieldElem(L, 1L), 1, OmegaScalar::rational(K, 1));
    FieldElem expect = gauss(d, psi) * (d.pi_value() * Rational(5)).inverse();
    EXPECT_EQ(lhs_trace_theta_iota(one, d, psi), OmegaScalar(expect));
    OmegaScalar E = interp_constant(d, InterpVariant::C, psi);
    EXPECT_EQ(rhs_interpolation(one, d, psi), E * d.at_minus_one());
    Measure at_pi = Measure::dirac(FieldElem(L, 5L), 1, OmegaScalar::rational(K, 1));
    EXPECT_TRUE(rhs_interpolation(at_pi, d, psi).is_zero());
    EXPECT_TRUE(lhs_trace_theta_iota(at_pi, d, psi).is_zero());
  }
}

TEST(Descent, UnramifiedBranchPsiEigenMeasures) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> c(-5, 5);
  for (auto L : {catalog::qp(3), catalog::qp(5), catalog::qp_sqrt_p(3)})
    for (int n : {1, 2}) {
      if (n == 2 && L->e() > 1) continue;
      AdditiveCharacter psi = AdditiveCharacter::standard(L, n);
      FieldPtr K = psi.values();
      RingPtr R = ResidueRing::make(L, n);
      for (long a : {2L, -1L, 4L}) {
        FieldElem alpha(K, Rational(a));
        Character d = Character::unramified(L, K, alpha);
        std::vector<OmegaScalar> um;
        OmegaScalar units(K);
        for (std::size_t k = 0; k < R->units().size(); ++k) {
          um.push_back(OmegaScalar::rational(K, c(rng)));
          units += um.back();
        }
        Measure mu = psi_eigen_measure(L, n, alpha, um);
        FieldElem one(K, 1L), q(K, Rational(L->q_long()));
        OmegaScalar expect = units * ((one - (q * alpha).inverse()) / (one - alpha));
        EXPECT_EQ(lhs_trace_theta_iota(mu, d, psi), expect);
        EXPECT_EQ(rhs_interpolation(mu, d, psi), expect);
      }
    }
  EXPECT_THROW(rhs_interpolation(Measure::dirac(FieldElem(catalog::qp(3), 1L)),
                                 Character::trivial(catalog::qp(3), catalog::qp(3)),
                                 AdditiveCharacter::standard(catalog::qp(3), 1)),
               ExceptionalPole);
}

TEST(Descent, GridAndErrors) {
  std::vector<DescentGridEntry> grid{{catalog::qp(3), 1, 20}, {catalog::qp(5), 1, 5}, {catalog::qp(3), 2, 3}};
  auto reps = verify_descent(grid, 7);
  EXPECT_GT(reps.size(), 40u);
  for (auto& r : reps) EXPECT_TRUE(r.equal) << r.delta << " " << r.measure;
  EXPECT_THROW(verify_descent({{catalog::qp(2), 1, 1}}, 1), Unsupported);
  FieldPtr L = catalog::qp(3);
  AdditiveCharacter psi1 = AdditiveCharacter::standard(L, 1);
  FieldPtr K2 = value_field(L, cyclotomic_level_for(L, 2));
  auto deep = exact_conductor(L, K2, 2);
  EXPECT_THROW(lhs_trace_theta_iota(Measure::dirac(FieldElem(L, 1L)), deep.front(), psi1), ConductorExceedsLevel);
}

TEST(Descent, IotaCrossCheckCyclotomicLevelOne) {
  std::mt19937 rng(3);
  auto G = FormalGroup::cyclotomic(3, 8);
  auto tw = G->torsion_tower(1);
  FieldPtr L = G->field(), K = tw.top();
  AdditiveCharacter psi(L, K, 1);
  for (auto& d : all_characters(L, K, 1, FieldElem(K, 2L)))
    for (int t = 0; t < 5; ++t) {
      Measure mu = random_measure(L, K, 1, rng);
      EXPECT_EQ(lhs_via_iota(*G, tw, mu, d), lhs_trace_theta_iota(mu, d, psi));
    }
}

TEST(CharSum, VanishingAndRamanujan) {
  struct Cfg {
    FieldPtr L;
    int n;
  };
  for (auto c : {Cfg{catalog::qp(3), 1}, Cfg{catalog::qp(3), 2}, Cfg{catalog::qp(5), 1}}) {
    AdditiveCharacter psi = AdditiveCharacter::standard(c.L, c.n);
    FieldPtr K = psi.values();
    RingPtr R = ResidueRing::make(c.L, c.n);
    long q = c.L->q_long();
    for (auto& d : exact_conductor(c.L, K, c.n))
      for (long j = 0; j < R->size(); ++j)
        if (!R->is_unit(j)) EXPECT_TRUE(char_sum(d, R->elem(j), psi).is_zero());
    if (c.n == 1) {
      Character triv = Character::trivial(c.L, K);
      EXPECT_EQ(char_sum(triv, FieldElem(c.L, 1L), psi), FieldElem(K, -1L));
      EXPECT_EQ(char_sum(triv, FieldElem::uniformizer(c.L), psi), FieldElem(K, q - 1));
    }
  }
  FieldPtr L = catalog::qp(5);
  AdditiveCharacter psi = AdditiveCharacter::standard(L, 2);
  FieldPtr K = psi.values();
  int found = 0;
  for (auto& d : exact_conductor(L, K, 2)) {
    ++found;
    EXPECT_TRUE(char_sum(d, FieldElem(L, 5L), psi).is_zero());
  }
  EXPECT_GT(found, 0);
}

TEST(Residues, ExceptionalResidue) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> c(-6, 6);
  for (auto G : {FormalGroup::special(catalog::qp(3), 12), FormalGroup::cyclotomic(5, 12),
                 FormalGroup::special(catalog::qp_sqrt_p(3), 12)}) {
    FieldPtr L = G->field();
    long q = G->q();
    EXPECT_EQ(exceptional_residue(*G, Series::constant(FieldElem(L, 1L))), OmegaScalar::rational(L, Rational(1 - q, q)));
    for (int t = 0; t < 10; ++t) {
      std::vector<FieldElem> co;
      for (int k = 0; k < 4; ++k) co.push_back(FieldElem(L, static_cast<long>(c(rng))));
      Series f = Series::from_elems(L, 0, co, Series::kExact);
      EXPECT_EQ(exceptional_residue(*G, f), OmegaScalar(co[0] * Rational(1 - q, q)));
    }
    EXPECT_THROW(exceptional_residue(*G, Series::monomial(FieldElem(L, 1L), -1)), HigherOrderPole);
  }
}

TEST(Residues, CyclotomicColemanElement) {
  for (unsigned long p : {3ul, 5ul}) {
    auto G = FormalGroup::cyclotomic(p, 12);
    FieldPtr L = G->field();
    Series Z = Series::variable(L);
    // dg/g dt_LT with g = Z is dZ / Z
    Series dlog = G->invariant_derivative(Z.truncate(12)) * Z.inverse();
    EXPECT_EQ(residue_map(*G, dlog), OmegaScalar::rational(L, 1));
    Series h = (Series::constant(FieldElem(L, 1L)) + Z) * Z.inverse();
    EXPECT_EQ(psi_newton(*G, h), h);
  }
}

TEST(Residues, LogColemanConstant) {
  auto C = FormalGroup::cyclotomic(3, 10);
  FieldPtr Q3 = C->field();
  Series Z = Series::variable(Q3);
  EXPECT_TRUE(log_coleman_constant(*C, Z, FieldElem(Q3, 1L)).is_zero());
  for (long a : {4L, -2L, 7L, 10L})
    EXPECT_EQ(log_coleman_constant(*C, Z, FieldElem(Q3, a)), padic_log(FieldElem(Q3, a), kDefaultDigits));
  EXPECT_THROW(log_coleman_constant(*C, Z, FieldElem(Q3, 2L)), OutOfConvergenceDomain);
  auto G = FormalGroup::special(catalog::qp(5), 10);
  FieldPtr Q5 = G->field();
  Series g = Series::from_elems(Q5, 1, {FieldElem(Q5, 2L), FieldElem(Q5, 3L), FieldElem(Q5, -1L)}, Series::kExact);
  EXPECT_EQ(log_coleman_constant(*G, g, FieldElem(Q5, 6L)), padic_log(FieldElem(Q5, 6L), kDefaultDigits));
  Measure lam = Measure::dirac(FieldElem(Q5, 6L));
  lam.add(FieldElem(Q5, 11L), OmegaScalar::rational(Q5, -2));
  EXPECT_EQ(log_coleman_dirac(*G, g, lam), derivative_at(lam));
}

TEST(Scalars, ConstantsAndTwisting) {
  for (auto G : {FormalGroup::special(catalog::qp(3), 8), FormalGroup::cyclotomic(5, 8),
                 FormalGroup::special(catalog::qp_sqrt_p(3), 8)}) {
    auto r = scalar_constants_suite(*G);
    EXPECT_TRUE(r.product);
    EXPECT_TRUE(r.shift);
    EXPECT_TRUE(r.thetabar);
    FieldPtr L = G->field();
    AdditiveCharacter psi = AdditiveCharacter::standard(L, 1);
    for (long a : {2L, -1L, 7L}) EXPECT_TRUE(twisting_consistency(Character::unramified(L, L, FieldElem(L, a)), psi));
  }
}
