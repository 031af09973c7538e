#include <gtest/gtest.h>

#include "ltlab/chareps.hpp"

using namespace ltlab;

namespace {

// Legendre symbol mod 3 lifted to a level-2 table on (Z/9)^x.
Character legendre_mod3_level2(const FieldPtr& K) {
  FieldPtr L = catalog::qp(3);
  RingPtr R = ResidueRing::make(L, 2);
  std::vector<FieldElem> t(R->size(), FieldElem(K));
  for (long u : R->units()) {
    long x = R->elem(u).to_rational().get_num().get_si();
    t[u] = FieldElem(K, (x % 3 == 1) ? 1L : -1L);
  }
  return Character(L, K, FieldElem(K, 1L), R, t);
}

struct Config {
  FieldPtr L;
  int n;
};

std::vector<Config> grid() {
  return {{catalog::qp(3), 1}, {catalog::qp(5), 1}, {catalog::qp_sqrt_p(3), 1}, {catalog::qp(3), 2}};
}

}  // namespace

TEST(ResidueRing, CodesRoundTrip) {
  for (auto& c : grid()) {
    RingPtr R = ResidueRing::make(c.L, c.n);
    long q = c.L->q_long();
    EXPECT_EQ(R->size(), c.n == 1 ? q : q * q);
    EXPECT_EQ(static_cast<long>(R->units().size()), R->size() - R->size() / q);
    for (long a = 0; a < R->size(); ++a) EXPECT_EQ(R->code(R->elem(a)), a);
    // adding pi^n does not change the class
    FieldElem pin = FieldElem::uniformizer(c.L).pow(c.n);
    for (long a = 0; a < R->size(); ++a) EXPECT_EQ(R->code(R->elem(a) + pin * Rational(7)), a);
  }
  EXPECT_EQ(ResidueRing::make(catalog::qp(3), 2)->exponent(), 6);
  EXPECT_EQ(ResidueRing::make(catalog::qp(5), 1)->exponent(), 4);
}

TEST(AdditiveCharacter, AdditiveAndConductorZero) {
  for (auto& c : grid()) {
    AdditiveCharacter psi = AdditiveCharacter::standard(c.L, c.n);
    RingPtr R = ResidueRing::make(c.L, c.n);
    FieldElem one(psi.values(), 1L);
    for (long a = 0; a < R->size(); ++a)
      for (long b = 0; b < R->size(); ++b)
        EXPECT_EQ(psi(R->elem(a) + R->elem(b)), psi(R->elem(a)) * psi(R->elem(b)));
    // trivial on pi^n o_L, nontrivial on pi^{n-1} o_L
    FieldElem pin = FieldElem::uniformizer(c.L).pow(c.n);
    for (long a = 0; a < R->size(); ++a) EXPECT_EQ(psi(R->elem(a) * pin), one);
    bool nontrivial = false;
    FieldElem pin1 = FieldElem::uniformizer(c.L).pow(c.n - 1);
    for (long a = 0; a < R->size(); ++a)
      if (psi(R->elem(a) * pin1) != one) nontrivial = true;
    EXPECT_TRUE(nontrivial);
  }
}

TEST(AdditiveCharacter, DifferentOfRamifiedQuadratic) {
  FieldPtr L = catalog::qp_sqrt_p(3);
  FieldElem d = different_generator(L);
  EXPECT_EQ(d, FieldElem::uniformizer(L) * Rational(2));
  EXPECT_EQ(different_generator(catalog::qp(5)), FieldElem(catalog::qp(5), 1L));
}

TEST(Character, Conductor) {
  FieldPtr L = catalog::qp(3);
  FieldPtr K = value_field(L, 2);
  EXPECT_EQ(Character::trivial(L, K).conductor(), 0);
  EXPECT_EQ(legendre_mod3_level2(K).conductor(), 1);
  int counts[3] = {0, 0, 0};
  for (auto& d : all_characters(L, K, 2, FieldElem(K, 1L))) counts[d.conductor()]++;
  EXPECT_EQ(counts[0], 1);
  EXPECT_EQ(counts[1], 1);
  EXPECT_EQ(counts[2], 4);
  Character with_s(L, K, FieldElem(K, 1L), nullptr, {}, 0, FieldElem(K, 3L));
  EXPECT_THROW(with_s.conductor(), NotLocallyConstantOnUnits);
  // the Weil character keeps the unit part
  Character d = legendre_mod3_level2(K) * Character::x_pow(L, K, 3);
  EXPECT_EQ(weil_character(d).conductor(), 1);
}

TEST(Character, EnumerationIsTheDualGroup) {
  for (auto& c : grid()) {
    FieldPtr K = value_field(c.L, cyclotomic_level_for(c.L, c.n));
    auto chars = all_characters(c.L, K, c.n, FieldElem(K, 1L));
    RingPtr R = ResidueRing::make(c.L, c.n);
    EXPECT_EQ(chars.size(), R->units().size());
    for (std::size_t i = 0; i < chars.size(); ++i) {
      for (std::size_t j = i + 1; j < chars.size(); ++j) EXPECT_FALSE(chars[i] == chars[j]);
      for (long a : R->units())
        for (long b : R->units())
          EXPECT_EQ(chars[i].rho(R->elem(R->mul(a, b))), chars[i].rho(R->elem(a)) * chars[i].rho(R->elem(b)));
    }
  }
}

TEST(Character, Classification) {
  FieldPtr L = catalog::qp(3);
  auto c1 = classify(Character::x_pow(L, L, -2));
  EXPECT_EQ(c1.kind, Classification::Kind::Sigma1);
  EXPECT_EQ(c1.index, 2);
  auto c2 = classify(Character::chi(L, L));
  EXPECT_EQ(c2.kind, Classification::Kind::Sigma2);
  EXPECT_EQ(c2.index, 0);
  auto c3 = classify(Character::unramified(L, L, FieldElem(L, 2L)));
  EXPECT_EQ(c3.kind, Classification::Kind::Generic);
  EXPECT_TRUE(c3.de_rham);
  EXPECT_EQ(c3.weight, 0);
  EXPECT_EQ(classify(Character::x_pow(L, L, 2)).kind, Classification::Kind::Generic);
  EXPECT_TRUE(classify(Character::x_pow(L, L, 2)).exceptional);
  Character s(L, L, FieldElem(L, 1L), nullptr, {}, 0, FieldElem(L, 3L));
  EXPECT_FALSE(classify(s).de_rham);
}

TEST(Character, WeightIsAdditive) {
  FieldPtr L = catalog::qp(5);
  EXPECT_EQ(Character::x_pow(L, L, 4).weight(), FieldElem(L, 4L));
  Character a = Character::x_pow(L, L, 2), b = Character::x_pow(L, L, -5);
  EXPECT_EQ((a * b).weight(), FieldElem(L, -3L));
  Character s(L, L, FieldElem(L, 1L), nullptr, {}, 1, FieldElem(L, 5L));
  EXPECT_EQ((s * a).weight(), FieldElem(L, 8L));
}

TEST(Epsilon, QuadraticGaussSumOverQ3) {
  FieldPtr L = catalog::qp(3);
  AdditiveCharacter psi = AdditiveCharacter::standard(L, 1);
  FieldPtr K = psi.values();
  RingPtr R = ResidueRing::make(L, 1);
  std::vector<FieldElem> t(R->size(), FieldElem(K));
  t[R->code(FieldElem(L, 1L))] = FieldElem(K, 1L);
  t[R->code(FieldElem(L, 2L))] = FieldElem(K, -1L);
  Character d(L, K, FieldElem(K, 1L), R, t);
  FieldElem eps = gauss_sum_epsilon(d, psi);
  EXPECT_TRUE(eps.is_exact());
  EXPECT_EQ(eps * eps, FieldElem(K, -3L));
  // zeta - zeta^2 with zeta = 1 + X in Q_3[X]/(X^2 + 3X + 3)
  FieldElem z = FieldElem::gen(K, 1) + Rational(1);
  EXPECT_TRUE(eps == z - z * z || eps == z * z - z);
  EXPECT_EQ(gauss_sum_epsilon(Character::unramified(L, K, FieldElem(K, 2L)), psi), FieldElem(K, 1L));
  EXPECT_EQ(gauss_sum_epsilon(Character::unramified(L, K, FieldElem(K, 2L)), psi, 2), FieldElem(K, 36L));
}

TEST(Epsilon, DualityAndNormRelationExhaustive) {
  for (auto& c : grid()) {
    AdditiveCharacter psi = AdditiveCharacter::standard(c.L, c.n);
    FieldPtr K = psi.values();
    Character absx = Character::abs(c.L, K);
    FieldElem qq(K, Rational(c.L->q_long()));
    for (long npsi : {0L, 1L}) {
      for (FieldElem cpi : {FieldElem(K, 1L), FieldElem(K, 2L), FieldElem::uniformizer(c.L).coerce_to(K)}) {
        for (auto& d : all_characters(c.L, K, c.n, cpi)) {
          if (d.conductor() > c.n) continue;
          Character dual = d.inverse() * absx;
          FieldElem lhs = gauss_sum_epsilon(d, psi, npsi) * gauss_sum_epsilon(dual, psi, npsi);
          EXPECT_EQ(lhs, d.at_minus_one() * qq.pow(npsi)) << c.L->name() << " " << d.str();
          FieldElem norm = gauss_sum_epsilon(dual, psi, npsi);
          EXPECT_EQ(norm, qq.pow(-d.conductor() - npsi) * gauss_sum_epsilon(d.inverse(), psi, npsi));
        }
      }
    }
  }
}

TEST(Epsilon, GaussSumOverQ5AgainstDirectSum) {
  FieldPtr L = catalog::qp(5);
  AdditiveCharacter psi = AdditiveCharacter::standard(L, 1);
  FieldPtr K = psi.values();
  FieldElem zeta5 = FieldElem::gen(K, 1) + Rational(1);
  FieldElem i4 = root_of_unity(K, 4, kDefaultDigits);
  // the character sending the generator 2 to i4^t
  for (long t = 0; t < 4; ++t) {
    RingPtr R = ResidueRing::make(L, 1);
    std::vector<FieldElem> tab(R->size(), FieldElem(K));
    long g = 1;
    for (long j = 0; j < 4; ++j) {
      tab[R->code(FieldElem(L, g))] = i4.pow(j * t);
      g = g * 2 % 5;
    }
    Character d(L, K, FieldElem(K, 1L), R, tab);
    FieldElem direct(K);
    g = 1;
    for (long j = 0; j < 4; ++j) {
      direct += i4.pow(-j * t) * zeta5.pow(g);
      g = g * 2 % 5;
    }
    if (t == 0) direct = FieldElem(K, 1L);
    EXPECT_EQ(gauss_sum_epsilon(d, psi), direct) << t;
  }
}

TEST(Epsilon, EquivariantScalingLaw) {
  for (auto& c : grid()) {
    AdditiveCharacter psi = AdditiveCharacter::standard(c.L, c.n);
    FieldPtr K = psi.values();
    for (auto& d : all_characters(c.L, K, c.n, FieldElem(K, 3L))) {
      EquivariantEps E = equivariant_epsilon(d, psi);
      FieldElem base = gauss_sum_epsilon(d, psi);
      EXPECT_EQ(E.at(E.R->one()), base);
      Character dw = weil_character(d);
      for (std::size_t i = 0; i < E.classes.size(); ++i)
        EXPECT_EQ(E.values[i], dw.rho(E.R->elem(E.classes[i])) * base);
    }
    EquivariantEps triv = equivariant_epsilon(Character::trivial(c.L, K), psi);
    for (auto& v : triv.values) EXPECT_EQ(v, FieldElem(K, 1L));
  }
}

TEST(Constants, CrystallineFactor) {
  FieldPtr L = catalog::qp(3);
  Character d = Character::unramified(L, L, FieldElem(L, 2L));
  EXPECT_EQ(crystalline_factor(d).to_rational(), Rational(-5, 6));
  // alpha is unchanged by twisting with x
  Character dx = d * Character::x_pow(L, L, 1);
  EXPECT_EQ(crystalline_factor(dx), crystalline_factor(d));
  EXPECT_THROW(crystalline_factor(Character::x_pow(L, L, 3)), ExceptionalPole);
  FieldPtr K = value_field(L, 1);
  EXPECT_THROW(crystalline_factor(legendre_mod3_level2(value_field(L, 2))), RamifiedCharacter);
  (void)K;
}

TEST(Constants, GammaFactors) {
  FieldPtr L = catalog::qp(3);
  EXPECT_EQ(gamma_factor(L, {{1, 1}}), OmegaScalar::omega_pow(L, -1));
  EXPECT_EQ(gamma_factor(L, {{0, 1}}), OmegaScalar::rational(L, 1));
  for (long k = -4; k <= 4; ++k) {
    OmegaScalar prod = gamma_factor(L, {{k, 1}}) * gamma_factor(L, {{1 - k, 1}});
    long h = k, t = k >= 1 ? 1 : 0;
    OmegaScalar expect(FieldElem(L, ((h + t) % 2 == 0) ? 1L : -1L), -1);
    EXPECT_EQ(prod, expect) << k;
  }
  EXPECT_EQ(gamma_star(3), Rational(2));
  EXPECT_EQ(gamma_star(-3), Rational(-1, 6));
}

TEST(Constants, InterpolationConstants) {
  FieldPtr L = catalog::qp(3);
  AdditiveCharacter psi = AdditiveCharacter::standard(L, 1);
  Character d = Character::unramified(L, L, FieldElem(L, 2L));
  EXPECT_EQ(interp_constant(d, InterpVariant::C, psi), OmegaScalar::rational(L, Rational(-5, 6)));
  Character dx = d * Character::x_pow(L, L, 1);
  EXPECT_EQ(interp_constant(dx, InterpVariant::Cprime, psi), interp_constant(d, InterpVariant::C, psi).times_omega(1));
  EXPECT_THROW(interp_constant(dx, InterpVariant::C, psi), WrongVariant);
  // ramified weight 0: the inverse epsilon componentwise
  FieldPtr K = psi.values();
  for (auto& r : all_characters(L, K, 1, FieldElem(K, 5L))) {
    if (r.conductor() == 0) continue;
    auto comps = interp_constant_equivariant(r, InterpVariant::C, psi);
    EquivariantEps E = equivariant_epsilon(r, psi);
    for (std::size_t i = 0; i < comps.size(); ++i) EXPECT_EQ(comps[i], OmegaScalar(E.values[i].inverse()));
  }
  // weight -2 carries (-Omega)^k / (-k)!
  Character dm2 = d * Character::x_pow(L, L, -2);
  EXPECT_EQ(interp_constant(dm2, InterpVariant::C, psi),
            OmegaScalar(FieldElem(L, Rational(1, 2)), -2) * crystalline_factor(dm2));
}

TEST(Constants, WeilCharacter) {
  FieldPtr L = catalog::qp(5);
  Character w = weil_character(Character::x_pow(L, L, 3));
  EXPECT_EQ(w.pi_value(), FieldElem::uniformizer(L).pow(-3));
  EXPECT_EQ(w.k(), 0);
  Character u = Character::unramified(L, L, FieldElem(L, 7L));
  EXPECT_TRUE(weil_character(u) == u);
  Character s(L, L, FieldElem(L, 1L), nullptr, {}, 0, FieldElem(L, 5L));
  EXPECT_THROW(weil_character(s), NotDeRham);
}
