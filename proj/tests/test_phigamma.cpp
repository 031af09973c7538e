#include <gtest/gtest.h>

#include <random>

#include "ltlab/phigamma.hpp"

using namespace ltlab;

namespace {

constexpr long kD = 28;

Series random_poly(const FieldPtr& L, std::mt19937& rng, long lo, long hi) {
  std::uniform_int_distribution<int> c(-4, 4);
  std::vector<FieldElem> v;
  for (long k = lo; k <= hi; ++k) v.push_back(FieldElem(L, static_cast<long>(c(rng))));
  return Series::from_elems(L, lo, v, Series::kExact);
}

std::vector<GroupPtr> groups() {
  return {FormalGroup::cyclotomic(3, kD), FormalGroup::special(catalog::qp(3), kD),
          FormalGroup::special(catalog::qp_sqrt_p(3), kD), FormalGroup::cyclotomic(2, kD)};
}

// a few units of Z_p, avoiding multiples of p
std::vector<long> unit_samples(const FieldPtr& L) {
  long p = static_cast<long>(L->p());
  return {-1, p + 1, p == 2 ? 5 : 2};
}

}  // namespace

TEST(Psi, HandValuesForCyclotomicTwo) {
  auto G = FormalGroup::cyclotomic(2, kD);
  FieldPtr L = G->field();
  // roots of (1+X)^2 - 1 = Y sum to -2, so Psi(Z) = -1 and Psi(1 + Z) = 0
  EXPECT_EQ(psi_newton(*G, Series::variable(L)), Series::constant(FieldElem(L, -1L)));
  EXPECT_TRUE(psi_newton(*G, Series::variable(L) + Series::constant(FieldElem(L, 1L))).is_zero());
  // Psi(Z^2) = Psi(phi(Z) - 2Z) = Z + 2
  Series Z = Series::variable(L);
  EXPECT_EQ(psi_newton(*G, Z * Z), Z + Series::constant(FieldElem(L, 2L)));
}

TEST(Psi, LeftInverseOfPhi) {
  std::mt19937 rng(7);
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    Rational ratio = Rational(G->q());
    for (int trial = 0; trial < 50; ++trial) {
      Series f = random_poly(L, rng, 0, trial % 6);
      Series pf = phi_series(*G, f);
      EXPECT_EQ(psi_newton(*G, pf), f);
      ModulePtr M = make_module(G, Character::trivial(L, L));
      ModuleElem m{M, f};
      EXPECT_EQ(psi(phi(m)).f, f * (G->pi().inverse() * ratio));
    }
  }
}

TEST(Psi, ProjectionFormulaWithPoles) {
  std::mt19937 rng(11);
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    for (int trial = 0; trial < 20; ++trial) {
      Series f1 = random_poly(L, rng, 0, 3);
      Series f2 = random_poly(L, rng, -3, 4);
      EXPECT_EQ(psi_newton(*G, phi_series(*G, f1) * f2), f1 * psi_newton(*G, f2));
    }
  }
}

TEST(Psi, AgreesWithTorsionTrace) {
  std::mt19937 rng(3);
  for (auto& G : {FormalGroup::cyclotomic(3, kD), FormalGroup::special(catalog::qp(3), kD)}) {
    FieldPtr L = G->field();
    TorsionTower tw = G->torsion_tower(1);
    for (int trial = 0; trial < 6; ++trial) {
      Series f = random_poly(L, rng, 0, 7);
      Series h = trace_over_q(*G, f, tw, 16);
      Series newton = psi_newton(*G, f);
      EXPECT_EQ(phi_series(*G, newton).truncate(16), h) << G->field()->name();
      ModuleElem m{make_module(G, Character::unramified(L, L, FieldElem(L, 2L))), f};
      EXPECT_EQ(Psi_trace(m, tw).f, Psi(m).f);
    }
  }
}

TEST(Psi, EtaOrthogonality) {
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    FieldElem pi = G->pi();
    AdditiveCharacter psi1 = AdditiveCharacter::standard(L, 1);
    for (long u : unit_samples(L)) {
      EtaSpan s = EtaSpan::single(FieldElem(L, u), OmegaScalar::rational(L, 1));
      EXPECT_TRUE(psi_span_trace(s, psi1).is_zero());
      EXPECT_TRUE(psi_span(s).is_zero()) << L->name() << " " << u;
    }
    for (long j : {1L, 2L}) {
      EtaSpan s = EtaSpan::single(pi * Rational(j), OmegaScalar::rational(L, 1));
      EXPECT_TRUE(psi_span_trace(s, psi1) == EtaSpan::single(FieldElem(L, j), OmegaScalar::rational(L, 1)));
    }
    // eta(pi x) = phi(eta(x)) as series, so Psi of it is eta(x)
    EXPECT_EQ(phi_series(*G, G->eta(FieldElem(L, 2L)), kD), G->eta(pi * Rational(2)));
  }
}

TEST(EtaSpan, SymbolicRulesMatchSeries) {
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    FieldElem pi = G->pi();
    EtaSpan s(L);
    s.add(FieldElem(L, 1L), OmegaScalar::rational(L, 2));
    s.add(pi, OmegaScalar::rational(L, -1));
    s.add(pi * Rational(2) + pi * pi, OmegaScalar(FieldElem(L, 3L), 1));
    s.add(FieldElem(L), OmegaScalar::rational(L, 5));
    Series S = s.to_series(*G);
    EXPECT_THROW(psi_newton(*G, S), TruncationTooShort);
    EXPECT_EQ(phi_series(*G, S, kD), phi_span(s).to_series(*G));
    EXPECT_EQ(G->invariant_derivative(S), partial_span(s).to_series(*G));
    FieldElem a(L, unit_samples(L)[2]);
    ModuleElem m{make_module(G, Character::trivial(L, L)), S};
    EXPECT_EQ(gamma_act(a, m).f, gamma_span(a, s).to_series(*G));
    EXPECT_EQ((s * s).to_series(*G), S * S);
    // phi Psi keeps exactly the eta(j) with pi | j
    EtaSpan kept = phi_span(psi_span(s));
    EXPECT_EQ(kept.terms().size(), 3u);
    EXPECT_TRUE(psi_span(phi_span(s)) == s);
    AdditiveCharacter psi1 = AdditiveCharacter::standard(L, 1);
    EXPECT_TRUE(psi_span_trace(s, psi1) == psi_span(s));
  }
}

TEST(Gamma, ActionProperties) {
  std::mt19937 rng(5);
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    ModulePtr M = make_module(G, Character::x_pow(L, L, 2));
    for (int trial = 0; trial < 5; ++trial) {
      ModuleElem m{M, random_poly(L, rng, -2, 5)};
      EXPECT_EQ(gamma_act(FieldElem(L, 1L), m), m);
      FieldElem a(L, unit_samples(L)[2]), b(L, unit_samples(L)[1]);
      EXPECT_EQ(gamma_act(a * b, m), gamma_act(a, gamma_act(b, m)));
      // the derivative is twisted by the unit: d o gamma = a gamma o d on series
      ModuleElem plain{make_module(G, Character::trivial(L, L)), m.f};
      Series lhs = G->invariant_derivative(gamma_act(a, plain).f);
      Series rhs = gamma_act(a, {plain.M, G->invariant_derivative(m.f)}).f * a;
      EXPECT_EQ(lhs, rhs);
    }
    long u = unit_samples(L)[2];
    EXPECT_EQ(gamma_act(FieldElem(L, u), ModuleElem{M, Series::constant(FieldElem(L, 1L))}).f,
              Series::constant(FieldElem(L, u * u)));
  }
}

TEST(Phi, ScalarAndVariable) {
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    Character d = Character::unramified(L, L, FieldElem(L, 7L));
    ModuleElem e{make_module(G, d), Series::constant(FieldElem(L, 1L))};
    EXPECT_EQ(phi(e).f, Series::constant(FieldElem(L, 7L)));
    ModuleElem z{make_module(G, Character::trivial(L, L)), Series::variable(L)};
    EXPECT_EQ(phi(z).f, G->frobenius());
    ModuleElem pole{z.M, Series::monomial(FieldElem(L, 1L), -1)};
    EXPECT_THROW(phi(pole), NonConvergentComposition);
  }
}

TEST(Pairing, NormalizationInvarianceAndPsi) {
  std::mt19937 rng(17);
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    Character chi = Character::chi(L, L), one = Character::trivial(L, L);
    ModuleElem zinv{make_module(G, chi), Series::monomial(FieldElem(L, 1L), -1)};
    ModuleElem e1{make_module(G, one), Series::constant(FieldElem(L, 1L))};
    EXPECT_EQ(residue_pairing(zinv, e1), OmegaScalar::rational(L, 1));
    EXPECT_THROW(residue_pairing(zinv, zinv), CharacterMismatch);

    Character d = Character::x_pow(L, L, 3) * Character::unramified(L, L, FieldElem(L, 5L));
    ModulePtr A = make_module(G, d), B = make_module(G, chi * d.inverse());
    for (int trial = 0; trial < 5; ++trial) {
      ModuleElem m{A, random_poly(L, rng, -4, 3)}, mt{B, random_poly(L, rng, -3, 3)};
      OmegaScalar base = residue_pairing(m, mt);
      for (long a : unit_samples(L))
        EXPECT_EQ(residue_pairing(gamma_act(FieldElem(L, a), m), gamma_act(FieldElem(L, a), mt)), base);
      Series f = random_poly(L, rng, -5, 6);
      OmegaScalar lhs = residue_map(*G, psi_newton(*G, f));
      OmegaScalar rhs = residue_map(*G, f) * OmegaScalar(G->pi() * Rational(1, G->q()));
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST(Colmez, TransformIdentities) {
  std::mt19937 rng(23);
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    FieldElem pi = G->pi();
    // f g_LT dZ = dZ/Z gives the constant function 1
    Series f = Series::monomial(FieldElem(L, 1L), -1) * G->g_inv();
    for (long z : {0L, 1L, 2L, 5L}) EXPECT_EQ(colmez_transform(*G, f, FieldElem(L, z)), OmegaScalar::rational(L, 1));
    for (long z : {0L, 3L}) EXPECT_TRUE(colmez_transform(*G, random_poly(L, rng, 0, 5), FieldElem(L, z)).is_zero());
    for (int trial = 0; trial < 5; ++trial) {
      Series h = random_poly(L, rng, -6, 4);
      for (long z : {1L, 2L, 7L}) {
        FieldElem zz(L, z);
        OmegaScalar lhs = colmez_transform(*G, psi_newton(*G, h), zz);
        OmegaScalar rhs = colmez_transform(*G, h, pi * zz) * OmegaScalar(pi * Rational(1, G->q()));
        EXPECT_EQ(lhs, rhs);
      }
    }
  }
}

TEST(Twist, FourTermSequence) {
  std::mt19937 rng(29);
  for (auto& G : groups()) {
    FieldPtr L = G->field();
    ModulePtr M = make_module(G, Character::trivial(L, L));
    ModuleElem c{M, Series::constant(FieldElem(L, 9L))};
    EXPECT_TRUE(twist_partial(c).f.is_zero());
    EXPECT_TRUE(twist_partial(c).M->delta == Character::x_pow(L, L, 1));
    EXPECT_EQ(residue_map(*G, Series::monomial(FieldElem(L, 1L), -1)), OmegaScalar::rational(L, 1));
    for (int trial = 0; trial < 10; ++trial) {
      Series f = random_poly(L, rng, -5, 5);
      EXPECT_TRUE(residue_map(*G, twist_partial({M, f}).f).is_zero());
      // anything with zero residue has a primitive
      Series w = f - G->g_inv() * Series::monomial(FieldElem(L, 1L), -1) * residue_map(*G, f);
      EXPECT_TRUE(residue_map(*G, w).is_zero());
      EXPECT_EQ(G->invariant_derivative(integrate_dt(*G, w)), w);
    }
    EXPECT_THROW(integrate_dt(*G, Series::monomial(FieldElem(L, 1L), -1)), NotInEtaSpan);
  }
}

TEST(Slope, Degrees) {
  auto G = FormalGroup::special(catalog::qp_sqrt_p(3), kD);
  FieldPtr L = G->field();
  EXPECT_EQ(RankOneModule(G, Character::x_pow(L, L, 1)).slope(), Rational(1));
  EXPECT_TRUE(RankOneModule(G, Character::unramified(L, L, FieldElem(L, 2L))).is_etale());
  // chi(pi) = pi / q has v_pi = 1 - 2 here
  EXPECT_EQ(RankOneModule(G, Character::chi(L, L)).slope(), Rational(-1));
  auto H = FormalGroup::special(catalog::qp(5), kD);
  EXPECT_TRUE(RankOneModule(H, Character::chi(H->field(), H->field())).is_etale());
  EXPECT_EQ(RankOneModule(H, Character::x_pow(H->field(), H->field(), -2)).slope(), Rational(-2));
}

TEST(Differentials, ChiIsTheCotangentTwist) {
  auto G = FormalGroup::special(catalog::qp(3), kD);
  FieldPtr L = G->field();
  ModuleElem m{make_module(G, Character::chi(L, L)), Series::constant(FieldElem(L, 1L))};
  EXPECT_EQ(as_differential(m), G->g());
  EXPECT_THROW(as_differential({make_module(G, Character::trivial(L, L)), m.f}), CharacterMismatch);
}
