#include <gtest/gtest.h>

#include <random>

#include "ltlab/lubin_tate.hpp"

using namespace ltlab;

namespace {

// X + Y + XY as an independent closed form.
FieldElem multiplicative_coeff(const FieldPtr& K, long i, long j) {
  if ((i == 1 && j == 0) || (i == 0 && j == 1) || (i == 1 && j == 1)) return FieldElem(K, 1L);
  return FieldElem(K);
}

Series random_poly(const FieldPtr& K, std::mt19937_64& rng, long lo, long len) {
  std::vector<FieldElem> c;
  for (long i = 0; i < len; ++i) c.emplace_back(K, static_cast<long>(rng() % 11) - 5);
  return Series::from_elems(K, lo, c, Series::kExact);
}

}  // namespace

TEST(FormalGroup, TwoAdicSpecialLawIsMultiplicative) {
  auto G = FormalGroup::special(catalog::qp(2), 13);
  const auto& F = G->group_law();
  for (long d = 0; d < 13; ++d)
    for (long i = 0; i <= d; ++i) {
      FieldElem c = F.coeff(i, d - i);
      EXPECT_TRUE(c.is_exact());
      EXPECT_EQ(c, multiplicative_coeff(G->field(), i, d - i)) << i << "," << d - i;
    }
}

TEST(FormalGroup, SpecialLawAssociativeAndSymmetric) {
  auto L = catalog::qp(3);
  auto G = FormalGroup::special(L, 9);
  const auto& F = G->group_law();
  for (long i = 0; i < 9; ++i)
    for (long j = 0; i + j < 9; ++j) EXPECT_EQ(F.coeff(i, j), F.coeff(j, i));
  EXPECT_EQ(F.coeff(1, 0), FieldElem(L, 1L));
  EXPECT_EQ(F.coeff(5, 0), FieldElem(L));
  // F(F(X,Y),W) = F(X,F(Y,W)) checked on the one-parameter family X=a s, Y=b s, W=c s
  for (auto [a, b, c] : {std::tuple{1L, 2L, 3L}, std::tuple{-1L, 4L, 7L}}) {
    auto s = [&](long k) { return Series::monomial(FieldElem(L, k), 1, Series::kExact); };
    Series xy = F.substitute(s(a), s(b), 9), yw = F.substitute(s(b), s(c), 9);
    EXPECT_EQ(F.substitute(xy, s(c), 9), F.substitute(s(a), yw, 9));
  }
}

TEST(FormalGroup, LogExpInverse) {
  auto G = FormalGroup::cyclotomic(3, 12);
  Series t = G->log().with_var(Var::t);
  EXPECT_EQ(G->exp().compose(t).with_var(Var::Z), Series::variable(G->field()).truncate(12));
  // the cyclotomic logarithm is log(1+Z)
  for (long k = 1; k < 12; ++k) EXPECT_EQ(G->log().coeff_elem(k), FieldElem(G->field(), Rational(k % 2 ? 1 : -1, k)));
  EXPECT_EQ(G->g().coeff_elem(0), FieldElem(G->field(), 1L));
}

TEST(FormalGroup, Endomorphisms) {
  auto G = FormalGroup::cyclotomic(3, 10);
  auto K = G->field();
  EXPECT_EQ(G->endomorphism(FieldElem(K, 1L)), Series::variable(K).truncate(10));
  Series m1 = G->endomorphism(FieldElem(K, -1L));
  for (long k = 1; k < 10; ++k) EXPECT_EQ(m1.coeff_elem(k), FieldElem(K, k % 2 ? -1L : 1L));
  auto S = FormalGroup::special(catalog::qp_sqrt_p(3), 10);
  auto L = S->field();
  EXPECT_EQ(S->endomorphism(FieldElem::uniformizer(L)), S->frobenius().truncate(10));
  FieldElem a = FieldElem(L, 2L) + FieldElem::uniformizer(L), b(L, 4L);
  Series ab = S->endomorphism(a * b), ea = S->endomorphism(a), eb = S->endomorphism(b);
  EXPECT_EQ(ea.compose(eb), ab);
  EXPECT_EQ(S->log().compose(ea), S->log() * a);
  // a g(Z) = g([a](Z)) [a]'(Z)
  EXPECT_EQ(S->g() * a, S->g().compose(ea) * ea.derivative());
}

TEST(FormalGroup, InvariantDerivative) {
  auto G = FormalGroup::special(catalog::qp(5), 12);
  auto K = G->field();
  Series dt = G->invariant_derivative(G->log());
  EXPECT_EQ(dt, Series::constant(FieldElem(K, 1L)).truncate(11));
  FieldElem x(K, 3L);
  Series eta = G->eta(x);
  Series lhs = G->invariant_derivative(eta);
  EXPECT_EQ(lhs, eta * OmegaScalar(x, 1));
  std::mt19937_64 rng(11);
  for (int it = 0; it < 5; ++it) {
    Series f = random_poly(K, rng, -2, 5);
    Series phi_f = f.compose(G->frobenius().truncate(14), 14);
    EXPECT_EQ(G->invariant_derivative(phi_f), G->invariant_derivative(f).compose(G->frobenius().truncate(14), 14) * G->pi());
  }
}

TEST(FormalGroup, EtaIdentities) {
  auto G = FormalGroup::special(catalog::qp(3), 10);
  auto K = G->field();
  EXPECT_EQ(G->eta(FieldElem(K)), Series::constant(OmegaScalar::rational(K, 1)).truncate(10));
  FieldElem x(K, 2L), y(K, Rational(5));
  EXPECT_EQ(G->eta(x) * G->eta(y), G->eta(x + y));
  EXPECT_EQ(G->eta(x).compose(G->frobenius()), G->eta(x * G->pi()));
  Series e = G->eta(x);
  for (long m = 0; m < 10; ++m) EXPECT_LE(e.coeff(m).max_degree(), m);
}

TEST(FormalGroup, TorsionPolynomials) {
  auto L = catalog::qp(3);
  auto G = FormalGroup::special(L, 10);
  Series Q1 = G->qn(1);
  EXPECT_EQ(Q1, Series::from_elems(L, 0, {FieldElem(L, 3L), FieldElem(L), FieldElem(L, 1L)}, Series::kExact));
  for (int n = 1; n <= 3; ++n) EXPECT_EQ(G->qn(n).coeff_elem(0), G->pi());
  // Z * prod Q_mu / pi = [pi^m](Z)/pi^m approaches t_LT
  Series prod = Series::variable(L);
  for (int mu = 1; mu <= 4; ++mu) prod = prod * G->qn(mu) * Rational(1, 3);
  Series diff = (prod.truncate(10) - G->log());
  for (long k = 0; k < 10; ++k)
    if (!diff.coeff_elem(k).is_zero()) EXPECT_GE(diff.coeff_elem(k).valuation(), 2);
}

TEST(Torsion, SpecialTowerOverQ3) {
  auto G = FormalGroup::special(catalog::qp(3), 10);
  auto tw = G->torsion_tower(2);
  FieldElem u1 = tw.u[1];
  EXPECT_EQ(u1 * u1, FieldElem(tw.fields[1], -3L));
  EXPECT_EQ(u1.valuation(), Rational(1, 2));
  EXPECT_EQ(tw.u[2].valuation(), Rational(1, 6));
  Series P = G->frobenius();
  auto eval = [&](const FieldElem& z) {
    FieldElem s(z.field()), zk(z.field(), 1L);
    for (long k = 0; k < P.hi(); ++k) {
      s += zk * P.coeff_elem(k).coerce_to(z.field());
      zk = zk * z;
    }
    return s;
  };
  EXPECT_TRUE(eval(u1).is_zero());
  EXPECT_EQ(eval(tw.u[2]), u1.embed(tw.fields[2]));
  EXPECT_EQ(tw.level1.size(), 2u);
  for (auto& a : tw.level1) EXPECT_TRUE(eval(a).is_zero());
  EXPECT_THROW(G->torsion_tower(3), LevelUnsupported);
}

TEST(Torsion, CyclotomicValuations) {
  auto G = FormalGroup::cyclotomic(3, 10);
  auto tw = G->torsion_tower(2);
  EXPECT_EQ(tw.u[1].valuation(), Rational(1, 2));
  EXPECT_EQ(tw.u[2].valuation(), Rational(1, 6));
  FieldElem z = tw.u[1] + Rational(1);
  EXPECT_EQ(z.pow(3), FieldElem(tw.fields[1], 1L));
  auto S = FormalGroup::special(catalog::qp_sqrt_p(3), 8);
  auto ts = S->torsion_tower(2);
  EXPECT_EQ(ts.u[1].valuation(), Rational(1, 4));
  EXPECT_EQ(ts.u[2].valuation(), Rational(1, 12));
}

TEST(Iota, CyclotomicLevelOne) {
  auto G = FormalGroup::cyclotomic(3, 10);
  auto tw = G->torsion_tower(1);
  Series X = G->iota_unit(tw, 8);
  EXPECT_EQ(X.coeff_elem(0), tw.u[1]);
  Series lt = G->iota_log(tw, 8);
  Series expect = Series::monomial(FieldElem(tw.top(), Rational(1, 3)), 1, Series::kExact, Var::t);
  for (long m = 0; m < 8; ++m) EXPECT_EQ(lt.coeff_elem(m), expect.coeff_elem(m)) << m;
}

TEST(Iota, SpecialLevelOne) {
  auto G = FormalGroup::special(catalog::qp(3), 16);
  auto tw = G->torsion_tower(1);
  Series X = G->iota_unit(tw, 6);
  EXPECT_EQ(X.coeff_elem(0), tw.u[1]);
  Series lt = G->iota_log(tw, 4);
  EXPECT_EQ(lt.coeff_elem(1), FieldElem(tw.top(), Rational(1, 3)));
  EXPECT_TRUE(lt.coeff_elem(0).is_zero());
  EXPECT_GT(lt.coeff_elem(0).precision(), 1);
}
