#include <gtest/gtest.h>

#include <random>

#include "ltlab/series.hpp"

using namespace ltlab;

namespace {

Series poly(const FieldPtr& K, long lo, std::vector<long> c, long T = Series::kExact) {
  std::vector<FieldElem> e;
  for (long x : c) e.emplace_back(K, x);
  return Series::from_elems(K, lo, e, T);
}

}  // namespace

TEST(Series, ComposeSquares) {
  auto K = catalog::qp(3);
  auto f = poly(K, 2, {1});
  auto g = poly(K, 1, {1, 1});
  EXPECT_EQ(f.compose(g), poly(K, 2, {1, 2, 1}));
}

TEST(Series, GeometricComposition) {
  auto K = catalog::qp(5);
  auto f = poly(K, 0, {1, 1}, 12).inverse();  // 1/(1+Z) to order 12
  auto r = f.compose(poly(K, 1, {2}));
  ASSERT_EQ(r.trunc(), 12);
  long c = 1;
  for (long k = 0; k < 12; ++k, c *= -2) EXPECT_EQ(r.coeff_elem(k), FieldElem(K, c)) << k;
}

TEST(Series, TruncationPropagation) {
  auto K = catalog::qp(3);
  auto a = poly(K, 1, {1, 1}, 10);
  auto b = poly(K, -2, {1, 3}, 8);
  EXPECT_EQ((a * b).trunc(), std::min(10 - 2, 8 + 1));
  EXPECT_EQ((a + b).trunc(), 8);
  auto inv = b.inverse();
  EXPECT_EQ(inv.lo(), 2);
  EXPECT_EQ((inv * b).truncate(6), Series::constant(FieldElem(K, 1L)).truncate(6));
}

TEST(Series, Residues) {
  auto K = catalog::qp(3);
  EXPECT_EQ(poly(K, -1, {1}).residue(), OmegaScalar::rational(K, 1));
  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    std::vector<long> c;
    for (int i = 0; i < 8; ++i) c.push_back(static_cast<long>(rng() % 19) - 9);
    auto f = poly(K, -4, c);
    EXPECT_TRUE(f.derivative().residue().is_zero());
  }
}

TEST(Series, AnnulusValuation) {
  auto K = catalog::qp(3);
  EXPECT_EQ(annulus_valuation(poly(K, 1, {1}), {1, 1}), 1);
  EXPECT_EQ(annulus_valuation(poly(K, 0, {3, 0, 1}), {1, 1}), 1);
  // sum_{k=1..5} 3^k Z^{-k}
  std::vector<long> c;
  for (long k = 5, pw = 243; k >= 1; --k, pw /= 3) c.push_back(pw);
  EXPECT_EQ(annulus_valuation(poly(K, -5, c), {Rational(1, 2), Rational(1, 2)}), Rational(1, 2));
  EXPECT_THROW(annulus_valuation(poly(K, 0, {3}, 1), {1, 1}), TailNotDominated);
}

TEST(Series, AnnulusMultiplicative) {
  auto K = catalog::qp(5);
  auto f = poly(K, -2, {5, 1, 25});
  auto g = poly(K, -1, {1, 5, 0, 1});
  AnnulusSpec a{Rational(1, 3), Rational(1, 2)};
  for (const Rational& t : {a.s, a.r}) {
    AnnulusSpec pt{t, t};
    EXPECT_EQ(annulus_valuation(f * g, pt), annulus_valuation(f, pt) + annulus_valuation(g, pt));
  }
}

TEST(Series, SupNorm) {
  auto L = catalog::qp_sqrt_p(3);
  FieldElem pi = FieldElem::uniformizer(L);
  EXPECT_EQ(sup_norm_log(Series::constant(pi), L->e()), 1);
  auto f = Series::from_elems(L, 0, {FieldElem(L, 1L), pi}, Series::kExact);
  EXPECT_EQ(sup_norm_log(f, L->e()), 0);
  auto unit = Series::from_elems(L, 0, {FieldElem(L, 1L), pi, FieldElem(L, 2L)}, Series::kExact);
  EXPECT_EQ(sup_norm_log(unit * pi.pow(2), L->e()), 2);
}
