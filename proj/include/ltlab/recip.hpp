#pragma once

#include <random>
#include <string>
#include <vector>

#include "ltlab/chareps.hpp"
#include "ltlab/dist.hpp"
#include "ltlab/lubin_tate.hpp"
#include "ltlab/phigamma.hpp"

namespace ltlab {

struct DescentReport {
  unsigned long p = 0;
  std::string tower;
  std::string delta;
  int level = 0;
  std::string measure;
  OmegaScalar lhs, rhs;
  bool equal = false;
};

namespace detail {

inline FieldPtr joint_field(const Character& d, const AdditiveCharacter& psi, const Measure& mu) {
  FieldPtr K = common_field(FieldElem(d.values()), FieldElem(psi.values()));
  return common_field(FieldElem(K), FieldElem(mu.field_of_masses()));
}

}  // namespace detail

// q^{-n} delta(pi)^{-n} sum_{i unit mod pi^n} delta(i) sum_j c_n(i j) mu_j
inline OmegaScalar lhs_trace_theta_iota(const Measure& mu, const Character& d, const AdditiveCharacter& psi) {
  int n = psi.level();
  if (d.conductor() > n) throw ConductorExceedsLevel("the character conductor exceeds the level");
  if (mu.level() > n) throw ConductorExceedsLevel("the measure is finer than the level");
  FieldPtr K = detail::joint_field(d, psi, mu);
  FieldPtr L = d.base();
  RingPtr R = ResidueRing::make(L, n);
  auto pts = mu.points();
  OmegaScalar s(K);
  for (long i : R->units()) {
    FieldElem ui = R->elem(i);
    OmegaScalar inner(K);
    for (auto& [x, m] : pts) inner += m.embed(K) * psi(ui * x.coerce_to(L)).coerce_to(K);
    s += inner * d.unit_value(ui).coerce_to(K);
  }
  FieldElem scale = (d.pi_value().coerce_to(K) * Rational(L->q_long())).pow(-n);
  return s * scale;
}

// delta(-1) E(delta) sum_{j unit} delta(j)^{-1} mu_j
inline OmegaScalar rhs_interpolation(const Measure& mu, const Character& d, const AdditiveCharacter& psi) {
  if (d.conductor() > psi.level()) throw ConductorExceedsLevel("the character conductor exceeds the level");
  OmegaScalar E = interp_constant(d, InterpVariant::C, psi);
  FieldPtr K = common_field(E, OmegaScalar(detail::joint_field(d, psi, mu)));
  OmegaScalar s(K);
  for (auto& [x, m] : mu.points()) {
    FieldElem xl = x.coerce_to(d.base());
    if (!xl.is_zero() && xl.vpi() == 0) s += m.embed(K) * d.unit_value(xl).coerce_to(K).inverse();
  }
  return s * E.embed(K) * d.at_minus_one().coerce_to(K);
}

inline DescentReport descent_report(const Measure& mu, const Character& d, const AdditiveCharacter& psi,
                                    const std::string& tower, const std::string& id) {
  DescentReport r;
  r.p = d.base()->p();
  r.tower = tower;
  r.delta = d.str();
  r.level = psi.level();
  r.measure = id;
  r.lhs = lhs_trace_theta_iota(mu, d, psi);
  r.rhs = rhs_interpolation(mu, d, psi);
  r.equal = (r.lhs - r.rhs).is_zero();
  return r;
}

// The same left side read off from theta(iota_n) for the cyclotomic group: eta(x, u_n) = (1 + u_n)^x.
inline OmegaScalar lhs_via_iota(const FormalGroup& G, const TorsionTower& tw, const Measure& mu, const Character& d) {
  if (G.kind() != FormalGroup::Kind::Cyclotomic) throw Unsupported("the iota cross-check uses the cyclotomic group");
  int n = tw.n;
  FieldPtr L = G.field(), Ln = tw.top();
  FieldPtr K = common_field(FieldElem(common_field(FieldElem(Ln), FieldElem(d.values()))), FieldElem(mu.field_of_masses()));
  RingPtr R = ResidueRing::make(L, n);
  long pn = AdditiveCharacter::ipow(L->p(), n);
  Series onez = Series::constant(FieldElem(L, 1L)) + Series::variable(L);
  OmegaScalar s(K);
  for (long i : R->units()) {
    FieldElem ui = R->elem(i);
    OmegaScalar inner(K);
    for (auto& [x, m] : mu.points()) {
      long e = detail::residue_mod_pm(PAdic(L->p(), (ui * x.coerce_to(L)).to_rational()), n);
      FieldElem ev = G.iota(onez.pow(e % pn), tw, 2).coeff_elem(0).coerce_to(K);
      inner += m.embed(K) * ev;
    }
    s += inner * d.unit_value(ui).coerce_to(K);
  }
  return s * (d.pi_value().coerce_to(K) * Rational(L->q_long())).pow(-n);
}

// A measure of level n with mu(pi u + pi^2 o) = delta(pi) mu(u + pi o) and
// mu(pi^n o) = delta(pi)^n / (1 - delta(pi)) mu(o^x), built from arbitrary unit masses.
inline Measure psi_eigen_measure(const FieldPtr& L, int n, const FieldElem& alpha,
                                 const std::vector<OmegaScalar>& unit_masses) {
  if (n < 1 || n > 2) throw LevelUnsupported("Psi-eigen measures are built at levels 1 and 2");
  RingPtr R = ResidueRing::make(L, n);
  FieldPtr K = alpha.field();
  Measure mu = Measure::zero(L, n);
  RingPtr R1 = ResidueRing::make(L, 1);
  std::vector<OmegaScalar> lvl1(R1->size(), OmegaScalar(K));
  OmegaScalar total(K);
  std::size_t k = 0;
  for (long u : R->units()) {
    OmegaScalar m = unit_masses.at(k++).embed(K);
    mu.add(R->elem(u), m);
    lvl1[R1->code(R->elem(u))] += m;
    total += m;
  }
  FieldElem one(K, 1L);
  if (n == 2) {
    FieldElem pi = FieldElem::uniformizer(L);
    for (long v : R1->units()) mu.add(pi * R1->elem(v), lvl1[v] * alpha);
  }
  mu.add(FieldElem(L), total * (alpha.pow(n) / (one - alpha)));
  return mu;
}

// sum_{i unit mod pi^n} delta(i) c_n(i j)
inline FieldElem char_sum(const Character& d, const FieldElem& j, const AdditiveCharacter& psi) {
  FieldPtr K = common_field(FieldElem(d.values()), FieldElem(psi.values()));
  RingPtr R = ResidueRing::make(d.base(), psi.level());
  FieldElem s(K);
  for (long i : R->units())
    s += d.unit_value(R->elem(i)).coerce_to(K) * psi(R->elem(i) * j.coerce_to(d.base())).coerce_to(K);
  return s;
}

// Res_Z(((phi/q - 1) f) / t_LT  dlog_LT)
inline OmegaScalar exceptional_residue(const FormalGroup& G, const Series& f) {
  if (!f.is_zero() && f.laurent_order() < 0) throw HigherOrderPole("f has a pole at the origin");
  long D = G.order();
  Series h = phi_series(G, f.truncate(std::min(f.trunc(), D)), D).truncate(D) * Rational(1, G.q()) - f.truncate(D);
  Series t = G.log().truncate(D);
  return (h * t.inverse() * G.g().truncate(D)).residue();
}

// The constant term of log(g([a](T)) / g(T)).
inline FieldElem log_coleman_constant(const FormalGroup& G, const Series& g, const FieldElem& a,
                                      long digits = kDefaultDigits) {
  FieldElem one(a.field(), 1L);
  if (!(a - one).is_zero() && (a - one).valuation() < Rational(1))
    throw OutOfConvergenceDomain("log comparison needs a = 1 mod p");
  if (g.laurent_order() != 1) throw Unsupported("g needs a simple zero at the origin");
  long D = G.order();
  Series ga = g.compose(G.endomorphism(a), D);
  Series ratio = ga.truncate(D) * g.truncate(D).inverse();
  return padic_log(ratio.coeff_elem(0), digits);
}

// sum_i a_i log(g([a_i] T) / g(T)) at T = 0 for a Dirac combination sum_i a_i [gamma_i].
inline FieldElem log_coleman_dirac(const FormalGroup& G, const Series& g, const Measure& lambda,
                                   long digits = kDefaultDigits) {
  FieldElem s(G.field());
  for (auto& [x, m] : lambda.points()) {
    FieldElem c = m.coeff(0);
    s = s.coerce_to(common_field(s, c)) + c.coerce_to(common_field(s, c)) * log_coleman_constant(G, g, x, digits);
  }
  return s;
}

struct ScalarConstantsReport {
  bool product = true;       // C_g C_Tr = q/(q-1)
  bool shift = true;         // C_g(z_m) = pi^{m-n} C_g(z_n), C_Tr(z_n) = pi^{m-n} C_Tr(z_m)
  bool thetabar = true;      // -Omega (q-1)/q C_g C_Tr = -Omega
  bool ok() const { return product && shift && thetabar; }
};

inline ScalarConstantsReport scalar_constants_suite(const FormalGroup& G, int max_n = 4) {
  ScalarConstantsReport r;
  FieldPtr L = G.field();
  long q = G.q();
  FieldElem pi = G.pi();
  for (int n = 1; n <= max_n; ++n) {
    OmegaScalar prod = c_g(G, n) * c_tr(G, n);
    if (!(prod - OmegaScalar::rational(L, Rational(q, q - 1))).is_zero()) r.product = false;
    OmegaScalar tb = OmegaScalar::omega_pow(L, 1) * Rational(-(q - 1), q) * prod;
    if (!(tb + OmegaScalar::omega_pow(L, 1)).is_zero()) r.thetabar = false;
    for (int m = 1; m <= max_n; ++m) {
      if (!(c_g(G, m) - c_g(G, n) * pi.pow(m - n)).is_zero()) r.shift = false;
      if (!(c_tr(G, n) - c_tr(G, m) * pi.pow(m - n)).is_zero()) r.shift = false;
    }
  }
  return r;
}

// E'(x delta) = Omega E(delta) for an unramified weight-0 delta.
inline bool twisting_consistency(const Character& d, const AdditiveCharacter& psi) {
  Character dx = d * Character::x_pow(d.base(), d.values(), 1);
  OmegaScalar lhs = interp_constant(dx, InterpVariant::Cprime, psi);
  OmegaScalar rhs = interp_constant(d, InterpVariant::C, psi) * OmegaScalar::omega_pow(d.values(), 1);
  return (lhs - rhs.embed(common_field(lhs, rhs))).is_zero();
}

struct DescentGridEntry {
  FieldPtr L;
  int n = 1;
  int measures = 20;
};

// Ramified branch: every character of exact conductor n against random measures of level n.
// Unramified branch: Psi-eigen measures for a handful of Frobenius values.
inline std::vector<DescentReport> verify_descent(const std::vector<DescentGridEntry>& grid, unsigned seed,
                                                 long digits = kDefaultDigits) {
  std::vector<DescentReport> out;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (auto& e : grid) {
    if (e.L->p() == 2) throw Unsupported("p = 2 is not part of the descent grid");
    AdditiveCharacter psi = AdditiveCharacter::standard(e.L, e.n, digits);
    FieldPtr K = psi.values();
    RingPtr R = ResidueRing::make(e.L, e.n);
    auto random_masses = [&](bool units_only) {
      std::vector<OmegaScalar> m(R->size(), OmegaScalar(K));
      for (long k = 0; k < R->size(); ++k)
        if (!units_only || R->is_unit(k)) m[k] = OmegaScalar::rational(K, coef(rng));
      return m;
    };
    std::string tower = e.L->name();
    for (auto& d : all_characters(e.L, K, e.n, FieldElem(K, Rational(coef(rng) == 0 ? 2 : 3)), digits)) {
      if (d.conductor() != e.n) continue;
      for (int t = 0; t < e.measures; ++t) {
        Measure mu = Measure::cosets(e.L, e.n, random_masses(false));
        out.push_back(descent_report(mu, d, psi, tower, "random#" + std::to_string(t)));
      }
    }
    for (long a : {2L, 3L, -1L, 7L}) {
      FieldElem alpha(K, Rational(a, a == 7 ? 5 : 1));
      Character d = Character::unramified(e.L, K, alpha);
      for (int t = 0; t < e.measures; ++t) {
        std::vector<OmegaScalar> um;
        for (long u : R->units()) {
          (void)u;
          um.push_back(OmegaScalar::rational(K, coef(rng)));
        }
        Measure mu = psi_eigen_measure(e.L, e.n, alpha, um);
        out.push_back(descent_report(mu, d, psi, tower, "psi-eigen#" + std::to_string(t)));
      }
    }
  }
  return out;
}

}  // namespace ltlab
