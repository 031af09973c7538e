#pragma once

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ltlab/cohmodel.hpp"
#include "ltlab/dist.hpp"
#include "ltlab/recip.hpp"
#include "ltlab/serialize.hpp"

namespace ltlab {

// A field with its formal group, as named in a config.
struct DatumSpec {
  unsigned long p = 3;
  std::string tower = "base";        // base | sqrt-p
  std::string frobenius = "special";  // special | cyclotomic | poly:c0,c1,...,cq
};

struct RunParams {
  unsigned long seed = 1;
  long digits = kDefaultDigits;
  long series_order = 16;
  long t_order = 8;
  long moment_horizon = 8;
  std::vector<DatumSpec> data;
};

inline std::vector<DatumSpec> default_grid() { return {{3, "base", "special"}, {5, "base", "special"}, {3, "sqrt-p", "special"}}; }

inline FieldPtr make_tower(unsigned long p, const std::string& tower) {
  if (tower == "base") return catalog::qp(p);
  if (tower == "sqrt-p") return catalog::qp_sqrt_p(p);
  throw Unsupported("unknown tower '" + tower + "' (expected base or sqrt-p)");
}

// "3", "-1/2", "pi", "2*pi", "pi^2"
inline FieldElem parse_coefficient(const FieldPtr& L, std::string s) {
  auto star = s.find("pi");
  if (star == std::string::npos) return FieldElem(L, Rational(s));
  std::string head = s.substr(0, star);
  if (!head.empty() && head.back() == '*') head.pop_back();
  long e = 1;
  std::string tail = s.substr(star + 2);
  if (!tail.empty()) {
    if (tail[0] != '^') throw Unsupported("bad coefficient '" + s + "'");
    e = std::stol(tail.substr(1));
  }
  FieldElem c = head.empty() ? FieldElem(L, 1L) : head == "-" ? FieldElem(L, -1L) : FieldElem(L, Rational(head));
  return c * FieldElem::uniformizer(L).pow(e);
}

inline GroupPtr make_group(const DatumSpec& d, long order) {
  FieldPtr L = make_tower(d.p, d.tower);
  if (d.frobenius == "special") return FormalGroup::special(L, order);
  if (d.frobenius == "cyclotomic") {
    if (d.tower != "base") throw Unsupported("the cyclotomic Frobenius lives over Q_p");
    return FormalGroup::cyclotomic(d.p, order);
  }
  if (d.frobenius.rfind("poly:", 0) == 0) {
    std::vector<FieldElem> c;
    std::string rest = d.frobenius.substr(5);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      auto next = rest.find(',', pos);
      if (next == std::string::npos) next = rest.size();
      c.push_back(parse_coefficient(L, rest.substr(pos, next - pos)));
      pos = next + 1;
    }
    return FormalGroup::custom(L, c, order);
  }
  throw Unsupported("unknown Frobenius '" + d.frobenius + "'");
}

inline std::string datum_name(const DatumSpec& d) { return "p=" + std::to_string(d.p) + "/" + d.tower + "/" + d.frobenius; }

struct Check {
  std::string suite, id, ref, status = "pass", reason;
  long cases = 0, failures = 0;
  json lhs, rhs;
  long precision = kInfPrec;
  std::vector<OmegaScalar> witnesses;  // the computed values, for reproduction at higher precision

  json to_json_record() const {
    json r{{"suite", suite}, {"id", id},   {"ref", ref},     {"status", status},
           {"cases", cases}, {"failures", failures}, {"lhs", lhs}, {"rhs", rhs}, {"precision", prec_json(precision)}};
    if (!reason.empty()) r["reason"] = reason;
    return r;
  }
};

// Accumulates the cases of one identity; keeps the first failing pair, else the last pair.
class Recorder {
 public:
  Recorder(std::string suite, std::string id, std::string ref, long digits) : digits_(digits) {
    c_.suite = std::move(suite);
    c_.id = std::move(id);
    c_.ref = std::move(ref);
    c_.precision = digits;
  }

  void scalar(const OmegaScalar& a, const OmegaScalar& b) {
    bool ok = (a - b.embed(common_field(a, b))).is_zero();
    c_.witnesses.push_back(a);
    note(ok, to_json(a, digits_), to_json(b, digits_));
  }
  void elem(const FieldElem& a, const FieldElem& b) { scalar(OmegaScalar(a), OmegaScalar(b)); }
  void series(const Series& a, const Series& b) {
    bool ok = a == b;
    for (long k = a.lo(); k < std::min(a.hi(), a.trunc()); ++k) c_.witnesses.push_back(a.coeff(k));
    note(ok, to_json(a, digits_), to_json(b, digits_));
  }
  void flag(bool ok, json lhs, json rhs) { note(ok, std::move(lhs), std::move(rhs)); }
  template <class F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      note(false, json(std::string("error: ") + e.what()), json(nullptr));
    }
  }

  Check done() {
    c_.status = c_.failures ? "fail" : c_.cases ? "pass" : "skipped";
    if (!c_.cases && c_.reason.empty()) c_.reason = "no cases";
    return c_;
  }
  void skip(const std::string& why) { c_.reason = why; }

 private:
  void note(bool ok, json lhs, json rhs) {
    ++c_.cases;
    if (!ok) ++c_.failures;
    if (ok && c_.failures) return;
    if (!ok && c_.failures > 1) return;
    c_.lhs = std::move(lhs);
    c_.rhs = std::move(rhs);
  }
  Check c_;
  long digits_;
};

namespace suite_detail {

inline Series random_poly(const FieldPtr& L, std::mt19937& rng, long lo, long hi) {
  std::uniform_int_distribution<int> c(-4, 4);
  std::vector<FieldElem> v;
  for (long k = lo; k <= hi; ++k) v.push_back(FieldElem(L, static_cast<long>(c(rng))));
  return Series::from_elems(L, lo, v, Series::kExact);
}

inline FieldElem random_unit(const FieldPtr& L, std::mt19937& rng) {
  long p = static_cast<long>(L->p());
  std::uniform_int_distribution<long> c(-30, 30);
  long u = 0;
  while (u % p == 0) u = c(rng);
  return FieldElem(L, u) + FieldElem::uniformizer(L) * Rational(c(rng));
}

inline Measure random_measure(const FieldPtr& L, const FieldPtr& K, int level, std::mt19937& rng, bool units_only = false) {
  RingPtr R = ResidueRing::make(L, level);
  std::uniform_int_distribution<int> c(-3, 3);
  std::vector<OmegaScalar> m(R->size(), OmegaScalar(K));
  for (long k = 0; k < R->size(); ++k)
    if (!units_only || R->is_unit(k)) m[k] = OmegaScalar::rational(K, c(rng));
  return Measure::cosets(L, level, m);
}

inline std::vector<int> levels_for(const FieldPtr& L) {
  if (L->e() == 1 && L->p() == 3) return {1, 2};
  return {1};
}

}  // namespace suite_detail

// --- group law ---------------------------------------------------------------------------
inline std::vector<Check> suite_group_law(const RunParams& P) {
  std::vector<Check> out;
  {
    // X + Y + XY through total degree 12, compared coefficientwise with the closed form
    Recorder r("group-law", "p2-multiplicative", "F(X,Y) = X + Y + XY for p = 2, special Frobenius", P.digits);
    auto G = FormalGroup::special(catalog::qp(2), 13);
    FieldPtr K = G->field();
    const auto& F = G->group_law();
    for (long d = 0; d <= 12; ++d)
      for (long i = 0; i <= d; ++i) {
        long j = d - i;
        bool closed = (i == 1 && j == 0) || (i == 0 && j == 1) || (i == 1 && j == 1);
        FieldElem c = F.coeff(i, j);
        r.flag(c.is_exact() && c == FieldElem(K, closed ? 1L : 0L), to_json(c), json(closed ? "1" : "0"));
      }
    out.push_back(r.done());
  }
  for (auto& d : P.data) {
    Recorder r("group-law", "log-additive/" + datum_name(d), "log F(aS, bS) = log(aS) + log(bS)", P.digits);
    r.guarded([&] {
      auto G = make_group(d, P.series_order);
      FieldPtr L = G->field();
      long D = G->order();
      std::mt19937 rng(P.seed);
      for (int t = 0; t < 10; ++t) {
        FieldElem a = suite_detail::random_unit(L, rng), b = suite_detail::random_unit(L, rng);
        Series xa = Series::monomial(a, 1, Series::kExact), xb = Series::monomial(b, 1, Series::kExact);
        Series f = G->group_law().substitute(xa, xb, D);
        r.series(G->log().compose(f, D), (G->log().compose(xa, D) + G->log().compose(xb, D)).truncate(D));
      }
    });
    out.push_back(r.done());
  }
  return out;
}

// --- operator identities -----------------------------------------------------------------
inline std::vector<Check> suite_operators(const RunParams& P, int cases = 50) {
  std::vector<Check> out;
  for (auto& d : P.data) {
    GroupPtr G;
    try {
      G = make_group(d, P.series_order);
    } catch (const std::exception& e) {
      Recorder r("operators", "setup/" + datum_name(d), "group construction", P.digits);
      r.flag(false, json(e.what()), json(nullptr));
      out.push_back(r.done());
      continue;
    }
    FieldPtr L = G->field();
    long D = G->order();
    FieldElem pi = G->pi();
    long q = G->q();
    std::mt19937 rng(P.seed * 7919 + d.p);
    std::string tag = "/" + datum_name(d);
    using suite_detail::random_poly;
    using suite_detail::random_unit;

    Recorder a("operators", "psi-phi" + tag, "psi(phi(f)) = (q/pi) f", P.digits);
    ModulePtr triv = make_module(G, Character::trivial(L, L));
    for (int t = 0; t < cases; ++t)
      a.guarded([&] {
        Series f = random_poly(L, rng, 0, t % 6);
        a.series(psi(phi(ModuleElem{triv, f})).f, f * (pi.inverse() * Rational(q)));
      });
    out.push_back(a.done());

    Recorder b("operators", "projection" + tag, "Psi(phi(f) g) = f Psi(g)", P.digits);
    for (int t = 0; t < cases; ++t)
      b.guarded([&] {
        Series f = random_poly(L, rng, 0, 3), g = random_poly(L, rng, -3, 4);
        b.series(psi_newton(*G, phi_series(*G, f) * g), f * psi_newton(*G, g));
      });
    out.push_back(b.done());

    Recorder c("operators", "partial-phi" + tag, "d(phi f) = pi phi(d f)", P.digits);
    Series frob = G->frobenius().truncate(D);
    for (int t = 0; t < cases; ++t)
      c.guarded([&] {
        Series f = random_poly(L, rng, t % 3 == 0 ? -2 : 0, 4);
        c.series(G->invariant_derivative(f.compose(frob, D)), G->invariant_derivative(f).compose(frob, D) * pi);
      });
    out.push_back(c.done());

    Recorder e("operators", "partial-gamma" + tag, "d(f o [a]) = a (d f) o [a]", P.digits);
    for (int t = 0; t < cases; ++t)
      e.guarded([&] {
        FieldElem u = random_unit(L, rng);
        Series f = random_poly(L, rng, 0, 5), ea = G->endomorphism(u);
        e.series(G->invariant_derivative(f.compose(ea, D)), G->invariant_derivative(f).compose(ea, D) * u);
      });
    out.push_back(e.done());

    Recorder g("operators", "log-endomorphism" + tag, "log([a](Z)) = a log(Z)", P.digits);
    Recorder h("operators", "g-endomorphism" + tag, "a g(Z) = g([a](Z)) [a]'(Z)", P.digits);
    std::uniform_int_distribution<long> coef(-40, 40);
    for (int t = 0; t < cases; ++t) {
      FieldElem u(L);
      while (u.is_zero()) u = FieldElem(L, coef(rng)) + pi * Rational(coef(rng));
      g.guarded([&] {
        Series ea = G->endomorphism(u);
        g.series(G->log().compose(ea, D), G->log() * u);
      });
      h.guarded([&] {
        Series ea = G->endomorphism(u);
        h.series(G->g() * u, G->g().compose(ea, D) * ea.derivative());
      });
    }
    out.push_back(g.done());
    out.push_back(h.done());
  }
  return out;
}

// --- residues ----------------------------------------------------------------------------
inline std::vector<Check> suite_residues(const RunParams& P) {
  std::vector<Check> out;
  std::map<unsigned long, bool> seen;
  for (auto& d : P.data) {
    std::string tag = "/" + datum_name(d);
    if (!seen[d.p]) {
      seen[d.p] = true;
      Recorder r("residues", "coleman-element/p=" + std::to_string(d.p), "Res(dg/g) = 1 and Psi((1+Z)/Z) = (pi/q)(1+Z)/Z for g = Z",
                 P.digits);
      r.guarded([&] {
        auto C = FormalGroup::cyclotomic(d.p, P.series_order);
        FieldPtr Q = C->field();
        Series Z = Series::variable(Q);
        Series dlog = C->invariant_derivative(Z.truncate(C->order())) * Z.inverse();
        r.scalar(residue_map(*C, dlog), OmegaScalar::rational(Q, 1));
        Series h = (Series::constant(FieldElem(Q, 1L)) + Z) * Z.inverse();
        r.series(psi_newton(*C, h), h * (C->pi() * Rational(1, C->q())));
      });
      out.push_back(r.done());
    }
    GroupPtr G;
    try {
      G = make_group(d, P.series_order);
    } catch (const std::exception& e) {
      Recorder r("residues", "setup" + tag, "group construction", P.digits);
      r.flag(false, json(e.what()), json(nullptr));
      out.push_back(r.done());
      continue;
    }
    FieldPtr L = G->field();
    long q = G->q();
    std::mt19937 rng(P.seed * 104729 + d.p);
    Recorder e("residues", "exceptional" + tag, "Res(((phi/q - 1) f)/t_LT dlog_LT) = (1/q) phi(f)(0) - f(0) = -(q-1)/q f(0)",
               P.digits);
    for (int t = 0; t < 50; ++t)
      e.guarded([&] {
        Series f = suite_detail::random_poly(L, rng, 0, 4);
        FieldElem f0 = f.coeff_elem(0);
        OmegaScalar res = exceptional_residue(*G, f);
        FieldElem tele = phi_series(*G, f).coeff_elem(0) * Rational(1, q) - f0;
        e.scalar(res, OmegaScalar(tele));
        e.scalar(res, OmegaScalar(f0 * Rational(1 - q, q)));
      });
    out.push_back(e.done());
    Recorder z("residues", "residue-of-derivative" + tag, "Res(d f dt_LT) = 0", P.digits);
    for (int t = 0; t < 100; ++t)
      z.guarded([&] {
        Series f = suite_detail::random_poly(L, rng, -4, 4);
        z.scalar(residue_map(*G, G->invariant_derivative(f)), OmegaScalar(L));
      });
    out.push_back(z.done());
  }
  return out;
}

// --- Gauss sums --------------------------------------------------------------------------
inline std::vector<Check> suite_gauss(const RunParams& P) {
  std::vector<Check> out;
  auto run = [&](const FieldPtr& L, int n, const std::string& tag) {
    Recorder r("gauss", "duality" + tag, "eps(delta) eps(delta^-1 |x|) = delta(-1) q^n(psi)", P.digits);
    Recorder s("gauss", "norm-relation" + tag, "eps(delta^-1 |x|) = q^(-a(delta) - n(psi)) eps(delta^-1)", P.digits);
    r.guarded([&] {
      AdditiveCharacter psi(L, value_field(L, cyclotomic_level_for(L, n)), n, P.digits);
      FieldPtr K = psi.values();
      Character absx = Character::abs(L, K);
      FieldElem qq(K, Rational(L->q_long()));
      for (long npsi : {0L, 1L})
        for (FieldElem cpi : {FieldElem(K, 1L), FieldElem(K, 2L), FieldElem::uniformizer(L).coerce_to(K)})
          for (auto& d : all_characters(L, K, n, cpi, P.digits)) {
            Character dual = d.inverse() * absx;
            FieldElem ed = gauss_sum_epsilon(dual, psi, npsi);
            r.elem(gauss_sum_epsilon(d, psi, npsi) * ed, d.at_minus_one() * qq.pow(npsi));
            s.elem(ed, qq.pow(-d.conductor() - npsi) * gauss_sum_epsilon(d.inverse(), psi, npsi));
          }
    });
    out.push_back(r.done());
    out.push_back(s.done());
  };
  for (auto& d : P.data) {
    FieldPtr L = make_tower(d.p, d.tower);
    for (int n : suite_detail::levels_for(L)) run(L, n, "/" + L->name() + "/level=" + std::to_string(n));
    if (d.tower != "base" || d.p == 2) continue;
    Recorder g("gauss", "quadratic/" + L->name(), "eps(quadratic)^2 = delta(-1) q", P.digits);
    g.guarded([&] {
      AdditiveCharacter psi(L, value_field(L, 1), 1, P.digits);
      FieldPtr K = psi.values();
      RingPtr R = ResidueRing::make(L, 1);
      long p = static_cast<long>(d.p);
      std::vector<FieldElem> t(R->size(), FieldElem(K));
      for (long u : R->units()) {
        long x = R->elem(u).to_rational().get_num().get_si();
        long leg = 1;
        for (long e = 0; e < (p - 1) / 2; ++e) leg = leg * ((x % p + p) % p) % p;
        t[u] = FieldElem(K, leg == 1 ? 1L : -1L);
      }
      Character quad(L, K, FieldElem(K, 1L), R, t);
      FieldElem eps = gauss_sum_epsilon(quad, psi);
      g.elem(eps * eps, quad.at_minus_one() * Rational(p));
    });
    out.push_back(g.done());
  }
  return out;
}

inline std::vector<Check> suite_equivariant(const RunParams& P) {
  std::vector<Check> out;
  for (auto& d : P.data) {
    FieldPtr L = make_tower(d.p, d.tower);
    for (int n : {1, 2}) {
      Recorder r("equivariant", "scaling/" + L->name() + "/level=" + std::to_string(n),
                 "eps(delta, psi(b .)) = delta_W(b) eps(delta, psi)", P.digits);
      r.guarded([&] {
        AdditiveCharacter psi(L, value_field(L, cyclotomic_level_for(L, n)), n, P.digits);
        FieldPtr K = psi.values();
        for (auto& c : all_characters(L, K, n, FieldElem(K, 3L), P.digits)) {
          Character dx = c * Character::x_pow(L, K, 2);
          FieldElem base = gauss_sum_epsilon(dx, psi);
          Character dw = weil_character(dx);
          RingPtr R = ResidueRing::make(L, n);
          for (long b : R->units()) r.elem(gauss_sum_epsilon(dx, psi.scaled(R->elem(b))), dw.rho(R->elem(b)) * base);
        }
      });
      out.push_back(r.done());
    }
  }
  return out;
}

// --- cohomology --------------------------------------------------------------------------
namespace suite_detail {

struct NamedChar {
  Character d;
  std::string name;
};

inline std::vector<NamedChar> coh_grid(const FieldPtr& L) {
  std::vector<NamedChar> out;
  long q = L->q_long();
  Character chi = Character::chi(L, L);
  Character quad;
  for (auto& c : all_characters(L, L, 1, FieldElem(L, 1L)))
    if (c.conductor() == 1 && c.rho(FieldElem(L, -1L)) == FieldElem(L, -1L)) quad = c;
  for (long a = -3; a <= 3; ++a) {
    Character xa = Character::x_pow(L, L, a);
    std::string s = "x^" + std::to_string(a);
    out.push_back({xa, s});
    out.push_back({xa * chi, s + " chi"});
    if (quad.base()) {
      out.push_back({xa * chi * quad, s + " chi quad"});
      out.push_back({xa * quad, s + " quad"});
    }
    out.push_back({xa * Character::unramified(L, L, FieldElem(L, q + 1)), s + " unr"});
  }
  out.push_back({Character(L, L, FieldElem(L, 1L), nullptr, {}, 0, FieldElem(L, Rational(static_cast<long>(L->p())))),
                 "analytic"});
  return out;
}

// Closed forms: which scalar in the listed family the character hits.
inline int pol_psi_oracle(const Character& d, int N) {
  FieldPtr L = d.base();
  FieldElem pi = FieldElem::uniformizer(L);
  for (int k = 0; k <= N; ++k)
    if (d.pi_value() == pi.pow(k + 1) * Rational(1, L->q_long())) return 1;
  return 0;
}
inline int pol_z_oracle(const Character& d, int N) {
  FieldPtr L = d.base();
  for (int k = 0; k <= N; ++k)
    if (d == Character::x_pow(L, L, k) * Character::chi(L, L)) return 1;
  return 0;
}
inline int d_psi_oracle(const Character& d, int N) {
  FieldElem pi = FieldElem::uniformizer(d.base());
  for (int k = 0; k <= N; ++k)
    if (d.pi_value() == pi.pow(-k)) return 1;
  return 0;
}
inline int d_z_oracle(const Character& d, int N) {
  for (int k = 0; k <= N; ++k)
    if (d == Character::x_pow(d.base(), d.base(), -k)) return 1;
  return 0;
}

inline json dims_json(const std::array<int, 3>& a) { return json::array({a[0], a[1], a[2]}); }

}  // namespace suite_detail

inline std::vector<Check> suite_cohomology(const RunParams& P) {
  using namespace suite_detail;
  std::vector<Check> out;
  Recorder models("cohomology", "models", "Pol and D models: (Psi - 1) and (Psi - 1, Z_n) cohomology match the closed forms",
                  P.digits);
  Recorder tables("cohomology", "expected-dims", "rank-one tables over R, R^+ and LA by Sigma_1 / Sigma_2 / generic", P.digits);
  Recorder mirror("cohomology", "duality-mirror", "dims(delta)[i] = dims(chi delta^-1)[2-i]", P.digits);
  Recorder euler("cohomology", "euler", "|Euler characteristic| = 1 per component", P.digits);
  std::set<unsigned long> primes;
  for (auto& d : P.data) primes.insert(d.p);
  std::mt19937 rng(P.seed);
  for (unsigned long p : primes) {
    FieldPtr L = catalog::qp(p);
    models.guarded([&] {
      for (auto& g : coh_grid(L))
        for (int N : {0, 2, 4}) {
          auto pol = IsotypicModel::make(IsotypicModel::Kind::Pol, g.d, N);
          auto dm = IsotypicModel::make(IsotypicModel::Kind::D, g.d, N);
          int pp = pol_psi_oracle(g.d, N), pz = pol_z_oracle(g.d, N);
          int dp = d_psi_oracle(g.d, N), dz = d_z_oracle(g.d, N);
          CohTable a = psi_cohomology(pol), b = model_cohomology(pol), c = psi_cohomology(dm), e = model_cohomology(dm);
          std::array<int, 3> ea{pp, pp, 0}, eb{pz, 2 * pz, pz}, ec{dp, dp, 0}, ee{dz, 2 * dz, dz};
          models.flag(a.dims == ea && b.dims == eb && c.dims == ec && e.dims == ee,
                      json{{"char", g.name}, {"N", N}, {"pol", dims_json(b.dims)}, {"d", dims_json(e.dims)}},
                      json{{"pol", dims_json(eb)}, {"d", dims_json(ee)}});
        }
    });
    tables.guarded([&] {
      Character chi = Character::chi(L, L);
      auto T = [&](const Character& d, std::array<int, 3> want) {
        tables.flag(expected_dims(d).dims == want, dims_json(expected_dims(d).dims), dims_json(want));
      };
      for (int i = 0; i <= 5; ++i) {
        T(Character::x_pow(L, L, -i), {1, 2, 0});
        T(Character::x_pow(L, L, i) * chi, {0, 2, 1});
        tables.flag(expected_dims_plus(Character::x_pow(L, L, -i)) ==
                        model_cohomology(IsotypicModel::Kind::D, Character::x_pow(L, L, -i), 6),
                    dims_json(expected_dims_plus(Character::x_pow(L, L, -i)).dims), json("D-model"));
        tables.flag(expected_dims_la(Character::x_pow(L, L, i)).dims == std::array<int, 3>{0, 2, 1},
                    dims_json(expected_dims_la(Character::x_pow(L, L, i)).dims), json::array({0, 2, 1}));
      }
      T(Character::unramified(L, L, FieldElem(L, 2L)), {0, 1, 0});
      T(Character::x_pow(L, L, 3), {0, 1, 0});
    });
    mirror.guarded([&] {
      Character chi = Character::chi(L, L);
      std::vector<Character> cs;
      for (int i = 0; i <= 5; ++i) {
        cs.push_back(Character::x_pow(L, L, -i));
        cs.push_back(Character::x_pow(L, L, i) * chi);
      }
      std::uniform_int_distribution<long> k(-6, 6), c(2, 40);
      for (int t = 0; t < 20; ++t) {
        long cc = c(rng);
        cs.push_back(Character::x_pow(L, L, k(rng)) * Character::unramified(L, L, FieldElem(L, cc)));
      }
      for (auto& d : cs) {
        mirror.flag(duality_mirror_check(d), dims_json(expected_dims(d).dims), d.str());
        euler.flag(std::abs(expected_dims(d).euler()) == 1, json(expected_dims(d).euler()), json("+-1"));
      }
    });
  }
  out.push_back(models.done());
  out.push_back(tables.done());
  out.push_back(mirror.done());
  out.push_back(euler.done());
  return out;
}

// --- Amice / Mellin ----------------------------------------------------------------------
inline std::vector<Check> suite_amice(const RunParams& P, int random_measures = 20) {
  using suite_detail::random_measure;
  std::vector<Check> out;
  for (auto& d : P.data) {
    GroupPtr G;
    try {
      G = make_group(d, P.series_order);
    } catch (const std::exception& e) {
      Recorder r("amice", "setup/" + datum_name(d), "group construction", P.digits);
      r.flag(false, json(e.what()), json(nullptr));
      out.push_back(r.done());
      continue;
    }
    FieldPtr L = G->field();
    std::string tag = "/" + datum_name(d);
    std::mt19937 rng(P.seed * 31337 + d.p);
    RingPtr R1 = ResidueRing::make(L, 1);
    long H = std::min(P.moment_horizon, G->order() - 1);
    auto omega_d = [](const Series& s) {
      return s.map_coeffs([](long, const OmegaScalar& a) { return a.times_omega(1); });
    };

    Recorder conv("amice", "convolution" + tag, "A_{mu * nu} = A_mu A_nu", P.digits);
    conv.guarded([&] {
      for (long a = 0; a < R1->size(); ++a)
        for (long b = 0; b < R1->size(); ++b) {
          Measure x = Measure::dirac(R1->elem(a)), y = Measure::dirac(R1->elem(b));
          conv.series(amice_series(*G, convolve(x, y)), amice_series(*G, x) * amice_series(*G, y));
        }
      for (int t = 0; t < random_measures; ++t) {
        Measure x = random_measure(L, L, 2, rng), y = random_measure(L, L, 2, rng);
        conv.series(amice_series(*G, convolve(x, y)), amice_series(*G, x) * amice_series(*G, y));
      }
    });
    out.push_back(conv.done());

    Recorder res("amice", "restriction" + tag, "A_{Res_{o^x} mu} = (1 - phi Psi) A_mu", P.digits);
    res.guarded([&] {
      for (long c = 0; c < R1->size(); ++c) {
        Measure x = Measure::dirac(R1->elem(c));
        res.flag(amice_span(restrict_units(x)) == one_minus_phi_psi(amice_span(x)), json(R1->elem(c).str()), json("eta-span"));
        res.series(amice_series(*G, restrict_units(x)), one_minus_phi_psi(amice_span(x)).to_series(*G));
      }
      for (int t = 0; t < random_measures; ++t) {
        Measure mu = random_measure(L, L, 2, rng);
        res.series(amice_series(*G, restrict_units(mu)), one_minus_phi_psi(amice_span(mu)).to_series(*G));
      }
    });
    out.push_back(res.done());

    Recorder tw("amice", "twist-chi-lt" + tag, "M(Tw_chi mu) = Omega^-1 d M(mu)", P.digits);
    tw.guarded([&] {
      Character dl = Character::x_pow(L, L, 2) * Character::unramified(L, L, FieldElem(L, 3L));
      auto one = [&](const Measure& mu) {
        Series lhs = mellin(G, twist_chi_lt(mu), dl).f;
        Series rhs = G->invariant_derivative(mellin(G, mu, dl).f).map_coeffs([](long, const OmegaScalar& a) {
          return a.times_omega(-1);
        });
        tw.series(lhs, rhs);
      };
      for (long u : R1->units()) one(Measure::dirac(R1->elem(u)));
      for (int t = 0; t < random_measures; ++t) one(random_measure(L, L, 2, rng, true));
    });
    out.push_back(tw.done());

    Recorder mom("amice", "moments" + tag, "moments of A_mu read back through exp_LT", P.digits);
    mom.guarded([&] {
      for (long c = 0; c < R1->size(); ++c) {
        auto m = moments(*G, Measure::dirac(R1->elem(c)), H);
        FieldElem xk(L, 1L);
        for (long k = 0; k <= H; ++k) {
          mom.scalar(m[k], OmegaScalar(xk));
          xk = xk * R1->elem(c);
        }
      }
      for (int t = 0; t < random_measures; ++t) {
        Measure mu = random_measure(L, L, 2, rng);
        Measure B = mu.as_moments(H);
        auto back = moments(*G, B, H);
        auto direct = mu.moments_direct(H);
        for (long k = 0; k <= H; ++k) {
          mom.scalar(back[k], B.moment_list()[k]);
          mom.scalar(back[k], direct[k]);
        }
      }
    });
    out.push_back(mom.done());

    Recorder der("amice", "derivative" + tag, "d A_mu = A_{Omega x mu}", P.digits);
    der.guarded([&] {
      for (long c = 0; c < R1->size(); ++c) {
        Measure x = Measure::dirac(R1->elem(c));
        der.series(G->invariant_derivative(amice_series(*G, x)), omega_d(amice_series(*G, times_x(x))));
      }
      for (int t = 0; t < random_measures; ++t) {
        Measure mu = random_measure(L, L, 2, rng);
        der.series(G->invariant_derivative(amice_series(*G, mu)), omega_d(amice_series(*G, times_x(mu))));
      }
    });
    out.push_back(der.done());
  }
  return out;
}

// --- descent -----------------------------------------------------------------------------
inline std::vector<Check> suite_descent(const RunParams& P, int measures = 20) {
  std::vector<Check> out;
  for (auto& d : P.data) {
    if (d.p == 2) {
      Recorder r("descent", "grid/" + datum_name(d), "descent identity", P.digits);
      r.skip("p = 2 is outside the descent grid");
      out.push_back(r.done());
      continue;
    }
    FieldPtr L = make_tower(d.p, d.tower);
    for (int n : suite_detail::levels_for(L)) {
      Recorder r("descent", "grid/" + L->name() + "/level=" + std::to_string(n),
                 "q^-n delta(pi)^-n sum_i delta(i) int eta(x i, u_n) mu = delta(-1) E(delta) int_{o^x} delta^-1 mu",
                 P.digits);
      r.guarded([&] {
        for (auto& rep : verify_descent({{L, n, measures}}, static_cast<unsigned>(P.seed), P.digits)) {
          r.scalar(rep.lhs, rep.rhs);
        }
      });
      out.push_back(r.done());
    }
  }
  return out;
}

// --- scalar constants --------------------------------------------------------------------
inline std::vector<Check> suite_scalars(const RunParams& P) {
  std::vector<Check> out;
  for (auto& d : P.data) {
    std::string tag = "/" + datum_name(d);
    GroupPtr G;
    try {
      G = make_group(d, P.series_order);
    } catch (const std::exception& e) {
      Recorder r("scalars", "setup" + tag, "group construction", P.digits);
      r.flag(false, json(e.what()), json(nullptr));
      out.push_back(r.done());
      continue;
    }
    FieldPtr L = G->field();
    long q = G->q();
    FieldElem pi = G->pi();
    Recorder prod("scalars", "cg-ctr" + tag, "C_g C_Tr = q/(q-1)", P.digits);
    Recorder shift("scalars", "n-shift" + tag, "C_g(z_m) = pi^(m-n) C_g(z_n), C_Tr(z_n) = pi^(m-n) C_Tr(z_m)", P.digits);
    Recorder tb("scalars", "thetabar" + tag, "-Omega (q-1)/q C_g C_Tr = -Omega", P.digits);
    for (int n = 1; n <= 4; ++n) {
      prod.scalar(c_g(*G, n) * c_tr(*G, n), OmegaScalar::rational(L, Rational(q, q - 1)));
      prod.scalar(c_g(*G, n), OmegaScalar(pi.pow(n), -1));
      tb.scalar(OmegaScalar::omega_pow(L, 1) * Rational(-(q - 1), q) * c_g(*G, n) * c_tr(*G, n),
                OmegaScalar(FieldElem(L, -1L), 1));
      for (int m = 1; m <= 4; ++m) {
        shift.scalar(c_g(*G, m), c_g(*G, n) * pi.pow(m - n));
        shift.scalar(c_tr(*G, n), c_tr(*G, m) * pi.pow(m - n));
      }
    }
    out.push_back(prod.done());
    out.push_back(shift.done());
    out.push_back(tb.done());

    Recorder gam("scalars", "gamma" + tag, "Gamma(R(chi)) = Omega^-1; Gamma({k}) Gamma({1-k}) = (-1)^(k + [k>=1]) Omega^-1",
                 P.digits);
    gam.scalar(gamma_factor(L, {{1, 1}}), OmegaScalar::omega_pow(L, -1));
    for (long k = -4; k <= 4; ++k) {
      long t = k >= 1 ? 1 : 0;
      gam.scalar(gamma_factor(L, {{k, 1}}) * gamma_factor(L, {{1 - k, 1}}),
                 OmegaScalar(FieldElem(L, ((k + t) % 2 == 0) ? 1L : -1L), -1));
    }
    out.push_back(gam.done());

    Recorder twc("scalars", "twisting" + tag, "E'(x delta) = Omega E(delta), unramified weight 0", P.digits);
    twc.guarded([&] {
      AdditiveCharacter psi(L, value_field(L, cyclotomic_level_for(L, 1)), 1, P.digits);
      for (long a : {2L, -1L, 7L, 10L}) {
        Character dl = Character::unramified(L, L, FieldElem(L, a));
        Character dx = dl * Character::x_pow(L, L, 1);
        OmegaScalar lhs = interp_constant(dx, InterpVariant::Cprime, psi);
        OmegaScalar rhs = interp_constant(dl, InterpVariant::C, psi).times_omega(1);
        twc.scalar(lhs, rhs);
      }
    });
    out.push_back(twc.done());
  }
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"group-law", "operators", "residues", "gauss", "equivariant",
                                              "cohomology", "amice",     "descent",  "scalars"};
  return names;
}

// "identities" bundles the operator and residue suites; "all" is every suite.
inline std::vector<Check> run_suite(const std::string& name, const RunParams& P) {
  if (name == "group-law") return suite_group_law(P);
  if (name == "operators") return suite_operators(P);
  if (name == "residues") return suite_residues(P);
  if (name == "gauss") return suite_gauss(P);
  if (name == "equivariant") return suite_equivariant(P);
  if (name == "cohomology") return suite_cohomology(P);
  if (name == "amice") return suite_amice(P);
  if (name == "descent") return suite_descent(P);
  if (name == "scalars") return suite_scalars(P);
  if (name == "identities") {
    auto a = suite_operators(P), b = suite_residues(P), c = suite_scalars(P);
    a.insert(a.end(), b.begin(), b.end());
    a.insert(a.end(), c.begin(), c.end());
    return a;
  }
  if (name == "all") {
    std::vector<Check> out;
    for (auto& n : suite_names()) {
      auto r = run_suite(n, P);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }
  throw Unsupported("unknown suite '" + name + "'");
}

// Every witness of `lo` is reproduced by the matching witness of `hi` after truncation.
inline bool reproduced(const std::vector<Check>& lo, const std::vector<Check>& hi, std::string* where = nullptr) {
  if (lo.size() != hi.size()) {
    if (where) *where = "different number of checks";
    return false;
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const auto& a = lo[i].witnesses;
    const auto& b = hi[i].witnesses;
    if (lo[i].id != hi[i].id || lo[i].status != hi[i].status || a.size() != b.size()) {
      if (where) *where = lo[i].id;
      return false;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      std::set<int> degs;
      for (auto& [e, c] : a[k].terms()) degs.insert(e);
      for (auto& [e, c] : b[k].terms()) degs.insert(e);
      for (int e : degs) {
        FieldElem x = a[k].coeff(e), y = b[k].coeff(e);
        if (!x.field()) x = FieldElem(b[k].field());
        if (!y.field()) y = FieldElem(a[k].field());
        if (!x.reproduced_by(y)) {
          if (where) *where = lo[i].id + " witness " + std::to_string(k);
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace ltlab
