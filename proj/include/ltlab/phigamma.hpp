#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ltlab/chareps.hpp"
#include "ltlab/lubin_tate.hpp"

namespace ltlab {

// ---------- Psi on Laurent polynomials ----------

namespace detail {

// f = quot * P + rem with deg rem < deg P, P monic with coefficients in L.
inline void divmod_monic(const std::vector<OmegaScalar>& f, const std::vector<FieldElem>& P,
                         std::vector<OmegaScalar>& quot, std::vector<OmegaScalar>& rem) {
  long d = static_cast<long>(P.size()) - 1;
  rem = f;
  long n = static_cast<long>(f.size());
  if (n <= d) {
    quot.clear();
    return;
  }
  quot.assign(n - d, OmegaScalar(f[0].field()));
  for (long k = n - 1; k >= d; --k) {
    OmegaScalar c = rem[k];
    quot[k - d] = c;
    if (c.is_exact_zero()) continue;
    for (long j = 0; j <= d; ++j)
      if (!P[j].is_exact_zero()) rem[k - d + j] -= c * OmegaScalar(P[j]);
  }
  rem.resize(d);
}

}  // namespace detail

// Power sums s_i (i < q) of the roots of [pi](X) - Y; they do not depend on Y.
inline std::vector<FieldElem> frobenius_power_sums(const FormalGroup& G) {
  const auto& a = G.frobenius_coeffs();
  long q = G.q();
  FieldPtr L = G.field();
  std::vector<FieldElem> s(q, FieldElem(L));
  s[0] = FieldElem(L, Rational(q));
  for (long i = 1; i < q; ++i) {
    FieldElem v = a[q - i] * Rational(-i);
    for (long j = 1; j < i; ++j) v -= a[q - j] * s[i - j];
    s[i] = v;
  }
  return s;
}

// Psi = phi^{-1} o Tr / q. A pole of order m is cleared with Z^{-m} = phi(Z)^{-m} Q_1(Z)^m.
// Psi does not respect the Z-adic filtration (Psi(Z^q) has a constant term), so only
// exact Laurent polynomials are accepted; eta-combinations go through EtaSpan.
inline Series psi_newton(const FormalGroup& G, const Series& f) {
  if (!f.is_exact()) throw TruncationTooShort("Psi of a truncated series is not determined Z-adically");
  long q = G.q();
  Series P = G.frobenius();
  long m = std::max(0L, -f.laurent_order());
  if (f.is_zero()) m = 0;
  Series h = f.shift(m);
  if (m > 0) {
    Series Q1 = FormalGroup::poly_divexact(P, Series::variable(G.field()));
    h = h * Q1.pow(m);
  }
  FieldPtr K = common_field(h, P);
  long T = h.trunc();
  long top = std::min(h.hi(), T);
  std::vector<OmegaScalar> cur;
  for (long k = 0; k < top; ++k) cur.push_back(h.coeff(k).embed(K));
  std::vector<FieldElem> Pc;
  for (long k = 0; k <= q; ++k) Pc.push_back(P.coeff_elem(k).coerce_to(K));
  auto s = frobenius_power_sums(G);

  // h = sum_k r_k P^k; Psi(h) = (1/q) sum_k Z^k sum_i r_{k,i} s_i
  std::vector<OmegaScalar> out;
  while (!cur.empty()) {
    std::vector<OmegaScalar> quot, rem;
    detail::divmod_monic(cur, Pc, quot, rem);
    OmegaScalar c(K);
    for (long i = 0; i < static_cast<long>(rem.size()); ++i)
      if (!rem[i].is_exact_zero()) c += rem[i] * OmegaScalar(s[i].coerce_to(K));
    out.push_back(c * Rational(1, q));
    cur = std::move(quot);
  }
  return Series(K, 0, std::move(out), Series::kExact).shift(-m);
}

// phi(f) = f([pi](Z)) for power series f.
inline Series phi_series(const FormalGroup& G, const Series& f, long cap = Series::kExact) {
  if (f.laurent_order() < 0)
    throw NonConvergentComposition("phi of a pole leaves the Laurent-polynomial model");
  return f.compose(G.frobenius(), cap);
}

// F(a, Z) for a torsion point a (a = 0 gives Z), with the unknown tail of the group law bounded.
inline Series translate_by_torsion(const FormalGroup& G, const FieldElem& a, long T) {
  FieldPtr K = a.field();
  if (a.is_exact_zero()) return Series::variable(K).truncate(T);
  if (G.kind() == FormalGroup::Kind::Cyclotomic) {
    Series Z = Series::variable(K);
    return (Series::constant(a) + Z + Z * a).truncate(T);
  }
  const BiSeries& F = G.group_law();
  long D = G.order();
  T = std::min(T, D);
  std::vector<FieldElem> apow{FieldElem(K, 1L)};
  for (long i = 1; i < D; ++i) apow.push_back(apow.back() * a);
  std::vector<FieldElem> c;
  Rational va = a.valuation();
  for (long j = 0; j < T; ++j) {
    FieldElem cj(K);
    for (long i = 0; i + j < D; ++i) {
      FieldElem f = F.coeff(i, j);
      if (!f.is_exact_zero()) cj += f.coerce_to(K) * apow[i];
    }
    c.push_back(cj.truncate_vp(va * (D - j)));
  }
  return Series::from_elems(K, 0, c, T);
}

// Tr(f)/q = phi(Psi(f)) computed from the level-1 torsion points, descended to L.
inline Series trace_over_q(const FormalGroup& G, const Series& f, const TorsionTower& tw, long T) {
  if (tw.n < 1) throw LevelUnsupported("the trace form needs the level-1 torsion points");
  if (!f.is_exact() || f.laurent_order() < 0) throw Unsupported("the trace form is implemented for polynomials");
  FieldPtr L1 = tw.fields[1];
  std::vector<FieldElem> pts{FieldElem(L1)};
  for (auto& a : tw.level1) pts.push_back(a);
  Series fe = f.embed(common_field(f, Series(L1, 0)));
  Series sum(fe.field(), T);
  for (auto& a : pts) {
    Series X = translate_by_torsion(G, a, T);
    sum += a.is_exact_zero() ? fe.truncate(T) : fe.compose_shifted(X, T, [](long) { return detail::inf_rational(); });
  }
  sum = sum * Rational(1, G.q());
  FieldPtr L = G.field();
  return sum.map_coeffs([&](long, const OmegaScalar& x) {
    OmegaScalar y(common_field(OmegaScalar(L), OmegaScalar(f.field())));
    for (auto& [e, c] : x.terms()) y += OmegaScalar(c.descend(y.field()), e);
    return y;
  });
}

// Solve phi(g) = h degree by degree; [pi](Z) = pi Z + ... makes this triangular.
inline Series phi_inverse(const FormalGroup& G, const Series& h) {
  if (h.laurent_order() < 0) throw Unsupported("phi^{-1} is implemented for power series");
  FieldPtr K = h.field();
  FieldElem pi = G.pi().coerce_to(K);
  long T = h.trunc();
  long N = T >= Series::kExact ? h.hi() : T;
  Series P = G.frobenius().embed(K);
  std::vector<OmegaScalar> g;
  Series acc(K, N);
  Series Pk = Series::constant(FieldElem(K, 1L));
  for (long k = 0; k < N; ++k) {
    OmegaScalar gk = (h.coeff(k) - acc.coeff(k)) * OmegaScalar(pi.pow(-k));
    g.push_back(gk);
    if (!gk.is_exact_zero()) acc += (Pk * gk).truncate(N);
    Pk = (Pk * P).truncate(N);
  }
  Series r(K, 0, std::move(g), T);
  if (T >= Series::kExact) {
    if (phi_series(G, r) != h) throw NotInEtaSpan("polynomial is not in the image of phi");
  }
  return r;
}

// ---------- symbolic combinations of eta(x, Z) ----------

class EtaSpan {
 public:
  EtaSpan() = default;
  explicit EtaSpan(FieldPtr L) : L_(std::move(L)) {}
  static EtaSpan single(const FieldElem& x, const OmegaScalar& c) {
    EtaSpan s(x.field());
    s.add(x, c);
    return s;
  }

  void add(const FieldElem& x, const OmegaScalar& c) {
    if (!x.is_exact()) throw Unsupported("eta-span points must be exact");
    if (!x.is_zero() && x.valuation() < 0) throw IntegralityViolation("eta(x) needs x in o_L");
    auto key = x.str();
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, std::make_pair(x, c));
    } else {
      it->second.second += c;
      if (it->second.second.is_exact_zero()) terms_.erase(it);
    }
  }
  const FieldPtr& field() const { return L_; }
  std::vector<std::pair<FieldElem, OmegaScalar>> terms() const {
    std::vector<std::pair<FieldElem, OmegaScalar>> out;
    for (auto& [k, v] : terms_) out.push_back(v);
    return out;
  }
  // zero up to the precision of the coefficients
  bool is_zero() const {
    for (auto& [k, v] : terms_)
      if (!v.second.is_zero()) return false;
    return true;
  }

  friend EtaSpan operator+(const EtaSpan& a, const EtaSpan& b) {
    EtaSpan r = a;
    if (!r.L_) r.L_ = b.L_;
    for (auto& [k, v] : b.terms_) r.add(v.first, v.second);
    return r;
  }
  EtaSpan scaled(const OmegaScalar& s) const {
    EtaSpan r(L_);
    for (auto& [k, v] : terms_) r.add(v.first, v.second * s);
    return r;
  }
  friend EtaSpan operator*(const EtaSpan& a, const EtaSpan& b) {
    EtaSpan r(a.L_ ? a.L_ : b.L_);
    for (auto& [ka, va] : a.terms_)
      for (auto& [kb, vb] : b.terms_) r.add(va.first + vb.first, va.second * vb.second);
    return r;
  }
  bool operator==(const EtaSpan& o) const {
    EtaSpan d = *this + o.scaled(OmegaScalar::rational(o.L_ ? o.L_ : L_, -1));
    return d.is_zero();
  }

  template <class Fn>
  EtaSpan map_points(Fn fn) const {
    EtaSpan r(L_);
    for (auto& [k, v] : terms_) {
      auto [y, c] = fn(v.first, v.second);
      if (!c.is_exact_zero()) r.add(y, c);
    }
    return r;
  }

  Series to_series(const FormalGroup& G) const {
    Series s(G.field(), G.order());
    for (auto& [k, v] : terms_) s += G.eta(v.first) * v.second;
    return s;
  }

 private:
  FieldPtr L_;
  std::map<std::string, std::pair<FieldElem, OmegaScalar>> terms_;
};

inline bool pi_divides(const FieldElem& x) { return x.is_zero() || x.vpi() >= 1; }

inline EtaSpan phi_span(const EtaSpan& s) {
  FieldElem pi = FieldElem::uniformizer(s.field());
  return s.map_points([&](const FieldElem& x, const OmegaScalar& c) { return std::make_pair(pi * x, c); });
}
inline EtaSpan gamma_span(const FieldElem& a, const EtaSpan& s) {
  return s.map_points([&](const FieldElem& x, const OmegaScalar& c) { return std::make_pair(a * x, c); });
}
inline EtaSpan psi_span(const EtaSpan& s) {
  FieldElem pinv = FieldElem::uniformizer(s.field()).inverse();
  return s.map_points([&](const FieldElem& x, const OmegaScalar& c) {
    if (!pi_divides(x)) return std::make_pair(x, OmegaScalar(c.field()));
    return std::make_pair(x * pinv, c);
  });
}
// d/dt_LT eta(x) = Omega x eta(x)
inline EtaSpan partial_span(const EtaSpan& s) {
  return s.map_points([&](const FieldElem& x, const OmegaScalar& c) {
    return std::make_pair(x, (c * OmegaScalar(x.coerce_to(common_field(x, c.coeff(0))))).times_omega(1));
  });
}

// Psi via the orthogonality sum over o_L/pi of the level-1 additive character.
inline EtaSpan psi_span_trace(const EtaSpan& s, const AdditiveCharacter& psi1) {
  if (psi1.level() != 1) throw LevelUnsupported("the orthogonality sum uses a level-1 character");
  FieldPtr L = s.field();
  FieldElem pinv = FieldElem::uniformizer(L).inverse();
  auto reps = residue_field_reps(L);
  long q = L->q_long();
  return s.map_points([&](const FieldElem& x, const OmegaScalar& c) {
    FieldElem sum(psi1.values());
    for (auto& b : reps) sum += psi1(b * x);
    FieldElem w = sum * Rational(1, q);
    if (w.is_exact_zero()) return std::make_pair(x, OmegaScalar(c.field()));
    if (w != FieldElem(psi1.values(), 1L)) throw IntegralityViolation("orthogonality sum is neither 0 nor q");
    return std::make_pair(x * pinv, c);
  });
}

// ---------- rank-one modules ----------

struct RankOneModule {
  GroupPtr G;
  Character delta;

  RankOneModule(GroupPtr g, Character d) : G(std::move(g)), delta(std::move(d)) {}

  // deg = v_pi(delta(pi))
  Rational slope() const { return delta.pi_value().valuation() * Rational(G->field()->e()); }
  bool is_etale() const { return slope() == 0; }
  std::string str() const { return "R(" + delta.str() + ")"; }
};
using ModulePtr = std::shared_ptr<const RankOneModule>;

inline ModulePtr make_module(const GroupPtr& G, const Character& d) { return std::make_shared<RankOneModule>(G, d); }

struct ModuleElem {
  ModulePtr M;
  Series f;

  friend ModuleElem operator+(const ModuleElem& a, const ModuleElem& b) {
    if (!(a.M->delta == b.M->delta)) throw CharacterMismatch("sum of elements of different modules");
    return {a.M, a.f + b.f};
  }
  friend ModuleElem operator*(const ModuleElem& a, const OmegaScalar& s) { return {a.M, a.f * s}; }
  bool operator==(const ModuleElem& o) const { return M->delta == o.M->delta && f == o.f; }
};

// f e_delta * g e_delta' = fg e_{delta delta'}
inline ModuleElem tensor(const ModuleElem& a, const ModuleElem& b) {
  return {make_module(a.M->G, a.M->delta * b.M->delta), a.f * b.f};
}

inline ModuleElem phi(const ModuleElem& m) {
  const FormalGroup& G = *m.M->G;
  Series r = phi_series(G, m.f, m.f.is_exact() ? Series::kExact : m.f.trunc());
  return {m.M, r * m.M->delta.pi_value()};
}

inline ModuleElem gamma_act(const FieldElem& a, const ModuleElem& m) {
  if (a.is_zero() || a.valuation() != 0) throw IntegralityViolation("gamma acts through units of o_L");
  const FormalGroup& G = *m.M->G;
  Series A = G.endomorphism(a);
  long T = std::min(m.f.trunc(), G.order());
  Series r = m.f.compose(A, T);
  return {m.M, r * m.M->delta.unit_value(a)};
}

// Psi(f e_delta) = delta(pi)^{-1} Psi(f) e_delta and psi = (q/pi) Psi.
inline ModuleElem Psi(const ModuleElem& m) {
  return {m.M, psi_newton(*m.M->G, m.f) * m.M->delta.pi_value().inverse()};
}
inline ModuleElem psi(const ModuleElem& m) {
  const FormalGroup& G = *m.M->G;
  return {m.M, Psi(m).f * (G.pi().inverse() * Rational(G.q()))};
}

// The trace form: Psi(f) recovered from the level-1 torsion sum.
inline ModuleElem Psi_trace(const ModuleElem& m, const TorsionTower& tw) {
  const FormalGroup& G = *m.M->G;
  long T = std::min(m.f.trunc(), G.order());
  Series h = trace_over_q(G, m.f, tw, T);
  return {m.M, phi_inverse(G, h) * m.M->delta.pi_value().inverse()};
}

// <f e_delta, g e_{chi delta^{-1}}> = Res(f g g_LT dZ)
inline OmegaScalar residue_pairing(const ModuleElem& m, const ModuleElem& mt) {
  const RankOneModule& A = *m.M;
  Character chi = Character::chi(A.G->field(), A.delta.values());
  if (!(A.delta * mt.M->delta == chi))
    throw CharacterMismatch("the pairing needs characters with product x|x|");
  return (m.f * mt.f * A.G->g()).residue();
}

// Res(f dt_LT) for f e_{x delta}, the last map of the twisting sequence.
inline OmegaScalar residue_map(const FormalGroup& G, const Series& f) { return (f * G.g()).residue(); }

// f e_delta -> d f/dt_LT e_{x delta}
inline ModuleElem twist_partial(const ModuleElem& m) {
  const RankOneModule& A = *m.M;
  Character x = Character::x_pow(A.G->field(), A.delta.values(), 1);
  return {make_module(A.G, A.delta * x), A.G->invariant_derivative(m.f)};
}

// A primitive F with dF/dt_LT = f when Res(f dt_LT) = 0 (the middle of the twisting sequence).
inline Series integrate_dt(const FormalGroup& G, const Series& f) {
  Series w = f * G.g();
  if (!w.residue().is_zero()) throw NotInEtaSpan("a form with nonzero residue has no primitive");
  std::vector<OmegaScalar> c;
  for (long k = w.lo(); k < w.hi(); ++k) {
    if (k == -1) {
      c.push_back(OmegaScalar(w.field()));
      continue;
    }
    c.push_back(w.coeff(k) * Rational(1, k + 1));
  }
  long T = w.is_exact() ? Series::kExact : w.trunc() + 1;
  return Series(w.field(), w.lo() + 1, std::move(c), T);
}

// phi_f(z) = Res(eta(-z, Z) f dt_LT)
inline OmegaScalar colmez_transform(const FormalGroup& G, const Series& f, const FieldElem& z) {
  if (!f.is_zero() && f.laurent_order() < -(G.order() - 1)) throw TruncationTooShort("pole order exceeds eta truncation");
  return (G.eta(-z) * f * G.g()).residue();
}

// f dlog_LT basis for Omega^1 = R(chi): the dZ coefficient.
inline Series as_differential(const ModuleElem& m) {
  const RankOneModule& A = *m.M;
  if (!(A.delta == Character::chi(A.G->field(), A.delta.values())))
    throw CharacterMismatch("only R(chi) is identified with differentials");
  return m.f * A.G->g();
}

}  // namespace ltlab
