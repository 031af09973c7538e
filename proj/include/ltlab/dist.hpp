#pragma once

#include <map>
#include <string>
#include <vector>

#include "ltlab/phigamma.hpp"

namespace ltlab {

// A distribution on o_L, either a finite Dirac combination tagged with a coset level
// or a truncated moment sequence mu(x^k), k <= horizon.
class Measure {
 public:
  enum class Variant { Dirac, Moments };

  static Measure zero(const FieldPtr& L, int level) {
    Measure m;
    m.L_ = L;
    m.level_ = level;
    return m;
  }
  static Measure dirac(const FieldElem& a, int level, const OmegaScalar& mass) {
    Measure m = zero(a.field(), level);
    m.add(a, mass);
    return m;
  }
  static Measure dirac(const FieldElem& a, int level = 1) {
    return dirac(a, level, OmegaScalar::rational(a.field(), 1));
  }
  // masses on the residue representatives of o_L/pi^n, indexed by residue code
  static Measure cosets(const FieldPtr& L, int level, const std::vector<OmegaScalar>& masses) {
    RingPtr R = ResidueRing::make(L, level);
    Measure m = zero(L, level);
    for (long c = 0; c < R->size() && c < static_cast<long>(masses.size()); ++c)
      if (!masses[c].is_exact_zero()) m.add(R->elem(c), masses[c]);
    return m;
  }
  static Measure from_moments(const FieldPtr& L, std::vector<OmegaScalar> mom) {
    Measure m;
    m.L_ = L;
    m.variant_ = Variant::Moments;
    m.moments_ = std::move(mom);
    return m;
  }

  Variant variant() const { return variant_; }
  const FieldPtr& base() const { return L_; }
  int level() const { return level_; }
  long horizon() const { return static_cast<long>(moments_.size()) - 1; }
  const std::vector<OmegaScalar>& moment_list() const { return moments_; }

  void add(const FieldElem& a, const OmegaScalar& mass) {
    require(Variant::Dirac);
    if (!a.is_exact()) throw Unsupported("Dirac points must be exact");
    if (!a.is_zero() && a.valuation() < 0) throw IntegralityViolation("Dirac points lie in o_L");
    auto key = a.str();
    auto it = points_.find(key);
    if (it == points_.end()) {
      points_.emplace(key, std::make_pair(a, mass));
    } else {
      it->second.second += mass;
      if (it->second.second.is_exact_zero()) points_.erase(it);
    }
  }
  std::vector<std::pair<FieldElem, OmegaScalar>> points() const {
    require(Variant::Dirac);
    std::vector<std::pair<FieldElem, OmegaScalar>> out;
    for (auto& [k, v] : points_) out.push_back(v);
    return out;
  }

  // total mass on each coset of o_L/pi^m
  std::vector<OmegaScalar> coset_masses(int m) const {
    require(Variant::Dirac);
    RingPtr R = ResidueRing::make(L_, m);
    std::vector<OmegaScalar> out(R->size(), OmegaScalar(L_));
    for (auto& [k, v] : points_) {
      long c = R->code(v.first);
      out[c] = out[c] + v.second;
    }
    return out;
  }
  Measure pushed(int m) const {
    if (m > level_) throw ConductorExceedsLevel("cannot refine a coset measure");
    Measure r = *this;
    r.level_ = m;
    return r;
  }

  bool supported_on_units() const {
    for (auto& [k, v] : points_)
      if (pi_divides(v.first)) return false;
    return true;
  }

  friend Measure operator+(const Measure& a, const Measure& b) {
    if (a.variant_ != b.variant_) throw Unsupported("sum of measures in different representations");
    if (a.variant_ == Variant::Dirac) {
      Measure r = a;
      r.level_ = std::min(a.level_, b.level_);
      for (auto& [k, v] : b.points_) r.add(v.first, v.second);
      return r;
    }
    std::size_t n = std::min(a.moments_.size(), b.moments_.size());
    std::vector<OmegaScalar> m;
    for (std::size_t k = 0; k < n; ++k) m.push_back(a.moments_[k] + b.moments_[k]);
    return from_moments(a.L_, m);
  }
  Measure scaled(const OmegaScalar& s) const {
    Measure r = *this;
    for (auto& [k, v] : r.points_) v.second = v.second * s;
    for (auto& x : r.moments_) x = x * s;
    return r;
  }

  // mu(x^k) computed directly from the Dirac points
  std::vector<OmegaScalar> moments_direct(long K) const {
    if (variant_ == Variant::Moments) {
      if (K > horizon()) throw TruncationTooShort("moment horizon exceeded");
      return {moments_.begin(), moments_.begin() + K + 1};
    }
    FieldPtr F = field_of_masses();
    std::vector<OmegaScalar> out(K + 1, OmegaScalar(F));
    for (auto& [key, v] : points_) {
      FieldElem ak(F, 1L);
      FieldElem a = v.first.coerce_to(F);
      for (long k = 0; k <= K; ++k) {
        out[k] = out[k] + v.second * OmegaScalar(ak);
        ak = ak * a;
      }
    }
    return out;
  }
  Measure as_moments(long K) const { return from_moments(L_, moments_direct(K)); }

  FieldPtr field_of_masses() const {
    FieldPtr F = L_;
    for (auto& [k, v] : points_) F = common_field(OmegaScalar(F), v.second);
    for (auto& x : moments_) F = common_field(OmegaScalar(F), x);
    return F;
  }

 private:
  void require(Variant v) const {
    if (variant_ != v) throw Unsupported(v == Variant::Dirac ? "needs a Dirac combination" : "needs moments");
  }

  FieldPtr L_;
  Variant variant_ = Variant::Dirac;
  int level_ = 0;
  std::map<std::string, std::pair<FieldElem, OmegaScalar>> points_;
  std::vector<OmegaScalar> moments_;
};

// A_mu as an eta-combination (Dirac variant).
inline EtaSpan amice_span(const Measure& mu) {
  EtaSpan s(mu.base());
  for (auto& [a, m] : mu.points()) s.add(a, m);
  return s;
}

// A_mu(Z) = sum_j mu_j eta(j, Z), or sum_k mu(x^k) Omega^k log_LT^k / k! from moments.
inline Series amice_series(const FormalGroup& G, const Measure& mu) {
  if (mu.variant() == Measure::Variant::Dirac) return amice_span(mu).to_series(G);
  long K = mu.horizon();
  if (K >= G.order()) throw TruncationTooShort("moment horizon exceeds the series order");
  const auto& lp = G.log_powers();
  Series r(mu.field_of_masses(), K + 1);
  for (long k = 0; k <= K; ++k) r += lp[k].truncate(K + 1) * mu.moment_list()[k].times_omega(static_cast<int>(k));
  return r;
}

// mu(x^k) = k! Omega^{-k} [t^k] A_mu(exp_LT(t)): the measure with a prescribed Amice series.
inline Measure measure_from_series(const FormalGroup& G, const Series& A, long K) {
  Series At = A.compose(G.exp(), A.trunc());
  if (K >= At.trunc()) throw TruncationTooShort("moments beyond the series truncation");
  std::vector<OmegaScalar> out;
  Integer fact = 1;
  for (long k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    out.push_back(At.coeff(k).times_omega(static_cast<int>(-k)) * Rational(fact));
  }
  return Measure::from_moments(G.field(), out);
}

inline std::vector<OmegaScalar> moments(const FormalGroup& G, const Measure& mu, long K) {
  return measure_from_series(G, amice_series(G, mu), K).moment_list();
}

// lambda * mu: Dirac points add; moments convolve binomially
inline Measure convolve(const Measure& a, const Measure& b) {
  if (a.variant() != b.variant()) throw Unsupported("convolution of measures in different representations");
  if (a.variant() == Measure::Variant::Dirac) {
    Measure r = Measure::zero(a.base(), std::min(a.level(), b.level()));
    for (auto& [x, m] : a.points())
      for (auto& [y, n] : b.points()) r.add(x + y, m * n);
    return r;
  }
  long K = std::min(a.horizon(), b.horizon());
  std::vector<OmegaScalar> out;
  for (long k = 0; k <= K; ++k) {
    OmegaScalar s(common_field(a.moment_list()[0], b.moment_list()[0]));
    Integer binom = 1;
    for (long i = 0; i <= k; ++i) {
      s += a.moment_list()[i] * b.moment_list()[k - i] * Rational(binom);
      binom = binom * (k - i) / (i + 1);
    }
    out.push_back(s);
  }
  return Measure::from_moments(a.base(), out);
}

// x mu
inline Measure times_x(const Measure& mu) {
  if (mu.variant() == Measure::Variant::Moments) {
    if (mu.horizon() < 1) throw TruncationTooShort("no moments left after the shift");
    return Measure::from_moments(mu.base(), {mu.moment_list().begin() + 1, mu.moment_list().end()});
  }
  Measure r = Measure::zero(mu.base(), mu.level());
  for (auto& [a, m] : mu.points()) r.add(a, m * OmegaScalar(a.coerce_to(common_field(OmegaScalar(a), m))));
  return r;
}

// d mu: (d mu)(x^k) = k mu(x^{k-1})
inline Measure differentiate(const Measure& mu) {
  if (mu.variant() != Measure::Variant::Moments) throw Unsupported("d mu is defined on moments");
  std::vector<OmegaScalar> out{OmegaScalar(mu.field_of_masses())};
  for (long k = 1; k <= mu.horizon(); ++k) out.push_back(mu.moment_list()[k - 1] * Rational(k));
  return Measure::from_moments(mu.base(), out);
}

inline Measure restrict_units(const Measure& mu) {
  Measure r = Measure::zero(mu.base(), mu.level());
  for (auto& [a, m] : mu.points())
    if (!pi_divides(a)) r.add(a, m);
  return r;
}

// (1 - phi Psi) on the eta side
inline EtaSpan one_minus_phi_psi(const EtaSpan& s) {
  return s + phi_span(psi_span(s)).scaled(OmegaScalar::rational(s.field(), -1));
}

// Tw_rho(mu): masses scaled by rho(point)
inline Measure twist(const Measure& mu, const Character& rho) {
  if (rho.table_level() > 0 && rho.conductor() > mu.level())
    throw ConductorExceedsLevel("character conductor exceeds the measure level");
  Measure r = Measure::zero(mu.base(), mu.level());
  for (auto& [a, m] : mu.points()) {
    if (pi_divides(a)) throw NonUnitSupport("twists need unit support");
    FieldElem v = rho.rho(a);
    r.add(a, m * OmegaScalar(v));
  }
  return r;
}
inline Measure twist_chi_lt(const Measure& mu) {
  if (!mu.supported_on_units()) throw NonUnitSupport("twists need unit support");
  return times_x(mu);
}

// M_delta(mu) = sum_j mu_j delta(j) eta(j); with sigma_minus_1 the points are negated first.
inline EtaSpan mellin_span(const Measure& mu, const Character& delta, bool sigma_minus_1 = false) {
  EtaSpan s(mu.base());
  for (auto& [a, m] : mu.points()) {
    if (pi_divides(a)) throw NonUnitSupport("the Mellin transform needs unit support");
    FieldElem j = sigma_minus_1 ? -a : a;
    FieldElem v = delta.unit_value(j);
    s.add(j, m * OmegaScalar(v));
  }
  return s;
}
inline ModuleElem mellin(const GroupPtr& G, const Measure& mu, const Character& delta, bool sigma_minus_1 = false) {
  return {make_module(G, delta), mellin_span(mu, delta, sigma_minus_1).to_series(*G)};
}

// L'_lambda(1) = lambda(log chi_LT), and the LT variant (Omega / pi^n) lambda(log chi_LT).
inline FieldElem derivative_at(const Measure& lambda, long digits = kDefaultDigits) {
  FieldPtr L = lambda.base();
  FieldElem s(L);
  bool init = false;
  for (auto& [g, m] : lambda.points()) {
    if (pi_divides(g)) throw NonUnitSupport("Gamma is identified with o_L^x");
    if (!m.omega_free()) throw Unsupported("Omega-valued masses");
    FieldElem term = Character::unit_log(g, digits) * m.coeff(0).coerce_to(L);
    s = init ? s + term : term;
    init = true;
  }
  return s;
}
inline OmegaScalar derivative_at_lt(const Measure& lambda, int n, long digits = kDefaultDigits) {
  FieldElem pi = FieldElem::uniformizer(lambda.base());
  return OmegaScalar(derivative_at(lambda, digits) * pi.pow(-n), 1);
}

// Z_n(log chi_LT): the distribution with Amice series Z has linear moment 1/Omega, and
// log chi_LT = pi^n l_n on Gamma_n.
inline OmegaScalar zn_log_chi(const FormalGroup& G, int n) {
  Series Z = Series::variable(G.field()).truncate(G.order());
  return measure_from_series(G, Z, 1).moment_list()[1] * OmegaScalar(G.pi().pow(n));
}

inline OmegaScalar c_g(const FormalGroup& G, int n) { return zn_log_chi(G, n); }
inline OmegaScalar c_tr(const FormalGroup& G, int n) {
  long q = G.q();
  return OmegaScalar(G.pi().pow(-n) * Rational(q, q - 1), 1);
}

}  // namespace ltlab
