#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ltlab/padic.hpp"

namespace ltlab {

enum class Var { Z, t };

struct AnnulusSpec {
  Rational s, r;
};

// Truncated Laurent series sum_{k >= lo} c_k X^k + O(X^T) with OmegaScalar coefficients.
// T == kExact marks an exact Laurent polynomial.
class Series {
 public:
  static constexpr long kExact = kInfPrec;

  Series() = default;
  Series(FieldPtr K, long T, Var v = Var::Z) : K_(std::move(K)), T_(T), var_(v) {}
  Series(FieldPtr K, long lo, std::vector<OmegaScalar> c, long T, Var v = Var::Z)
      : K_(std::move(K)), lo_(lo), c_(std::move(c)), T_(T), var_(v) {
    normalize();
  }

  static Series constant(const OmegaScalar& a, long T = kExact, Var v = Var::Z) {
    return Series(a.field(), 0, {a}, T, v);
  }
  static Series constant(const FieldElem& a, long T = kExact, Var v = Var::Z) {
    return constant(OmegaScalar(a), T, v);
  }
  static Series monomial(const FieldElem& a, long k, long T = kExact, Var v = Var::Z) {
    return Series(a.field(), k, {OmegaScalar(a)}, T, v);
  }
  static Series variable(const FieldPtr& K, long T = kExact, Var v = Var::Z) {
    return monomial(FieldElem(K, 1L), 1, T, v);
  }
  // Series from Omega-free coefficients c_0, c_1, ... starting at exponent lo.
  static Series from_elems(const FieldPtr& K, long lo, const std::vector<FieldElem>& c, long T, Var v = Var::Z) {
    std::vector<OmegaScalar> w;
    w.reserve(c.size());
    for (auto& x : c) w.emplace_back(x.coerce_to(K));
    return Series(K, lo, std::move(w), T, v);
  }

  const FieldPtr& field() const { return K_; }
  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(c_.size()); }  // one past last stored exponent
  long trunc() const { return T_; }
  bool is_exact() const { return T_ >= kExact; }
  Var var() const { return var_; }
  const std::vector<OmegaScalar>& coeffs() const { return c_; }

  OmegaScalar coeff(long k) const {
    if (k >= T_) throw TruncationTooShort("coefficient " + std::to_string(k) + " lies beyond the truncation");
    if (k < lo_ || k >= hi()) return OmegaScalar(K_);
    return c_[k - lo_];
  }
  FieldElem coeff_elem(long k) const {
    OmegaScalar a = coeff(k);
    if (!a.omega_free()) throw Unsupported("coefficient depends on Omega");
    return a.coeff(0).coerce_to(K_);
  }

  // Lowest exponent with a coefficient that is nonzero at its precision; T if none.
  long laurent_order() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return lo_ + static_cast<long>(i);
    return T_;
  }
  bool is_power_series() const { return laurent_order() >= 0; }
  bool is_zero() const { return laurent_order() >= T_ || laurent_order() >= hi(); }

  Series power_part() const {
    std::vector<OmegaScalar> c;
    for (long k = std::max(0L, lo_); k < hi(); ++k) c.push_back(c_[k - lo_]);
    return Series(K_, std::max(0L, lo_), c, T_, var_);
  }
  Series principal_part() const {
    std::vector<OmegaScalar> c;
    for (long k = lo_; k < std::min(0L, hi()); ++k) c.push_back(c_[k - lo_]);
    return Series(K_, lo_, c, kExact, var_);
  }

  Series truncate(long T) const {
    Series r = *this;
    r.T_ = std::min(T_, T);
    r.normalize();
    return r;
  }
  Series truncate_pi(long N) const {
    Series r = *this;
    for (auto& a : r.c_) a = a.truncate_pi(N);
    return r;
  }
  Series with_var(Var v) const {
    Series r = *this;
    r.var_ = v;
    return r;
  }
  Series embed(const FieldPtr& G) const {
    Series r = *this;
    r.K_ = G;
    for (auto& a : r.c_) a = a.embed(G);
    return r;
  }

  template <class Fn>
  Series map_coeffs(Fn fn) const {
    Series r = *this;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = fn(lo_ + static_cast<long>(i), c_[i]);
    r.normalize();
    return r;
  }

  friend FieldPtr common_field(const Series& a, const Series& b) {
    return common_field(OmegaScalar(a.K_), OmegaScalar(b.K_));
  }

  friend Series operator+(const Series& a, const Series& b) {
    FieldPtr G = common_field(a, b);
    long T = std::min(a.T_, b.T_);
    long lo = std::min(a.lo_, b.lo_);
    long hi = std::min(std::max(a.hi(), b.hi()), T);
    std::vector<OmegaScalar> c;
    for (long k = lo; k < hi; ++k) {
      OmegaScalar s(G);
      if (k >= a.lo_ && k < a.hi()) s += a.c_[k - a.lo_];
      if (k >= b.lo_ && k < b.hi()) s += b.c_[k - b.lo_];
      c.push_back(s);
    }
    return Series(G, lo, std::move(c), T, a.var_);
  }
  Series operator-() const {
    Series r = *this;
    for (auto& a : r.c_) a = -a;
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

  friend Series operator*(const Series& a, const Series& b) {
    FieldPtr G = common_field(a, b);
    long oa = a.laurent_order(), ob = b.laurent_order();
    long T = std::min(sat_add(a.T_, ob), sat_add(b.T_, oa));
    if (oa >= a.T_ || ob >= b.T_) return Series(G, T, a.var_);
    long lo = oa + ob;
    long hi = std::min(a.hi() + b.hi() - 1, T);
    std::vector<OmegaScalar> c(std::max(0L, hi - lo), OmegaScalar(G));
    for (long i = oa; i < a.hi(); ++i) {
      const OmegaScalar& x = a.c_[i - a.lo_];
      if (x.is_exact_zero()) continue;
      for (long j = ob; j < b.hi() && i + j < hi; ++j) {
        const OmegaScalar& y = b.c_[j - b.lo_];
        if (y.is_exact_zero()) continue;
        c[i + j - lo] += x * y;
      }
    }
    return Series(G, lo, std::move(c), T, a.var_);
  }
  friend Series operator*(const Series& a, const OmegaScalar& s) {
    return a.map_coeffs([&](long, const OmegaScalar& x) { return x * s; });
  }
  friend Series operator*(const OmegaScalar& s, const Series& a) { return a * s; }
  friend Series operator*(const Series& a, const FieldElem& s) { return a * OmegaScalar(s); }
  friend Series operator*(const FieldElem& s, const Series& a) { return a * OmegaScalar(s); }
  friend Series operator*(const Series& a, const Rational& s) {
    return a.map_coeffs([&](long, const OmegaScalar& x) { return x * s; });
  }

  Series& operator+=(const Series& o) { return *this = *this + o; }
  Series& operator-=(const Series& o) { return *this = *this - o; }
  Series& operator*=(const Series& o) { return *this = *this * o; }

  Series shift(long k) const {
    Series r = *this;
    r.lo_ += k;
    r.T_ = sat_add(T_, k);
    return r;
  }

  // Multiplicative inverse; the leading coefficient must be an Omega-monomial.
  Series inverse() const {
    long m = laurent_order();
    if (m >= T_) throw PrecisionExhausted("inverse of a series indistinguishable from 0");
    OmegaScalar a0 = c_[m - lo_];
    OmegaScalar inv0 = a0.inverse();
    long rel = T_ >= kExact ? kExact : T_ - m;
    long n_terms = rel >= kExact ? -1 : rel;
    if (n_terms < 0) {
      // exact Laurent polynomial: only monomials have exact inverses
      if (hi() - m != 1) throw TruncationTooShort("inverse of an exact polynomial needs a truncation");
      return Series(K_, -m, {inv0}, kExact, var_);
    }
    std::vector<OmegaScalar> b;
    b.reserve(n_terms);
    for (long n = 0; n < n_terms; ++n) {
      if (n == 0) {
        b.push_back(inv0);
        continue;
      }
      OmegaScalar s(K_);
      for (long i = 1; i <= n; ++i) {
        long e = m + i;
        if (e >= hi()) break;
        const OmegaScalar& ai = c_[e - lo_];
        if (ai.is_exact_zero()) continue;
        s += ai * b[n - i];
      }
      b.push_back(-(s * inv0));
    }
    return Series(K_, -m, std::move(b), rel - m, var_);
  }

  // Inverse of an exact polynomial computed to truncation T.
  Series inverse_to(long T) const {
    if (!is_exact()) return inverse().truncate(T);
    long m = laurent_order();
    return truncate(T + 2 * m).inverse().truncate(T);
  }

  Series pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    Series r = constant(OmegaScalar::rational(K_, 1), kExact, var_), b = *this;
    while (n) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n) b = b * b;
    }
    return r;
  }

  Series derivative() const {
    std::vector<OmegaScalar> c;
    for (long k = lo_; k < hi(); ++k) c.push_back(c_[k - lo_] * Rational(k));
    return Series(K_, lo_ - 1, std::move(c), T_ >= kExact ? kExact : T_ - 1, var_);
  }

  // f(g) for g with zero constant term; negative exponents of f need g's leading
  // coefficient to be an Omega-monomial. `cap` bounds the output truncation.
  Series compose(const Series& g, long cap = kExact) const {
    FieldPtr G = common_field(*this, g);
    long k = g.laurent_order();
    if (k <= 0) throw NonConvergentComposition("inner series must have positive order");
    if (k >= g.T_) throw NonConvergentComposition("inner series is indistinguishable from 0");
    long T = T_ >= kExact ? kExact : T_ * k;
    for (long i = lo_; i < hi(); ++i) {
      if (i == 0 || c_[i - lo_].is_exact_zero()) continue;
      if (g.T_ < kExact) T = std::min(T, g.T_ + (i - 1) * k);
    }
    T = std::min(T, cap);
    if (T >= kExact) {
      // exact result: only possible when both are exact polynomials and f has no poles
      Series r(G, kExact, g.var_);
      Series gp = constant(OmegaScalar::rational(G, 1), kExact, g.var_);
      for (long i = 0; i < hi(); ++i) {
        if (i > 0) gp = gp * g;
        if (i < lo_) continue;
        if (!c_[i - lo_].is_exact_zero()) r += gp * c_[i - lo_];
      }
      if (lo_ < 0) throw TruncationTooShort("exact composition with poles needs a truncation");
      return r;
    }
    Series gt = g.truncate(T + std::max(0L, -lo_) * k + k);
    Series r(G, T, g.var_);
    if (lo_ < 0) {
      Series ginv = gt.inverse();
      Series gp = constant(OmegaScalar::rational(G, 1), kExact, g.var_);
      for (long i = -1; i >= lo_; --i) {
        gp = gp * ginv;
        if (i < hi() && !c_[i - lo_].is_exact_zero()) r += (gp * c_[i - lo_]).truncate(T);
      }
    }
    Series gp = constant(OmegaScalar::rational(G, 1), kExact, g.var_);
    for (long i = 0; i < hi(); ++i) {
      if (i > 0) gp = (gp * gt).truncate(T);
      if (i * k >= T) break;
      if (i < lo_) continue;
      if (!c_[i - lo_].is_exact_zero()) r += gp * c_[i - lo_];
    }
    return r.truncate(T);
  }

  // f(g) where g(0) = u has positive valuation. `tail_vp(k)` bounds v_p of the unknown
  // coefficients a_k (k >= T) of f; each output coefficient gets the resulting cap.
  Series compose_shifted(const Series& g, long out_T, const std::function<Rational(long)>& tail_vp) const {
    FieldPtr G = common_field(*this, g);
    if (lo_ < 0) throw NonConvergentComposition("shifted composition needs a power series");
    FieldElem u = g.coeff_elem(0).coerce_to(G);
    if (u.is_zero() || u.valuation() <= 0)
      throw NonConvergentComposition("constant term of the inner series must have positive valuation");
    Rational vu = u.valuation();
    Series h = g - constant(OmegaScalar(u), kExact, g.var_);
    Rational beta = detail::inf_rational();
    for (long j = 1; j < std::min(h.hi(), out_T); ++j) {
      FieldElem hj = h.coeff_elem(j);
      if (!hj.is_zero()) beta = detail::qmin(beta, hj.valuation() / j);
    }
    if (beta >= detail::inf_rational()) beta = 0;
    std::vector<Rational> cap(out_T, detail::inf_rational());
    if (!is_exact()) {
      for (long m = 0; m < out_T; ++m) {
        Rational best = detail::inf_rational();
        long stall = 0;
        for (long k = T_; stall < 64 && k < T_ + 100000; ++k) {
          Rational val = tail_vp(k) + vu * (k - m) + detail::qmin(Rational(0), beta * m);
          if (val < best) {
            best = val;
            stall = 0;
          } else {
            ++stall;
          }
        }
        cap[m] = best;
      }
    }
    Series gt = g.truncate(out_T);
    Series r(G, out_T, g.var_);
    Series gp = constant(OmegaScalar::rational(G, 1), kExact, g.var_);
    for (long i = 0; i < hi(); ++i) {
      if (i > 0) gp = (gp * gt).truncate(out_T);
      if (i < lo_ || c_[i - lo_].is_exact_zero()) continue;
      r += gp * c_[i - lo_];
    }
    r = r.truncate(out_T);
    return r.map_coeffs([&](long m, const OmegaScalar& x) {
      if (cap[m] >= detail::inf_rational()) return x;
      OmegaScalar y(G);
      for (auto& [e, c] : x.terms()) y += OmegaScalar(c.truncate_vp(cap[m]), e);
      if (y.is_exact_zero()) return OmegaScalar(FieldElem(G).truncate_vp(cap[m]), 0);
      return y;
    });
  }

  OmegaScalar residue() const {
    if (lo_ > -1 || hi() <= -1) return OmegaScalar(K_);
    return c_[-1 - lo_];
  }

  // Equality of the coefficients below the joint truncation.
  friend bool operator==(const Series& a, const Series& b) {
    long T = std::min(a.T_, b.T_);
    long lo = std::min(a.lo_, b.lo_);
    long hi = std::min(std::max(a.hi(), b.hi()), T);
    for (long k = lo; k < hi; ++k)
      if (a.coeff(k) != b.coeff(k)) return false;
    return true;
  }
  friend bool operator!=(const Series& a, const Series& b) { return !(a == b); }

  bool reproduced_by(const Series& hi_ser) const {
    if (hi_ser.T_ < T_) return false;
    for (long k = lo_; k < hi(); ++k)
      if (!c_[k - lo_].reproduced_by(hi_ser.coeff(k))) return false;
    for (long k = hi_ser.lo_; k < std::min(hi_ser.hi(), T_); ++k)
      if ((k < lo_ || k >= hi()) && !hi_ser.coeff(k).is_zero()) return false;
    return true;
  }

  std::string str() const {
    std::string s;
    for (long k = lo_; k < hi(); ++k) {
      if (c_[k - lo_].is_exact_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[k - lo_].str() + ")" + (var_ == Var::Z ? "Z^" : "t^") + std::to_string(k);
    }
    if (s.empty()) s = "0";
    if (!is_exact()) s += " + O(" + std::string(var_ == Var::Z ? "Z" : "t") + "^" + std::to_string(T_) + ")";
    return s;
  }

  static long sat_add(long a, long b) {
    if (a >= kExact || b >= kExact) return kExact;
    return a + b;
  }

 private:
  void normalize() {
    if (T_ < kExact && hi() > T_) c_.resize(std::max(0L, T_ - lo_));
    std::size_t first = 0;
    while (first < c_.size() && c_[first].is_exact_zero()) ++first;
    if (first == c_.size()) {
      c_.clear();
      lo_ = 0;
      return;
    }
    if (first) {
      c_.erase(c_.begin(), c_.begin() + first);
      lo_ += static_cast<long>(first);
    }
    while (!c_.empty() && c_.back().is_exact_zero()) c_.pop_back();
  }

  FieldPtr K_;
  long lo_ = 0;
  std::vector<OmegaScalar> c_;
  long T_ = kExact;
  Var var_ = Var::Z;
};

// v_p-valuation of an Omega-free coefficient, with Omega weighted by omega_vp.
inline Rational omega_scalar_vp(const OmegaScalar& a, const Rational& omega_vp) {
  Rational best = detail::inf_rational();
  for (auto& [k, c] : a.terms())
    if (!c.is_zero()) best = detail::qmin(best, c.valuation() + omega_vp * k);
  return best;
}

// min over the endpoints of inf_k (v_p(a_k) + k*t); integral coefficients are assumed past T.
inline Rational annulus_valuation(const Series& f, const AnnulusSpec& a, const Rational& omega_vp = 0) {
  Rational result = detail::inf_rational();
  for (const Rational& t : {a.s, a.r}) {
    Rational best = detail::inf_rational();
    for (long k = f.lo(); k < f.hi(); ++k) {
      Rational v = omega_scalar_vp(f.coeff(k), omega_vp);
      if (v < detail::inf_rational()) best = detail::qmin(best, v + t * k);
    }
    if (!f.is_exact() && Rational(f.trunc()) * t <= best)
      throw TailNotDominated("truncation cannot certify the annulus valuation");
    result = detail::qmin(result, best);
  }
  return result;
}

// -log_q of the Gauss norm, i.e. min_k v_pi(a_k) in units of a uniformizer of valuation 1/e.
inline Rational sup_norm_log(const Series& f, int e, const Rational& omega_vp = 0) {
  Rational best = detail::inf_rational();
  for (long k = f.lo(); k < f.hi(); ++k) {
    Rational v = omega_scalar_vp(f.coeff(k), omega_vp);
    if (v < detail::inf_rational()) best = detail::qmin(best, v * e);
  }
  if (!f.is_exact() && best > 0) throw TailNotDominated("unknown tail may have smaller norm");
  return best;
}

}  // namespace ltlab
