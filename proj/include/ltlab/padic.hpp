#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ltlab/errors.hpp"

namespace ltlab {

using Integer = mpz_class;
using Rational = mpq_class;

// Sentinel absolute precision of exact values.
inline constexpr long kInfPrec = std::numeric_limits<long>::max() / 8;

namespace detail {

inline const Integer& ppow(unsigned long p, long k) {
  thread_local std::map<std::pair<unsigned long, long>, Integer> cache;
  auto key = std::make_pair(p, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(k));
  return cache.emplace(key, std::move(r)).first->second;
}

inline long remove_p(Integer& z, unsigned long p) {
  if (z == 0) return 0;
  Integer pz = p;
  return static_cast<long>(mpz_remove(z.get_mpz_t(), z.get_mpz_t(), pz.get_mpz_t()));
}

inline long vp(const Integer& z, unsigned long p) {
  Integer t = z;
  return remove_p(t, p);
}

inline long vp(const Rational& q, unsigned long p) {
  return vp(q.get_num(), p) - vp(q.get_den(), p);
}

inline Integer fmod(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Integer invmod(const Integer& a, const Integer& m) {
  if (m == 1) return 0;
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw PrecisionExhausted("inverse of a non-unit modulo a prime power");
  return r;
}

inline long floor_q(const Rational& r) {
  Integer z;
  mpz_fdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return z.get_si();
}

inline long ceil_q(const Rational& r) {
  Integer z;
  mpz_cdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return z.get_si();
}

inline Rational qmin(const Rational& a, const Rational& b) { return a < b ? a : b; }

inline const Rational& inf_rational() {
  static const Rational r(kInfPrec);
  return r;
}

}  // namespace detail

// Element of Q_p: either an exact rational or u*p^v known modulo p^N.
class PAdic {
 public:
  PAdic() = default;
  PAdic(unsigned long p, Rational q) : p_(p), q_(std::move(q)) { q_.canonicalize(); }
  PAdic(unsigned long p, long n) : p_(p), q_(n) {}

  static PAdic approx(unsigned long p, const Integer& a, long shift, long N) {
    PAdic r;
    r.p_ = p;
    r.set_approx(a, shift, N);
    return r;
  }

  unsigned long prime() const { return p_; }
  bool is_exact() const { return exact_; }
  long precision() const { return exact_ ? kInfPrec : N_; }
  bool is_zero() const { return exact_ ? q_ == 0 : u_ == 0; }
  bool is_exact_zero() const { return exact_ && q_ == 0; }

  long valuation() const {
    if (is_zero()) throw PrecisionExhausted("valuation of a value indistinguishable from 0");
    return exact_ ? detail::vp(q_, p_) : v_;
  }
  // Lower bound for the valuation; exact zero gives kInfPrec.
  long val_bound() const {
    if (exact_) return q_ == 0 ? kInfPrec : detail::vp(q_, p_);
    return v_;
  }

  const Rational& exact_value() const { return q_; }
  const Integer& unit_digits() const { return u_; }

  Rational rational() const {
    if (exact_) return q_;
    if (u_ == 0) return 0;
    Rational r(u_);
    if (v_ >= 0)
      r *= Rational(detail::ppow(p_, v_));
    else
      r /= Rational(detail::ppow(p_, -v_));
    r.canonicalize();
    return r;
  }

  PAdic approx_at(long N) const {
    PAdic r;
    r.p_ = p_;
    if (!exact_) {
      if (N >= N_) return *this;
      r.set_approx(u_, v_, N);
      return r;
    }
    if (q_ == 0) {
      r.set_approx(0, N, N);
      return r;
    }
    Integer num = q_.get_num(), den = q_.get_den();
    long a = detail::remove_p(num, p_);
    long b = detail::remove_p(den, p_);
    long k = a - b;
    if (k >= N) {
      r.set_approx(0, N, N);
      return r;
    }
    const Integer& m = detail::ppow(p_, N - k);
    r.set_approx(num * detail::invmod(den, m), k, N);
    return r;
  }

  PAdic truncate(long N) const {
    if (N >= kInfPrec) return *this;
    if (exact_) return approx_at(N);
    return N >= N_ ? *this : approx_at(N);
  }

  friend PAdic operator+(const PAdic& a, const PAdic& b) {
    unsigned long p = a.p_ ? a.p_ : b.p_;
    if (a.exact_ && b.exact_) return PAdic(p, Rational(a.q_ + b.q_));
    long N = std::min(a.precision(), b.precision());
    PAdic A = a.with_prime(p).approx_at(N), B = b.with_prime(p).approx_at(N);
    if (A.u_ == 0) return B;
    if (B.u_ == 0) return A;
    long s = std::min(A.v_, B.v_);
    Integer val = A.u_ * detail::ppow(p, A.v_ - s) + B.u_ * detail::ppow(p, B.v_ - s);
    PAdic r;
    r.p_ = p;
    r.set_approx(val, s, N);
    return r;
  }

  PAdic operator-() const {
    if (exact_) return PAdic(p_, Rational(-q_));
    PAdic r;
    r.p_ = p_;
    r.set_approx(-u_, v_, N_);
    return r;
  }

  friend PAdic operator-(const PAdic& a, const PAdic& b) { return a + (-b); }

  friend PAdic operator*(const PAdic& a, const PAdic& b) {
    unsigned long p = a.p_ ? a.p_ : b.p_;
    if (a.exact_ && b.exact_) return PAdic(p, Rational(a.q_ * b.q_));
    if (a.is_exact_zero() || b.is_exact_zero()) return PAdic(p, 0L);
    if (a.exact_ || b.exact_) {
      const PAdic& E = a.exact_ ? a : b;
      const PAdic& X = a.exact_ ? b : a;
      Integer num = E.q_.get_num(), den = E.q_.get_den();
      long vr = detail::remove_p(num, p) - detail::remove_p(den, p);
      long N = X.N_ + vr;
      PAdic r;
      r.p_ = p;
      if (X.u_ == 0) {
        r.set_approx(0, N, N);
        return r;
      }
      const Integer& m = detail::ppow(p, X.N_ - X.v_);
      r.set_approx(X.u_ * num * detail::invmod(den, m), X.v_ + vr, N);
      return r;
    }
    long N = std::min(a.N_ + b.v_, b.N_ + a.v_);
    PAdic r;
    r.p_ = p;
    if (a.u_ == 0 || b.u_ == 0) {
      r.set_approx(0, N, N);
      return r;
    }
    r.set_approx(a.u_ * b.u_, a.v_ + b.v_, N);
    return r;
  }

  PAdic inverse() const {
    if (exact_) {
      if (q_ == 0) throw PrecisionExhausted("division by exact zero");
      return PAdic(p_, Rational(1 / q_));
    }
    if (u_ == 0) throw PrecisionExhausted("division by a value indistinguishable from 0");
    long R = N_ - v_;
    PAdic r;
    r.p_ = p_;
    r.set_approx(detail::invmod(u_, detail::ppow(p_, R)), -v_, -v_ + R);
    return r;
  }

  friend PAdic operator/(const PAdic& a, const PAdic& b) { return a * b.inverse(); }

  PAdic& operator+=(const PAdic& o) { return *this = *this + o; }
  PAdic& operator-=(const PAdic& o) { return *this = *this - o; }
  PAdic& operator*=(const PAdic& o) { return *this = *this * o; }

  friend bool operator==(const PAdic& a, const PAdic& b) { return (a - b).is_zero(); }
  friend bool operator!=(const PAdic& a, const PAdic& b) { return !(a == b); }

  bool identical(const PAdic& o) const {
    if (exact_ != o.exact_) return false;
    if (exact_) return q_ == o.q_;
    return N_ == o.N_ && v_ == o.v_ && u_ == o.u_;
  }

  // True when `hi`, computed with more guard digits, reproduces *this after truncation.
  bool reproduced_by(const PAdic& hi) const {
    if (exact_) return hi.exact_ && hi.q_ == q_;
    if (hi.precision() < N_) return false;
    return hi.approx_at(N_).identical(*this);
  }

  std::string str() const {
    if (exact_) return q_.get_str();
    return rational().get_str() + " + O(" + std::to_string(p_) + "^" + std::to_string(N_) + ")";
  }

 private:
  PAdic with_prime(unsigned long p) const {
    if (p_) return *this;
    PAdic r = *this;
    r.p_ = p;
    return r;
  }

  void set_approx(Integer a, long shift, long N) {
    exact_ = false;
    q_ = 0;
    N_ = N;
    if (shift >= N) {
      u_ = 0;
      v_ = N;
      return;
    }
    a = detail::fmod(a, detail::ppow(p_, N - shift));
    if (a == 0) {
      u_ = 0;
      v_ = N;
      return;
    }
    long k = detail::remove_p(a, p_);
    v_ = shift + k;
    u_ = a;
  }

  unsigned long p_ = 0;
  bool exact_ = true;
  Rational q_ = 0;
  Integer u_ = 0;
  long v_ = 0;
  long N_ = 0;
};

class FieldElem;
class LocalField;
using FieldPtr = std::shared_ptr<const LocalField>;
using Flat = std::vector<PAdic>;

struct Stage {
  enum class Kind { Eisenstein, Unramified };
  Kind kind;
  int degree;
  std::vector<Flat> poly;  // c_0..c_{d-1} of the monic X^d + sum c_i X^i
  Rational root_val;       // v_p of the stage generator
};

// A tower of simple extensions over Q_p; elements are flat coefficient vectors in the
// mixed-radix power basis, outermost stage slowest.
class LocalField {
 public:
  struct Cyclotomic {
    Flat zeta;  // a primitive p^m-th root of unity
    int m;
  };

  unsigned long p() const { return p_; }
  int e() const { return e_; }
  int f() const { return f_; }
  const Integer& q() const { return q_; }
  long q_long() const { return q_.get_si(); }
  std::size_t degree() const { return dims_.back(); }
  std::size_t levels() const { return stages_.size(); }
  std::size_t dim(std::size_t level) const { return dims_[level]; }
  const Stage& stage(std::size_t k) const { return stages_[k]; }
  const std::vector<Stage>& stages() const { return stages_; }
  const Flat& uniformizer_flat() const { return pi_; }
  const std::string& signature() const { return signature_; }
  const std::string& name() const { return name_; }
  const std::optional<Cyclotomic>& cyclotomic() const { return cyclo_; }
  Rational pi_val() const { return Rational(1, e_); }

  bool same_as(const LocalField& o) const { return signature_ == o.signature_; }

  bool is_prefix_of(const LocalField& o) const {
    if (p_ != o.p_ || stages_.size() > o.stages_.size()) return false;
    for (std::size_t k = 0; k < stages_.size(); ++k)
      if (stage_sig_[k] != o.stage_sig_[k]) return false;
    return true;
  }

  Flat zero_flat(std::size_t level) const { return Flat(dims_[level], PAdic(p_, 0L)); }

  static bool flat_exact_zero(const PAdic* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      if (!a[i].is_exact_zero()) return false;
    return true;
  }

  Flat mul_flat(std::size_t level, const PAdic* a, const PAdic* b) const {
    if (level == 0) return Flat{a[0] * b[0]};
    const Stage& st = stages_[level - 1];
    std::size_t sub = dims_[level - 1];
    int d = st.degree;
    std::vector<Flat> prod(2 * d - 1, zero_flat(level - 1));
    for (int i = 0; i < d; ++i) {
      if (flat_exact_zero(a + i * sub, sub)) continue;
      for (int j = 0; j < d; ++j) {
        if (flat_exact_zero(b + j * sub, sub)) continue;
        Flat t = mul_flat(level - 1, a + i * sub, b + j * sub);
        for (std::size_t k = 0; k < sub; ++k) prod[i + j][k] += t[k];
      }
    }
    for (int r = 2 * d - 2; r >= d; --r) {
      if (flat_exact_zero(prod[r].data(), sub)) continue;
      for (int i = 0; i < d; ++i) {
        if (flat_exact_zero(st.poly[i].data(), sub)) continue;
        Flat t = mul_flat(level - 1, prod[r].data(), st.poly[i].data());
        for (std::size_t k = 0; k < sub; ++k) prod[r - d + i][k] -= t[k];
      }
    }
    Flat out;
    out.reserve(dims_[level]);
    for (int i = 0; i < d; ++i) out.insert(out.end(), prod[i].begin(), prod[i].end());
    return out;
  }

  struct VInfo {
    bool zero;
    Rational val;   // v_p, meaningful when !zero
    Rational prec;  // absolute precision in v_p units
  };

  VInfo vinfo(std::size_t level, const PAdic* a) const {
    if (level == 0) {
      const PAdic& x = a[0];
      Rational prec = x.is_exact() ? detail::inf_rational() : Rational(x.precision());
      if (x.is_zero()) return {true, prec, prec};
      return {false, Rational(x.valuation()), prec};
    }
    const Stage& st = stages_[level - 1];
    std::size_t sub = dims_[level - 1];
    Rational best = detail::inf_rational(), prec = detail::inf_rational();
    bool any = false;
    for (int i = 0; i < st.degree; ++i) {
      VInfo c = vinfo(level - 1, a + i * sub);
      Rational shift = st.root_val * i;
      if (c.prec < detail::inf_rational()) prec = detail::qmin(prec, c.prec + shift);
      if (!c.zero) {
        any = true;
        best = detail::qmin(best, c.val + shift);
      }
    }
    if (any && best < prec) return {false, best, prec};
    return {true, prec, prec};
  }

  Flat truncate_flat(std::size_t level, const PAdic* a, const Rational& M) const {
    if (level == 0) {
      if (M >= detail::inf_rational()) return Flat{a[0]};
      return Flat{a[0].truncate(detail::ceil_q(M))};
    }
    const Stage& st = stages_[level - 1];
    std::size_t sub = dims_[level - 1];
    Flat out;
    out.reserve(dims_[level]);
    for (int i = 0; i < st.degree; ++i) {
      Flat t = truncate_flat(level - 1, a + i * sub, M - st.root_val * i);
      out.insert(out.end(), t.begin(), t.end());
    }
    return out;
  }

  // Flat positions whose Eisenstein-stage indices all vanish (they carry the residue field).
  std::vector<std::size_t> residue_positions() const {
    std::vector<std::size_t> pos;
    for (std::size_t idx = 0; idx < degree(); ++idx) {
      std::size_t r = idx;
      bool ok = true;
      std::vector<std::size_t> digits(stages_.size());
      for (std::size_t k = stages_.size(); k-- > 0;) {
        digits[k] = r / dims_[k];
        r %= dims_[k];
      }
      for (std::size_t k = 0; k < stages_.size(); ++k)
        if (stages_[k].kind == Stage::Kind::Eisenstein && digits[k] != 0) ok = false;
      if (ok) pos.push_back(idx);
    }
    return pos;
  }

  static FieldPtr base(unsigned long p, std::string name = "") {
    auto F = std::shared_ptr<LocalField>(new LocalField());
    F->p_ = p;
    F->dims_ = {1};
    F->e_ = 1;
    F->f_ = 1;
    F->q_ = p;
    F->pi_ = Flat{PAdic(p, static_cast<long>(p))};
    F->name_ = name.empty() ? "Q_" + std::to_string(p) : name;
    F->signature_ = "p=" + std::to_string(p);
    return F;
  }

  // Appends a stage with the given monic polynomial (coefficients c_0..c_d as flats of `base`).
  static FieldPtr extend_raw(const FieldPtr& B, std::vector<Flat> monic, std::string name);

  static FieldPtr with_cyclotomic(const FieldPtr& F, Flat zeta, int m) {
    auto G = std::shared_ptr<LocalField>(new LocalField(*F));
    G->cyclo_ = Cyclotomic{std::move(zeta), m};
    return G;
  }

 private:
  LocalField() = default;

  unsigned long p_ = 0;
  std::vector<Stage> stages_;
  std::vector<std::string> stage_sig_;
  std::vector<std::size_t> dims_;
  int e_ = 1, f_ = 1;
  Integer q_;
  Flat pi_;
  std::string name_, signature_;
  std::optional<Cyclotomic> cyclo_;
};

class FieldElem {
 public:
  FieldElem() = default;
  explicit FieldElem(FieldPtr F) : F_(std::move(F)) { c_ = F_->zero_flat(F_->levels()); }
  FieldElem(FieldPtr F, const Rational& r) : FieldElem(std::move(F)) { c_[0] = PAdic(F_->p(), r); }
  FieldElem(FieldPtr F, long n) : FieldElem(std::move(F), Rational(n)) {}
  FieldElem(FieldPtr F, const PAdic& a) : FieldElem(std::move(F)) { c_[0] = a; }
  FieldElem(FieldPtr F, Flat c) : F_(std::move(F)), c_(std::move(c)) {
    if (c_.size() != F_->degree()) throw FieldMismatch("coefficient vector has the wrong length");
  }

  // Generator of stage `level` (1-based), embedded in F.
  static FieldElem gen(const FieldPtr& F, std::size_t level) {
    FieldElem x(F);
    x.c_[F->dim(level - 1)] = PAdic(F->p(), 1L);
    return x;
  }
  static FieldElem uniformizer(const FieldPtr& F) { return FieldElem(F, F->uniformizer_flat()); }

  const FieldPtr& field() const { return F_; }
  const Flat& coeffs() const { return c_; }
  unsigned long p() const { return F_->p(); }

  bool is_zero() const { return info().zero; }
  bool is_exact() const {
    for (auto& a : c_)
      if (!a.is_exact()) return false;
    return true;
  }
  bool is_exact_zero() const { return LocalField::flat_exact_zero(c_.data(), c_.size()); }

  LocalField::VInfo info() const { return F_->vinfo(F_->levels(), c_.data()); }

  // p-adic valuation (v_p(p) = 1).
  Rational valuation() const {
    auto v = info();
    if (v.zero) throw PrecisionExhausted("valuation of an element indistinguishable from 0");
    return v.val;
  }
  Rational vpi() const { return valuation() * F_->e(); }
  // Absolute precision in v_p units (kInfPrec when exact).
  Rational precision() const { return info().prec; }
  long prec_pi() const {
    Rational pr = precision();
    if (pr >= detail::inf_rational()) return kInfPrec;
    return detail::floor_q(pr * F_->e());
  }

  FieldElem truncate_vp(const Rational& M) const {
    return FieldElem(F_, F_->truncate_flat(F_->levels(), c_.data(), M));
  }
  FieldElem truncate_pi(long N) const {
    if (N >= kInfPrec) return *this;
    return truncate_vp(Rational(N, F_->e()));
  }
  // Element-wise approximation at p-adic precision N for exact inputs (keeps approximations).
  FieldElem approx_vp(long N) const { return truncate_vp(Rational(N)); }

  bool reproduced_by(const FieldElem& hi) const {
    FieldElem h = hi.coerce_to(F_);
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].reproduced_by(h.c_[i])) return false;
    return true;
  }
  bool identical(const FieldElem& o) const {
    if (!F_->same_as(*o.F_)) return false;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].identical(o.c_[i])) return false;
    return true;
  }

  FieldElem embed(const FieldPtr& G) const {
    if (F_->same_as(*G)) return FieldElem(G, c_);
    if (!F_->is_prefix_of(*G)) throw FieldMismatch("cannot embed " + F_->name() + " into " + G->name());
    FieldElem x(G);
    std::copy(c_.begin(), c_.end(), x.c_.begin());
    return x;
  }

  // Descends to a prefix subfield; the dropped coordinates must vanish at precision.
  FieldElem descend(const FieldPtr& G) const {
    if (F_->same_as(*G)) return FieldElem(G, c_);
    if (!G->is_prefix_of(*F_)) throw FieldMismatch("not a subfield");
    for (std::size_t i = G->degree(); i < c_.size(); ++i)
      if (!c_[i].is_zero()) throw PrecisionExhausted("element does not descend to " + G->name());
    Flat c(c_.begin(), c_.begin() + G->degree());
    return FieldElem(G, std::move(c));
  }

  FieldElem coerce_to(const FieldPtr& G) const {
    if (F_->same_as(*G)) return *this;
    if (F_->is_prefix_of(*G)) return embed(G);
    return descend(G);
  }

  bool in_qp() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return false;
    return true;
  }
  const PAdic& qp_part() const { return c_[0]; }
  // Exact rational value; throws unless the element is an exact rational.
  Rational to_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (!c_[i].is_exact_zero()) throw FieldMismatch("element is not rational");
    if (!c_[0].is_exact()) throw PrecisionExhausted("element is not exact");
    return c_[0].exact_value();
  }

  friend FieldPtr common_field(const FieldElem& a, const FieldElem& b) {
    if (a.F_->same_as(*b.F_)) return a.F_;
    if (a.F_->is_prefix_of(*b.F_)) return b.F_;
    if (b.F_->is_prefix_of(*a.F_)) return a.F_;
    throw FieldMismatch("incompatible fields " + a.F_->name() + " and " + b.F_->name());
  }

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
    FieldPtr G = common_field(a, b);
    FieldElem A = a.embed(G), B = b.embed(G);
    for (std::size_t i = 0; i < A.c_.size(); ++i) A.c_[i] += B.c_[i];
    return A;
  }
  FieldElem operator-() const {
    FieldElem r = *this;
    for (auto& a : r.c_) a = -a;
    return r;
  }
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
    FieldPtr G = common_field(a, b);
    FieldElem A = a.embed(G), B = b.embed(G);
    if (A.is_exact_zero() || B.is_exact_zero()) return FieldElem(G);
    if (B.in_exact_qp()) return A.scale(B.c_[0]);
    if (A.in_exact_qp()) return B.scale(A.c_[0]);
    return FieldElem(G, G->mul_flat(G->levels(), A.c_.data(), B.c_.data()));
  }
  friend FieldElem operator*(const FieldElem& a, const Rational& r) { return a.scale(PAdic(a.p(), r)); }
  friend FieldElem operator*(const Rational& r, const FieldElem& a) { return a * r; }
  friend FieldElem operator+(const FieldElem& a, const Rational& r) { return a + FieldElem(a.F_, r); }
  friend FieldElem operator-(const FieldElem& a, const Rational& r) { return a + FieldElem(a.F_, Rational(-r)); }

  FieldElem scale(const PAdic& s) const {
    FieldElem r = *this;
    for (auto& a : r.c_) a *= s;
    return r;
  }

  FieldElem inverse() const;
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inverse(); }
  friend FieldElem operator/(const FieldElem& a, const Rational& r) { return a * Rational(1 / r); }

  FieldElem pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    FieldElem result(F_, 1L), base = *this;
    while (n) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
  FieldElem& operator-=(const FieldElem& o) { return *this = *this - o; }
  FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }

  friend bool operator==(const FieldElem& a, const FieldElem& b) { return (a - b).is_zero(); }
  friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i].str();
    os << "]";
    return os.str();
  }

 private:
  bool in_exact_qp() const {
    if (!c_[0].is_exact()) return false;
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (!c_[i].is_exact_zero()) return false;
    return true;
  }

  FieldPtr F_;
  Flat c_;
};

namespace detail {

// Solves M y = rhs over Q_p by elimination with minimal-valuation pivots.
inline std::vector<PAdic> solve_linear(std::vector<std::vector<PAdic>> M, std::vector<PAdic> rhs) {
  std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    long best = kInfPrec;
    for (std::size_t r = col; r < n; ++r) {
      if (M[r][col].is_zero()) continue;
      long v = M[r][col].valuation();
      if (piv == n || v < best) {
        piv = r;
        best = v;
      }
    }
    if (piv == n) throw PrecisionExhausted("singular system at working precision");
    std::swap(M[piv], M[col]);
    std::swap(rhs[piv], rhs[col]);
    PAdic inv = M[col][col].inverse();
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || M[r][col].is_exact_zero()) continue;
      PAdic fac = M[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) M[r][c] -= fac * M[col][c];
      rhs[r] -= fac * rhs[col];
    }
  }
  std::vector<PAdic> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = rhs[i] / M[i][i];
  return y;
}

}  // namespace detail

inline FieldElem FieldElem::inverse() const {
  if (is_exact_zero()) throw PrecisionExhausted("division by exact zero");
  if (in_exact_qp()) return FieldElem(F_, c_[0].inverse());
  if (c_.size() == 1) return FieldElem(F_, c_[0].inverse());
  std::size_t D = c_.size();
  std::vector<std::vector<PAdic>> M(D, std::vector<PAdic>(D));
  for (std::size_t j = 0; j < D; ++j) {
    FieldElem b(F_);
    b.c_[j] = PAdic(p(), 1L);
    FieldElem col = *this * b;
    for (std::size_t i = 0; i < D; ++i) M[i][j] = col.c_[i];
  }
  std::vector<PAdic> rhs(D, PAdic(p(), 0L));
  rhs[0] = PAdic(p(), 1L);
  return FieldElem(F_, detail::solve_linear(std::move(M), std::move(rhs)));
}

inline FieldPtr LocalField::extend_raw(const FieldPtr& B, std::vector<Flat> monic, std::string name) {
  int d = static_cast<int>(monic.size()) - 1;
  if (d < 2) throw Unsupported("stage polynomials must have degree at least 2");
  FieldElem lead(B, monic.back());
  if (!(lead.is_exact() && lead == FieldElem(B, 1L))) throw NotEisenstein("stage polynomial is not monic");
  std::vector<FieldElem> c;
  for (int i = 0; i < d; ++i) c.emplace_back(B, monic[i]);
  Rational u = B->pi_val();
  Stage st;
  st.degree = d;
  for (int i = 0; i < d; ++i) st.poly.push_back(monic[i]);
  bool const_is_unit = !c[0].is_zero() && c[0].valuation() == 0;
  if (!const_is_unit) {
    if (c[0].is_zero() || c[0].valuation() != u)
      throw NotEisenstein("constant term must have valuation exactly one in the base");
    for (int i = 1; i < d; ++i)
      if (!c[i].is_zero() && c[i].valuation() < u)
        throw NotEisenstein("coefficient " + std::to_string(i) + " is not divisible by the base uniformizer");
    st.kind = Stage::Kind::Eisenstein;
    st.root_val = u / d;
  } else {
    for (int i = 0; i < d; ++i)
      if (!c[i].is_zero() && c[i].valuation() < 0)
        throw NotEisenstein("non-integral coefficient in an unramified stage");
    if (B->f() != 1) throw Unsupported("unramified stages are supported only over a prime residue field");
    unsigned long p = B->p();
    std::vector<long> red(d + 1);
    for (int i = 0; i < d; ++i) {
      Rational r = c[i].coeffs()[0].is_zero() ? Rational(0) : c[i].coeffs()[0].rational();
      Integer num = r.get_num(), den = r.get_den();
      Integer m = p;
      red[i] = detail::fmod(num * detail::invmod(den, m), m).get_si();
    }
    red[d] = 1;
    // trial division by every monic polynomial of degree 1..d/2 over F_p
    auto divides = [&](const std::vector<long>& g) {
      std::vector<long> rem = red;
      int dg = static_cast<int>(g.size()) - 1;
      for (int k = d; k >= dg; --k) {
        long lc = ((rem[k] % (long)p) + p) % p;
        if (!lc) continue;
        for (int j = 0; j <= dg; ++j) rem[k - dg + j] = ((rem[k - dg + j] - lc * g[j]) % (long)p + p) % p;
      }
      for (int k = 0; k < dg; ++k)
        if (rem[k] % (long)p) return false;
      return true;
    };
    for (int dg = 1; dg <= d / 2; ++dg) {
      long count = 1;
      for (int j = 0; j < dg; ++j) count *= static_cast<long>(p);
      for (long code = 0; code < count; ++code) {
        std::vector<long> g(dg + 1);
        long t = code;
        for (int j = 0; j < dg; ++j) {
          g[j] = t % static_cast<long>(p);
          t /= static_cast<long>(p);
        }
        g[dg] = 1;
        if (divides(g)) throw NotIrreducibleDetected("residue polynomial has a factor of degree " + std::to_string(dg));
      }
    }
    st.kind = Stage::Kind::Unramified;
    st.root_val = 0;
  }

  auto F = std::shared_ptr<LocalField>(new LocalField(*B));
  F->cyclo_.reset();
  std::size_t old = B->degree();
  F->stages_.push_back(st);
  F->dims_.push_back(old * d);
  auto lift = [&](const Flat& x) {
    Flat y = F->zero_flat(F->levels());
    std::copy(x.begin(), x.end(), y.begin());
    return y;
  };
  std::ostringstream sig;
  sig << (st.kind == Stage::Kind::Eisenstein ? "E" : "U") << d << "(";
  for (int i = 0; i < d; ++i) sig << FieldElem(B, monic[i]).str() << ";";
  sig << ")";
  F->stage_sig_.push_back(sig.str());
  if (st.kind == Stage::Kind::Eisenstein) {
    F->e_ = B->e_ * d;
    Flat g = F->zero_flat(F->levels());
    g[old] = PAdic(B->p(), 1L);
    F->pi_ = g;
  } else {
    F->f_ = B->f_ * d;
    Integer qq;
    mpz_ui_pow_ui(qq.get_mpz_t(), B->p(), static_cast<unsigned long>(F->f_));
    F->q_ = qq;
    F->pi_ = lift(B->pi_);
  }
  F->signature_ = B->signature_ + "|" + sig.str();
  F->name_ = name.empty() ? B->name_ + "[" + sig.str() + "]" : name;
  return F;
}

inline FieldPtr extend(const FieldPtr& B, const std::vector<FieldElem>& monic, std::string name = "") {
  std::vector<Flat> raw;
  for (auto& c : monic) raw.push_back(c.coerce_to(B).coeffs());
  return LocalField::extend_raw(B, std::move(raw), std::move(name));
}

// Builds Q_p followed by stages whose polynomials have rational coefficients (low to high).
inline FieldPtr make_field(unsigned long p, const std::vector<std::vector<Rational>>& tower, std::string name = "") {
  FieldPtr F = LocalField::base(p);
  for (std::size_t k = 0; k < tower.size(); ++k) {
    std::vector<FieldElem> c;
    for (auto& r : tower[k]) c.emplace_back(F, r);
    F = extend(F, c, k + 1 == tower.size() ? name : "");
  }
  return F;
}

inline PAdic trace_to_qp(const FieldElem& x) {
  const FieldPtr& F = x.field();
  PAdic t(F->p(), 0L);
  for (std::size_t j = 0; j < F->degree(); ++j) {
    Flat b = F->zero_flat(F->levels());
    b[j] = PAdic(F->p(), 1L);
    FieldElem col = x * FieldElem(F, b);
    t += col.coeffs()[j];
  }
  return t;
}

// Representatives of the residue field: digits 0..p-1 on the residue positions.
inline std::vector<FieldElem> residue_field_reps(const FieldPtr& F) {
  auto pos = F->residue_positions();
  std::vector<FieldElem> out;
  long p = static_cast<long>(F->p());
  long total = 1;
  for (std::size_t i = 0; i < pos.size(); ++i) total *= p;
  for (long code = 0; code < total; ++code) {
    FieldElem x(F);
    Flat c = x.coeffs();
    long t = code;
    for (auto idx : pos) {
      c[idx] = PAdic(F->p(), t % p);
      t /= p;
    }
    out.emplace_back(F, c);
  }
  return out;
}

// Teichmuller lift of the residue class of the unit r, at p-adic precision N.
inline FieldElem teichmuller(const FieldElem& r, long N) {
  if (r.is_zero() || r.valuation() != 0) throw OutOfConvergenceDomain("Teichmuller lift needs a unit");
  const FieldPtr& F = r.field();
  FieldElem one(F, 1L);
  if (r.is_exact() && (r == one || r == -one)) return r;
  long q = F->q_long();
  FieldElem x = r.approx_vp(N);
  long iters = N * F->e() + 8;
  for (long it = 0; it < iters; ++it) {
    FieldElem y = x.pow(q);
    if (y.identical(x)) break;
    x = y;
  }
  if (!(x.pow(q - 1) == one)) throw PrecisionExhausted("Teichmuller iteration did not converge");
  return x;
}

inline FieldElem padic_log(const FieldElem& x, long N) {
  const FieldPtr& F = x.field();
  FieldElem y = x - FieldElem(F, 1L);
  if (y.is_exact_zero()) return FieldElem(F);
  if (y.is_zero()) return y.truncate_vp(Rational(N));
  Rational vy = y.valuation();
  if (vy <= 0) throw OutOfConvergenceDomain("log needs x congruent to 1 modulo the maximal ideal");
  double v = vy.get_d(), lp = std::log(static_cast<double>(F->p()));
  auto g = [&](double k) { return k * v - std::log(k) / lp; };
  long k0 = std::max<long>(2, static_cast<long>(std::ceil(1.0 / (v * lp))) + 1);
  long K = k0;
  while (g(static_cast<double>(K + 1)) < N + 1) ++K;
  long guard = static_cast<long>(std::ceil(std::log(static_cast<double>(K + 1)) / lp)) + 2;
  FieldElem yy = y.approx_vp(N + guard);
  FieldElem term = yy, sum(F);
  for (long k = 1; k <= K; ++k) {
    FieldElem t = term * Rational(k % 2 ? 1 : -1, k);
    sum += t;
    term = term * yy;
  }
  return sum.truncate_vp(Rational(N));
}

inline FieldElem padic_exp(const FieldElem& y, long N) {
  const FieldPtr& F = y.field();
  if (y.is_exact_zero()) return FieldElem(F, 1L);
  if (y.is_zero()) return (FieldElem(F, 1L) + y).truncate_vp(Rational(N));
  Rational vy = y.valuation();
  Rational bound(1, static_cast<long>(F->p()) - 1);
  if (vy <= bound) throw OutOfConvergenceDomain("exp needs v_p(y) > 1/(p-1)");
  Rational slope = vy - bound;
  long K = 1;
  while (slope * (K + 1) + bound < N + 1) ++K;
  long guard = detail::ceil_q(bound * K) + 2;
  FieldElem yy = y.approx_vp(N + guard);
  FieldElem term(F, 1L), sum(F, 1L);
  for (long k = 1; k <= K; ++k) {
    term = term * yy * Rational(1, k);
    sum += term;
  }
  return sum.truncate_vp(Rational(N));
}

// Primitive E-th root of unity in F (Teichmuller part times a cyclotomic p-power part).
inline FieldElem root_of_unity(const FieldPtr& F, long E, long N) {
  long p = static_cast<long>(F->p());
  long Ep = E, pj = 1;
  int j = 0;
  while (Ep % p == 0) {
    Ep /= p;
    pj *= p;
    ++j;
  }
  FieldElem z(F, 1L);
  if (j > 0) {
    if (!F->cyclotomic() || F->cyclotomic()->m < j)
      throw Unsupported("field lacks the p-power roots of unity of order " + std::to_string(pj));
    long shrink = 1;
    for (int i = j; i < F->cyclotomic()->m; ++i) shrink *= p;
    z = FieldElem(F, F->cyclotomic()->zeta).pow(shrink);
  }
  if (Ep == 1) return z;
  if (Ep == 2) return -z;
  if ((F->q_long() - 1) % Ep != 0) throw Unsupported("no root of unity of order " + std::to_string(Ep));
  std::vector<long> primes;
  for (long t = Ep, d = 2; t > 1; ++d)
    if (t % d == 0) {
      primes.push_back(d);
      while (t % d == 0) t /= d;
    }
  FieldElem one(F, 1L);
  auto is_one_mod_pi = [&](const FieldElem& a) {
    FieldElem d = a - one;
    return d.is_zero() || d.valuation() > 0;
  };
  for (auto& r : residue_field_reps(F)) {
    if (r.is_exact_zero()) continue;
    if (!is_one_mod_pi(r.pow(Ep))) continue;
    bool prim = true;
    for (long l : primes)
      if (is_one_mod_pi(r.pow(Ep / l))) prim = false;
    if (!prim) continue;
    return z * teichmuller(r, N);
  }
  throw Unsupported("no root of unity of order " + std::to_string(Ep));
}

// Laurent polynomial in the formal period Omega.
class OmegaScalar {
 public:
  OmegaScalar() = default;
  explicit OmegaScalar(FieldPtr K) : K_(std::move(K)) {}
  OmegaScalar(const FieldElem& c, int k = 0) : K_(c.field()) {
    if (!c.is_exact_zero()) t_.emplace(k, c);
  }
  static OmegaScalar omega_pow(const FieldPtr& K, int k) { return OmegaScalar(FieldElem(K, 1L), k); }
  static OmegaScalar rational(const FieldPtr& K, const Rational& r) { return OmegaScalar(FieldElem(K, r)); }

  const FieldPtr& field() const { return K_; }
  const std::map<int, FieldElem>& terms() const { return t_; }
  FieldElem coeff(int k) const {
    auto it = t_.find(k);
    return it == t_.end() ? FieldElem(K_) : it->second;
  }
  bool is_zero() const {
    for (auto& [k, c] : t_)
      if (!c.is_zero()) return false;
    return true;
  }
  bool is_exact_zero() const { return t_.empty(); }
  bool omega_free() const {
    for (auto& [k, c] : t_)
      if (k != 0 && !c.is_zero()) return false;
    return true;
  }
  int min_degree() const { return t_.empty() ? 0 : t_.begin()->first; }
  int max_degree() const { return t_.empty() ? 0 : t_.rbegin()->first; }

  OmegaScalar embed(const FieldPtr& G) const {
    OmegaScalar r(G);
    for (auto& [k, c] : t_) r.t_.emplace(k, c.coerce_to(G));
    return r;
  }

  friend FieldPtr common_field(const OmegaScalar& a, const OmegaScalar& b) {
    if (!a.K_) return b.K_;
    if (!b.K_) return a.K_;
    return common_field(FieldElem(a.K_), FieldElem(b.K_));
  }

  friend OmegaScalar operator+(const OmegaScalar& a, const OmegaScalar& b) {
    FieldPtr G = common_field(a, b);
    OmegaScalar r = a.embed(G);
    for (auto& [k, c] : b.t_) r.add_term(k, c.coerce_to(G));
    return r;
  }
  OmegaScalar operator-() const {
    OmegaScalar r(K_);
    for (auto& [k, c] : t_) r.t_.emplace(k, -c);
    return r;
  }
  friend OmegaScalar operator-(const OmegaScalar& a, const OmegaScalar& b) { return a + (-b); }
  friend OmegaScalar operator*(const OmegaScalar& a, const OmegaScalar& b) {
    FieldPtr G = common_field(a, b);
    OmegaScalar r(G);
    for (auto& [i, x] : a.t_)
      for (auto& [j, y] : b.t_) r.add_term(i + j, (x * y).coerce_to(G));
    return r;
  }
  friend OmegaScalar operator*(const OmegaScalar& a, const FieldElem& s) { return a * OmegaScalar(s); }
  friend OmegaScalar operator*(const FieldElem& s, const OmegaScalar& a) { return a * OmegaScalar(s); }
  friend OmegaScalar operator*(const OmegaScalar& a, const Rational& s) {
    OmegaScalar r(a.K_);
    for (auto& [k, c] : a.t_) r.add_term(k, c * s);
    return r;
  }
  OmegaScalar times_omega(int k) const {
    OmegaScalar r(K_);
    for (auto& [i, c] : t_) r.t_.emplace(i + k, c);
    return r;
  }

  OmegaScalar inverse() const {
    if (t_.size() != 1) throw Unsupported("only Omega-monomials are invertible");
    auto& [k, c] = *t_.begin();
    return OmegaScalar(c.inverse(), -k);
  }

  OmegaScalar pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    OmegaScalar r = rational(K_, 1), b = *this;
    while (n) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n) b = b * b;
    }
    return r;
  }

  OmegaScalar& operator+=(const OmegaScalar& o) { return *this = *this + o; }
  OmegaScalar& operator-=(const OmegaScalar& o) { return *this = *this - o; }
  OmegaScalar& operator*=(const OmegaScalar& o) { return *this = *this * o; }

  friend bool operator==(const OmegaScalar& a, const OmegaScalar& b) { return (a - b).is_zero(); }
  friend bool operator!=(const OmegaScalar& a, const OmegaScalar& b) { return !(a == b); }

  OmegaScalar truncate_pi(long N) const {
    OmegaScalar r(K_);
    for (auto& [k, c] : t_) r.t_.emplace(k, c.truncate_pi(N));
    return r;
  }

  bool reproduced_by(const OmegaScalar& hi) const {
    for (auto& [k, c] : t_)
      if (!c.reproduced_by(hi.coeff(k))) return false;
    for (auto& [k, c] : hi.t_)
      if (!t_.count(k) && !c.is_zero()) return false;
    return true;
  }

  std::string str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : t_) {
      os << (first ? "" : " + ") << c.str();
      if (k) os << "*W^" << k;
      first = false;
    }
    return os.str();
  }

 private:
  void add_term(int k, const FieldElem& c) {
    auto it = t_.find(k);
    if (it == t_.end()) {
      if (!c.is_exact_zero()) t_.emplace(k, c);
      return;
    }
    it->second += c;
    if (it->second.is_exact_zero()) t_.erase(it);
  }

  FieldPtr K_;
  std::map<int, FieldElem> t_;
};

namespace catalog {

inline FieldPtr qp(unsigned long p) { return LocalField::base(p); }

inline FieldPtr qp_sqrt_p(unsigned long p) {
  return make_field(p, {{Rational(-static_cast<long>(p)), 0, 1}}, "Q_" + std::to_string(p) + "(sqrt" + std::to_string(p) + ")");
}

// Coefficients (low to high) of the p^m-th cyclotomic polynomial evaluated at X+1.
inline std::vector<Rational> shifted_cyclotomic(unsigned long p, int m) {
  long step = 1;
  for (int i = 1; i < m; ++i) step *= static_cast<long>(p);
  long deg = step * (static_cast<long>(p) - 1);
  std::vector<Integer> c(deg + 1, 0);
  for (long k = 0; k < static_cast<long>(p); ++k) {
    long n = k * step;
    Integer binom = 1;
    for (long i = 0; i <= n; ++i) {
      c[i] += binom;
      binom = binom * (n - i) / (i + 1);
    }
  }
  return std::vector<Rational>(c.begin(), c.end());
}

inline FieldPtr cyclotomic(unsigned long p, int m) {
  FieldPtr F = make_field(p, {shifted_cyclotomic(p, m)});
  Flat z = F->zero_flat(1);
  z[0] = PAdic(p, 1L);
  z[1] = PAdic(p, 1L);
  return LocalField::with_cyclotomic(F, z, m);
}

// Q_3(sqrt3)(i), which contains zeta_3 = (-1 + sqrt3 i)/2.
inline FieldPtr q3_sqrt3_i() {
  FieldPtr L = qp_sqrt_p(3);
  FieldPtr K = extend(L, {FieldElem(L, 1L), FieldElem(L, 0L), FieldElem(L, 1L)});
  FieldElem r3 = FieldElem::gen(K, 1), i = FieldElem::gen(K, 2);
  FieldElem z = (FieldElem(K, -1L) + r3 * i) * Rational(1, 2);
  return LocalField::with_cyclotomic(K, z.coeffs(), 1);
}

}  // namespace catalog

}  // namespace ltlab
