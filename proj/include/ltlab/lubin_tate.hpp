#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ltlab/series.hpp"

namespace ltlab {

// Homogeneous polynomial in X, Y of degree d: entry i is the coefficient of X^i Y^{d-i}.
using Homog = std::vector<FieldElem>;

// Two-variable series sum F_ij X^i Y^j of total degree < D, stored by homogeneous parts.
struct BiSeries {
  FieldPtr K;
  long D = 0;
  std::vector<Homog> parts;

  FieldElem coeff(long i, long j) const {
    long d = i + j;
    if (d >= D) throw TruncationTooShort("bivariate coefficient beyond the truncation");
    if (d >= static_cast<long>(parts.size()) || parts[d].empty()) return FieldElem(K);
    return parts[d][i];
  }

  // F(x(s), y(s)) for univariate series without constant term.
  Series substitute(const Series& x, const Series& y, long T) const {
    Series r(K, T, x.var());
    std::vector<Series> xp{Series::constant(FieldElem(K, 1L), Series::kExact, x.var())};
    std::vector<Series> yp{Series::constant(FieldElem(K, 1L), Series::kExact, y.var())};
    for (long k = 1; k < D; ++k) {
      xp.push_back((xp.back() * x).truncate(T));
      yp.push_back((yp.back() * y).truncate(T));
    }
    for (long d = 0; d < static_cast<long>(parts.size()); ++d)
      for (long i = 0; i <= d && d < D; ++i) {
        if (parts[d].empty() || parts[d][i].is_exact_zero()) continue;
        r += (xp[i] * yp[d - i]).truncate(T) * parts[d][i];
      }
    return r.truncate(T);
  }
};

class FormalGroup;
using GroupPtr = std::shared_ptr<const FormalGroup>;

struct TorsionTower {
  GroupPtr G;
  int n = 0;
  std::vector<FieldPtr> fields;      // L_0 = L, ..., L_n
  std::vector<FieldElem> u;          // u[k] in L_k with [pi](u[k]) = u[k-1]
  std::vector<FieldElem> level1;     // the nonzero roots of [pi] in L_1
  FieldPtr top() const { return fields.back(); }
  FieldElem u_top() const { return u.back(); }
};

class FormalGroup : public std::enable_shared_from_this<FormalGroup> {
 public:
  enum class Kind { Special, Cyclotomic, Custom };

  // [pi](Z) = pi Z + Z^q over L.
  static GroupPtr special(const FieldPtr& L, long D, long prec = kInfPrec) {
    std::vector<FieldElem> f(L->q_long() + 1, FieldElem(L));
    f[1] = FieldElem::uniformizer(L);
    f.back() = FieldElem(L, 1L);
    return GroupPtr(new FormalGroup(L, Kind::Special, std::move(f), D, prec));
  }

  // [p](Z) = (1+Z)^p - 1 over Q_p.
  static GroupPtr cyclotomic(unsigned long p, long D, long prec = kInfPrec) {
    FieldPtr L = catalog::qp(p);
    std::vector<FieldElem> f(p + 1, FieldElem(L));
    Integer b = 1;
    for (unsigned long k = 1; k <= p; ++k) {
      b = b * (p - k + 1) / k;
      f[k] = FieldElem(L, Rational(b));
    }
    return GroupPtr(new FormalGroup(L, Kind::Cyclotomic, std::move(f), D, prec));
  }

  // Arbitrary Frobenius polynomial (coefficients low to high).
  static GroupPtr custom(const FieldPtr& L, std::vector<FieldElem> frob, long D, long prec = kInfPrec) {
    FieldElem pi = FieldElem::uniformizer(L);
    if (frob.size() < 2 || !frob[0].is_exact_zero()) throw Unsupported("Frobenius must vanish at 0");
    if (frob[1] != pi) throw Unsupported("Frobenius must have linear term pi");
    long q = L->q_long();
    if (static_cast<long>(frob.size()) != q + 1 || frob.back() != FieldElem(L, 1L))
      throw Unsupported("Frobenius must be monic of degree q");
    for (long k = 2; k < q; ++k)
      if (!frob[k].is_zero() && frob[k].valuation() < pi.valuation())
        throw Unsupported("Frobenius must reduce to Z^q");
    return GroupPtr(new FormalGroup(L, Kind::Custom, std::move(frob), D, prec));
  }

  const FieldPtr& field() const { return L_; }
  Kind kind() const { return kind_; }
  long order() const { return D_; }
  long prec() const { return prec_; }
  long q() const { return L_->q_long(); }
  FieldElem pi() const { return FieldElem::uniformizer(L_); }
  const std::vector<FieldElem>& frobenius_coeffs() const { return frob_; }
  bool exact() const { return prec_ >= kInfPrec; }

  // v_p of the period: 1/(p-1) - 1/(e(q-1)).
  Rational omega_vp() const {
    return Rational(1, static_cast<long>(L_->p()) - 1) - Rational(1, L_->e() * (q() - 1));
  }

  Series frobenius(Var v = Var::Z) const { return Series::from_elems(L_, 0, frob_, Series::kExact, v); }

  const BiSeries& group_law() const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!law_) law_ = compute_group_law();
    return *law_;
  }

  const Series& log() const {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_log();
    return *log_;
  }
  const Series& g() const {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_log();
    if (!g_) g_ = log_->derivative();
    return *g_;
  }
  const Series& g_inv() const {
    const Series& gg = g();
    std::lock_guard<std::mutex> lk(mu_);
    if (!ginv_) ginv_ = gg.inverse();
    return *ginv_;
  }
  // exp_LT in the variable t.
  const Series& exp() const {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_log();
    if (!exp_) exp_ = compute_exp();
    return *exp_;
  }

  // log_LT^k / k! for k < D.
  const std::vector<Series>& log_powers() const {
    const Series& l = log();
    std::lock_guard<std::mutex> lk(mu_);
    if (logpow_.empty()) {
      logpow_.push_back(Series::constant(FieldElem(L_, 1L), Series::kExact));
      for (long k = 1; k < D_; ++k) logpow_.push_back(fix(logpow_.back() * l * Rational(1, k)).truncate(D_));
    }
    return logpow_;
  }

  // [a](Z) = exp_LT(a log_LT(Z)), integral.
  Series endomorphism(const FieldElem& a) const {
    if (!a.is_zero() && a.valuation() < 0) throw IntegralityViolation("endomorphisms need integral a");
    std::string key = a.str();
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = endo_.find(key);
      if (it != endo_.end()) return it->second;
    }
    Series inner = (log() * a.coerce_to(common_field(a, FieldElem(L_)))).with_var(Var::t);
    Series r = fix(exp().compose(inner, D_)).with_var(Var::Z);
    for (long k = r.lo(); k < r.hi(); ++k) {
      FieldElem c = r.coeff_elem(k);
      if (!c.is_zero() && c.valuation() < 0)
        throw IntegralityViolation("coefficient " + std::to_string(k) + " of [a](Z) is not integral");
    }
    std::lock_guard<std::mutex> lk(mu_);
    endo_.emplace(key, r);
    return r;
  }

  // d/dt_LT = g_LT^{-1} d/dZ.
  Series invariant_derivative(const Series& f) const { return f.derivative() * g_inv(); }

  // The torsion polynomial [pi^n](Z)/[pi^{n-1}](Z).
  Series qn(int n) const {
    Series P = frobenius();
    Series prev = Series::variable(L_);
    for (int k = 1; k < n; ++k) prev = P.compose(prev);
    Series cur = P.compose(prev);
    return poly_divexact(cur, prev);
  }

  // eta(x, Z) = exp(Omega x log_LT(Z)).
  Series eta(const FieldElem& x) const {
    const auto& lp = log_powers();
    FieldPtr K = common_field(x, FieldElem(L_));
    FieldElem xx = x.coerce_to(K);
    std::vector<OmegaScalar> c(D_, OmegaScalar(K));
    FieldElem xk(K, 1L);
    for (long k = 0; k < D_; ++k) {
      if (k > 0) xk = xk * xx;
      for (long m = k; m < D_; ++m) {
        FieldElem a = lp[k].coeff_elem(m);
        if (a.is_exact_zero()) continue;
        c[m] += OmegaScalar((a * xk).coerce_to(K), static_cast<int>(k));
      }
    }
    return Series(K, 0, std::move(c), D_);
  }

  TorsionTower torsion_tower(int n, long teich_prec = 0) const;

  // iota_n(f) for a Laurent polynomial f: substitute [pi^{-n}](Z) = u_n +_LT exp_LT(t/pi^n).
  Series iota_unit(const TorsionTower& tw, long tT) const;
  Series iota(const Series& f, const TorsionTower& tw, long tT) const;
  Series iota_log(const TorsionTower& tw, long tT) const;

  // Lower bound for v_p of the k-th coefficient of log_LT.
  Rational log_tail_vp(long k) const {
    long fl = 0;
    for (long qq = q(); qq <= k; qq *= q()) ++fl;
    return Rational(-fl, L_->e());
  }

  FieldElem fix(const FieldElem& x) const { return exact() ? x : x.truncate_pi(prec_); }
  Series fix(const Series& s) const { return exact() ? s : s.truncate_pi(prec_); }

  static Series poly_divexact(const Series& num, const Series& den) {
    if (!num.is_exact() || !den.is_exact() || num.lo() < 0 || den.lo() < 0)
      throw Unsupported("exact division needs exact polynomials");
    FieldPtr K = common_field(num, den);
    long dn = den.hi() - 1;
    FieldElem lead = den.coeff_elem(dn);
    FieldElem linv = lead.inverse();
    std::vector<FieldElem> rem;
    for (long k = 0; k < num.hi(); ++k) rem.push_back(num.coeff_elem(k).coerce_to(K));
    long qdeg = static_cast<long>(rem.size()) - 1 - dn;
    if (qdeg < 0) throw Unsupported("division leaves a remainder");
    std::vector<FieldElem> quo(qdeg + 1, FieldElem(K));
    for (long k = qdeg; k >= 0; --k) {
      FieldElem c = rem[k + dn] * linv;
      quo[k] = c;
      if (c.is_exact_zero()) continue;
      for (long j = den.lo(); j <= dn; ++j) rem[k + j] -= c * den.coeff_elem(j);
    }
    for (long k = 0; k < dn; ++k)
      if (!rem[k].is_zero()) throw Unsupported("division leaves a remainder");
    return Series::from_elems(K, 0, quo, Series::kExact);
  }

 private:
  FormalGroup(FieldPtr L, Kind kind, std::vector<FieldElem> frob, long D, long prec)
      : L_(std::move(L)), kind_(kind), frob_(std::move(frob)), D_(D), prec_(prec) {}

  // Coefficients of [pi](Z)^k below degree D, k < D.
  std::vector<std::vector<FieldElem>> frob_powers() const {
    std::vector<std::vector<FieldElem>> P(D_, std::vector<FieldElem>(D_, FieldElem(L_)));
    P[0][0] = FieldElem(L_, 1L);
    for (long k = 1; k < D_; ++k)
      for (long a = 0; a < D_; ++a) {
        if (P[k - 1][a].is_exact_zero()) continue;
        for (long b = 1; b < static_cast<long>(frob_.size()) && a + b < D_; ++b) {
          if (frob_[b].is_exact_zero()) continue;
          P[k][a + b] += P[k - 1][a] * frob_[b];
        }
      }
    return P;
  }

  void ensure_log() const {
    if (log_) return;
    auto P = frob_powers();
    FieldElem pi = FieldElem::uniformizer(L_);
    std::vector<FieldElem> l(D_, FieldElem(L_));
    if (D_ > 1) l[1] = FieldElem(L_, 1L);
    for (long d = 2; d < D_; ++d) {
      FieldElem s(L_);
      for (long k = 1; k < d; ++k)
        if (!l[k].is_exact_zero() && !P[k][d].is_exact_zero()) s += l[k] * P[k][d];
      l[d] = fix(s / (pi - pi.pow(d)));
      // v_pi(l_d) >= -floor(log_q d)
      if (!l[d].is_zero() && l[d].valuation() < log_tail_vp(d))
        throw IntegralityViolation("log_LT coefficient below its valuation bound");
    }
    log_ = Series::from_elems(L_, 0, l, D_);
  }

  Series compute_exp() const {
    // reversion: e_1 = 1 and e_d = -[t^d] sum_{k>=2} l_k E_{<d}(t)^k
    std::vector<FieldElem> e(D_, FieldElem(L_));
    if (D_ > 1) e[1] = FieldElem(L_, 1L);
    // H[k][m] = [t^m] E^k, filled degree by degree
    std::vector<std::vector<FieldElem>> H(D_, std::vector<FieldElem>(D_, FieldElem(L_)));
    H[0][0] = FieldElem(L_, 1L);
    if (D_ > 1) H[1][1] = e[1];
    for (long d = 2; d < D_; ++d) {
      for (long k = 2; k <= d; ++k) {
        FieldElem s(L_);
        for (long a = k - 1; a <= d - 1; ++a)
          if (!H[k - 1][a].is_exact_zero() && !e[d - a].is_exact_zero()) s += H[k - 1][a] * e[d - a];
        H[k][d] = s;
      }
      FieldElem s(L_);
      for (long k = 2; k <= d; ++k) {
        FieldElem lk = log_->coeff_elem(k);
        if (!lk.is_exact_zero() && !H[k][d].is_exact_zero()) s += lk * H[k][d];
      }
      e[d] = fix(-s);
      H[1][d] = e[d];
    }
    return Series::from_elems(L_, 0, e, D_, Var::t);
  }

  BiSeries compute_group_law() const {
    auto P = frob_powers();
    FieldElem pi = FieldElem::uniformizer(L_);
    long kmax = static_cast<long>(frob_.size()) - 1;
    BiSeries F{L_, D_, std::vector<Homog>(D_)};
    // H[k][d]: degree-d part of F^k
    std::vector<std::vector<Homog>> H(kmax + 1, std::vector<Homog>(D_));
    auto zero_h = [&](long d) { return Homog(d + 1, FieldElem(L_)); };
    F.parts[0] = zero_h(0);
    if (D_ > 1) {
      F.parts[1] = zero_h(1);
      F.parts[1][0] = FieldElem(L_, 1L);  // Y
      F.parts[1][1] = FieldElem(L_, 1L);  // X
      H[1][1] = F.parts[1];
    }
    for (long d = 2; d < D_; ++d) {
      for (long k = 2; k <= std::min(kmax, d); ++k) {
        Homog s = zero_h(d);
        for (long a = k - 1; a <= d - 1; ++a) {
          const Homog& A = H[k - 1][a];
          const Homog& B = H[1][d - a];
          if (A.empty() || B.empty()) continue;
          for (long i = 0; i <= a; ++i) {
            if (A[i].is_exact_zero()) continue;
            for (long j = 0; j <= d - a; ++j)
              if (!B[j].is_exact_zero()) s[i + j] += A[i] * B[j];
          }
        }
        H[k][d] = s;
      }
      // degree-d part of F_{<d}([pi]X, [pi]Y)
      Homog A = zero_h(d);
      for (long e = 1; e < d; ++e)
        for (long i = 0; i <= e; ++i) {
          const FieldElem& c = F.parts[e][i];
          if (c.is_exact_zero()) continue;
          long j = e - i;
          for (long a = i; a <= d - j; ++a) {
            const FieldElem& x = P[i][a];
            const FieldElem& y = P[j][d - a];
            if (x.is_exact_zero() || y.is_exact_zero()) continue;
            A[a] += c * x * y;
          }
        }
      FieldElem denom_inv = (pi - pi.pow(d)).inverse();
      Homog Fd = zero_h(d);
      for (long i = 0; i <= d; ++i) {
        FieldElem s = A[i];
        for (long k = 2; k <= std::min(kmax, d); ++k)
          if (!frob_[k].is_exact_zero() && !H[k][d][i].is_exact_zero()) s -= frob_[k] * H[k][d][i];
        Fd[i] = fix(s * denom_inv);
      }
      F.parts[d] = Fd;
      H[1][d] = Fd;
    }
    return F;
  }

  FieldPtr L_;
  Kind kind_;
  std::vector<FieldElem> frob_;
  long D_;
  long prec_;

  mutable std::mutex mu_;
  mutable std::optional<BiSeries> law_;
  mutable std::optional<Series> log_, g_, ginv_, exp_;
  mutable std::vector<Series> logpow_;
  mutable std::map<std::string, Series> endo_;
};

inline TorsionTower FormalGroup::torsion_tower(int n, long teich_prec) const {
  if (n < 0 || n > 2) throw LevelUnsupported("torsion towers are available up to level 2");
  if (kind_ == Kind::Custom && n > 0) throw LevelUnsupported("torsion towers need the special or cyclotomic Frobenius");
  TorsionTower tw;
  tw.G = shared_from_this();
  tw.n = n;
  tw.fields.push_back(L_);
  tw.u.push_back(FieldElem(L_));
  if (n == 0) return tw;
  long q = this->q();
  // level 1: root of Q_1 = [pi](Z)/Z
  std::vector<FieldElem> q1(frob_.begin() + 1, frob_.end());
  FieldPtr L1;
  FieldElem u1;
  if (q1.size() == 2) {
    L1 = L_;
    u1 = -q1[0];
  } else {
    L1 = extend(L_, q1, L_->name() + "(u1)");
    u1 = FieldElem::gen(L1, L1->levels());
  }
  if (kind_ == Kind::Cyclotomic && L1 != L_) L1 = LocalField::with_cyclotomic(L1, (u1 + Rational(1)).coeffs(), 1);
  if (kind_ == Kind::Cyclotomic) u1 = FieldElem(L1, u1.coerce_to(L1).coeffs());
  tw.fields.push_back(L1);
  tw.u.push_back(u1);
  long tp = teich_prec > 0 ? teich_prec : (exact() ? 40 : prec_ / L_->e() + 4);
  if (kind_ == Kind::Special) {
    for (auto& r : residue_field_reps(L_)) {
      if (r.is_exact_zero()) continue;
      tw.level1.push_back(teichmuller(r, tp).coerce_to(L1) * u1);
    }
  } else {
    FieldElem z = u1 + Rational(1), zk(L1, 1L);
    for (long k = 1; k < q; ++k) {
      zk = zk * z;
      tw.level1.push_back(zk - Rational(1));
    }
  }
  if (n == 1) return tw;
  // level 2: root of [pi](Z) - u_1 over L_1
  std::vector<FieldElem> c;
  for (auto& f : frob_) c.push_back(f.coerce_to(L1));
  c[0] = -u1;
  FieldPtr L2 = extend(L1, c, L_->name() + "(u2)");
  FieldElem u2 = FieldElem::gen(L2, L2->levels());
  if (kind_ == Kind::Cyclotomic) {
    L2 = LocalField::with_cyclotomic(L2, (u2 + Rational(1)).coeffs(), 2);
    u2 = FieldElem(L2, u2.coeffs());
  }
  tw.fields.push_back(L2);
  tw.u.push_back(u2);
  return tw;
}

inline Series FormalGroup::iota_unit(const TorsionTower& tw, long tT) const {
  if (tw.n < 1) throw LevelUnsupported("iota needs level at least 1");
  FieldPtr Ln = tw.top();
  FieldElem un = tw.u_top();
  long T = std::min(tT, D_);
  FieldElem scale = FieldElem::uniformizer(L_).pow(-tw.n).coerce_to(Ln);
  // W(t) = exp_LT(t / pi^n)
  Series W = exp().embed(Ln).map_coeffs([&](long k, const OmegaScalar& a) { return a * scale.pow(k); }).truncate(T);
  if (kind_ == Kind::Cyclotomic) {
    Series U = Series::constant(un, Series::kExact, Var::t);
    return (U + W + W * un).truncate(T);
  }
  const BiSeries& F = group_law();
  // F(u, W) = sum_j (sum_i F_ij u^i) W^j with the omitted i + j >= D part bounded below
  Rational vu = un.valuation();
  Rational beta = detail::inf_rational();
  for (long j = 1; j < T; ++j) {
    FieldElem wj = W.coeff_elem(j);
    if (!wj.is_zero()) beta = detail::qmin(beta, wj.valuation() / j);
  }
  Series r(Ln, T, Var::t);
  std::vector<FieldElem> upow{FieldElem(Ln, 1L)};
  for (long i = 1; i < D_; ++i) upow.push_back(upow.back() * un);
  Series Wj = Series::constant(FieldElem(Ln, 1L), Series::kExact, Var::t);
  for (long j = 0; j < D_; ++j) {
    if (j > 0) Wj = (Wj * W).truncate(T);
    FieldElem cj(Ln);
    for (long i = 0; i + j < D_; ++i) {
      FieldElem f = F.coeff(i, j);
      if (!f.is_exact_zero()) cj += f.coerce_to(Ln) * upow[i];
    }
    r += Wj * cj;
  }
  r = r.truncate(T);
  return r.map_coeffs([&](long m, const OmegaScalar& a) {
    Rational cap = vu * (D_ - m) + detail::qmin(Rational(0), beta * m);
    return OmegaScalar(a.coeff(0).truncate_vp(cap));
  });
}

inline Series FormalGroup::iota(const Series& f, const TorsionTower& tw, long tT) const {
  if (!f.is_exact()) throw Unsupported("iota_n is implemented for Laurent polynomials");
  Series X = iota_unit(tw, tT);
  FieldPtr Ln = tw.top();
  Series r(Ln, X.trunc(), Var::t);
  Series Xinv = f.lo() < 0 ? X.inverse() : X;
  for (long k = f.lo(); k < f.hi(); ++k) {
    OmegaScalar c = f.coeff(k);
    if (c.is_exact_zero()) continue;
    Series term = k >= 0 ? X.pow(k) : Xinv.pow(-k);
    r += term.truncate(X.trunc()) * c.embed(common_field(c, OmegaScalar(Ln)));
  }
  return r;
}

inline Series FormalGroup::iota_log(const TorsionTower& tw, long tT) const {
  Series X = iota_unit(tw, tT);
  return log().compose_shifted(X, X.trunc(), [this](long k) { return log_tail_vp(k); });
}

}  // namespace ltlab
