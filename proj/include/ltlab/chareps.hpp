#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ltlab/lubin_tate.hpp"

namespace ltlab {

inline constexpr long kDefaultDigits = 20;

namespace detail {

// p-adic integer y reduced modulo p^m.
inline long residue_mod_pm(const PAdic& y, long m) {
  const Integer& pm = ppow(y.prime(), m);
  if (y.is_exact()) {
    const Rational& r = y.exact_value();
    if (vp(r, y.prime()) < 0) throw IntegralityViolation("additive character argument is not integral");
    Integer v = fmod(r.get_num() * invmod(r.get_den(), pm), pm);
    return v.get_si();
  }
  if (y.precision() < m) throw PrecisionExhausted("not enough digits to reduce modulo p^m");
  if (y.is_zero()) return 0;
  if (y.valuation() < 0) throw IntegralityViolation("additive character argument is not integral");
  Integer v = fmod(y.approx_at(m).rational().get_num(), pm);
  return v.get_si();
}

inline long gcd_l(long a, long b) { return std::gcd(a, b); }

}  // namespace detail

// o_L / pi^n with exact representatives sum_k r_k pi^k, r_k Teichmuller-free residue digits.
class ResidueRing {
 public:
  static std::shared_ptr<const ResidueRing> make(const FieldPtr& L, int n) {
    static std::mutex mu;
    static std::map<std::pair<std::string, int>, std::shared_ptr<const ResidueRing>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(L->signature(), n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto R = std::shared_ptr<ResidueRing>(new ResidueRing(L, n));
    cache.emplace(key, R);
    return R;
  }

  const FieldPtr& field() const { return L_; }
  int level() const { return n_; }
  long size() const { return static_cast<long>(elems_.size()); }
  const FieldElem& elem(long code) const { return elems_[code]; }
  const std::vector<long>& units() const { return units_; }
  bool is_unit(long code) const { return code % q_ != 0; }
  long one() const { return n_ == 0 ? 0 : 1; }

  // Code of an integral element modulo pi^n.
  long code(const FieldElem& x) const {
    FieldElem y = x.coerce_to(L_);
    long c = 0, w = 1;
    for (int k = 0; k < n_; ++k) {
      long d = -1;
      for (long r = 0; r < q_; ++r) {
        FieldElem diff = y - digits_[r];
        if (diff.is_zero() || diff.valuation() > 0) {
          d = r;
          y = diff * pi_inv_;
          break;
        }
      }
      if (d < 0) throw IntegralityViolation("element is not integral");
      c += d * w;
      w *= q_;
    }
    return c;
  }

  long mul(long a, long b) const { return mul_[a * size() + b]; }
  long neg(long a) const { return code(-elems_[a]); }
  long unit_inverse(long a) const {
    for (long b : units_)
      if (mul(a, b) == one()) return b;
    throw Unsupported("not a unit");
  }
  long order(long a) const {
    long x = a, k = 1;
    while (x != one()) {
      x = mul(x, a);
      ++k;
    }
    return k;
  }
  long exponent() const {
    long E = 1;
    for (long u : units_) E = std::lcm(E, order(u));
    return E;
  }

 private:
  ResidueRing(FieldPtr L, int n) : L_(std::move(L)), n_(n), q_(L_->q_long()) {
    digits_ = residue_field_reps(L_);
    FieldElem pi = FieldElem::uniformizer(L_);
    pi_inv_ = pi.inverse();
    long total = 1;
    for (int k = 0; k < n_; ++k) total *= q_;
    for (long c = 0; c < total; ++c) {
      FieldElem x(L_), pk(L_, 1L);
      long t = c;
      for (int k = 0; k < n_; ++k) {
        x += digits_[t % q_] * pk;
        pk = pk * pi;
        t /= q_;
      }
      elems_.push_back(x);
      if (n_ == 0 || c % q_ != 0) units_.push_back(c);
    }
    mul_.assign(total * total, 0);
    for (long a = 0; a < total; ++a)
      for (long b = a; b < total; ++b) mul_[a * total + b] = mul_[b * total + a] = code(elems_[a] * elems_[b]);
  }

  FieldPtr L_;
  int n_;
  long q_;
  std::vector<FieldElem> digits_;
  FieldElem pi_inv_;
  std::vector<FieldElem> elems_;
  std::vector<long> units_;
  std::vector<long> mul_;
};
using RingPtr = std::shared_ptr<const ResidueRing>;

// A field containing L and the p^M-th roots of unity, from the small catalog.
inline FieldPtr value_field(const FieldPtr& L, int M) {
  if (M <= 0) return L;
  if (L->cyclotomic() && L->cyclotomic()->m >= M) return L;
  if (L->p() == 2 && M == 1) return LocalField::with_cyclotomic(L, FieldElem(L, -1L).coeffs(), 1);
  if (L->levels() == 0) return catalog::cyclotomic(L->p(), M);
  if (M == 1 && L->same_as(*catalog::qp_sqrt_p(3))) return catalog::q3_sqrt3_i();
  throw Unsupported("no catalog field with p^" + std::to_string(M) + "-th roots of unity over " + L->name());
}

// p-power order needed for the additive character and the unit characters at level n.
inline int cyclotomic_level_for(const FieldPtr& L, int n) {
  int m_add = (n + L->e() - 1) / L->e();
  long E = ResidueRing::make(L, n)->exponent();
  int j = 0;
  while (E % static_cast<long>(L->p()) == 0) {
    E /= static_cast<long>(L->p());
    ++j;
  }
  return std::max(m_add, j);
}

// Generator of the different: the product of the stage polynomial derivatives at the generators.
inline FieldElem different_generator(const FieldPtr& L) {
  FieldElem d(L, 1L);
  for (std::size_t k = 1; k <= L->levels(); ++k) {
    const Stage& st = L->stage(k - 1);
    FieldElem th = FieldElem::gen(L, k);
    auto lift = [&](const Flat& c) {
      Flat out = L->zero_flat(L->levels());
      std::copy(c.begin(), c.end(), out.begin());
      return FieldElem(L, out);
    };
    FieldElem der = th.pow(st.degree - 1) * Rational(st.degree);
    for (int i = 1; i < st.degree; ++i) der += lift(st.poly[i]) * th.pow(i - 1) * Rational(i);
    d = d * der;
  }
  return d;
}

// c(x) = zeta^{p^m Tr(b x / (d pi^n)) mod p^m}: a character of o_L/pi^n, nontrivial on pi^{n-1} o_L.
class AdditiveCharacter {
 public:
  AdditiveCharacter() = default;
  AdditiveCharacter(FieldPtr L, FieldPtr K, int n, long digits = kDefaultDigits)
      : L_(std::move(L)), K_(std::move(K)), n_(n) {
    m_ = (n_ + L_->e() - 1) / L_->e();
    if (m_ > 0) {
      zeta_ = root_of_unity(K_, ipow(L_->p(), m_), digits);
      auto pw = std::make_shared<std::vector<FieldElem>>(1, FieldElem(K_, 1L));
      for (long k = 1; k < ipow(L_->p(), m_); ++k) pw->push_back(pw->back() * zeta_);
      zeta_pows_ = pw;
    }
    d_ = different_generator(L_);
    scale_ = (d_ * FieldElem::uniformizer(L_).pow(n_)).inverse();
    b_ = FieldElem(L_, 1L);
  }
  static AdditiveCharacter standard(const FieldPtr& L, int n, long digits = kDefaultDigits) {
    return AdditiveCharacter(L, value_field(L, cyclotomic_level_for(L, n)), n, digits);
  }

  const FieldPtr& base() const { return L_; }
  const FieldPtr& values() const { return K_; }
  int level() const { return n_; }
  int zeta_level() const { return m_; }
  const FieldElem& different() const { return d_; }
  const FieldElem& scaling() const { return b_; }

  long exponent_of(const FieldElem& x) const {
    if (m_ == 0) return 0;
    PAdic t = trace_to_qp((x.coerce_to(L_) * b_) * scale_);
    return detail::residue_mod_pm(t * PAdic(L_->p(), Rational(ipow(L_->p(), m_))), m_);
  }
  FieldElem operator()(const FieldElem& x) const {
    if (m_ == 0) return FieldElem(K_, 1L);
    return (*zeta_pows_)[exponent_of(x)];
  }

  // x -> c(b x)
  AdditiveCharacter scaled(const FieldElem& b) const {
    AdditiveCharacter r = *this;
    r.b_ = b_ * b.coerce_to(L_);
    return r;
  }
  // The level-a character x -> c(pi^{n-a} x).
  AdditiveCharacter at_level(int a) const {
    if (a > n_) throw ConductorExceedsLevel("additive character level is too small");
    AdditiveCharacter r = *this;
    r.n_ = a;
    r.b_ = b_ * FieldElem::uniformizer(L_).pow(n_ - a);
    return r;
  }

  static long ipow(unsigned long p, long m) {
    long r = 1;
    for (long i = 0; i < m; ++i) r *= static_cast<long>(p);
    return r;
  }

 private:
  FieldPtr L_, K_;
  int n_ = 0, m_ = 0;
  FieldElem zeta_, d_, scale_, b_;
  std::shared_ptr<const std::vector<FieldElem>> zeta_pows_;
};

// Character of L^x: delta(pi) = c, unit part rho(u mod pi^a) * u^k * exp(s log<u>).
class Character {
 public:
  Character() = default;
  Character(FieldPtr L, FieldPtr K, FieldElem c, RingPtr R = nullptr, std::vector<FieldElem> rho = {}, long k = 0,
            std::optional<FieldElem> s = std::nullopt)
      : L_(std::move(L)), K_(std::move(K)), c_(c.coerce_to(K_)), R_(std::move(R)), rho_(std::move(rho)), k_(k) {
    if (s && !s->is_exact_zero()) s_ = s->coerce_to(K_);
    for (auto& v : rho_) v = v.coerce_to(K_);
    if (R_ && R_->level() == 0) {
      R_.reset();
      rho_.clear();
    }
  }

  static Character unramified(const FieldPtr& L, const FieldPtr& K, const FieldElem& c) { return Character(L, K, c); }
  static Character trivial(const FieldPtr& L, const FieldPtr& K) { return unramified(L, K, FieldElem(K, 1L)); }
  // x^k
  static Character x_pow(const FieldPtr& L, const FieldPtr& K, long k) {
    return Character(L, K, FieldElem::uniformizer(L).pow(k), nullptr, {}, k);
  }
  // |x|: 1/q at pi, trivial on units
  static Character abs(const FieldPtr& L, const FieldPtr& K) {
    return unramified(L, K, FieldElem(K, Rational(1, L->q_long())));
  }
  // chi = x|x|
  static Character chi(const FieldPtr& L, const FieldPtr& K) { return x_pow(L, K, 1) * abs(L, K); }

  const FieldPtr& base() const { return L_; }
  const FieldPtr& values() const { return K_; }
  const FieldElem& pi_value() const { return c_; }
  long k() const { return k_; }
  const std::optional<FieldElem>& s() const { return s_; }
  int table_level() const { return R_ ? R_->level() : 0; }
  const RingPtr& table_ring() const { return R_; }
  const std::vector<FieldElem>& table() const { return rho_; }

  // rho on a unit of o_L (the locally constant part only).
  FieldElem rho(const FieldElem& u) const {
    if (!R_) return FieldElem(K_, 1L);
    long c = R_->code(u);
    if (!R_->is_unit(c)) throw NonUnitSupport("rho is only defined on units");
    return rho_[c];
  }
  FieldElem rho_code(long code_at_level) const { return rho_[code_at_level]; }

  // delta(u) for a unit u.
  FieldElem unit_value(const FieldElem& u, long digits = kDefaultDigits) const {
    FieldElem uu = u.coerce_to(common_field(u, FieldElem(K_)));
    FieldElem v = rho(u) * uu.pow(k_);
    if (s_) v = v * padic_exp(*s_ * unit_log(u.coerce_to(L_), digits), digits);
    return v;
  }
  FieldElem at_minus_one() const {
    FieldElem m1(L_, -1L);
    return rho(m1) * Rational(k_ % 2 ? -1 : 1);
  }

  bool has_analytic_exponent() const { return s_.has_value(); }
  bool rho_trivial() const {
    for (long u : R_ ? R_->units() : std::vector<long>{})
      if (rho_[u] != FieldElem(K_, 1L)) return false;
    return true;
  }

  // Smallest m with 1 + pi^m o_L in the kernel of rho.
  int conductor() const {
    if (s_) throw NotLocallyConstantOnUnits("the unit part has an analytic exponent");
    if (!R_) return 0;
    FieldElem one(K_, 1L);
    for (int m = 0; m <= R_->level(); ++m) {
      bool ok = true;
      for (long u : R_->units()) {
        FieldElem x = R_->elem(u) - Rational(1);
        bool in_kernel_group = m == 0 || x.is_zero() || x.vpi() >= m;
        if (in_kernel_group && rho_[u] != one) {
          ok = false;
          break;
        }
      }
      if (ok) return m;
    }
    return R_->level();
  }

  // The table re-expressed at level b >= table level.
  std::vector<FieldElem> table_at(const RingPtr& B) const {
    std::vector<FieldElem> out(B->size(), FieldElem(K_));
    for (long u : B->units()) out[u] = rho(B->elem(u));
    return out;
  }

  friend Character operator*(const Character& a, const Character& b) {
    FieldPtr K = common_field(a.c_, b.c_);
    std::optional<FieldElem> s;
    if (a.s_ || b.s_) s = (a.s_ ? *a.s_ : FieldElem(K)) + (b.s_ ? *b.s_ : FieldElem(K));
    RingPtr R = a.table_level() >= b.table_level() ? a.R_ : b.R_;
    std::vector<FieldElem> t;
    if (R) {
      auto ta = a.table_at(R), tb = b.table_at(R);
      t.resize(R->size(), FieldElem(K));
      for (long u : R->units()) t[u] = ta[u].coerce_to(K) * tb[u].coerce_to(K);
    }
    return Character(a.L_, K, a.c_ * b.c_, R, t, a.k_ + b.k_, s);
  }
  Character inverse() const {
    std::vector<FieldElem> t = rho_;
    if (R_)
      for (long u : R_->units()) t[u] = rho_[u].inverse();
    std::optional<FieldElem> s;
    if (s_) s = -*s_;
    return Character(L_, K_, c_.inverse(), R_, t, -k_, s);
  }
  Character with_values(const FieldPtr& K) const {
    std::vector<FieldElem> t = rho_;
    for (auto& v : t) v = v.coerce_to(K);
    return Character(L_, K, c_.coerce_to(K), R_, t, k_, s_ ? std::optional<FieldElem>(s_->coerce_to(K)) : std::nullopt);
  }

  // omega = k (+ s)
  FieldElem weight() const {
    FieldElem w(K_, Rational(k_));
    if (s_) w += *s_;
    return w;
  }

  bool operator==(const Character& o) const {
    if (k_ != o.k_ || c_ != o.c_) return false;
    if (s_.has_value() != o.s_.has_value() || (s_ && *s_ != *o.s_)) return false;
    RingPtr R = table_level() >= o.table_level() ? R_ : o.R_;
    if (!R) return true;
    auto ta = table_at(R), tb = o.table_at(R);
    for (long u : R->units())
      if (ta[u] != tb[u]) return false;
    return true;
  }

  std::string str() const {
    std::string s = "delta(pi)=" + c_.str() + " k=" + std::to_string(k_) + " a=" + std::to_string(table_level());
    if (s_) s += " s=" + s_->str();
    return s;
  }

  // log of a unit: log(u^{q-1}) / (q-1)
  static FieldElem unit_log(const FieldElem& u, long digits) {
    long q = u.field()->q_long();
    return padic_log(u.pow(q - 1), digits) * Rational(1, q - 1);
  }

 private:
  FieldPtr L_, K_;
  FieldElem c_;
  RingPtr R_;
  std::vector<FieldElem> rho_;
  long k_ = 0;
  std::optional<FieldElem> s_;
};

// All characters of (o_L/pi^a)^x with values in K, as tables indexed by residue codes.
inline std::vector<std::vector<FieldElem>> unit_character_tables(const FieldPtr& L, const FieldPtr& K, int a,
                                                                long digits = kDefaultDigits) {
  RingPtr R = ResidueRing::make(L, a);
  const auto& U = R->units();
  long E = R->exponent();
  FieldElem zE = root_of_unity(K, E, digits);
  std::vector<FieldElem> zpow{FieldElem(K, 1L)};
  for (long i = 1; i < E; ++i) zpow.push_back(zpow.back() * zE);
  // greedy generating set
  std::vector<long> gens;
  std::vector<bool> in_span(R->size(), false);
  in_span[R->one()] = true;
  for (long u : U) {
    if (in_span[u]) continue;
    gens.push_back(u);
    std::vector<long> span;
    for (long x : U)
      if (in_span[x]) span.push_back(x);
    for (long x : span) {
      long y = x;
      do {
        y = R->mul(y, u);
        in_span[y] = true;
      } while (y != x);
    }
    bool grew = true;
    while (grew) {
      grew = false;
      for (long x : U)
        if (in_span[x])
          for (long y : U)
            if (in_span[y] && !in_span[R->mul(x, y)]) {
              in_span[R->mul(x, y)] = true;
              grew = true;
            }
    }
  }
  std::vector<long> ord;
  for (long g : gens) ord.push_back(R->order(g));
  std::vector<std::vector<FieldElem>> out;
  std::vector<long> e(gens.size(), 0);
  while (true) {
    bool admissible = true;
    for (std::size_t i = 0; i < gens.size(); ++i)
      if ((ord[i] * e[i]) % E != 0) admissible = false;
    if (admissible) {
      std::vector<long> ex(R->size(), -1);
      ex[R->one()] = 0;
      bool ok = true;
      std::vector<long> cur{R->one()};
      std::vector<long> curx{0};
      for (std::size_t i = 0; i < gens.size() && ok; ++i) {
        std::vector<long> nxt, nxtx;
        for (std::size_t c = 0; c < cur.size(); ++c) {
          long y = cur[c], yx = curx[c];
          for (long j = 0; j < ord[i]; ++j) {
            if (ex[y] >= 0 && ex[y] != yx) ok = false;
            ex[y] = yx;
            nxt.push_back(y);
            nxtx.push_back(yx);
            y = R->mul(y, gens[i]);
            yx = (yx + e[i]) % E;
          }
        }
        cur = nxt;
        curx = nxtx;
      }
      if (ok) {
        std::vector<FieldElem> t(R->size(), FieldElem(K));
        for (long u : U) t[u] = zpow[ex[u]];
        out.push_back(t);
      }
    }
    std::size_t i = 0;
    while (i < e.size() && ++e[i] == E) e[i++] = 0;
    if (i == e.size()) break;
  }
  if (static_cast<long>(out.size()) != static_cast<long>(U.size()))
    throw Unsupported("character enumeration did not find the full dual group");
  return out;
}

// The characters with the given value at pi and every unit part of level a.
inline std::vector<Character> all_characters(const FieldPtr& L, const FieldPtr& K, int a, const FieldElem& c,
                                             long digits = kDefaultDigits) {
  std::vector<Character> out;
  RingPtr R = ResidueRing::make(L, a);
  for (auto& t : unit_character_tables(L, K, a, digits)) out.emplace_back(L, K, c, R, t);
  return out;
}

struct Classification {
  enum class Kind { Sigma1, Sigma2, Generic };
  Kind kind = Kind::Generic;
  long index = 0;  // i in x^{-i} or x^i chi
  bool de_rham = true;
  long weight = 0;
  bool exceptional = false;  // crystalline Frobenius eigenvalue 1 or 1/q

  std::string str() const {
    switch (kind) {
      case Kind::Sigma1: return "Sigma1(" + std::to_string(index) + ")";
      case Kind::Sigma2: return "Sigma2(" + std::to_string(index) + ")";
      default: return de_rham ? "generic, de Rham weight " + std::to_string(weight) : "generic";
    }
  }
};

inline Classification classify(const Character& d) {
  Classification c;
  c.de_rham = !d.has_analytic_exponent();
  c.weight = d.k();
  if (!c.de_rham || !d.rho_trivial()) return c;
  const FieldPtr& L = d.base();
  FieldElem pik = FieldElem::uniformizer(L).pow(d.k());
  FieldElem q(L, Rational(L->q_long()));
  bool is_xk = d.pi_value() == pik;
  bool is_xk_abs = d.pi_value() * q == pik;
  c.exceptional = is_xk || is_xk_abs;
  if (is_xk && d.k() <= 0) {
    c.kind = Classification::Kind::Sigma1;
    c.index = -d.k();
  } else if (is_xk_abs && d.k() >= 1) {
    c.kind = Classification::Kind::Sigma2;
    c.index = d.k() - 1;
  }
  return c;
}

// delta_W = delta_lc * unramified(pi^{-k}) for delta = delta_lc x^k.
inline Character weil_character(const Character& d) {
  if (d.has_analytic_exponent()) throw NotDeRham("the Weil character needs s = 0");
  FieldElem pik = FieldElem::uniformizer(d.base()).pow(-d.k());
  FieldElem c = d.pi_value() * pik * pik;
  return Character(d.base(), d.values(), c, d.table_ring(), d.table(), 0);
}

// delta(pi)^{a+n} q^n sum_{i in (o/pi^a)^x} delta(i)^{-1} psi_a(i)
inline FieldElem gauss_sum_epsilon(const Character& d, const AdditiveCharacter& psi, long n_psi = 0) {
  int a = d.conductor();
  FieldPtr K = common_field(FieldElem(d.values()), FieldElem(psi.values()));
  FieldElem qn = FieldElem(K, Rational(d.base()->q_long())).pow(n_psi);
  FieldElem lead = d.pi_value().coerce_to(K).pow(a + n_psi) * qn;
  if (a == 0) return lead;
  if (a > psi.level()) throw ConductorExceedsLevel("conductor exceeds the additive character level");
  AdditiveCharacter pa = psi.at_level(a);
  RingPtr R = ResidueRing::make(d.base(), a);
  FieldElem sum(K);
  for (long u : R->units()) sum += d.rho(R->elem(R->unit_inverse(u))).coerce_to(K) * pa(R->elem(u)).coerce_to(K);
  return lead * sum;
}

// Components indexed by unit classes b modulo pi^n: epsilon with x -> psi(b x).
struct EquivariantEps {
  int level = 0;
  RingPtr R;
  std::vector<long> classes;
  std::vector<FieldElem> values;

  const FieldElem& at(long code) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == code) return values[i];
    throw Unsupported("no component for this class");
  }
};

inline EquivariantEps equivariant_epsilon(const Character& d, const AdditiveCharacter& psi) {
  if (d.conductor() > psi.level()) throw ConductorExceedsLevel("conductor exceeds the additive character level");
  EquivariantEps E;
  E.level = psi.level();
  E.R = ResidueRing::make(d.base(), psi.level());
  for (long b : E.R->units()) {
    E.classes.push_back(b);
    E.values.push_back(gauss_sum_epsilon(d, psi.scaled(E.R->elem(b))));
  }
  return E;
}

// (1 - q^{-1} alpha^{-1}) / (1 - alpha) with alpha = delta(pi) pi^{-k}.
inline FieldElem crystalline_factor(const Character& d) {
  if (d.has_analytic_exponent()) throw NotDeRham("crystalline factor needs s = 0");
  if (d.conductor() != 0) throw RamifiedCharacter("crystalline factor needs an unramified unit part");
  FieldElem alpha = d.pi_value() * FieldElem::uniformizer(d.base()).pow(-d.k());
  FieldElem one(alpha.field(), 1L);
  if (alpha == one) throw ExceptionalPole("Frobenius eigenvalue equals 1");
  FieldElem q(alpha.field(), Rational(d.base()->q_long()));
  return (one - (q * alpha).inverse()) / (one - alpha);
}

// Gamma*(r)
inline Rational gamma_star(long r) {
  Rational f = 1;
  if (r > 0) {
    for (long i = 2; i < r; ++i) f *= i;
    return f;
  }
  for (long i = 2; i <= -r; ++i) f *= i;
  return Rational((r % 2) ? -1 : 1) / f;
}

// prod_r (Omega^r Gamma*(r))^{-n(r)}
inline OmegaScalar gamma_factor(const FieldPtr& K, const std::map<long, long>& weights) {
  OmegaScalar g = OmegaScalar::rational(K, 1);
  for (auto& [r, n] : weights) {
    OmegaScalar base(FieldElem(K, gamma_star(r)), static_cast<int>(r));
    g = g * base.pow(-n);
  }
  return g;
}

enum class InterpVariant { C, Cprime };

// C(delta) for k <= 0 and C'(delta) for k >= 1, the b = 1 component for ramified delta.
inline OmegaScalar interp_constant(const Character& d, InterpVariant v, const AdditiveCharacter& psi) {
  if (d.has_analytic_exponent()) throw NotDeRham("interpolation constants need s = 0");
  long k = d.k();
  if ((v == InterpVariant::C && k > 0) || (v == InterpVariant::Cprime && k < 1))
    throw WrongVariant("variant does not match the weight");
  FieldElem core = d.conductor() != 0 ? gauss_sum_epsilon(weil_character(d), psi).inverse() : crystalline_factor(d);
  FieldPtr K = core.field();
  if (v == InterpVariant::C) {
    Rational fact = 1;
    for (long i = 2; i <= -k; ++i) fact *= i;
    OmegaScalar pre = OmegaScalar(FieldElem(K, Rational(k % 2 ? -1 : 1) / fact), static_cast<int>(k));
    return pre * core;
  }
  Rational fact = 1;
  for (long i = 2; i <= k - 1; ++i) fact *= i;
  return OmegaScalar(FieldElem(K, fact), static_cast<int>(k)) * core;
}

// The equivariant version: one value per unit class b.
inline std::vector<OmegaScalar> interp_constant_equivariant(const Character& d, InterpVariant v,
                                                            const AdditiveCharacter& psi) {
  std::vector<OmegaScalar> out;
  RingPtr R = ResidueRing::make(d.base(), psi.level());
  for (long b : R->units()) out.push_back(interp_constant(d, v, psi.scaled(R->elem(b))));
  return out;
}

}  // namespace ltlab
