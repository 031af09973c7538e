#pragma once

#include <array>
#include <string>
#include <vector>

#include "ltlab/chareps.hpp"
#include "ltlab/lubin_tate.hpp"

namespace ltlab {

// Z_n acts on a Gamma-isotypic line by a scalar; it vanishes exactly when the line
// character is trivial on 1 + pi^n o_L (n = 0: on all of o_L^x).
inline bool zn_scalar_is_zero(const Character& rho, int n) {
  if (rho.k() != 0 || rho.has_analytic_exponent()) return false;
  return rho.conductor() <= n;
}

struct Line {
  std::string label;
  FieldElem psi_eigen;  // Psi acts by this scalar
  Character gamma;      // Gamma acts through this character of o_L^x
};

struct IsotypicModel {
  enum class Kind { Pol, D };
  Kind kind;
  Character delta;
  int N = 0;
  std::vector<Line> lines;

  // Pol_{<=N}(o_L)(chi^{-1} delta): Psi(z^i) = pi^i z^i, gamma(z^i) = chi_LT^{-i} z^i.
  // D_N(delta) = sum K t^l: Psi(t^l) = pi^{-l} t^l, gamma(t^l) = chi_LT^l t^l.
  static IsotypicModel make(Kind kind, const Character& delta, int N) {
    IsotypicModel M{kind, delta, N, {}};
    FieldPtr L = delta.base(), K = delta.values();
    FieldElem pi = FieldElem::uniformizer(L).coerce_to(common_field(FieldElem(K), FieldElem(L)));
    FieldElem c = delta.pi_value().coerce_to(pi.field());
    long q = L->q_long();
    for (int i = 0; i <= N; ++i) {
      if (kind == Kind::Pol) {
        FieldElem ev = pi.pow(i + 1) * (c * Rational(q)).inverse();
        M.lines.push_back({"z^" + std::to_string(i), ev, delta * Character::x_pow(L, K, -(i + 1))});
      } else {
        FieldElem ev = pi.pow(-i) * c.inverse();
        M.lines.push_back({"t^" + std::to_string(i), ev, delta * Character::x_pow(L, K, i)});
      }
    }
    return M;
  }
};

struct CohTable {
  std::array<int, 3> dims{0, 0, 0};
  std::array<std::vector<std::string>, 3> labels;
  int euler() const { return dims[0] - dims[1] + dims[2]; }
  std::string str() const {
    return "(" + std::to_string(dims[0]) + "," + std::to_string(dims[1]) + "," + std::to_string(dims[2]) + ")";
  }
  bool operator==(const CohTable& o) const { return dims == o.dims; }
};

inline int euler_characteristic(const CohTable& t) { return t.euler(); }

// H^0 and H^1 of Psi - 1 (degrees 0, 1; degree 2 unused).
inline CohTable psi_cohomology(const IsotypicModel& M) {
  CohTable t;
  for (auto& l : M.lines)
    if (l.psi_eigen == FieldElem(l.psi_eigen.field(), 1L))
      for (int i : {0, 1}) {
        t.dims[i]++;
        t.labels[i].push_back(l.label);
      }
  return t;
}

// Total cohomology of the double complex (Psi - 1, Z_n) on the model.
inline CohTable model_cohomology(const IsotypicModel& M, int n = 0) {
  CohTable t;
  for (auto& l : M.lines) {
    if (l.psi_eigen != FieldElem(l.psi_eigen.field(), 1L)) continue;
    if (!zn_scalar_is_zero(l.gamma, n)) continue;
    for (int i : {0, 1, 1, 2}) {
      t.dims[i]++;
      if (t.labels[i].empty() || t.labels[i].back() != l.label) t.labels[i].push_back(l.label);
    }
  }
  return t;
}
inline CohTable model_cohomology(IsotypicModel::Kind kind, const Character& delta, int N, int n = 0) {
  return model_cohomology(IsotypicModel::make(kind, delta, N), n);
}

// The rank-one tables over the Robba ring, R^+ and LA(o_L).
inline CohTable expected_dims(const Character& delta) {
  CohTable t;
  switch (classify(delta).kind) {
    case Classification::Kind::Sigma1: t.dims = {1, 2, 0}; break;
    case Classification::Kind::Sigma2: t.dims = {0, 2, 1}; break;
    default: t.dims = {0, 1, 0};
  }
  return t;
}
inline CohTable expected_dims_plus(const Character& delta) {
  CohTable t;
  if (classify(delta).kind == Classification::Kind::Sigma1) t.dims = {1, 2, 1};
  return t;
}
inline CohTable expected_dims_la(const Character& delta) {
  CohTable t;
  t.dims = classify(delta.inverse()).kind == Classification::Kind::Sigma1 ? std::array<int, 3>{0, 2, 1}
                                                                          : std::array<int, 3>{0, 1, 0};
  return t;
}

inline bool duality_mirror_check(const Character& delta) {
  Character dual = Character::chi(delta.base(), delta.values()) * delta.inverse();
  auto a = expected_dims(delta), b = expected_dims(dual);
  for (int i = 0; i < 3; ++i)
    if (a.dims[i] != b.dims[2 - i]) return false;
  return true;
}

// lambda at the trivial character: Z^iota = [-1](Z), so the ratio at the origin is [-1]'(0).
inline FieldElem lambda_at_trivial(const FormalGroup& G) {
  return G.endomorphism(FieldElem(G.field(), -1L)).coeff_elem(1);
}

// phi, Z and lambda^iota acting on a scalar line.
struct LineScalars {
  FieldElem phi, z, lambda_iota;
};

// Chain-level pairings with a base pairing Res(e~(e)) = 1.
// <(m,n),(f,g)>_M = -(phi~(g) m + lambda~^iota(f) n)
inline FieldElem koszul_pairing_11(const LineScalars& M, const LineScalars& Mt, const FieldElem& m, const FieldElem& n,
                                   const FieldElem& f, const FieldElem& g) {
  (void)M;
  return -(Mt.phi * g * m + Mt.lambda_iota * f * n);
}
// H^2(M) x H^0(M~): -Res(n~(lambda^iota phi(m)))
inline FieldElem koszul_pairing_20(const LineScalars& M, const FieldElem& m, const FieldElem& nt) {
  return -(M.lambda_iota * M.phi * m * nt);
}
// H^0(M) x H^2(M~): Res(n~(m))
inline FieldElem koszul_pairing_02(const FieldElem& m, const FieldElem& nt) { return m * nt; }

// Degree-1 cocycle condition Z m + (1 - phi) n = 0.
inline bool is_cocycle(const LineScalars& M, const FieldElem& m, const FieldElem& n) {
  return (M.z * m + (FieldElem(m.field(), 1L) - M.phi) * n).is_zero();
}

// The matrix of the (1,1) pairing on H^1 x H^1 when both models have phi = 1 and Z = 0.
inline std::array<std::array<FieldElem, 2>, 2> koszul_matrix(const LineScalars& M, const LineScalars& Mt) {
  if (!M.z.is_zero() || !Mt.z.is_zero() || M.phi != FieldElem(M.phi.field(), 1L) ||
      Mt.phi != FieldElem(Mt.phi.field(), 1L))
    throw CharacterMismatch("H^1 is not two-dimensional on these lines");
  FieldPtr K = M.phi.field();
  FieldElem one(K, 1L), zero(K);
  std::array<std::array<FieldElem, 2>, 2> P;
  std::array<std::pair<FieldElem, FieldElem>, 2> basis{std::make_pair(one, zero), std::make_pair(zero, one)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      P[i][j] = koszul_pairing_11(M, Mt, basis[i].first, basis[i].second, basis[j].first, basis[j].second);
  return P;
}

}  // namespace ltlab
