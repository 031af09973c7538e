#pragma once

#include <json.hpp>
#include <string>

#include "ltlab/chareps.hpp"
#include "ltlab/series.hpp"

namespace ltlab {

using json = nlohmann::json;

inline json prec_json(long N) { return N >= kInfPrec ? json("exact") : json(N); }
inline long prec_from_json(const json& j) { return j.is_string() ? kInfPrec : j.get<long>(); }

// Coefficients grouped by powers of the top stage generator; each group is a flat vector
// over the previous stage, written as decimal rationals.
inline json to_json(const FieldElem& x, long N = kInfPrec) {
  long n = std::min(N, x.prec_pi());
  FieldElem y = x.truncate_pi(n);
  const FieldPtr& F = y.field();
  std::size_t block = F->levels() == 0 ? 1 : F->dim(F->levels() - 1);
  json groups = json::array();
  const Flat& c = y.coeffs();
  for (std::size_t i = 0; i < c.size(); i += block) {
    json g = json::array();
    for (std::size_t k = i; k < i + block; ++k) g.push_back(c[k].is_exact() ? c[k].exact_value().get_str() : c[k].rational().get_str());
    groups.push_back(std::move(g));
  }
  return json{{"coeffs", std::move(groups)}, {"prec", prec_json(n)}};
}

inline FieldElem field_elem_from_json(const FieldPtr& F, const json& j) {
  Flat c;
  for (auto& g : j.at("coeffs"))
    for (auto& s : g) c.emplace_back(F->p(), Rational(s.get<std::string>()));
  if (c.size() != F->degree()) throw FieldMismatch("serialized element has the wrong degree");
  return FieldElem(F, std::move(c)).truncate_pi(prec_from_json(j.at("prec")));
}

inline json to_json(const OmegaScalar& a, long N = kInfPrec) {
  json m = json::object();
  for (auto& [k, c] : a.terms())
    if (!c.is_exact_zero()) m[std::to_string(k)] = to_json(c, N);
  return json{{"omega", std::move(m)}};
}

inline OmegaScalar omega_from_json(const FieldPtr& F, const json& j) {
  OmegaScalar r(F);
  for (auto& [k, v] : j.at("omega").items()) r += OmegaScalar(field_elem_from_json(F, v), std::stoi(k));
  return r;
}

inline json to_json(const Series& s, long N = kInfPrec) {
  json c = json::array();
  for (long k = s.lo(); k < std::min(s.hi(), s.trunc()); ++k) c.push_back(to_json(s.coeff(k), N));
  return json{{"var", s.var() == Var::Z ? "Z" : "t"},
              {"min_exp", s.lo()},
              {"coeffs", std::move(c)},
              {"truncation", prec_json(s.trunc())}};
}

inline Series series_from_json(const FieldPtr& F, const json& j) {
  std::vector<OmegaScalar> c;
  for (auto& x : j.at("coeffs")) c.push_back(omega_from_json(F, x));
  Var v = j.at("var").get<std::string>() == "t" ? Var::t : Var::Z;
  return Series(F, j.at("min_exp").get<long>(), std::move(c), prec_from_json(j.at("truncation")), v);
}

inline json to_json(const Character& d, long N = kInfPrec) {
  json t = json::array();
  if (d.table_ring())
    for (long u : d.table_ring()->units()) t.push_back(json{{"unit", d.table_ring()->elem(u).str()}, {"value", to_json(d.table()[u], N)}});
  json r{{"pi_value", to_json(d.pi_value(), N)}, {"k", d.k()}, {"table_level", d.table_level()}, {"table", std::move(t)}};
  if (!d.has_analytic_exponent()) r["conductor"] = d.conductor();
  return r;
}

}  // namespace ltlab
