#pragma once

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ltlab/suites.hpp"

namespace ltlab {

inline constexpr const char* kReportSchemaVersion = "1.0";

struct Config {
  std::optional<unsigned long> p;  // unset: the canonical three-field grid
  std::string tower = "base";
  std::string frobenius = "special";
  long padic_digits = kDefaultDigits;
  long series_order = 16;
  long t_order = 8;
  long moment_horizon = 8;
  std::string suite = "all";
  unsigned long seed = 1;

  void validate() const {
    if (padic_digits <= 0 || series_order <= 0 || t_order <= 0 || moment_horizon <= 0)
      throw std::invalid_argument("precision fields must be positive");
    if (p && *p < 2) throw std::invalid_argument("p must be a prime");
    if (p)
      for (unsigned long d = 2; d * d <= *p; ++d)
        if (*p % d == 0) throw std::invalid_argument("p must be a prime");
  }

  RunParams params() const {
    RunParams P;
    P.seed = seed;
    P.digits = padic_digits;
    P.series_order = series_order;
    P.t_order = t_order;
    P.moment_horizon = moment_horizon;
    P.data = p ? std::vector<DatumSpec>{{*p, tower, frobenius}} : default_grid();
    return P;
  }

  json to_json() const {
    json j{{"tower", tower},
           {"frobenius", frobenius},
           {"precision", {{"padic_digits", padic_digits}, {"series_order", series_order}, {"t_order", t_order},
                          {"moment_horizon", moment_horizon}}},
           {"suite", suite},
           {"seed", seed}};
    j["p"] = p ? json(*p) : json("grid");
    return j;
  }
};

// key = value file with [field], [precision] and [run] sections.
inline void load_config_file(Config& c, const std::string& path) {
  boost::property_tree::ptree t;
  boost::property_tree::read_ini(path, t);
  static const std::map<std::string, std::set<std::string>> known{
      {"field", {"p", "tower", "frobenius"}},
      {"precision", {"padic_digits", "series_order", "t_order", "moment_horizon"}},
      {"run", {"suite", "seed"}}};
  for (auto& [sec, body] : t) {
    auto it = known.find(sec);
    if (it == known.end()) throw std::invalid_argument("unknown config section [" + sec + "]");
    for (auto& [key, _] : body)
      if (!it->second.count(key)) throw std::invalid_argument("unknown config key " + sec + "." + key);
  }
  if (auto v = t.get_optional<unsigned long>("field.p")) c.p = *v;
  c.tower = t.get("field.tower", c.tower);
  c.frobenius = t.get("field.frobenius", c.frobenius);
  c.padic_digits = t.get("precision.padic_digits", c.padic_digits);
  c.series_order = t.get("precision.series_order", c.series_order);
  c.t_order = t.get("precision.t_order", c.t_order);
  c.moment_horizon = t.get("precision.moment_horizon", c.moment_horizon);
  c.suite = t.get("run.suite", c.suite);
  c.seed = t.get("run.seed", c.seed);
}

struct CliResult {
  int code = 0;
  json report;
};

namespace cli_detail {

inline json summarize(const std::vector<Check>& checks) {
  long pass = 0, fail = 0, skip = 0;
  for (auto& c : checks) (c.status == "pass" ? pass : c.status == "fail" ? fail : skip)++;
  return json{{"pass", pass}, {"fail", fail}, {"skipped", skip}, {"total", static_cast<long>(checks.size())}};
}

inline GroupPtr group_for(const Config& c) { return make_group({c.p.value_or(3), c.tower, c.frobenius}, c.series_order); }

inline json cmd_group_law(const Config& c, const std::string& a_str) {
  GroupPtr G = group_for(c);
  FieldPtr L = G->field();
  long D = G->order();
  json F = json::array();
  for (long d = 1; d < D; ++d)
    for (long i = 0; i <= d; ++i) {
      FieldElem v = G->group_law().coeff(i, d - i);
      if (!v.is_zero()) F.push_back(json{{"i", i}, {"j", d - i}, {"coeff", to_json(v, c.padic_digits)}});
    }
  FieldElem a = parse_coefficient(L, a_str);
  return json{{"field", L->name()},
              {"order", D},
              {"F", std::move(F)},
              {"log", to_json(G->log(), c.padic_digits)},
              {"exp", to_json(G->exp(), c.padic_digits)},
              {"endomorphism", {{"a", a_str}, {"series", to_json(G->endomorphism(a), c.padic_digits)}}}};
}

inline json cmd_torsion(const Config& c, int level) {
  GroupPtr G = group_for(c);
  TorsionTower tw = G->torsion_tower(level);
  json stages = json::array();
  for (int k = 0; k <= tw.n; ++k)
    stages.push_back(json{{"level", k},
                          {"field", tw.fields[k]->name()},
                          {"degree", tw.fields[k]->degree()},
                          {"u", to_json(tw.u[k], c.padic_digits)}});
  json l1 = json::array();
  for (auto& x : tw.level1) l1.push_back(to_json(x, c.padic_digits));
  return json{{"stages", std::move(stages)}, {"level1", std::move(l1)}};
}

inline json cmd_eps_gauss(const Config& c, int n, bool all, long npsi) {
  FieldPtr L = make_tower(c.p.value_or(3), c.tower);
  AdditiveCharacter psi(L, value_field(L, cyclotomic_level_for(L, n)), n, c.padic_digits);
  FieldPtr K = psi.values();
  FieldElem qq(K, Rational(L->q_long()));
  Character absx = Character::abs(L, K);
  json rows = json::array();
  long idx = 0;
  for (auto& d : all_characters(L, K, n, FieldElem(K, 1L), c.padic_digits)) {
    if (!all && d.conductor() != n) continue;
    FieldElem e = gauss_sum_epsilon(d, psi, npsi), ed = gauss_sum_epsilon(d.inverse() * absx, psi, npsi);
    FieldElem dual = d.at_minus_one() * qq.pow(npsi);
    rows.push_back(json{{"index", idx++},
                        {"conductor", d.conductor()},
                        {"delta(-1)", to_json(d.at_minus_one(), c.padic_digits)},
                        {"epsilon", to_json(e, c.padic_digits)},
                        {"epsilon*epsilon_dual", to_json(e * ed, c.padic_digits)},
                        {"delta(-1)q^n(psi)", to_json(dual, c.padic_digits)},
                        {"duality_holds", e * ed == dual}});
  }
  return json{{"field", L->name()}, {"values", K->name()}, {"level", n}, {"n_psi", npsi}, {"rows", std::move(rows)}};
}

inline json cmd_eps_equivariant(const Config& c, int n) {
  FieldPtr L = make_tower(c.p.value_or(3), c.tower);
  AdditiveCharacter psi(L, value_field(L, cyclotomic_level_for(L, n)), n, c.padic_digits);
  FieldPtr K = psi.values();
  json rows = json::array();
  for (auto& d : all_characters(L, K, n, FieldElem(K, 1L), c.padic_digits)) {
    EquivariantEps E = equivariant_epsilon(d, psi);
    json tuple = json::array();
    for (std::size_t i = 0; i < E.classes.size(); ++i)
      tuple.push_back(json{{"b", E.R->elem(E.classes[i]).str()}, {"epsilon", to_json(E.values[i], c.padic_digits)}});
    rows.push_back(json{{"conductor", d.conductor()}, {"tuple", std::move(tuple)}});
  }
  return json{{"field", L->name()}, {"level", n}, {"rows", std::move(rows)}};
}

inline json cmd_coh(const Config& c, int N) {
  FieldPtr L = catalog::qp(c.p.value_or(3));
  json rows = json::array();
  for (auto& g : suite_detail::coh_grid(L)) {
    json r{{"character", g.name}, {"class", classify(g.d).str()}};
    r["pol"] = suite_detail::dims_json(model_cohomology(IsotypicModel::Kind::Pol, g.d, N).dims);
    r["d"] = suite_detail::dims_json(model_cohomology(IsotypicModel::Kind::D, g.d, N).dims);
    r["robba"] = suite_detail::dims_json(expected_dims(g.d).dims);
    r["plus"] = suite_detail::dims_json(expected_dims_plus(g.d).dims);
    r["la"] = suite_detail::dims_json(expected_dims_la(g.d).dims);
    r["mirror"] = duality_mirror_check(g.d);
    rows.push_back(std::move(r));
  }
  return json{{"field", L->name()}, {"N", N}, {"rows", std::move(rows)}};
}

inline json cmd_dist(const Config& c, int level) {
  GroupPtr G = group_for(c);
  FieldPtr L = G->field();
  std::mt19937 rng(c.seed);
  Measure mu = suite_detail::random_measure(L, L, level, rng);
  long H = std::min(c.moment_horizon, G->order() - 1);
  json masses = json::array();
  for (auto& [x, m] : mu.points()) masses.push_back(json{{"point", x.str()}, {"mass", to_json(m, c.padic_digits)}});
  json mom = json::array();
  for (auto& m : moments(*G, mu, H)) mom.push_back(to_json(m, c.padic_digits));
  Character d = Character::x_pow(L, L, 1);
  return json{{"field", L->name()},
              {"level", level},
              {"measure", std::move(masses)},
              {"amice", to_json(amice_series(*G, mu), c.padic_digits)},
              {"moments", std::move(mom)},
              {"restriction", to_json(amice_series(*G, restrict_units(mu)), c.padic_digits)},
              {"mellin_x", to_json(mellin(G, restrict_units(mu), d).f, c.padic_digits)}};
}

}  // namespace cli_detail

// Runs the command line; the report goes to `out` (or --out), diagnostics to `err`.
inline CliResult run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ltlab: Lubin-Tate (phi, Gamma)-module laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  std::optional<unsigned long> p;
  std::optional<std::string> tower, frobenius, suite, config_path, out_path;
  std::optional<long> prec, order, t_order, horizon;
  std::optional<unsigned long> seed;
  bool as_json = false, allow_skip = false;
  app.add_option("--config", config_path, "config file (default: $LTLAB_CONFIG)");
  app.add_option("--p", p, "prime");
  app.add_option("--tower", tower, "base | sqrt-p");
  app.add_option("--frobenius", frobenius, "special | cyclotomic | poly:c0,...,cq");
  app.add_option("--prec", prec, "p-adic precision in pi-digits");
  app.add_option("--series-order,--order", order, "series truncation order");
  app.add_option("--t-order", t_order, "t-adic order for iota");
  app.add_option("--moment-horizon", horizon, "number of moments");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--suite", suite, "suite name, identities, or all");
  app.add_option("--out", out_path, "write the JSON report here");
  app.add_flag("--json", as_json, "print the JSON report to stdout");
  app.add_flag("--allow-skip", allow_skip, "skipped checks do not fail the run");

  auto* gl = app.add_subcommand("group-law", "formal group law, log, exp and [a]");
  std::string a_str = "2";
  gl->add_option("--a", a_str, "endomorphism parameter");
  auto* tor = app.add_subcommand("torsion", "torsion tower data");
  int tlevel = 1;
  tor->add_option("--level", tlevel, "tower level (at most 2)");
  auto* eps = app.add_subcommand("eps", "Gauss-sum epsilon tables");
  eps->require_subcommand(1);
  auto* gauss = eps->add_subcommand("gauss", "epsilon and the duality column");
  int conductor = 1;
  long npsi = 0;
  bool all_chars = false;
  gauss->add_option("--conductor", conductor, "level of the unit characters");
  gauss->add_option("--n-psi", npsi, "conductor exponent of psi");
  gauss->add_flag("--all-characters", all_chars, "include characters of smaller conductor");
  auto* eqv = eps->add_subcommand("equivariant", "epsilon(delta, psi(b .)) tuples");
  int elevel = 1;
  eqv->add_option("--level", elevel, "level");
  auto* coh = app.add_subcommand("coh", "model and oracle cohomology tables");
  int cohN = 3;
  coh->add_option("--N", cohN, "model degree bound");
  auto* dist = app.add_subcommand("dist", "Amice and Mellin transforms of a random measure");
  int dlevel = 2;
  dist->add_option("--level", dlevel, "measure level");
  auto* verify = app.add_subcommand("verify", "run verification suites");

  std::vector<const char*> argv{"ltlab"};
  for (auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return {0, {}};
  } catch (const CLI::ParseError& e) {
    err << "ltlab: " << e.what() << "\n";
    return {2, {}};
  }

  try {
    std::string path = config_path.value_or("");
    if (path.empty())
      if (const char* env = std::getenv("LTLAB_CONFIG")) path = env;
    if (!path.empty()) load_config_file(cfg, path);
    if (p) cfg.p = *p;
    if (tower) cfg.tower = *tower;
    if (frobenius) cfg.frobenius = *frobenius;
    if (prec) cfg.padic_digits = *prec;
    if (order) cfg.series_order = *order;
    if (t_order) cfg.t_order = *t_order;
    if (horizon) cfg.moment_horizon = *horizon;
    if (seed) cfg.seed = *seed;
    if (suite) cfg.suite = *suite;
    cfg.validate();
    make_group({cfg.p.value_or(3), cfg.tower, cfg.frobenius}, 2);
    if (verify->parsed() && cfg.suite != "all" && cfg.suite != "identities") {
      auto& names = suite_names();
      if (std::find(names.begin(), names.end(), cfg.suite) == names.end())
        throw std::invalid_argument("unknown suite '" + cfg.suite + "'");
    }
  } catch (const std::exception& e) {
    err << "ltlab: configuration error: " << e.what() << "\n";
    return {2, {}};
  }

  CliResult res;
  json& rep = res.report;
  rep["schema_version"] = kReportSchemaVersion;
  rep["config"] = cfg.to_json();
  try {
    if (verify->parsed()) {
      rep["command"] = "verify";
      auto checks = run_suite(cfg.suite, cfg.params());
      json arr = json::array();
      for (auto& c : checks) arr.push_back(c.to_json_record());
      rep["checks"] = std::move(arr);
      rep["summary"] = cli_detail::summarize(checks);
      long fails = rep["summary"]["fail"], skips = rep["summary"]["skipped"];
      res.code = fails || (skips && !allow_skip) ? 1 : 0;
    } else if (gl->parsed()) {
      rep["command"] = "group-law";
      rep["result"] = cli_detail::cmd_group_law(cfg, a_str);
    } else if (tor->parsed()) {
      rep["command"] = "torsion";
      rep["result"] = cli_detail::cmd_torsion(cfg, tlevel);
    } else if (gauss->parsed()) {
      rep["command"] = "eps gauss";
      rep["result"] = cli_detail::cmd_eps_gauss(cfg, conductor, all_chars, npsi);
    } else if (eqv->parsed()) {
      rep["command"] = "eps equivariant";
      rep["result"] = cli_detail::cmd_eps_equivariant(cfg, elevel);
    } else if (coh->parsed()) {
      rep["command"] = "coh";
      rep["result"] = cli_detail::cmd_coh(cfg, cohN);
    } else if (dist->parsed()) {
      rep["command"] = "dist";
      rep["result"] = cli_detail::cmd_dist(cfg, dlevel);
    }
  } catch (const std::exception& e) {
    err << "ltlab: " << e.what() << "\n";
    rep["error"] = e.what();
    res.code = 1;
  }

  std::string text = rep.dump(2) + "\n";
  if (out_path) {
    std::ofstream f(*out_path);
    if (!f) {
      err << "ltlab: cannot write " << *out_path << "\n";
      return {2, rep};
    }
    f << text;
  }
  if (as_json) {
    out << text;
  } else if (rep.contains("summary")) {
    for (auto& c : rep["checks"])
      out << c["status"].get<std::string>() << "  " << c["id"].get<std::string>() << "  (" << c["cases"] << " cases)\n";
    auto& s = rep["summary"];
    out << s["pass"] << " pass, " << s["fail"] << " fail, " << s["skipped"] << " skipped\n";
  } else if (!out_path) {
    out << text;
  }
  return res;
}

}  // namespace ltlab
