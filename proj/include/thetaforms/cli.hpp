#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "thetaforms/e8lattice.hpp"
#include "thetaforms/forms.hpp"
#include "thetaforms/suites.hpp"

namespace thetaforms::cli {

using nlohmann::json;

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kInfeasible = 3 };

enum class TauSource { file, random, product };

struct RunConfig {
  double tolerance = 1e-12;
  double rank_tol = 1e-8;
  std::uint64_t seed = 0;
  int g = 2;
  TauSource tau_source = TauSource::random;
  std::string tau_file;
  std::pair<int, int> product{1, 1};
  int samples = 1;
  int threads = 1;
  bool slow = false;
  std::string output_path;
};

// JSON conversion --------------------------------------------------------------

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const CheckResult& c) {
  return json{{"check", c.check},         {"inputs_digest", c.inputs_digest}, {"residual", c.residual},
              {"tolerance", c.tolerance}, {"pass", c.pass},                   {"elapsed", c.elapsed}};
}

inline const char* to_string(TauSource s) {
  switch (s) {
    case TauSource::file: return "file";
    case TauSource::random: return "random";
    case TauSource::product: return "product";
  }
  return "?";
}

inline json to_json(const RunConfig& c) {
  json j{{"tolerance", c.tolerance}, {"rank_tol", c.rank_tol}, {"seed", c.seed},   {"g", c.g},
         {"tau_source", to_string(c.tau_source)}, {"samples", c.samples}, {"threads", c.threads}, {"slow", c.slow}};
  if (c.tau_source == TauSource::file) j["tau_file"] = c.tau_file;
  if (c.tau_source == TauSource::product) j["product"] = {c.product.first, c.product.second};
  if (!c.output_path.empty()) j["output_path"] = c.output_path;
  return j;
}

// Period matrix files ------------------------------------------------------------

namespace detail {

inline RMatrix real_block(const json& j, const std::string& key, int g, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
  const json& rows = j.at(key);
  if (!rows.is_array() || static_cast<int>(rows.size()) != g)
    throw ParseError(where + ": /" + key + " must be an array of " + std::to_string(g) + " rows");
  RMatrix m(g, g);
  for (int i = 0; i < g; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != g)
      throw ParseError(where + ": /" + key + "/" + std::to_string(i) + " must be an array of " + std::to_string(g) + " numbers");
    for (int k = 0; k < g; ++k) {
      const json& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number())
        throw ParseError(where + ": /" + key + "/" + std::to_string(i) + "/" + std::to_string(k) + " is not a number");
      m(i, k) = x.get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// {"g": n, "re": [[...]], "im": [[...]]}; symmetric with positive definite imaginary part.
inline PeriodMatrix parse_period_matrix(const std::string& text, const std::string& where = "tau") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
  if (!j.is_object()) throw ParseError(where + ": top level must be an object");
  if (!j.contains("g") || !j.at("g").is_number_integer()) throw ParseError(where + ": /g must be an integer");
  const int g = j.at("g").get<int>();
  if (g < 1 || g > 8) throw ParseError(where + ": /g must lie in [1, 8]");
  const RMatrix re = detail::real_block(j, "re", g, where);
  const RMatrix im = detail::real_block(j, "im", g, where);
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b) {
      const auto pos = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
      if (std::abs(re(a, b) - re(b, a)) > 1e-13 * std::max(1.0, std::abs(re(a, b))))
        throw ParseError(where + ": /re is not symmetric at " + pos);
      if (std::abs(im(a, b) - im(b, a)) > 1e-13 * std::max(1.0, std::abs(im(a, b))))
        throw ParseError(where + ": /im is not symmetric at " + pos);
    }
  try {
    return PeriodMatrix::from_parts(re, im);
  } catch (const DomainError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline PeriodMatrix load_period_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_period_matrix(ss.str(), path);
}

inline json period_matrix_json(const PeriodMatrix& tau) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < tau.genus(); ++i) {
    json r = json::array(), s = json::array();
    for (int j = 0; j < tau.genus(); ++j) {
      r.push_back(tau(i, j).real());
      s.push_back(tau(i, j).imag());
    }
    re.push_back(r);
    im.push_back(s);
  }
  return json{{"g", tau.genus()}, {"re", re}, {"im", im}};
}

/// Period matrices selected by the configuration; updates cfg.g for file and
/// product sources.
inline std::vector<PeriodMatrix> resolve_taus(RunConfig& cfg) {
  std::vector<PeriodMatrix> out;
  switch (cfg.tau_source) {
    case TauSource::file:
      out.push_back(load_period_matrix(cfg.tau_file));
      cfg.g = out.front().genus();
      break;
    case TauSource::product: {
      if (cfg.product.first < 1 || cfg.product.second < 1) throw ParseError("--product: both genera must be positive");
      cfg.g = cfg.product.first + cfg.product.second;
      std::mt19937_64 rng(cfg.seed);
      for (int k = 0; k < cfg.samples; ++k) out.push_back(sample_product_period_matrix(cfg.product.first, cfg.product.second, rng));
      break;
    }
    case TauSource::random:
      if (cfg.g < 1) throw ParseError("--g must be positive");
      for (int k = 0; k < cfg.samples; ++k) out.push_back(sample_period_matrix(cfg.g, cfg.seed + static_cast<std::uint64_t>(k)));
      break;
  }
  return out;
}

// Reports ----------------------------------------------------------------------------

struct Report {
  std::string command;
  RunConfig config;
  std::vector<CheckResult> checks;
  json extra = json::object();

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  json to_json() const {
    json j{{"version", kVersion}, {"command", command}, {"config", cli::to_json(config)}};
    json cs = json::array();
    for (const auto& c : checks) cs.push_back(cli::to_json(c));
    j["checks"] = cs;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    j["pass"] = pass();
    return j;
  }
};

inline int emit(const Report& rep, std::ostream& out) {
  const std::string text = rep.to_json().dump(2);
  out << text << "\n";
  if (!rep.config.output_path.empty()) {
    std::ofstream f(rep.config.output_path);
    if (!f) throw ParseError(rep.config.output_path + ": cannot write report");
    f << text << "\n";
  }
  return rep.pass() ? kPass : kFail;
}

inline ThetaOptions theta_options(const RunConfig& cfg) {
  ThetaOptions o;
  o.tol = cfg.tolerance;
  return o;
}

inline CheckResult exact_check(const std::string& name, const std::string& inputs, double residual) {
  CheckResult c;
  c.check = name;
  c.inputs_digest = fnv1a_hex(inputs);
  c.residual = residual;
  c.tolerance = 0.0;
  c.pass = residual == 0.0;
  return c;
}

// Commands -----------------------------------------------------------------------------

inline Report cmd_verify(RunConfig cfg, const std::vector<std::string>& suites) {
  Report rep;
  rep.command = "verify";
  for (const auto& s : suites)
    if (!is_suite(s)) throw ParseError("unknown suite: " + s);
  bool need_tau = false;
  for (const auto& s : suites) need_tau = need_tau || suite_needs_tau(s);
  SuiteConfig sc;
  if (need_tau) sc.taus = resolve_taus(cfg);
  sc.g = cfg.g;
  sc.tol = cfg.tolerance;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  sc.theta = theta_options(cfg);
  json names = json::array();
  for (const auto& s : suites) {
    names.push_back(s);
    auto r = run_suite(s, sc);
    rep.checks.insert(rep.checks.end(), r.begin(), r.end());
  }
  rep.config = cfg;
  rep.extra["suites"] = names;
  return rep;
}

/// All suites applicable at genus g.
inline std::vector<std::string> identity_suites(int g) {
  std::vector<std::string> s{"heat", "bilinear", "addition", "conversion", "transformation", "det_weight", "binet"};
  if (g >= 2) {
    s.push_back("adjoint");
    s.push_back("pairing_parity");
  }
  if (g == 2 || g == 3) s.push_back("adjoint_W");
  return s;
}

inline Report cmd_decomposable(RunConfig cfg) {
  Report rep;
  rep.command = "decomposable";
  const auto taus = resolve_taus(cfg);
  if (cfg.g < 2 || cfg.g > 4) throw ParseError("decomposable: g must lie in [2, 4]");
  json results = json::array();
  for (std::size_t t = 0; t < taus.size(); ++t) {
    const ThetaContext ctx(taus[t], theta_options(cfg), cfg.threads);
    const auto q = quadric_criterion(ctx, cfg.rank_tol);
    json r{{"tau", period_matrix_json(taus[t])},
           {"verdict", to_string(q.verdict)},
           {"rank", q.rank},
           {"N", sym_dim(cfg.g)},
           {"singular_values", q.singular_values},
           {"trunc_bound", ctx.trunc_bound()}};
    if (q.witness) {
      r["witness"] = to_json(*q.witness);
      CheckResult c;
      c.check = "decomposable:witness tau" + std::to_string(t);
      c.inputs_digest = fnv1a_hex(canonical(taus[t]));
      for (const auto& m : enumerate_characteristics(cfg.g, ParityFilter::odd)) {
        const CMatrix cm = C_matrix(ctx, m.eps(), m.delta());
        const CMatrix bc = *q.witness * cm;
        Complex tr = 0.0;
        for (int i = 0; i < cfg.g; ++i) tr += bc(i, i);
        c.residual = std::max(c.residual, std::abs(tr) / std::max(max_abs(cm), 1e-300));
      }
      c.tolerance = cfg.rank_tol;
      c.pass = c.residual <= c.tolerance;
      rep.checks.push_back(c);
    }
    results.push_back(std::move(r));
  }
  rep.config = cfg;
  rep.extra["results"] = results;
  return rep;
}

inline Report cmd_omega(RunConfig cfg, const std::string& eps, const std::string& delta) {
  Report rep;
  rep.command = "omega";
  const F2Vector e = F2Vector::parse(eps), d = F2Vector::parse(delta);
  if (e.size() != d.size()) throw ParseError("omega: --eps and --delta differ in length");
  if (e == d) throw ParseError("omega: --eps must differ from --delta");
  if (cfg.tau_source == TauSource::random) cfg.g = e.size();
  const auto taus = resolve_taus(cfg);
  if (cfg.g != e.size()) throw ParseError("omega: characteristic length differs from g");
  if (cfg.g < 2) throw ParseError("omega: g must be at least 2");
  json results = json::array();
  for (std::size_t t = 0; t < taus.size(); ++t) {
    const ThetaContext ctx(taus[t], theta_options(cfg), cfg.threads);
    const CVector w = omega_coefficients(ctx, e, d);
    json coeffs = json::array(), labels = json::array();
    const auto pairs = sym_pairs(cfg.g);
    for (std::size_t p = 0; p < w.size(); ++p) {
      coeffs.push_back(to_json(w[p]));
      labels.push_back(std::to_string(pairs[p].first + 1) + std::to_string(pairs[p].second + 1));
    }
    results.push_back(json{{"tau", period_matrix_json(taus[t])},
                           {"basis", labels},
                           {"coefficients", coeffs},
                           {"max_abs", max_abs(w)},
                           {"trunc_bound", ctx.trunc_bound()}});
    const CMatrix a = A_matrix(ctx, e, d);
    CheckResult c;
    c.check = "omega:adjugate_consistency tau" + std::to_string(t);
    c.inputs_digest = fnv1a_hex(canonical(taus[t]) + eps + delta);
    c.residual = compare(a * adjugate(a), CMatrix::identity(cfg.g) * det(a)).relative();
    c.tolerance = 1e3 * cfg.tolerance;
    c.pass = c.residual <= c.tolerance;
    rep.checks.push_back(c);
  }
  rep.config = cfg;
  rep.extra["eps"] = eps;
  rep.extra["delta"] = delta;
  rep.extra["results"] = results;
  return rep;
}

inline Report cmd_e8_count(RunConfig cfg, const std::string& target, std::uint64_t max_nodes) {
  Report rep;
  rep.command = "e8 count";
  const GramMatrix zeta = GramMatrix::e8();
  CountOptions opts{max_nodes, cfg.threads};
  IntMatrix m;
  std::string mode = "full";
  std::uint64_t expected = 0;
  if (target == "roots") {
    m = IntMatrix{{2}};
    expected = 240;
  } else if (target == "zeta" || target == "T9") {
    m = target == "zeta" ? zeta_e8() : padded_target(zeta_e8(), 9);
    expected = kE8AutomorphismOrder;
    if (!cfg.slow) {
      m = submatrix(zeta_e8(), {0, 1}, {0, 1});
      mode = "prefix";
      expected = 240 * 126;
    }
  } else {
    throw ParseError("e8 count: --target must be zeta, roots or T9");
  }
  const SolutionCount s = diophantine_count(zeta, m, opts);
  rep.checks.push_back(exact_check("e8:" + target + " " + mode, target + mode,
                                   std::abs(static_cast<double>(s.count) - static_cast<double>(expected))));
  rep.checks.back().elapsed = s.seconds;
  rep.config = cfg;
  rep.extra["target"] = target;
  rep.extra["mode"] = mode;
  rep.extra["count"] = s.count;
  rep.extra["expected"] = expected;
  rep.extra["nodes"] = s.nodes;
  rep.extra["seconds"] = s.seconds;
  return rep;
}

// Entry point -------------------------------------------------------------------------

namespace detail {

inline void add_common(CLI::App* sub, RunConfig& cfg, std::string& product, bool& random_flag, bool& tol_given) {
  sub->add_option("--g", cfg.g, "genus")->check(CLI::Range(0, 8));
  sub->add_option("--tau", cfg.tau_file, "period matrix JSON file");
  sub->add_flag("--random", random_flag, "sample period matrices from the seeded sampler");
  sub->add_option("--product", product, "product locus g1,g2");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--samples", cfg.samples, "number of sampled period matrices")->check(CLI::Range(1, 1000));
  sub->add_option_function<double>("--tol", [&](double x) { cfg.tolerance = x; tol_given = true; }, "base tolerance");
  sub->add_option("--rank-tol", cfg.rank_tol, "relative singular value threshold");
  sub->add_option("--json", cfg.output_path, "also write the report to this file");
  sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1, 256));
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Theta constants, vector-valued modular forms and E8 counts", "thetaforms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig cfg;
  std::string product;
  bool random_flag = false, tol_given = false;
  std::vector<std::string> suites;
  std::string what, eps, delta, e8_action, target;
  std::uint64_t max_nodes = 0;

  auto* verify = app.add_subcommand("verify", "run identity suites");
  verify->add_option("what", what, "'identities' runs every applicable suite");
  verify->add_option("--suite", suites, "suite name (repeatable)")->delimiter(',');
  detail::add_common(verify, cfg, product, random_flag, tol_given);

  auto* decomposable = app.add_subcommand("decomposable", "quadric criterion verdict");
  detail::add_common(decomposable, cfg, product, random_flag, tol_given);

  auto* omega = app.add_subcommand("omega", "coefficients of tr(adj(A) dtau-check)");
  omega->add_option("--eps", eps, "eps as a bit string")->required();
  omega->add_option("--delta", delta, "delta as a bit string")->required();
  detail::add_common(omega, cfg, product, random_flag, tol_given);

  auto* e8 = app.add_subcommand("e8", "E8 lattice counts");
  e8->add_option("action", e8_action, "count")->required();
  e8->add_option("--target", target, "zeta, roots or T9")->required();
  e8->add_flag("--slow", cfg.slow, "full automorphism count");
  e8->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1, 256));
  e8->add_option("--max-nodes", max_nodes, "node budget (0: unlimited)");
  e8->add_option("--json", cfg.output_path, "also write the report to this file");

  try {
    std::vector<std::string> args;
    for (int k = argc - 1; k > 0; --k) args.emplace_back(argv[k]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (!tol_given) {
      if (const char* env = std::getenv("THETA_FORMS_TOL")) {
        try {
          std::size_t used = 0;
          cfg.tolerance = std::stod(env, &used);
          if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
          throw ParseError(std::string("THETA_FORMS_TOL is not a number: ") + env);
        }
      }
    }
    if (!(cfg.tolerance > 0.0 && cfg.tolerance < 1.0)) throw ParseError("tolerance must lie in (0, 1)");
    if (!(cfg.rank_tol > 0.0 && cfg.rank_tol < 1.0)) throw ParseError("rank tolerance must lie in (0, 1)");
    int sources = (cfg.tau_file.empty() ? 0 : 1) + (product.empty() ? 0 : 1) + (random_flag ? 1 : 0);
    if (sources > 1) throw ParseError("choose at most one of --tau, --product, --random");
    if (!cfg.tau_file.empty()) cfg.tau_source = TauSource::file;
    if (!product.empty()) {
      cfg.tau_source = TauSource::product;
      const auto comma = product.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("comma");
        cfg.product = {std::stoi(product.substr(0, comma)), std::stoi(product.substr(comma + 1))};
      } catch (const std::exception&) {
        throw ParseError("--product expects g1,g2");
      }
    }

    Report rep;
    if (*verify) {
      if (!what.empty() && what != "identities") throw ParseError("verify: unknown positional argument " + what);
      if (suites.empty() && what.empty()) throw ParseError("verify: give --suite or 'identities'");
      if (suites.empty()) suites = identity_suites(cfg.tau_source == TauSource::product ? cfg.product.first + cfg.product.second : cfg.g);
      rep = cmd_verify(cfg, suites);
    } else if (*decomposable) {
      rep = cmd_decomposable(cfg);
    } else if (*omega) {
      rep = cmd_omega(cfg, eps, delta);
    } else if (*e8) {
      if (e8_action != "count") throw ParseError("e8: only 'count' is supported");
      rep = cmd_e8_count(cfg, target, max_nodes);
    }
    return emit(rep, out);
  } catch (const TruncationError& e) {
    err << "infeasible truncation: " << e.what() << "\n";
    return kInfeasible;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << " (partial count " << e.partial_count() << ", nodes " << e.nodes() << ")\n";
    return kInfeasible;
  } catch (const ConditioningError& e) {
    err << "ill-conditioned: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace thetaforms::cli
