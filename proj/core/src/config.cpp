#include "vwave/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vwave/errors.hpp"

namespace vwave {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string("missing key '") + key + "' in " + where);
  return *it;
}

double need_number(const json& j, const char* key, const char* where) {
  const json& v = need(j, key, where);
  if (!v.is_number())
    throw ConfigError(std::string("key '") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

std::string need_string(const json& j, const char* key, const char* where) {
  const json& v = need(j, key, where);
  if (!v.is_string())
    throw ConfigError(std::string("key '") + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

Expr parse_coeff_expr(const json& j, const char* key) {
  std::string text = need_string(j, key, "coefficients");
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("coefficients.") + key + ": " + e.what());
  }
}

InitialData parse_data_block(const json& j, const char* where) {
  if (j.contains("csv")) {
    InitialData d = load_initial_csv(j.at("csv").get<std::string>());
    if (j.contains("support")) d.support = need_number(j, "support", where);
    return d;
  }
  std::string u0_text = need_string(j, "u0", where);
  std::string u1_text = need_string(j, "u1", where);
  double support = need_number(j, "support", where);
  if (!(support > 0)) throw ConfigError(std::string(where) + ".support must be positive");
  Expr u0, u1;
  try {
    u0 = parse_expr(u0_text);
    u1 = parse_expr(u1_text);
  } catch (const ParseError& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
  return make_initial_data(u0, u1, support);
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(name + ": " + e.what());
  }

  // ---- coefficients ----
  const json& jc = need(j, "coefficients", "config");
  Expr alpha, beta, gamma;
  if (jc.contains("builtin")) {
    std::map<std::string, double> params;
    if (jc.contains("params"))
      for (auto& [k, v] : jc.at("params").items()) params[k] = v.get<double>();
    CoefficientExprs ce = builtin_coefficients(jc.at("builtin").get<std::string>(), params);
    alpha = ce.alpha;
    beta = ce.beta;
    gamma = ce.gamma;
  } else {
    alpha = parse_coeff_expr(jc, "alpha");
    beta = parse_coeff_expr(jc, "beta");
    gamma = parse_coeff_expr(jc, "gamma");
  }
  CoeffBounds bounds;
  if (jc.contains("bounds")) {
    const json& jb = jc.at("bounds");
    bounds.alpha1 = need_number(jb, "alpha1", "coefficients.bounds");
    bounds.alpha2 = need_number(jb, "alpha2", "coefficients.bounds");
    bounds.beta2 = need_number(jb, "beta2", "coefficients.bounds");
    bounds.gamma1 = need_number(jb, "gamma1", "coefficients.bounds");
    bounds.gamma2 = need_number(jb, "gamma2", "coefficients.bounds");
  }

  // ---- initial data ----
  InitialData data_a = parse_data_block(need(j, "initial_data", "config"), "initial_data");
  std::optional<InitialData> data_b;
  if (j.contains("initial_data_b"))
    data_b = parse_data_block(j.at("initial_data_b"), "initial_data_b");

  // ---- grid ----
  const json& jg = need(j, "grid", "config");
  GridBlock grid;
  grid.dx = need_number(jg, "dx", "grid");
  grid.T = need_number(jg, "T", "grid");
  if (!(grid.dx > 0)) throw ConfigError("grid.dx must be positive");
  if (!(grid.T > 0)) throw ConfigError("grid.T must be positive");
  if (jg.contains("margin")) {
    grid.margin = need_number(jg, "margin", "grid");
    if (!(*grid.margin > 0)) throw ConfigError("grid.margin must be positive");
  }

  // ---- validation domain (defaults derived from the data and light cone) ----
  DomainRect dom;
  bool have_domain = jc.contains("domain");
  if (have_domain) {
    const json& jd = jc.at("domain");
    auto rng = [&](const char* key, double& lo, double& hi) {
      const json& v = need(jd, key, "coefficients.domain");
      if (!v.is_array() || v.size() != 2)
        throw ConfigError(std::string("coefficients.domain.") + key + " must be [lo, hi]");
      lo = v[0].get<double>();
      hi = v[1].get<double>();
      if (!(hi > lo))
        throw ConfigError(std::string("coefficients.domain.") + key + " must be increasing");
    };
    rng("x", dom.x_lo, dom.x_hi);
    rng("u", dom.u_lo, dom.u_hi);
  }

  // temporary set for the margin bound (domain not needed for it)
  {
    CoefficientSet probe(alpha, beta, gamma, bounds, dom);
    double margin = grid.margin ? *grid.margin : domain_margin(probe, grid.T, grid.dx);
    double span = data_a.support + margin;
    if (!have_domain) {
      dom.x_lo = -(span + 1.0);
      dom.x_hi = span + 1.0;
      double umax = 0;
      for (int k = 0; k <= 500; ++k) {
        double x = -span + 2.0 * span * k / 500.0;
        umax = std::max(umax, std::abs(data_a.u0.value(x)));
        if (data_b) umax = std::max(umax, std::abs(data_b->u0.value(x)));
      }
      dom.u_lo = -(umax + 3.0);
      dom.u_hi = umax + 3.0;
    }
  }
  CoefficientSet cs(alpha, beta, gamma, bounds, dom);

  // ---- weights ----
  MetricWeights weights = MetricWeights::from_delta(0.1);
  bool follows = true;
  if (j.contains("weights")) {
    const json& jw = j.at("weights");
    if (jw.contains("kappa")) {
      const json& arr = jw.at("kappa");
      if (!arr.is_array() || arr.size() != 7)
        throw ConfigError("weights.kappa must be an array of 7 positive numbers");
      std::array<double, 7> kap{};
      for (int k = 0; k < 7; ++k) kap[k] = arr[k].get<double>();
      weights = MetricWeights::from_kappa(kap);
      if (jw.contains("delta")) weights.delta = need_number(jw, "delta", "weights");
      follows = weights.follows_template();
    } else if (jw.contains("delta")) {
      weights = MetricWeights::from_delta(need_number(jw, "delta", "weights"));
    }
  }

  RunConfig cfg{std::move(cs), std::move(data_a), std::move(data_b), grid,
                weights,       follows,           8,
                {},            "out",             SolverBlock{},
                129,           "",                name};

  if (j.contains("metric")) {
    const json& jm = j.at("metric");
    if (jm.contains("n_theta")) {
      cfg.n_theta = jm.at("n_theta").get<int>();
      if (cfg.n_theta < 2 || cfg.n_theta % 2 != 0)
        throw ConfigError("metric.n_theta must be even and at least 2");
    }
  }
  if (j.contains("tau")) {
    const json& jt = j.at("tau");
    if (!jt.is_array()) throw ConfigError("tau must be an array of times");
    for (const auto& v : jt) {
      double tau = v.get<double>();
      if (tau < 0) throw ConfigError("tau values must be nonnegative");
      cfg.taus.push_back(tau);
    }
  }
  if (j.contains("output") && j.at("output").contains("dir"))
    cfg.out_dir = j.at("output").at("dir").get<std::string>();
  if (j.contains("solver")) {
    const json& js = j.at("solver");
    if (js.contains("corrector_iters")) cfg.solver.corrector_iters = js.at("corrector_iters").get<int>();
    if (js.contains("renormalize")) cfg.solver.renormalize = js.at("renormalize").get<bool>();
    if (js.contains("threads")) cfg.solver.threads = js.at("threads").get<int>();
    if (cfg.solver.corrector_iters < 1)
      throw ConfigError("solver.corrector_iters must be at least 1");
  }
  if (j.contains("validate") && j.at("validate").contains("n_samples")) {
    cfg.validate_samples = j.at("validate").at("n_samples").get<int>();
    if (cfg.validate_samples < 2) throw ConfigError("validate.n_samples must be at least 2");
  }

  cfg.config_hash = fnv1a_hex(j.dump());
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config_text(ss.str(), path);
  return cfg;
}

}  // namespace vwave
