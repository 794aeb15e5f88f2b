#include "vwave/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vwave/errors.hpp"
#include "vwave/metric.hpp"
#include "vwave/oracle.hpp"
#include "vwave/physmap.hpp"
#include "vwave/singular.hpp"
#include "vwave/variation.hpp"
#include "vwave/version.hpp"

namespace vwave {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

PreparedRun prepare_run(const CoefficientSet& cs, const InitialData& data, double dx,
                        double T, const SolverBlock& solver,
                        std::optional<double> margin_override) {
  PreparedRun pr;
  pr.margin = margin_override ? *margin_override : domain_margin(cs, T, dx);
  double span = data.support + pr.margin;
  pr.n_s = static_cast<int>(std::ceil(span / dx));
  pr.gs = GridSpec::square(dx, pr.n_s);
  pr.opts.corrector_iters = solver.corrector_iters;
  pr.opts.renormalize = solver.renormalize;
  pr.opts.threads = solver.threads;
  pr.opts.t_stop = T + 4.0 * dx + 1e-12;
  return pr;
}

PreparedRun prepare_run(const RunConfig& cfg) {
  return prepare_run(cfg.cs, cfg.data_a, cfg.grid.dx, cfg.grid.T, cfg.solver,
                     cfg.grid.margin);
}

namespace {

std::string tau_label(double tau) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", tau);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

std::vector<double> default_taus(const std::string& cmd, const RunConfig& cfg) {
  double T = cfg.grid.T;
  if (cmd == "energy") {
    std::vector<double> taus;
    for (int k = 0; k <= 32; ++k) taus.push_back(T * k / 32.0);
    return taus;
  }
  if (cmd == "slice") return {0.5 * T, T};
  return {0.0, 0.5 * T, T};
}

ordered_json norm_breakdown_json(const NormBreakdown& nb) {
  ordered_json j;
  j["gauge"] = nb.gauge;
  j["term_minus"] = nb.term_minus;
  j["term_plus"] = nb.term_plus;
  j["weighted_total"] = nb.weighted_total;
  return j;
}

struct CmdContext {
  RunConfig& cfg;
  fs::path out;
  std::vector<double> taus;
  ordered_json result;  // command-specific payload for summary.json
  std::vector<std::string> outputs;

  void emit(const std::string& name, const ordered_json& payload) {
    ordered_json j;
    j["config_hash"] = cfg.config_hash;
    j["version"] = kVersion;
    j["payload"] = payload;
    std::ofstream f(out / name);
    if (!f) throw ConfigError("cannot write " + (out / name).string());
    f << j.dump(2) << "\n";
    outputs.push_back(name);
  }

  void note_output(const std::string& name) { outputs.push_back(name); }
};

void write_gnuplot(const fs::path& path, const std::string& body,
                   std::vector<std::string>& outputs) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << "# gnuplot script\n" << body;
  outputs.push_back(path.filename().string());
}

// ---- subcommands ----------------------------------------------------------

void cmd_validate(CmdContext& ctx) {
  ConditionReport rep = validate_conditions(ctx.cfg.cs, ctx.cfg.validate_samples);
  ordered_json j;
  j["n_samples"] = rep.n_samples;
  j["tol"] = rep.tol;
  j["bounds_ok"] = rep.bounds_ok();
  j["generic_ok"] = rep.generic_ok();
  j["total_bound_violations"] = rep.total_bound_violations;
  j["total_generic_flags"] = rep.total_generic_flags;
  j["sup_grad_alpha"] = rep.sup_grad_alpha;
  j["sup_grad_beta"] = rep.sup_grad_beta;
  j["sup_grad_gamma"] = rep.sup_grad_gamma;
  j["sup_abs_c"] = rep.sup_abs_c;
  j["min_speed_gap"] = rep.min_speed_gap;
  auto dump_violations = [](const std::vector<ConditionViolation>& v) {
    ordered_json arr = json::array();
    std::size_t cap = std::min<std::size_t>(v.size(), 64);
    for (std::size_t k = 0; k < cap; ++k)
      arr.push_back({{"x", v[k].x}, {"u", v[k].u}, {"kind", v[k].kind}, {"value", v[k].value}});
    return arr;
  };
  j["bound_violations"] = dump_violations(rep.bound_violations);
  j["generic_flags"] = dump_violations(rep.generic_flags);
  if (!rep.generic_ok())
    j["note"] = "eigenvalue degeneracy: d_u lambda together with its u/x derivatives "
                "vanish on the sampled set (generic condition violated)";
  ctx.emit("validate.json", j);
  ctx.result = j;
}

void cmd_solve(CmdContext& ctx, StateField* keep = nullptr) {
  auto t0 = std::chrono::steady_clock::now();
  PreparedRun pr = prepare_run(ctx.cfg);
  BoundaryData bd = boundary_gamma0(ctx.cfg.cs, ctx.cfg.data_a, -pr.n_s, pr.n_s, pr.gs.dx);
  StateField state = solve(bd, ctx.cfg.cs, pr.gs, pr.opts);
  auto t1 = std::chrono::steady_clock::now();

  export_state_csv(state, (ctx.out / "state.csv").string(), (ctx.out / "state.json").string(),
                   ctx.cfg.config_hash);
  ctx.note_output("state.csv");
  ctx.note_output("state.json");

  ordered_json j;
  j["dx"] = pr.gs.dx;
  j["n_s"] = pr.n_s;
  j["margin"] = pr.margin;
  j["k_hi"] = state.k_hi();
  j["covered_time"] = state.covered_time;
  j["e0"] = state.e0;
  j["min_h"] = state.min_h;
  j["min_g"] = state.min_g;
  j["max_circle_drift"] = state.max_circle_drift;
  j["max_res_u"] = state.max_res_u;
  j["max_res_x"] = state.max_res_x;
  j["max_res_t"] = state.max_res_t;
  j["renorm_failures"] = state.renorm_failures;
  j["solve_seconds"] = std::chrono::duration<double>(t1 - t0).count();
  ctx.emit("solve.json", j);
  ctx.result = j;
  if (keep) *keep = std::move(state);
}

void cmd_slice(CmdContext& ctx) {
  StateField state(GridSpec::square(1.0, 1), 0, 0);
  cmd_solve(ctx, &state);
  ordered_json js = json::array();
  std::string first_csv;
  for (double tau : ctx.taus) {
    TimeSlice slice = extract_slice(state, tau);
    std::string name = "slice_" + tau_label(tau) + ".csv";
    export_slice_csv(slice, (ctx.out / name).string());
    ctx.note_output(name);
    if (first_csv.empty()) first_csv = name;
    EnergyReport er = energy(slice, ctx.cfg.cs);
    js.push_back({{"tau", tau},
                  {"csv", name},
                  {"n_samples", slice.size()},
                  {"singular_samples",
                   std::count_if(slice.samples.begin(), slice.samples.end(),
                                 [](const SliceSample& s) { return s.singular; })},
                  {"x_first", slice.samples.front().x},
                  {"x_last", slice.samples.back().x},
                  {"energy_total", er.total},
                  {"energy_drift", er.drift}});
  }
  ordered_json j;
  j["slices"] = js;
  ctx.emit("slices.json", j);
  write_gnuplot(ctx.out / "slice.gp",
                "set xlabel 'x'\nset ylabel 'u'\nset datafile separator ','\n"
                "plot '" + first_csv + "' using 3:4 with lines title 'u'\n",
                ctx.outputs);
  ctx.result = j;
}

void cmd_energy(CmdContext& ctx) {
  StateField state(GridSpec::square(1.0, 1), 0, 0);
  cmd_solve(ctx, &state);
  std::ofstream csv(ctx.out / "energy.csv");
  if (!csv) throw ConfigError("cannot write energy.csv");
  csv << "tau,E_minus,E_plus,total,drift\n";
  char buf[256];
  double max_drift = 0;
  ordered_json js = json::array();
  for (double tau : ctx.taus) {
    TimeSlice slice = extract_slice(state, tau);
    EnergyReport er = energy(slice, ctx.cfg.cs);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", tau, er.E_minus,
                  er.E_plus, er.total, er.drift);
    csv << buf;
    max_drift = std::max(max_drift, std::abs(er.drift));
    js.push_back({{"tau", tau}, {"total", er.total}, {"drift", er.drift}});
  }
  ctx.note_output("energy.csv");
  ordered_json j;
  j["e0"] = state.e0;
  j["max_abs_drift"] = max_drift;
  j["series"] = js;
  ctx.emit("energy.json", j);
  write_gnuplot(ctx.out / "energy.gp",
                "set xlabel 'tau'\nset ylabel 'energy'\nset datafile separator ','\n"
                "plot 'energy.csv' using 1:4 with linespoints title 'total'\n",
                ctx.outputs);
  ctx.result = j;
}

void cmd_singular(CmdContext& ctx) {
  StateField state(GridSpec::square(1.0, 1), 0, 0);
  cmd_solve(ctx, &state);
  std::vector<SingularCurve> curves = zero_curves(state, SingularFamily::kBackward);
  std::vector<SingularCurve> gcurves = zero_curves(state, SingularFamily::kForward);
  curves.insert(curves.end(), gcurves.begin(), gcurves.end());
  std::vector<SingularPoint> points = classify(state, ctx.cfg.cs, curves);
  GenericReport rep = generic_report(state, ctx.cfg.cs);

  export_curves_csv(curves, (ctx.out / "curves.csv").string());
  ctx.note_output("curves.csv");
  export_singular_json(curves, points, rep, (ctx.out / "singular.json").string());
  ctx.note_output("singular.json");
  write_gnuplot(ctx.out / "singular.gp",
                "set xlabel 'x'\nset ylabel 't'\nset datafile separator ','\n"
                "plot 'curves.csv' using 5:6 with points pt 7 ps 0.3 title 'singular set'\n",
                ctx.outputs);

  ordered_json j;
  j["n_curves"] = curves.size();
  j["n_points"] = points.size();
  long n_end = std::count_if(points.begin(), points.end(), [](const SingularPoint& p) {
    return p.type == SingularType::kEndpoint;
  });
  long n_cross = std::count_if(points.begin(), points.end(), [](const SingularPoint& p) {
    return p.type == SingularType::kCrossing;
  });
  j["n_endpoint"] = n_end;
  j["n_crossing"] = n_cross;
  j["generic_flag_count"] = rep.flag_count;
  j["min_h"] = state.min_h;
  j["min_g"] = state.min_g;
  ctx.result = j;
}

PathOfSolutions build_path(CmdContext& ctx) {
  if (!ctx.cfg.data_b)
    throw ConfigError("this command needs an 'initial_data_b' block");
  PreparedRun pr = prepare_run(ctx.cfg);
  return linear_rs_path(ctx.cfg.cs, ctx.cfg.data_a, *ctx.cfg.data_b, ctx.cfg.n_theta,
                        pr.gs, pr.opts);
}

void cmd_metric(CmdContext& ctx) {
  PathOfSolutions path = build_path(ctx);
  const MetricWeights& w = ctx.cfg.weights;

  ordered_json per_tau = json::array();
  for (double tau : ctx.taus) {
    // Simpson-aggregated per-term breakdown across theta
    NormBreakdown agg;
    agg.gauge = "canonical-XY";
    int nn = path.n_nodes();
    double dtheta = path.thetas[1] - path.thetas[0];
    for (int r = 0; r < nn; ++r) {
      TimeSlice slice = extract_slice(path.states[r], tau);
      NormBreakdown nb = tangent_norm(path.states[r], path.perts[r], slice, w, ctx.cfg.cs);
      double sw = ((r == 0 || r == nn - 1) ? 1.0 : (r % 2 == 1 ? 4.0 : 2.0)) * dtheta / 3.0;
      for (int t = 0; t < 7; ++t) {
        agg.term_minus[t] += sw * nb.term_minus[t];
        agg.term_plus[t] += sw * nb.term_plus[t];
      }
    }
    agg.weighted_total = agg.recompute_total(w);
    ordered_json jt = norm_breakdown_json(agg);
    jt["tau"] = tau;
    per_tau.push_back(jt);
  }

  std::vector<double> taus_for_ratio = ctx.taus;
  LipschitzSeries ls = lipschitz_ratio(path, taus_for_ratio, w, ctx.cfg.cs);

  ordered_json j;
  j["gauge"] = "canonical-XY (upper bound; no relabeling optimization)";
  j["n_theta"] = ctx.cfg.n_theta;
  j["dx"] = ctx.cfg.grid.dx;
  j["kappa"] = w.kappa;
  j["delta"] = w.delta;
  j["weights_follow_template"] = ctx.cfg.weights_follow_template;
  j["per_tau"] = per_tau;
  ordered_json series = json::array();
  for (auto [tau, len] : ls.lengths) series.push_back({{"tau", tau}, {"length", len}});
  j["path_lengths"] = series;
  j["lipschitz_ratio"] = ls.ratio;
  ctx.emit("metric.json", j);
  ctx.result = j;
}

void cmd_compare(CmdContext& ctx) {
  PathOfSolutions path = build_path(ctx);
  const MetricWeights& w = ctx.cfg.weights;

  TimeSlice a0 = extract_slice(path.states.front(), 0.0);
  EnergyReport er = energy(a0, ctx.cfg.cs);
  ComparisonConstants cc =
      comparison_constants(ctx.cfg.cs, w, std::max(er.total, path.states.front().e0));

  double sob = sobolev_bound(ctx.cfg.data_a, *ctx.cfg.data_b, ctx.cfg.cs);
  double len0 = path_length(path, 0.0, w, ctx.cfg.cs);

  ordered_json per_tau = json::array();
  double min_margin_l1 = std::numeric_limits<double>::infinity();
  double min_margin_kr = std::numeric_limits<double>::infinity();
  for (double tau : ctx.taus) {
    TimeSlice sa = extract_slice(path.states.front(), tau);
    TimeSlice sb = extract_slice(path.states.back(), tau);
    double l1 = l1_dist(sa, sb);
    double kr = kr_dist(sa, sb, ctx.cfg.cs);
    double len = path_length(path, tau, w, ctx.cfg.cs);
    double m_l1 = cc.C1 * len - l1;
    double m_kr = cc.C2 * len - kr;
    min_margin_l1 = std::min(min_margin_l1, m_l1);
    min_margin_kr = std::min(min_margin_kr, m_kr);
    per_tau.push_back({{"tau", tau},
                       {"l1_dist", l1},
                       {"kr_dist", kr},
                       {"path_length", len},
                       {"l1_margin", m_l1},
                       {"kr_margin", m_kr}});
  }

  ordered_json j;
  j["constants"] = {{"C1", cc.C1}, {"C2", cc.C2}, {"C3", cc.C3}};
  j["sobolev_bound"] = sob;
  j["path_length_0"] = len0;
  j["sobolev_margin"] = sob - len0 / cc.C3;
  j["per_tau"] = per_tau;
  j["min_margin_l1"] = min_margin_l1;
  j["min_margin_kr"] = min_margin_kr;
  j["all_hold"] = (min_margin_l1 >= 0) && (min_margin_kr >= 0) && (sob - len0 / cc.C3 >= 0);
  ctx.emit("compare.json", j);
  ctx.result = j;
}

void cmd_convergence(CmdContext& ctx, int refine) {
  if (refine <= 0) refine = 3;
  bool constant = ctx.cfg.cs.constant();
  std::ofstream csv(ctx.out / "convergence.csv");
  if (!csv) throw ConfigError("cannot write convergence.csv");
  csv << "dx,err_oracle,compat_max,cross_max,drift_T\n";

  std::vector<std::pair<double, double>> e_oracle, e_compat, e_cross, e_drift;
  char buf[256];
  for (int r = 0; r < refine; ++r) {
    double dx = ctx.cfg.grid.dx / std::pow(2.0, r);
    PreparedRun pr = prepare_run(ctx.cfg.cs, ctx.cfg.data_a, dx, ctx.cfg.grid.T,
                                 ctx.cfg.solver, ctx.cfg.grid.margin);
    BoundaryData bd = boundary_gamma0(ctx.cfg.cs, ctx.cfg.data_a, -pr.n_s, pr.n_s, dx);
    CompatibilityResiduals comp = compatibility_residuals(bd, ctx.cfg.cs);
    StateField state = solve(bd, ctx.cfg.cs, pr.gs, pr.opts);
    double tau = 0.5 * ctx.cfg.grid.T;
    TimeSlice slice = extract_slice(state, tau);

    double err = std::numeric_limits<double>::quiet_NaN();
    if (constant) {
      err = 0;
      for (const SliceSample& s : slice.samples)
        err = std::max(err, std::abs(s.u - oracle::dalembert(ctx.cfg.cs, ctx.cfg.data_a,
                                                             s.x, tau)));
      e_oracle.push_back({dx, std::max(err, 1e-300)});
    }
    ResidualFields rf = consistency_residuals(state, ctx.cfg.cs);
    TimeSlice sliceT = extract_slice(state, ctx.cfg.grid.T);
    EnergyReport er = energy(sliceT, ctx.cfg.cs);
    double compat_max = std::max({comp.max_u, comp.max_x, comp.max_t});
    e_compat.push_back({dx, std::max(compat_max, 1e-300)});
    e_cross.push_back({dx, std::max(rf.max_cross, 1e-300)});
    e_drift.push_back({dx, std::max(std::abs(er.drift), 1e-300)});

    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", dx, err, compat_max,
                  rf.max_cross, er.drift);
    csv << buf;
  }
  ctx.note_output("convergence.csv");

  ordered_json j;
  j["levels"] = refine;
  if (e_oracle.size() >= 2) j["order_oracle"] = oracle::convergence_order(e_oracle);
  j["order_compat"] = oracle::convergence_order(e_compat);
  j["order_cross"] = oracle::convergence_order(e_cross);
  j["order_drift"] = oracle::convergence_order(e_drift);
  ctx.emit("convergence.json", j);
  write_gnuplot(ctx.out / "convergence.gp",
                "set logscale xy\nset xlabel 'dx'\nset ylabel 'residual'\n"
                "set datafile separator ','\n"
                "plot 'convergence.csv' using 1:3 with linespoints title 'compat', \\\n"
                "     'convergence.csv' using 1:4 with linespoints title 'cross'\n",
                ctx.outputs);
  ctx.result = j;
}

}  // namespace

std::vector<std::string> known_commands() {
  return {"validate", "solve", "slice", "energy", "singular", "metric", "compare",
          "convergence"};
}

int dispatch(const std::string& cmd, RunConfig& cfg, const DispatchOverrides& ov) {
  auto cmds = known_commands();
  fs::path out = ov.out_dir ? *ov.out_dir : cfg.out_dir;
  std::error_code ec;
  fs::create_directories(out, ec);

  CmdContext ctx{cfg, out, {}, ordered_json::object(), {}};
  ctx.taus = !ov.taus.empty() ? ov.taus : (!cfg.taus.empty() ? cfg.taus : default_taus(cmd, cfg));
  std::sort(ctx.taus.begin(), ctx.taus.end());

  int code = 0;
  std::string status = "ok";
  std::string message;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (std::find(cmds.begin(), cmds.end(), cmd) == cmds.end())
      throw ConfigError("unknown command '" + cmd + "'");
    if (cmd == "validate") cmd_validate(ctx);
    else if (cmd == "solve") cmd_solve(ctx);
    else if (cmd == "slice") cmd_slice(ctx);
    else if (cmd == "energy") cmd_energy(ctx);
    else if (cmd == "singular") cmd_singular(ctx);
    else if (cmd == "metric") cmd_metric(ctx);
    else if (cmd == "compare") cmd_compare(ctx);
    else if (cmd == "convergence") cmd_convergence(ctx, ov.refine);
  } catch (const ConfigError& e) {
    status = "user_error";
    message = e.what();
    code = 1;
  } catch (const ParseError& e) {
    status = "user_error";
    message = e.what();
    code = 1;
  } catch (const Error& e) {
    status = "numerical_failure";
    message = e.what();
    code = 2;
  }
  auto t1 = std::chrono::steady_clock::now();

  ordered_json summary;
  summary["command"] = cmd;
  summary["config"] = cfg.source;
  summary["config_hash"] = cfg.config_hash;
  summary["version"] = kVersion;
  summary["status"] = status;
  summary["exit_code"] = code;
  if (!message.empty()) summary["message"] = message;
  summary["tau"] = ctx.taus;
  summary["outputs"] = ctx.outputs;
  summary["result"] = ctx.result;
  summary["seconds"] = std::chrono::duration<double>(t1 - t0).count();
  std::ofstream f(out / "summary.json");
  if (f) f << summary.dump(2) << "\n";

  return code;
}

}  // namespace vwave
