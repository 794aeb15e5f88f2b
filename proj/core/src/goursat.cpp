#include "vwave/goursat.hpp"

#include <cmath>
#include <string>

#include "vwave/errors.hpp"
#include "parallel_util.hpp"

namespace vwave {

NodeRhs node_rhs(const StateNode& n, const SolverCoeffs& c) {
  double idc = c.inv_dc;
  double a12 = c.a1 + c.a2;
  double gh_ml = n.g * n.h + n.m * n.l;
  double phi1 = c.a1 * n.g + c.a2 * n.h - a12 * gh_ml + c.c2 * c.b * n.h * n.m - c.d1 * n.g * n.l;
  double phi2 = -c.a1 * n.g - c.a2 * n.h + a12 * gh_ml + c.c1 * c.b * n.g * n.l - c.d2 * n.h * n.m;
  double hm_gl = n.h * n.m - n.g * n.l;
  double pq2 = 2.0 * n.p * n.q * idc;

  NodeRhs r;
  r.lY = n.q * (2.0 * n.h - 1.0) * idc * phi1;
  r.hY = -2.0 * n.q * n.l * idc * phi1;
  r.pY = pq2 * (c.a2 * (n.l - n.m) + a12 * hm_gl + c.c2 * c.b * n.m * n.l + c.d1 * n.g * n.h + c.et * n.g);
  r.mX = n.p * (2.0 * n.g - 1.0) * idc * phi2;
  r.gX = -2.0 * n.p * n.m * idc * phi2;
  r.qX = pq2 * (c.a1 * (n.l - n.m) + a12 * hm_gl + c.c1 * c.b * n.m * n.l + c.d2 * n.g * n.h + c.et * n.h);
  r.uX = n.p * n.l * idc;
  r.xX = c.c2 * n.p * n.h * idc;
  r.tX = c.alpha * n.p * n.h * idc;
  r.uY = n.q * n.m * idc;
  r.xY = c.c1 * n.q * n.g * idc;
  r.tY = c.alpha * n.q * n.g * idc;
  return r;
}

double circle_renormalize(double& a, double& c) {
  double vy = c - 0.5;
  double r = std::sqrt(a * a + vy * vy);
  if (r == 0.0) return -1.0;
  double f = 0.5 / r;
  a *= f;
  c = 0.5 + vy * f;
  return std::abs(r - 0.5);
}

namespace {

inline bool finite_node(const StateNode& n) {
  return std::isfinite(n.u) && std::isfinite(n.l) && std::isfinite(n.m) &&
         std::isfinite(n.h) && std::isfinite(n.g) && std::isfinite(n.p) &&
         std::isfinite(n.q) && std::isfinite(n.x) && std::isfinite(n.t);
}

inline double node_delta(const StateNode& a, const StateNode& b) {
  double d = std::abs(a.u - b.u);
  d = std::max(d, std::abs(a.l - b.l));
  d = std::max(d, std::abs(a.m - b.m));
  d = std::max(d, std::abs(a.h - b.h));
  d = std::max(d, std::abs(a.g - b.g));
  d = std::max(d, std::abs(a.p - b.p));
  d = std::max(d, std::abs(a.q - b.q));
  d = std::max(d, std::abs(a.x - b.x));
  d = std::max(d, std::abs(a.t - b.t));
  return d;
}

// The recorded drift is that of the latest renormalization, so the final
// corrector pass reports the per-step truncation (the Euler predictor's
// larger drift is transient and not representative of the scheme).
void renorm_node(StateNode& n, CellResult& out, bool enabled) {
  if (!enabled) return;
  if (n.h < -0.1 || n.h > 1.1 || n.g < -0.1 || n.g > 1.1)
    throw NumericalError("h or g left the sanity window [-0.1, 1.1]");
  double d1 = circle_renormalize(n.l, n.h);
  double d2 = circle_renormalize(n.m, n.g);
  if (d1 < 0 || d2 < 0) out.renorm_failed = true;
  out.drift = std::max(d1, d2);
}

}  // namespace

CellResult cell_update(const StateNode& west, const NodeRhs& west_rhs,
                       const StateNode& south, const NodeRhs& south_rhs,
                       const CoefficientSet& cs, double dx,
                       const SolveOptions& opts, int i, int j) {
  CellResult out;
  StateNode n;

  // Euler predictor: l, h, p march in Y from the south; the rest in X.
  n.l = south.l + dx * south_rhs.lY;
  n.h = south.h + dx * south_rhs.hY;
  n.p = south.p + dx * south_rhs.pY;
  n.m = west.m + dx * west_rhs.mX;
  n.g = west.g + dx * west_rhs.gX;
  n.q = west.q + dx * west_rhs.qX;
  n.u = west.u + dx * west_rhs.uX;
  n.x = west.x + dx * west_rhs.xX;
  n.t = west.t + dx * west_rhs.tX;
  renorm_node(n, out, opts.renormalize);

  double half = 0.5 * dx;
  double prev_change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.corrector_iters; ++it) {
    SolverCoeffs sc = cs.derived_fast(n.x, n.u);
    NodeRhs r = node_rhs(n, sc);
    StateNode nn;
    nn.l = south.l + half * (south_rhs.lY + r.lY);
    nn.h = south.h + half * (south_rhs.hY + r.hY);
    nn.p = south.p + half * (south_rhs.pY + r.pY);
    nn.m = west.m + half * (west_rhs.mX + r.mX);
    nn.g = west.g + half * (west_rhs.gX + r.gX);
    nn.q = west.q + half * (west_rhs.qX + r.qX);
    nn.u = west.u + half * (west_rhs.uX + r.uX);
    nn.x = west.x + half * (west_rhs.xX + r.xX);
    nn.t = west.t + half * (west_rhs.tX + r.tX);
    renorm_node(nn, out, opts.renormalize);

    double change = node_delta(nn, n);
    if (!std::isfinite(change))
      throw NumericalError("NaN during corrector at node (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
    if (change > opts.divergence_factor * prev_change && change > 0.1)
      throw NumericalError("corrector fixed point diverging at node (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
    prev_change = change;
    n = nn;
  }

  if (!finite_node(n))
    throw NumericalError("non-finite state at node (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
  if (n.p <= 0.0 || n.q <= 0.0)
    throw NonpositivePQError("p or q lost positivity at node (" + std::to_string(i) + "," +
                             std::to_string(j) + ")", i, j);

  SolverCoeffs sc = cs.derived_fast(n.x, n.u);
  out.rhs = node_rhs(n, sc);
  out.res_u = std::abs((n.u - south.u) / dx - 0.5 * (south_rhs.uY + out.rhs.uY));
  out.res_x = std::abs((n.x - south.x) / dx - 0.5 * (south_rhs.xY + out.rhs.xY));
  out.res_t = std::abs((n.t - south.t) / dx - 0.5 * (south_rhs.tY + out.rhs.tY));
  n.solved = true;
  out.node = n;
  return out;
}

StateField solve(const BoundaryData& bd, const CoefficientSet& cs,
                 const GridSpec& gs, const SolveOptions& opts) {
  if (std::abs(bd.ds - gs.dx) > 1e-15 * std::max(1.0, gs.dx))
    throw ConfigError("boundary step does not match the lattice step");
  if (bd.i_lo != gs.row_i_lo(0) || bd.i_hi != gs.row_i_hi(0))
    throw ConfigError("boundary data must cover the lattice diagonal i + j = 0");
  if (gs.k_max() < 1) throw ConfigError("grid box has no interior above the data line");

  StateField state(gs, 0, gs.k_max());
  state.e0 = bd.e0;

  // Seed the data diagonal.
  {
    auto& row0 = state.row(0);
    for (int idx = 0; idx < bd.size(); ++idx) {
      StateNode n;
      n.u = bd.u[idx];
      n.l = bd.l[idx];
      n.m = bd.m[idx];
      n.h = bd.h[idx];
      n.g = bd.g[idx];
      n.p = bd.p[idx];
      n.q = bd.q[idx];
      n.x = bd.x[idx];
      n.t = bd.t[idx];
      n.solved = true;
      row0[idx] = n;
    }
  }

  int threads = detail::resolve_threads(opts.threads);
  double dx = gs.dx;

  std::vector<NodeRhs> prev_rhs(state.row(0).size()), cur_rhs;
  {
    const auto& row0 = state.row(0);
    for (std::size_t idx = 0; idx < row0.size(); ++idx)
      prev_rhs[idx] = node_rhs(row0[idx], cs.derived_fast(row0[idx].x, row0[idx].u));
  }

  int last_k = 0;
  for (int k = 1; k <= gs.k_max(); ++k) {
    int lo = std::max(gs.row_i_lo(k), gs.row_i_lo(k - 1) + 1);
    int hi = std::min(gs.row_i_hi(k), gs.row_i_hi(k - 1));
    if (lo > hi) break;  // no node has both parents: domain exhausted
    int row_lo = gs.row_i_lo(k);
    auto& row = state.row(k);
    const auto& prev = state.row(k - 1);
    int prev_lo = gs.row_i_lo(k - 1);
    cur_rhs.assign(row.size(), NodeRhs{});

    int n_nodes = hi - lo + 1;
    struct Local {
      double drift = 0, res_u = 0, res_x = 0, res_t = 0;
      double min_t = std::numeric_limits<double>::infinity();
      double min_h = 1, min_g = 1;
      long renorm_failures = 0;
    };
    std::vector<Local> locals(std::max(1, threads));

    detail::parallel_for_chunks(n_nodes, threads, [&](int b, int e, int slot) {
      Local& L = locals[slot];
      for (int off = b; off < e; ++off) {
        int i = lo + off;
        int j = k - i;
        const StateNode& west = prev[i - 1 - prev_lo];
        const StateNode& south = prev[i - prev_lo];
        CellResult cr = cell_update(west, prev_rhs[i - 1 - prev_lo], south,
                                    prev_rhs[i - prev_lo], cs, dx, opts, i, j);
        row[i - row_lo] = cr.node;
        cur_rhs[i - row_lo] = cr.rhs;
        L.drift = std::max(L.drift, cr.drift);
        L.res_u = std::max(L.res_u, cr.res_u);
        L.res_x = std::max(L.res_x, cr.res_x);
        L.res_t = std::max(L.res_t, cr.res_t);
        L.min_t = std::min(L.min_t, cr.node.t);
        L.min_h = std::min(L.min_h, cr.node.h);
        L.min_g = std::min(L.min_g, cr.node.g);
        if (cr.renorm_failed) ++L.renorm_failures;
      }
    });

    double row_min_t = std::numeric_limits<double>::infinity();
    for (const Local& L : locals) {
      state.max_circle_drift = std::max(state.max_circle_drift, L.drift);
      state.max_res_u = std::max(state.max_res_u, L.res_u);
      state.max_res_x = std::max(state.max_res_x, L.res_x);
      state.max_res_t = std::max(state.max_res_t, L.res_t);
      state.min_h = std::min(state.min_h, L.min_h);
      state.min_g = std::min(state.min_g, L.min_g);
      state.renorm_failures += L.renorm_failures;
      row_min_t = std::min(row_min_t, L.min_t);
    }
    state.covered_time = std::max(state.covered_time, row_min_t);
    prev_rhs.swap(cur_rhs);
    last_k = k;
    if (row_min_t > opts.t_stop) break;
  }

  state.truncate(last_k);
  return state;
}

ResidualFields consistency_residuals(const StateField& state, const CoefficientSet& cs) {
  const GridSpec& gs = state.grid();
  ResidualFields rf;
  rf.k_lo = state.k_lo();
  rf.k_hi = state.k_hi();
  rf.cross.resize(rf.k_hi - rf.k_lo + 1);
  rf.res_u.resize(rf.k_hi - rf.k_lo + 1);
  rf.res_x.resize(rf.k_hi - rf.k_lo + 1);
  rf.res_t.resize(rf.k_hi - rf.k_lo + 1);
  for (int k = rf.k_lo; k <= rf.k_hi; ++k) {
    std::size_t w = state.row(k).size();
    rf.cross[k - rf.k_lo].assign(w, 0.0);
    rf.res_u[k - rf.k_lo].assign(w, 0.0);
    rf.res_x[k - rf.k_lo].assign(w, 0.0);
    rf.res_t[k - rf.k_lo].assign(w, 0.0);
  }

  // f1 = q m / (c2 - c1), f2 = p l / (c2 - c1), evaluated per node.
  auto f_at = [&](int i, int j, double& f1, double& f2, SolverCoeffs& sc) {
    const StateNode& n = state.at(i, j);
    sc = cs.derived_fast(n.x, n.u);
    f1 = n.q * n.m * sc.inv_dc;
    f2 = n.p * n.l * sc.inv_dc;
  };

  double inv2 = 1.0 / (2.0 * gs.dx);
  for (int k = rf.k_lo + 1; k < rf.k_hi; ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      int j = k - i;
      if (!state.solved(i, j)) continue;
      bool have = state.solved(i + 1, j) && state.solved(i - 1, j) &&
                  state.solved(i, j + 1) && state.solved(i, j - 1);
      if (!have) continue;
      SolverCoeffs sc, tmp;
      double f1e, f2e, f1w, f2w, f1n, f2n, f1s, f2s, f1c, f2c;
      f_at(i, j, f1c, f2c, sc);
      f_at(i + 1, j, f1e, f2e, tmp);
      f_at(i - 1, j, f1w, f2w, tmp);
      f_at(i, j + 1, f1n, f2n, tmp);
      f_at(i, j - 1, f1s, f2s, tmp);

      const StateNode& n = state.at(i, j);
      const StateNode& nn = state.at(i, j + 1);
      const StateNode& ns = state.at(i, j - 1);

      double cross = std::abs((f1e - f1w) * inv2 - (f2n - f2s) * inv2);
      double ru = std::abs((nn.u - ns.u) * inv2 - f1c);
      double rx = std::abs((nn.x - ns.x) * inv2 - sc.c1 * n.q * n.g * sc.inv_dc);
      double rt = std::abs((nn.t - ns.t) * inv2 - sc.alpha * n.q * n.g * sc.inv_dc);

      rf.cross[k - rf.k_lo][i - lo] = cross;
      rf.res_u[k - rf.k_lo][i - lo] = ru;
      rf.res_x[k - rf.k_lo][i - lo] = rx;
      rf.res_t[k - rf.k_lo][i - lo] = rt;
      if (cross > rf.max_cross) {
        rf.max_cross = cross;
        rf.argmax_cross_i = i;
        rf.argmax_cross_j = j;
      }
      rf.max_u = std::max(rf.max_u, ru);
      rf.max_x = std::max(rf.max_x, rx);
      rf.max_t = std::max(rf.max_t, rt);
    }
  }
  return rf;
}

}  // namespace vwave
