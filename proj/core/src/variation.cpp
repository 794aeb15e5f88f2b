#include "vwave/variation.hpp"

#include <cmath>
#include <string>

#include "vwave/errors.hpp"

namespace vwave {

PerturbationField::PerturbationField(GridSpec gs, int k_lo, int k_hi)
    : gs_(gs), k_lo_(k_lo), k_hi_(k_hi) {
  if (k_lo < gs.k_min() || k_hi > gs.k_max() || k_lo > k_hi)
    throw ConfigError("perturbation diagonal range outside the grid box");
  rows_.resize(k_hi - k_lo + 1);
  for (int k = k_lo; k <= k_hi; ++k) rows_[k - k_lo].resize(gs.row_width(k));
}

namespace {

// Blend-plus-defect reconstruction of one path node: R,S are blended
// pointwise, u0 = blend + e where the defect e integrates the residual of
// u_x = (R - S)/(c2 - c1)(x, u) and vanishes identically when the blend is
// already consistent (endpoints, constant coefficients).
InitialData blend_node(const CoefficientSet& cs, const InitialData& a,
                       const InitialData& b, double theta, int i_lo, int i_hi,
                       double ds) {
  int n = i_hi - i_lo + 1;
  std::vector<double> xs(n), R(n), S(n), ubar(n), ubarx(n);
  for (int k = 0; k < n; ++k) {
    double s = (i_lo + k) * ds;
    xs[k] = s;
    auto [ra, sa] = riemann_initial(cs, a, s);
    auto [rb, sb] = riemann_initial(cs, b, s);
    R[k] = (1.0 - theta) * ra + theta * rb;
    S[k] = (1.0 - theta) * sa + theta * sb;
    ubar[k] = (1.0 - theta) * a.u0.value(s) + theta * b.u0.value(s);
    ubarx[k] = (1.0 - theta) * a.u0.deriv(s) + theta * b.u0.deriv(s);
  }

  // residual of the slope equation at node k for a given defect value
  auto defect_rhs = [&](int k, double e) {
    SolverCoeffs sc = cs.derived_fast(xs[k], ubar[k] + e);
    return (R[k] - S[k]) * sc.inv_dc - ubarx[k];
  };

  std::vector<double> e(n), u0(n), u0x(n), u1(n);
  e[0] = 0.0;
  double f_prev = defect_rhs(0, e[0]);
  for (int k = 0; k + 1 < n; ++k) {
    double guess = e[k] + ds * f_prev;
    for (int it = 0; it < 3; ++it) {
      double f_new = defect_rhs(k + 1, guess);
      double next = e[k] + 0.5 * ds * (f_prev + f_new);
      if (!std::isfinite(next))
        throw NumericalError("path reconstruction ODE failed at theta = " +
                             std::to_string(theta));
      guess = next;
    }
    e[k + 1] = guess;
    f_prev = defect_rhs(k + 1, guess);
  }

  for (int k = 0; k < n; ++k) {
    u0[k] = ubar[k] + e[k];
    SolverCoeffs sc = cs.derived_fast(xs[k], u0[k]);
    u0x[k] = (R[k] - S[k]) * sc.inv_dc;
    u1[k] = (sc.c2 * S[k] - sc.c1 * R[k]) * sc.inv_dc / sc.alpha;
  }

  double support = std::max(a.support, b.support);
  std::vector<double> xs_copy = xs;
  return make_initial_data(Profile::sampled_hermite(std::move(xs_copy), std::move(u0),
                                                    std::move(u0x)),
                           Profile::sampled(std::move(xs), std::move(u1),
                                            Profile::Interp::kLinear),
                           support);
}

}  // namespace

PathOfSolutions make_path(const CoefficientSet& cs, std::vector<InitialData> data,
                          const GridSpec& gs, const SolveOptions& opts,
                          const std::string& tag) {
  if (data.size() < 2) throw ConfigError("a path needs at least two data sets");
  PathOfSolutions path;
  path.gs = gs;
  path.tag = tag;
  int nn = static_cast<int>(data.size());
  path.thetas.resize(nn);
  for (int k = 0; k < nn; ++k)
    path.thetas[k] = static_cast<double>(k) / (nn - 1);
  path.data = std::move(data);
  path.states.reserve(nn);
  for (int k = 0; k < nn; ++k) {
    BoundaryData bd = boundary_gamma0(cs, path.data[k], gs.row_i_lo(0), gs.row_i_hi(0), gs.dx);
    path.states.push_back(solve(bd, cs, gs, opts));
  }
  path.perts.reserve(nn);
  for (int k = 0; k < nn; ++k) path.perts.push_back(fd_perturbation(path, k));
  return path;
}

PathOfSolutions linear_rs_path(const CoefficientSet& cs, const InitialData& dataA,
                               const InitialData& dataB, int n_theta, const GridSpec& gs,
                               const SolveOptions& opts) {
  if (n_theta < 2 || n_theta % 2 != 0)
    throw ConfigError("n_theta must be even and at least 2");
  if (std::abs(dataA.support - dataB.support) > 1e-12 * std::max(1.0, dataA.support))
    throw ConfigError("path endpoints must share the support radius");
  std::vector<InitialData> nodes;
  nodes.reserve(n_theta + 1);
  for (int r = 0; r <= n_theta; ++r) {
    double theta = static_cast<double>(r) / n_theta;
    nodes.push_back(blend_node(cs, dataA, dataB, theta, gs.row_i_lo(0), gs.row_i_hi(0), gs.dx));
  }
  PathOfSolutions path = make_path(cs, std::move(nodes), gs, opts, "linear-RS");
  return path;
}

PerturbationField fd_perturbation(const PathOfSolutions& path, int k) {
  int nn = path.n_nodes();
  if (k < 0 || k >= nn) throw ConfigError("theta index out of range");
  int ka = k > 0 ? k - 1 : k;
  int kb = k < nn - 1 ? k + 1 : k;
  double dtheta = path.thetas[kb] - path.thetas[ka];
  const StateField& A = path.states[ka];
  const StateField& B = path.states[kb];

  int k_lo = std::max(A.k_lo(), B.k_lo());
  int k_hi = std::min(A.k_hi(), B.k_hi());
  PerturbationField pf(path.gs, k_lo, k_hi);
  const GridSpec& gs = path.gs;
  double inv = 1.0 / dtheta;
  for (int kk = k_lo; kk <= k_hi; ++kk) {
    int lo = gs.row_i_lo(kk), hi = gs.row_i_hi(kk);
    for (int i = lo; i <= hi; ++i) {
      int j = kk - i;
      if (!A.solved(i, j) || !B.solved(i, j)) continue;
      const StateNode& na = A.at(i, j);
      const StateNode& nb = B.at(i, j);
      PertNode& p = pf.at(i, j);
      p.U = (nb.u - na.u) * inv;
      p.L = (nb.l - na.l) * inv;
      p.M = (nb.m - na.m) * inv;
      p.H = (nb.h - na.h) * inv;
      p.G = (nb.g - na.g) * inv;
      p.P = (nb.p - na.p) * inv;
      p.Q = (nb.q - na.q) * inv;
      p.X = (nb.x - na.x) * inv;
      p.T = (nb.t - na.t) * inv;
    }
  }
  return pf;
}

PertNode pert_at_sample(const PerturbationField& pert, const SliceSample& s) {
  if (!pert.has(s.col_i, s.edge_j) || !pert.has(s.col_i, s.edge_j + 1))
    throw OutOfRangeError("perturbation field does not cover the slice sample");
  const PertNode& a = pert.at(s.col_i, s.edge_j);
  const PertNode& b = pert.at(s.col_i, s.edge_j + 1);
  double f = s.frac;
  auto lerp = [f](double va, double vb) { return va + f * (vb - va); };
  PertNode out;
  out.U = lerp(a.U, b.U);
  out.L = lerp(a.L, b.L);
  out.M = lerp(a.M, b.M);
  out.H = lerp(a.H, b.H);
  out.G = lerp(a.G, b.G);
  out.P = lerp(a.P, b.P);
  out.Q = lerp(a.Q, b.Q);
  out.X = lerp(a.X, b.X);
  out.T = lerp(a.T, b.T);
  return out;
}

PhysicalTangent physical_tangent(const StateField& state, const PerturbationField& pert,
                                 const TimeSlice& slice, const CoefficientSet& cs) {
  (void)state;
  PhysicalTangent out;
  out.samples.reserve(slice.samples.size());
  for (const SliceSample& s : slice.samples) {
    PertNode p = pert_at_sample(pert, s);
    SolverCoeffs sc = cs.derived_fast(s.x, s.u);
    TangentSample ts;
    ts.w = p.X - (sc.c1 / sc.alpha) * p.T;
    ts.z = p.X - (sc.c2 / sc.alpha) * p.T;
    ts.U = p.U;
    ts.singular = s.singular;
    if (!s.singular) {
      double lh = 2.0 * ((1.0 - s.h) * p.L + s.l * p.H);  // l H / h via the circle identity
      ts.rhat = (p.L - lh - (p.T / sc.alpha) * (sc.a1 - sc.a1 * s.h - sc.d1 * s.l)) / s.h;
      double mg = 2.0 * ((1.0 - s.g) * p.M + s.m * p.G);
      ts.shat = (p.M - mg - (p.T / sc.alpha) * (-sc.a2 + sc.a2 * s.g - sc.d2 * s.m)) / s.g;
    }
    out.samples.push_back(ts);
  }
  return out;
}

}  // namespace vwave
