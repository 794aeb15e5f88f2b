#include "vwave/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vwave/errors.hpp"

namespace vwave {

MetricWeights MetricWeights::from_delta(double delta) {
  if (!(delta > 0) || !(delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  MetricWeights w;
  w.delta = delta;
  double d2 = delta * delta, d3 = d2 * delta, d4 = d3 * delta;
  w.kappa = {1.0, delta, d4, d2, d2, d3, d4};
  return w;
}

MetricWeights MetricWeights::from_kappa(const std::array<double, 7>& kappa) {
  MetricWeights w;
  w.kappa = kappa;
  w.delta = kappa[1] > 0 && kappa[0] > 0 ? kappa[1] / kappa[0] : 0.1;
  w.validate();
  return w;
}

bool MetricWeights::follows_template() const {
  MetricWeights t = from_delta(delta);
  for (int k = 0; k < 7; ++k) {
    double ref = t.kappa[k] * kappa[0];
    if (std::abs(kappa[k] - ref) > 1e-12 * std::max(1.0, std::abs(ref))) return false;
  }
  return true;
}

void MetricWeights::validate() const {
  for (double k : kappa)
    if (!(k > 0)) throw ConfigError("metric weights must all be positive");
}

PotentialField potentials(const TimeSlice& slice) {
  const auto& ss = slice.samples;
  std::size_t n = ss.size();
  PotentialField pf;
  pf.Wm.assign(n, 1.0);
  pf.Wp.assign(n, 1.0);
  if (n < 2) return pf;

  std::vector<double> r2d(n), s2d(n);
  for (std::size_t k = 0; k < n; ++k) {
    r2d[k] = (1.0 - ss[k].h) * ss[k].p;   // R^2 dx / dX
    s2d[k] = (1.0 - ss[k].g) * ss[k].q;   // S^2 dx / (-dY)
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double mdY = ss[k].Y - ss[k + 1].Y;
    pf.Wm[k + 1] = pf.Wm[k] + 0.5 * (s2d[k] + s2d[k + 1]) * mdY;
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    double dX = ss[k + 1].X - ss[k].X;
    pf.Wp[k] = pf.Wp[k + 1] + 0.5 * (r2d[k] + r2d[k + 1]) * dX;
  }
  return pf;
}

std::pair<double, double> interaction_integrals(const TimeSlice& slice,
                                                const CoefficientSet& cs, double r_cap) {
  const auto& ss = slice.samples;
  std::size_t n = ss.size();
  std::vector<double> g1(n, 0.0), g2(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (ss[k].singular) continue;  // clipped
    SolverCoeffs sc = cs.derived_fast(ss[k].x, ss[k].u);
    double R = std::clamp(ss[k].l / ss[k].h, -r_cap, r_cap);
    double S = std::clamp(ss[k].m / ss[k].g, -r_cap, r_cap);
    double mix = R * S * S - R * R * S;
    double two_et = 2.0 * sc.et / sc.alpha;
    g1[k] = std::abs((2.0 * sc.a1 / sc.alpha) * mix + (2.0 * sc.c1 * sc.b / sc.alpha) * R * S +
                     two_et * S * S);
    g2[k] = std::abs((2.0 * sc.a2 / sc.alpha) * mix + (2.0 * sc.c2 * sc.b / sc.alpha) * R * S +
                     two_et * R * R);
  }
  double G1 = 0, G2 = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double dx = ss[k + 1].x - ss[k].x;
    G1 += 0.5 * (g1[k] + g1[k + 1]) * dx;
    G2 += 0.5 * (g2[k] + g2[k + 1]) * dx;
  }
  return {G1, G2};
}

double NormBreakdown::recompute_total(const MetricWeights& w) const {
  double t = 0;
  for (int k = 0; k < 7; ++k) t += w.kappa[k] * (term_minus[k] + term_plus[k]);
  return t;
}

NormBreakdown tangent_norm(const StateField& state, const PerturbationField& pert,
                           const TimeSlice& slice, const MetricWeights& weights,
                           const CoefficientSet& cs) {
  (void)state;
  weights.validate();
  const auto& ss = slice.samples;
  std::size_t n = ss.size();
  PotentialField pf = potentials(slice);

  // per-sample |J_k| and |H_k|
  std::vector<std::array<double, 7>> J(n), H(n);
  for (std::size_t k = 0; k < n; ++k) {
    const SliceSample& s = ss[k];
    PertNode pn = pert_at_sample(pert, s);
    SolverCoeffs sc = cs.derived_fast(s.x, s.u);
    double ia = 1.0 / sc.alpha;
    double w_shift = pn.X - sc.c1 * ia * pn.T;
    double z_shift = pn.X - sc.c2 * ia * pn.T;
    double A1 = (sc.c1 * sc.alpha_x - sc.alpha * sc.c1_x) / (2.0 * sc.alpha);
    double A2 = (sc.c2 * sc.alpha_x - sc.alpha * sc.c2_x) / (2.0 * sc.alpha);
    double B = 2.0 * sc.et * ia;  // (c1 c2_x - c2 c1_x)/(alpha (c2 - c1))
    double lhp = 2.0 * ((1.0 - s.h) * pn.L + s.l * pn.H);  // (l H / h), circle identity
    double mgq = 2.0 * ((1.0 - s.g) * pn.M + s.m * pn.G);

    J[k][0] = std::abs(w_shift * s.p * s.h);
    J[k][1] = std::abs(w_shift * s.p);
    J[k][2] = std::abs(pn.U * s.p);
    J[k][3] = std::abs(pn.L * s.p - lhp * s.p - (pn.T * s.p * ia) * (sc.a1 - sc.a1 * s.h - sc.d1 * s.l));
    J[k][4] = std::abs(s.h * pn.P + s.p * pn.H + (2.0 * s.p * pn.T * ia) * (sc.a1 * s.l + A1 * s.h));
    J[k][5] = std::abs(s.l * pn.P + lhp * s.p + (2.0 * s.p * pn.T * ia) * (sc.a1 * (1.0 - s.h) + A1 * s.l));
    J[k][6] = std::abs((1.0 - s.h) * pn.P - s.p * pn.H - B * pn.T * s.p * (1.0 - s.h));

    H[k][0] = std::abs(z_shift * s.q * s.g);
    H[k][1] = std::abs(z_shift * s.q);
    H[k][2] = std::abs(pn.U * s.q);
    H[k][3] = std::abs(pn.M * s.q - mgq * s.q - (pn.T * s.q * ia) * (-sc.a2 + sc.a2 * s.g - sc.d2 * s.m));
    H[k][4] = std::abs(s.g * pn.Q + s.q * pn.G + (2.0 * s.q * pn.T * ia) * (-sc.a2 * s.m + A2 * s.g));
    H[k][5] = std::abs(s.m * pn.Q + mgq * s.q + (2.0 * s.q * pn.T * ia) * (-sc.a2 * (1.0 - s.g) + A2 * s.m));
    H[k][6] = std::abs((1.0 - s.g) * pn.Q - s.q * pn.G - B * pn.T * s.q * (1.0 - s.g));
  }

  NormBreakdown nb;
  nb.gauge = "canonical-XY";
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double dX = ss[k + 1].X - ss[k].X;
    double mdY = ss[k].Y - ss[k + 1].Y;
    for (int t = 0; t < 7; ++t) {
      nb.term_minus[t] += 0.5 * (J[k][t] * pf.Wm[k] + J[k + 1][t] * pf.Wm[k + 1]) * dX;
      nb.term_plus[t] += 0.5 * (H[k][t] * pf.Wp[k] + H[k + 1][t] * pf.Wp[k + 1]) * mdY;
    }
  }
  nb.weighted_total = nb.recompute_total(weights);
  return nb;
}

NormBreakdown tangent_norm_physical(const TimeSlice& slice, const PhysicalTangent& tangent,
                                    const MetricWeights& weights, const CoefficientSet& cs) {
  weights.validate();
  if (slice.any_singular())
    throw SingularSliceError("physical-coordinate norm refuses slices with singular samples");
  const auto& ss = slice.samples;
  std::size_t n = ss.size();
  if (tangent.samples.size() != n)
    throw ConfigError("tangent and slice have different sample counts");
  PotentialField pf = potentials(slice);

  // centered x-derivatives of the shifts (one-sided at the ends)
  std::vector<double> wx(n, 0.0), zx(n, 0.0);
  auto dd = [&](auto get, std::size_t k) {
    std::size_t ka = k > 0 ? k - 1 : k;
    std::size_t kb = k + 1 < n ? k + 1 : k;
    double dx = ss[kb].x - ss[ka].x;
    if (dx == 0) return 0.0;
    return (get(kb) - get(ka)) / dx;
  };
  for (std::size_t k = 0; k < n; ++k) {
    wx[k] = dd([&](std::size_t i) { return tangent.samples[i].w; }, k);
    zx[k] = dd([&](std::size_t i) { return tangent.samples[i].z; }, k);
  }

  std::vector<std::array<double, 7>> Im(n), Ip(n);
  for (std::size_t k = 0; k < n; ++k) {
    const SliceSample& s = ss[k];
    const TangentSample& tg = tangent.samples[k];
    SolverCoeffs sc = cs.derived_fast(s.x, s.u);
    double R = s.l / s.h;
    double S = s.m / s.g;
    double R2 = (1.0 - s.h) / s.h;
    double S2 = (1.0 - s.g) / s.g;
    double wz = tg.w - tg.z;
    double rel1 = 2.0 * sc.a1 * wz * sc.inv_dc;  // pairs with S factors
    double rel2 = 2.0 * sc.a2 * wz * sc.inv_dc;  // pairs with R factors

    Im[k][0] = std::abs(tg.w);
    Ip[k][0] = std::abs(tg.z);
    Im[k][1] = std::abs(tg.w) * (1.0 + R2);
    Ip[k][1] = std::abs(tg.z) * (1.0 + S2);
    Im[k][2] = std::abs(tg.U) * (1.0 + R2);
    Ip[k][2] = std::abs(tg.U) * (1.0 + S2);
    Im[k][3] = std::abs(tg.rhat);
    Ip[k][3] = std::abs(tg.shat);
    Im[k][4] = std::abs(wx[k] + rel1 * S);
    Ip[k][4] = std::abs(zx[k] - rel2 * R);
    Im[k][5] = std::abs(R * wx[k] + rel1 * R * S);
    Ip[k][5] = std::abs(S * zx[k] - rel2 * R * S);
    Im[k][6] = std::abs(2.0 * R * tg.rhat + R2 * wx[k] + rel1 * R2 * S);
    Ip[k][6] = std::abs(2.0 * S * tg.shat + S2 * zx[k] - rel2 * R * S2);
  }

  NormBreakdown nb;
  nb.gauge = "physical-x";
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double dx = ss[k + 1].x - ss[k].x;
    for (int t = 0; t < 7; ++t) {
      nb.term_minus[t] += 0.5 * (Im[k][t] * pf.Wm[k] + Im[k + 1][t] * pf.Wm[k + 1]) * dx;
      nb.term_plus[t] += 0.5 * (Ip[k][t] * pf.Wp[k] + Ip[k + 1][t] * pf.Wp[k + 1]) * dx;
    }
  }
  nb.weighted_total = nb.recompute_total(weights);
  return nb;
}

double path_length(const PathOfSolutions& path, double tau, const MetricWeights& weights,
                   const CoefficientSet& cs) {
  int nn = path.n_nodes();
  if (nn < 3 || nn % 2 == 0)
    throw ConfigError("path needs an odd node count (even interval count) for Simpson");
  double dtheta = path.thetas[1] - path.thetas[0];
  double total = 0;
  for (int r = 0; r < nn; ++r) {
    TimeSlice slice = extract_slice(path.states[r], tau);
    NormBreakdown nb = tangent_norm(path.states[r], path.perts[r], slice, weights, cs);
    double w = (r == 0 || r == nn - 1) ? 1.0 : (r % 2 == 1 ? 4.0 : 2.0);
    total += w * nb.weighted_total;
  }
  return total * dtheta / 3.0;
}

LipschitzSeries lipschitz_ratio(const PathOfSolutions& path, const std::vector<double>& taus,
                                const MetricWeights& weights, const CoefficientSet& cs,
                                double eps_floor) {
  LipschitzSeries out;
  double len0 = path_length(path, 0.0, weights, cs);
  if (!(len0 >= eps_floor))
    throw DegeneratePathError("path length at t = 0 is below the floor; ratio undefined");
  out.lengths.push_back({0.0, len0});
  double worst = 1.0;
  for (double tau : taus) {
    if (tau == 0.0) continue;
    double len = path_length(path, tau, weights, cs);
    out.lengths.push_back({tau, len});
    worst = std::max(worst, len / len0);
  }
  out.ratio = worst;
  return out;
}

double l1_dist(const TimeSlice& a, const TimeSlice& b) {
  double lo = std::max(a.samples.front().x, b.samples.front().x);
  double hi = std::min(a.samples.back().x, b.samples.back().x);
  if (!(hi > lo)) throw OutOfRangeError("slices do not overlap in x");

  std::vector<double> grid;
  grid.push_back(lo);
  for (const auto& s : a.samples)
    if (s.x > lo && s.x < hi) grid.push_back(s.x);
  for (const auto& s : b.samples)
    if (s.x > lo && s.x < hi) grid.push_back(s.x);
  grid.push_back(hi);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> ua = sample_u(a, grid);
  std::vector<double> ub = sample_u(b, grid);
  double total = 0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    double fa = std::abs(ua[k] - ub[k]);
    double fb = std::abs(ua[k + 1] - ub[k + 1]);
    total += 0.5 * (fa + fb) * (grid[k + 1] - grid[k]);
  }
  return total;
}

double sobolev_bound(const InitialData& a, const InitialData& b, const CoefficientSet& cs) {
  (void)cs;
  double L = std::max(a.support, b.support) + 1.0;
  const int n = 8192;  // Simpson intervals
  double hstep = 2.0 * L / n;
  double h1sq = 0, w11 = 0, l1 = 0, l2sq = 0;
  for (int k = 0; k <= n; ++k) {
    double x = -L + k * hstep;
    double wgt = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    double d0 = a.u0.value(x) - b.u0.value(x);
    double d0x = a.u0.deriv(x) - b.u0.deriv(x);
    double d1 = a.u1.value(x) - b.u1.value(x);
    h1sq += wgt * (d0 * d0 + d0x * d0x);
    w11 += wgt * (std::abs(d0) + std::abs(d0x));
    l1 += wgt * std::abs(d1);
    l2sq += wgt * d1 * d1;
  }
  double f = hstep / 3.0;
  return std::sqrt(f * h1sq) + f * w11 + f * l1 + std::sqrt(f * l2sq);
}

namespace {

// Concave piecewise-linear value function on [-1, 1] for the chain LP.
struct ConcavePL {
  std::vector<double> xs, vs;

  void init_linear(double c) {
    xs = {-1.0, 1.0};
    vs = {-c, c};
  }

  double value_at(double x) const {
    if (x <= xs.front()) return vs.front();
    if (x >= xs.back()) return vs.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return vs[k] + t * (vs[k + 1] - vs[k]);
  }

  double max_value() const { return *std::max_element(vs.begin(), vs.end()); }

  // V(f) <- max over |f' - f| <= d of V(f'), then clip the domain to [-1, 1].
  void window_max(double d) {
    std::size_t p0 = 0;
    for (std::size_t k = 1; k < vs.size(); ++k)
      if (vs[k] > vs[p0]) p0 = k;
    std::size_t p1 = p0;
    while (p1 + 1 < vs.size() && vs[p1 + 1] == vs[p0]) ++p1;
    while (p0 > 0 && vs[p0 - 1] == vs[p1]) --p0;

    std::vector<double> nx, nv;
    nx.reserve(xs.size() + 2);
    nv.reserve(xs.size() + 2);
    for (std::size_t k = 0; k < p0; ++k) {
      nx.push_back(xs[k] - d);
      nv.push_back(vs[k]);
    }
    nx.push_back(xs[p0] - d);
    nv.push_back(vs[p0]);
    nx.push_back(xs[p1] + d);
    nv.push_back(vs[p0]);
    for (std::size_t k = p1 + 1; k < xs.size(); ++k) {
      nx.push_back(xs[k] + d);
      nv.push_back(vs[k]);
    }
    xs.swap(nx);
    vs.swap(nv);
    clip();
  }

  void add_linear(double c) {
    for (std::size_t k = 0; k < xs.size(); ++k) vs[k] += c * xs[k];
  }

  void clip() {
    double vlo = value_at(-1.0), vhi = value_at(1.0);
    std::vector<double> nx{-1.0}, nv{vlo};
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (xs[k] > -1.0 + 1e-15 && xs[k] < 1.0 - 1e-15) {
        if (!nx.empty() && xs[k] - nx.back() < 1e-15) continue;
        nx.push_back(xs[k]);
        nv.push_back(vs[k]);
      }
    }
    nx.push_back(1.0);
    nv.push_back(vhi);
    xs.swap(nx);
    vs.swap(nv);
  }
};

double kr_chain_lp(const std::vector<double>& pos, const std::vector<double>& delta) {
  std::size_t n = pos.size();
  if (n == 0) return 0.0;
  ConcavePL V;
  V.init_linear(delta[0]);
  for (std::size_t i = 1; i < n; ++i) {
    V.window_max(pos[i] - pos[i - 1]);
    V.add_linear(delta[i]);
  }
  return std::max(V.max_value(), 0.0);
}

void append_atoms(const oracle::AtomicMeasure& m, double sign,
                  std::vector<std::pair<double, double>>& out) {
  for (auto [x, w] : m.atoms) {
    if (w < 0 || !std::isfinite(w) || !std::isfinite(x))
      throw ConfigError("atomic measure needs finite positions and nonnegative masses");
    out.push_back({x, sign * w});
  }
}

}  // namespace

double kr_dist(const oracle::AtomicMeasure& a, const oracle::AtomicMeasure& b) {
  std::vector<std::pair<double, double>> all;
  append_atoms(a, +1.0, all);
  append_atoms(b, -1.0, all);
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<double> pos, delta;
  for (auto [x, w] : all) {
    if (!pos.empty() && x == pos.back()) delta.back() += w;
    else {
      pos.push_back(x);
      delta.push_back(w);
    }
  }
  return kr_chain_lp(pos, delta);
}

oracle::AtomicMeasure slice_energy_atoms(const TimeSlice& slice, const CoefficientSet& cs) {
  const auto& ss = slice.samples;
  std::size_t n = ss.size();
  std::vector<double> fm(n), fp(n);
  for (std::size_t k = 0; k < n; ++k) {
    SolverCoeffs sc = cs.derived_fast(ss[k].x, ss[k].u);
    fm[k] = (-sc.c1 * sc.inv_dc) * (1.0 - ss[k].h) * ss[k].p;
    fp[k] = (sc.c2 * sc.inv_dc) * (1.0 - ss[k].g) * ss[k].q;
  }
  oracle::AtomicMeasure out;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double dX = ss[k + 1].X - ss[k].X;
    double mdY = ss[k].Y - ss[k + 1].Y;
    double mass = 0.5 * (fm[k] + fm[k + 1]) * dX + 0.5 * (fp[k] + fp[k + 1]) * mdY;
    if (mass <= 0) continue;
    out.atoms.push_back({0.5 * (ss[k].x + ss[k + 1].x), mass});
  }
  return out;
}

double kr_dist(const TimeSlice& a, const TimeSlice& b, const CoefficientSet& cs) {
  oracle::AtomicMeasure ma = slice_energy_atoms(a, cs);
  oracle::AtomicMeasure mb = slice_energy_atoms(b, cs);
  std::vector<std::pair<double, double>> all;
  append_atoms(ma, +1.0, all);
  append_atoms(mb, -1.0, all);
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<double> pos, delta;
  for (auto [x, w] : all) {
    if (!pos.empty() && x == pos.back()) delta.back() += w;
    else {
      pos.push_back(x);
      delta.push_back(w);
    }
  }
  return kr_chain_lp(pos, delta);
}

ComparisonConstants comparison_constants(const CoefficientSet& cs, const MetricWeights& w,
                                         double total_energy) {
  const CoeffBounds& bd = cs.bounds();
  double cmax = cs.wave_speed_bound();
  double cmin = (std::sqrt(bd.beta2 * bd.beta2 + bd.alpha1 * bd.alpha1 * bd.gamma1 * bd.gamma1) -
                 bd.beta2) / bd.alpha2;
  double E = std::max(total_energy, 0.0);

  // sampled suprema of the coefficient-ratio derivatives over the domain
  double Dx = 0, Du = 0, Dgap = 0;
  const DomainRect& dom = cs.domain();
  const int ns = 33;
  for (int ix = 0; ix < ns; ++ix) {
    double x = dom.x_lo + (dom.x_hi - dom.x_lo) * ix / (ns - 1);
    for (int iu = 0; iu < ns; ++iu) {
      double u = dom.u_lo + (dom.u_hi - dom.u_lo) * iu / (ns - 1);
      DerivedCoeffs d;
      try {
        d = cs.derived_at(x, u);
      } catch (const Error&) {
        continue;
      }
      double dc = d.c2 - d.c1;
      Dx = std::max(Dx, std::abs(d.c2 * d.c1_x - d.c1 * d.c2_x) / (dc * dc));
      Du = std::max(Du, std::abs(d.c2 * d.c1_u - d.c1 * d.c2_u) / (dc * dc));
      Dgap = std::max(Dgap, std::abs(d.c2_u - d.c1_u));
    }
  }

  ComparisonConstants cc;
  cc.C1 = std::max(1.0 / w.kappa[2], bd.alpha2 * bd.alpha2 / (2.0 * bd.gamma1 * w.kappa[1]));
  cc.C2 = std::max({(1.0 + Dx) / w.kappa[1], Du / w.kappa[2], 1.0 / w.kappa[6]});

  // admissible data-to-length constant for the canonical path at t = 0
  double span = dom.x_hi - dom.x_lo;
  double F = 1.0 + cmax / cmin;                 // converts energy to S^2/R^2 mass
  double WC = 1.0 + E * F;                      // potential ceiling
  double Kc = std::max(bd.alpha2, cmax);        // data difference -> r, s
  double gronwall = std::exp(std::min(50.0, Dgap * std::sqrt(std::max(span * E, 0.0)) /
                                                 (2.0 * bd.gamma1)));
  double Kv = gronwall * Kc / bd.gamma1;        // r, s -> sup |v|
  double Kr = 4.0 * Kc * WC;
  double K6 = 8.0 * WC * std::sqrt(std::max(E * F, 0.0)) * Kc;
  cc.C3 = w.kappa[2] * WC * Kv * (2.0 * span + E * F) + w.kappa[3] * Kr + w.kappa[6] * K6;
  return cc;
}

}  // namespace vwave
