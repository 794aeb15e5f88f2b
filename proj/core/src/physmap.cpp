#include "vwave/physmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>

#include "vwave/errors.hpp"

namespace vwave {

bool TimeSlice::any_singular() const {
  for (const auto& s : samples)
    if (s.singular) return true;
  return false;
}

double TimeSlice::R2(std::size_t k, double cap) const {
  const SliceSample& s = samples[k];
  if (s.h <= 1.0 / cap) return cap;
  return std::min((1.0 - s.h) / s.h, cap);
}

double TimeSlice::S2(std::size_t k, double cap) const {
  const SliceSample& s = samples[k];
  if (s.g <= 1.0 / cap) return cap;
  return std::min((1.0 - s.g) / s.g, cap);
}

TimeSlice extract_slice(const StateField& state, double tau, double eps_sing) {
  if (tau < 0.0)
    throw SliceOutOfDomainError("slice time is before the data line t = 0");
  if (tau > state.covered_time)
    throw SliceOutOfDomainError("slice time exceeds the covered time of the solved region");

  const GridSpec& gs = state.grid();
  TimeSlice slice;
  slice.tau = tau;
  slice.eps_sing = eps_sing;
  slice.e0 = state.e0;

  for (int i = gs.i_lo; i <= gs.i_hi; ++i) {
    int j_bot = std::max(gs.j_lo, state.k_lo() - i);
    int j_top = std::min(gs.j_hi, state.k_hi() - i);
    if (j_top <= j_bot) continue;
    if (!state.solved(i, j_bot)) continue;
    // shrink the top to the last solved node in this column
    while (j_top > j_bot && !state.solved(i, j_top)) --j_top;
    if (state.at(i, j_top).t < tau) continue;  // column never reaches tau (domain edge)
    if (state.at(i, j_bot).t > tau) continue;

    // binary search for the crossing edge: t(i, j) <= tau <= t(i, j+1)
    int lo = j_bot, hi = j_top;
    while (hi - lo > 1) {
      int mid = lo + (hi - lo) / 2;
      if (state.at(i, mid).t <= tau) lo = mid;
      else hi = mid;
    }
    const StateNode& a = state.at(i, lo);
    const StateNode& b = state.at(i, lo + 1);
    double dt = b.t - a.t;
    double frac = dt > 0 ? (tau - a.t) / dt : 0.0;
    frac = std::clamp(frac, 0.0, 1.0);

    SliceSample s;
    s.col_i = i;
    s.edge_j = lo;
    s.frac = frac;
    s.X = gs.X(i);
    s.Y = (lo + frac) * gs.dx;
    auto lerp = [frac](double va, double vb) { return va + frac * (vb - va); };
    s.u = lerp(a.u, b.u);
    s.l = lerp(a.l, b.l);
    s.m = lerp(a.m, b.m);
    s.h = lerp(a.h, b.h);
    s.g = lerp(a.g, b.g);
    s.p = lerp(a.p, b.p);
    s.q = lerp(a.q, b.q);
    s.x = lerp(a.x, b.x);
    s.singular = (s.h < eps_sing) || (s.g < eps_sing);
    slice.samples.push_back(s);
  }

  if (slice.samples.empty())
    throw SliceOutOfDomainError("the level curve does not intersect the solved region");
  return slice;
}

EnergyReport energy(const TimeSlice& slice, const CoefficientSet& cs) {
  EnergyReport rep;
  rep.tau = slice.tau;
  rep.E0 = slice.e0;

  const auto& ss = slice.samples;
  std::size_t n = ss.size();
  std::vector<double> fm(n), fp(n), r2d(n), s2d(n);
  for (std::size_t k = 0; k < n; ++k) {
    SolverCoeffs sc = cs.derived_fast(ss[k].x, ss[k].u);
    r2d[k] = (1.0 - ss[k].h) * ss[k].p;
    s2d[k] = (1.0 - ss[k].g) * ss[k].q;
    fm[k] = (-sc.c1 * sc.inv_dc) * r2d[k];
    fp[k] = (sc.c2 * sc.inv_dc) * s2d[k];
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double dX = ss[k + 1].X - ss[k].X;
    double mdY = ss[k].Y - ss[k + 1].Y;
    rep.E_minus += 0.5 * (fm[k] + fm[k + 1]) * dX;
    rep.E_plus += 0.5 * (fp[k] + fp[k + 1]) * mdY;
    rep.mass_R2 += 0.5 * (r2d[k] + r2d[k + 1]) * dX;
    rep.mass_S2 += 0.5 * (s2d[k] + s2d[k + 1]) * mdY;
  }
  rep.total = rep.E_minus + rep.E_plus;
  rep.drift = rep.E0 > 0 ? (rep.total - rep.E0) / rep.E0
                         : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

std::vector<double> sample_u(const TimeSlice& slice, std::span<const double> xs) {
  const auto& ss = slice.samples;
  if (ss.empty()) throw OutOfRangeError("empty slice");
  double x_first = ss.front().x, x_last = ss.back().x;
  std::vector<double> out;
  out.reserve(xs.size());
  std::size_t seg = 0;
  for (double x : xs) {
    if (x < x_first - 1e-12 || x > x_last + 1e-12)
      throw OutOfRangeError("query x outside the slice range");
    double xq = std::clamp(x, x_first, x_last);
    while (seg + 2 < ss.size() && ss[seg + 1].x <= xq) ++seg;
    // allow unsorted queries by rewinding
    while (seg > 0 && ss[seg].x > xq) --seg;
    double dx = ss[seg + 1].x - ss[seg].x;
    if (dx <= 0) {
      out.push_back(ss[seg].u);  // singular tie: common u value
    } else {
      double w = (xq - ss[seg].x) / dx;
      out.push_back(ss[seg].u + w * (ss[seg + 1].u - ss[seg].u));
    }
  }
  return out;
}

void export_slice_csv(const TimeSlice& slice, const std::string& path, double r2_cap) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "X,Y,x,u,h,g,p,q,R2_flagged,S2_flagged,singular_flag\n";
  char buf[400];
  for (std::size_t k = 0; k < slice.samples.size(); ++k) {
    const SliceSample& s = slice.samples[k];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  s.X, s.Y, s.x, s.u, s.h, s.g, s.p, s.q,
                  slice.R2(k, r2_cap), slice.S2(k, r2_cap), s.singular ? 1 : 0);
    out << buf;
  }
}

}  // namespace vwave
