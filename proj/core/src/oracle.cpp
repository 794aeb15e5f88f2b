#include "vwave/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "vwave/errors.hpp"

namespace vwave::oracle {

namespace {

double adaptive_simpson(const Profile& f, double a, double b, double fa, double fb,
                        double fm, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f.value(lm), frm = f.value(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const Profile& f, double a, double b, double tol = 1e-11) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double fa = f.value(a), fb = f.value(b), fm = f.value(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return sign * adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 40);
}

struct MergedAtoms {
  std::vector<double> pos;
  std::vector<double> delta;  // signed masses (a minus b)
};

MergedAtoms merge_atoms(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.atoms.size() + b.atoms.size() > 16)
    throw TooManyAtomsError("bl_bruteforce supports at most 16 atoms in total");
  std::vector<std::pair<double, double>> all;
  for (auto [x, w] : a.atoms) {
    if (w < 0 || !std::isfinite(w) || !std::isfinite(x))
      throw ConfigError("atomic measure needs finite positions and nonnegative masses");
    all.push_back({x, w});
  }
  for (auto [x, w] : b.atoms) {
    if (w < 0 || !std::isfinite(w) || !std::isfinite(x))
      throw ConfigError("atomic measure needs finite positions and nonnegative masses");
    all.push_back({x, -w});
  }
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  MergedAtoms m;
  for (auto [x, w] : all) {
    if (!m.pos.empty() && x == m.pos.back()) m.delta.back() += w;
    else {
      m.pos.push_back(x);
      m.delta.push_back(w);
    }
  }
  return m;
}

}  // namespace

double dalembert(const CoefficientSet& cs, const InitialData& d, double x, double t) {
  if (!cs.constant())
    throw NonConstantCoefficientsError("d'Alembert oracle needs constant coefficients");
  DerivedCoeffs dc = cs.derived_at(0.0, 0.0);
  double lam_p = dc.lam_p, lam_m = dc.lam_m;
  double xi_p = x - lam_p * t;
  double xi_m = x - lam_m * t;
  double num = lam_m * d.u0.value(xi_p) - lam_p * d.u0.value(xi_m) +
               integrate(d.u1, 0.0, xi_p) - integrate(d.u1, 0.0, xi_m);
  return num / (lam_m - lam_p);
}

double dalembert_pde_residual(const CoefficientSet& cs, const InitialData& d,
                              double x, double t, double h) {
  DerivedCoeffs dc = cs.derived_at(0.0, 0.0);
  auto u = [&](double xx, double tt) { return dalembert(cs, d, xx, tt); };

  auto second = [&](bool in_x) {
    double f2p = in_x ? u(x + 2 * h, t) : u(x, t + 2 * h);
    double f1p = in_x ? u(x + h, t) : u(x, t + h);
    double f0 = u(x, t);
    double f1m = in_x ? u(x - h, t) : u(x, t - h);
    double f2m = in_x ? u(x - 2 * h, t) : u(x, t - 2 * h);
    return (-f2p + 16 * f1p - 30 * f0 + 16 * f1m - f2m) / (12 * h * h);
  };
  double u_tt = second(false);
  double u_xx = second(true);

  auto dx4 = [&](double tt) {
    return (-u(x + 2 * h, tt) + 8 * u(x + h, tt) - 8 * u(x - h, tt) + u(x - 2 * h, tt)) /
           (12 * h);
  };
  double u_tx = (-dx4(t + 2 * h) + 8 * dx4(t + h) - 8 * dx4(t - h) + dx4(t - 2 * h)) / (12 * h);

  return dc.alpha * dc.alpha * u_tt + 2.0 * dc.beta * u_tx - dc.gamma * dc.gamma * u_xx;
}

double bl_bruteforce(const AtomicMeasure& a, const AtomicMeasure& b, double resolution) {
  MergedAtoms m = merge_atoms(a, b);
  std::size_t n = m.pos.size();
  if (n == 0) return 0.0;

  // value grid over [-1, 1]
  int half = std::max(1, static_cast<int>(std::llround(1.0 / resolution)));
  int nv = 2 * half + 1;
  double step = 1.0 / half;
  auto val = [&](int r) { return -1.0 + r * step; };

  // forward DP with sliding-window max over the Lipschitz window
  std::vector<std::vector<double>> dp(n, std::vector<double>(nv));
  for (int r = 0; r < nv; ++r) dp[0][r] = m.delta[0] * val(r);
  for (std::size_t i = 1; i < n; ++i) {
    double d = m.pos[i] - m.pos[i - 1];
    int w = static_cast<int>(std::floor(d / step + 1e-12));
    std::deque<int> dq;
    auto& prev = dp[i - 1];
    auto& cur = dp[i];
    int rhs = 0;
    for (int r = 0; r < nv; ++r) {
      int hi = std::min(nv - 1, r + w);
      for (; rhs <= hi; ++rhs) {
        while (!dq.empty() && prev[dq.back()] <= prev[rhs]) dq.pop_back();
        dq.push_back(rhs);
      }
      while (dq.front() < r - w) dq.pop_front();
      cur[r] = m.delta[i] * val(r) + prev[dq.front()];
    }
  }

  // recover a maximizing grid path
  std::vector<double> f(n);
  int r_best = 0;
  for (int r = 1; r < nv; ++r)
    if (dp[n - 1][r] > dp[n - 1][r_best]) r_best = r;
  f[n - 1] = val(r_best);
  int r_cur = r_best;
  for (std::size_t i = n - 1; i >= 1; --i) {
    double d = m.pos[i] - m.pos[i - 1];
    int w = static_cast<int>(std::floor(d / step + 1e-12));
    int lo = std::max(0, r_cur - w), hi = std::min(nv - 1, r_cur + w);
    int arg = lo;
    for (int r = lo + 1; r <= hi; ++r)
      if (dp[i - 1][r] > dp[i - 1][arg]) arg = r;
    r_cur = arg;
    f[i - 1] = val(arg);
  }

  // local polish: exact per-coordinate ascent on the continuous problem
  for (int sweep = 0; sweep < 200; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double lo = -1.0, hi = 1.0;
      if (i > 0) {
        double d = m.pos[i] - m.pos[i - 1];
        lo = std::max(lo, f[i - 1] - d);
        hi = std::min(hi, f[i - 1] + d);
      }
      if (i + 1 < n) {
        double d = m.pos[i + 1] - m.pos[i];
        lo = std::max(lo, f[i + 1] - d);
        hi = std::min(hi, f[i + 1] + d);
      }
      double target = m.delta[i] > 0 ? hi : (m.delta[i] < 0 ? lo : std::clamp(f[i], lo, hi));
      change = std::max(change, std::abs(target - f[i]));
      f[i] = target;
    }
    if (change < 1e-15) break;
  }

  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) value += m.delta[i] * f[i];
  return std::max(value, 0.0);
}

double convergence_order(std::span<const std::pair<double, double>> h_and_err) {
  if (h_and_err.size() < 2)
    throw ConfigError("convergence_order needs at least two (h, e) points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [h, e] : h_and_err) {
    if (!(h > 0) || !(e > 0))
      throw ConfigError("convergence_order needs positive step sizes and errors");
    double lx = std::log(h), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double nn = static_cast<double>(h_and_err.size());
  double denom = nn * sxx - sx * sx;
  if (denom == 0) throw ConfigError("convergence_order needs distinct step sizes");
  return (nn * sxy - sx * sy) / denom;
}

}  // namespace vwave::oracle
