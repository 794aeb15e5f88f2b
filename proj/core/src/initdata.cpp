#include "vwave/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <sstream>

#include "vwave/errors.hpp"

namespace vwave {

namespace {

// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant.
std::vector<double> monotone_slopes(const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  std::size_t n = xs.size();
  std::vector<double> d(n - 1), m(n);
  for (std::size_t k = 0; k + 1 < n; ++k)
    d[k] = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k)
    m[k] = (d[k - 1] * d[k] > 0) ? 0.5 * (d[k - 1] + d[k]) : 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (d[k] == 0.0) {
      m[k] = 0.0;
      m[k + 1] = 0.0;
      continue;
    }
    double a = m[k] / d[k], b = m[k + 1] / d[k];
    double s = a * a + b * b;
    if (s > 9.0) {
      double tau = 3.0 / std::sqrt(s);
      m[k] = tau * a * d[k];
      m[k + 1] = tau * b * d[k];
    }
  }
  return m;
}

}  // namespace

Profile Profile::from_expr(const Expr& e) {
  if (e.depends_on_u())
    throw ConfigError("initial-data expressions may reference x only");
  Profile p;
  p.expr_ = e;
  return p;
}

Profile Profile::sampled(std::vector<double> xs, std::vector<double> ys, Interp kind) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ConfigError("sampled profile needs at least two (x, y) pairs");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw ConfigError("sampled profile abscissae must be increasing");
  if (kind == Interp::kHermite)
    throw ConfigError("use sampled_hermite to provide slopes");
  Profile p;
  p.kind_ = kind;
  if (kind == Interp::kMonotoneCubic) p.slopes_ = monotone_slopes(xs, ys);
  p.xs_ = std::move(xs);
  p.ys_ = std::move(ys);
  return p;
}

Profile Profile::sampled_hermite(std::vector<double> xs, std::vector<double> ys,
                                 std::vector<double> slopes) {
  if (xs.size() != ys.size() || xs.size() != slopes.size() || xs.size() < 2)
    throw ConfigError("hermite profile needs matching xs, ys and slopes");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw ConfigError("sampled profile abscissae must be increasing");
  Profile p;
  p.kind_ = Interp::kHermite;
  p.xs_ = std::move(xs);
  p.ys_ = std::move(ys);
  p.slopes_ = std::move(slopes);
  return p;
}

double Profile::value(double x) const {
  if (expr_) return expr_->eval(x, 0.0);
  if (x <= xs_.front()) return kind_ == Interp::kLinear ? 0.0 : ys_.front();
  if (x >= xs_.back()) return kind_ == Interp::kLinear ? 0.0 : ys_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
  double hk = xs_[k + 1] - xs_[k];
  double t = (x - xs_[k]) / hk;
  if (kind_ == Interp::kLinear) return ys_[k] + t * (ys_[k + 1] - ys_[k]);
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  double h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t);
  double h11 = t * t * (t - 1);
  return h00 * ys_[k] + h10 * hk * slopes_[k] + h01 * ys_[k + 1] + h11 * hk * slopes_[k + 1];
}

double Profile::deriv(double x) const {
  if (expr_) return expr_->eval_d1(x, 0.0).dx;
  if (x <= xs_.front() || x >= xs_.back()) return 0.0;
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
  double hk = xs_[k + 1] - xs_[k];
  double t = (x - xs_[k]) / hk;
  if (kind_ == Interp::kLinear) return (ys_[k + 1] - ys_[k]) / hk;
  double g00 = (6 * t * t - 6 * t) / hk;
  double g10 = 3 * t * t - 4 * t + 1;
  double g01 = (6 * t - 6 * t * t) / hk;
  double g11 = 3 * t * t - 2 * t;
  return g00 * ys_[k] + g10 * slopes_[k] + g01 * ys_[k + 1] + g11 * slopes_[k + 1];
}

InitialData make_initial_data(const Expr& u0, const Expr& u1, double support) {
  if (!(support > 0)) throw ConfigError("support radius must be positive");
  return {Profile::from_expr(u0), Profile::from_expr(u1), support};
}

InitialData make_initial_data(Profile u0, Profile u1, double support) {
  if (!(support > 0)) throw ConfigError("support radius must be positive");
  return {std::move(u0), std::move(u1), support};
}

InitialData load_initial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial-data CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty initial-data CSV: " + path);
  // tolerate a UTF-8 BOM and whitespace in the header
  std::string header;
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c)) && static_cast<unsigned char>(c) < 0x80)
      header += c;
  if (header != "x,u0,u1")
    throw ConfigError("initial-data CSV must start with header 'x,u0,u1', got '" + line + "'");
  std::vector<double> xs, u0s, u1s;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    double vals[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ss, cell, ','))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
      try {
        vals[c] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    xs.push_back(vals[0]);
    u0s.push_back(vals[1]);
    u1s.push_back(vals[2]);
  }
  if (xs.size() < 2) throw ConfigError(path + ": need at least two sample rows");
  double support = std::max(std::abs(xs.front()), std::abs(xs.back()));
  return {Profile::sampled(xs, u0s, Profile::Interp::kMonotoneCubic),
          Profile::sampled(xs, u1s, Profile::Interp::kLinear), support};
}

std::pair<double, double> riemann_initial(const CoefficientSet& cs,
                                          const InitialData& d, double x) {
  double u0 = d.u0.value(x);
  double u0x = d.u0.deriv(x);
  double u1 = d.u1.value(x);
  SolverCoeffs sc = cs.derived_fast(x, u0);
  return {sc.alpha * u1 + sc.c2 * u0x, sc.alpha * u1 + sc.c1 * u0x};
}

BoundaryData boundary_gamma0(const CoefficientSet& cs, const InitialData& d,
                             int i_lo, int i_hi, double ds) {
  if (!(ds > 0) || i_hi <= i_lo) throw ConfigError("bad boundary grid");
  BoundaryData bd;
  bd.ds = ds;
  bd.i_lo = i_lo;
  bd.i_hi = i_hi;
  int n = bd.size();
  bd.u.resize(n);
  bd.l.resize(n);
  bd.m.resize(n);
  bd.h.resize(n);
  bd.g.resize(n);
  bd.p.resize(n);
  bd.q.resize(n);
  bd.x.resize(n);
  bd.t.assign(n, 0.0);

  double prev_density = 0.0;
  for (int k = 0; k < n; ++k) {
    double s = bd.s(k);
    double u0 = d.u0.value(s);
    double u0x = d.u0.deriv(s);
    double u1 = d.u1.value(s);
    SolverCoeffs sc = cs.derived_fast(s, u0);
    double R = sc.alpha * u1 + sc.c2 * u0x;
    double S = sc.alpha * u1 + sc.c1 * u0x;
    double h = 1.0 / (1.0 + R * R);
    double g = 1.0 / (1.0 + S * S);
    bd.u[k] = u0;
    bd.h[k] = h;
    bd.g[k] = g;
    bd.l[k] = R * h;
    bd.m[k] = S * g;
    bd.p[k] = 1.0 + R * R;
    bd.q[k] = 1.0 + S * S;
    bd.x[k] = s;

    double gam = cs.gamma().eval(s, u0);
    double density = sc.alpha * sc.alpha * u1 * u1 + gam * gam * u0x * u0x;
    if (k > 0) bd.e0 += 0.5 * (prev_density + density) * ds;
    prev_density = density;
  }
  return bd;
}

CompatibilityResiduals compatibility_residuals(const BoundaryData& bd,
                                               const CoefficientSet& cs) {
  int n = bd.size();
  CompatibilityResiduals res;
  res.r_u.assign(n, 0.0);
  res.r_x.assign(n, 0.0);
  res.r_t.assign(n, 0.0);
  for (int k = 1; k + 1 < n; ++k) {
    double inv2 = 1.0 / (2.0 * bd.ds);
    double du = (bd.u[k + 1] - bd.u[k - 1]) * inv2;
    double dx = (bd.x[k + 1] - bd.x[k - 1]) * inv2;
    double dt = (bd.t[k + 1] - bd.t[k - 1]) * inv2;
    SolverCoeffs sc = cs.derived_fast(bd.x[k], bd.u[k]);
    double inv_dc = sc.inv_dc;
    res.r_u[k] = du - (bd.p[k] * bd.l[k] - bd.q[k] * bd.m[k]) * inv_dc;
    res.r_x[k] = dx - (sc.c2 * bd.p[k] * bd.h[k] - sc.c1 * bd.q[k] * bd.g[k]) * inv_dc;
    res.r_t[k] = dt - sc.alpha * (bd.p[k] * bd.h[k] - bd.q[k] * bd.g[k]) * inv_dc;
    res.max_u = std::max(res.max_u, std::abs(res.r_u[k]));
    res.max_x = std::max(res.max_x, std::abs(res.r_x[k]));
    res.max_t = std::max(res.max_t, std::abs(res.r_t[k]));
  }
  return res;
}

double domain_margin(const CoefficientSet& cs, double T, double dx) {
  return 2.0 * T * cs.wave_speed_bound() / cs.bounds().alpha1 + 2.0 * dx;
}

}  // namespace vwave
