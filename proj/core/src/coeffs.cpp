#include "vwave/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>

#include "vwave/errors.hpp"

namespace vwave {

namespace {

constexpr std::size_t kViolationCap = 4096;

double bound_param(const std::map<std::string, double>& params,
                   const std::string& key, bool required, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (required) throw ConfigError("builtin coefficient family: missing parameter '" + key + "'");
    return fallback;
  }
  return it->second;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CoefficientSet::CoefficientSet(Expr alpha, Expr beta, Expr gamma,
                               CoeffBounds bounds, DomainRect domain)
    : alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      gamma_(std::move(gamma)),
      bounds_(bounds),
      domain_(domain) {
  if (!(bounds_.alpha1 > 0) || !(bounds_.alpha2 >= bounds_.alpha1))
    throw ConfigError("coefficient bounds must satisfy 0 < alpha1 <= alpha2");
  if (!(bounds_.gamma1 > 0) || !(bounds_.gamma2 >= bounds_.gamma1))
    throw ConfigError("coefficient bounds must satisfy 0 < gamma1 <= gamma2");
  if (!(bounds_.beta2 >= 0))
    throw ConfigError("coefficient bounds must satisfy beta2 >= 0");
  constant_ = alpha_.is_constant() && beta_.is_constant() && gamma_.is_constant();
  if (constant_) cached_ = derived_fast(0.0, 0.0);
}

double CoefficientSet::wave_speed_bound() const {
  const CoeffBounds& b = bounds_;
  return (b.beta2 + std::sqrt(b.beta2 * b.beta2 +
                              b.alpha2 * b.alpha2 * b.gamma2 * b.gamma2)) / b.alpha1;
}

double CoefficientSet::speed_gap_bound() const { return 2.0 * bounds_.gamma1; }

DerivedCoeffs CoefficientSet::derived_at(double x, double u) const {
  Dual2 A = alpha_.eval_d2(x, u);
  Dual2 B = beta_.eval_d2(x, u);
  Dual2 G = gamma_.eval_d2(x, u);

  Dual2 disc = B * B + A * A * G * G;
  if (!(disc.v > 0.0))
    throw NumericalError("non-hyperbolic point: beta^2 + alpha^2 gamma^2 <= 0 "
                         "(inconsistent with the declared bounds)");
  Dual2 s = vw_sqrt(disc);
  Dual2 A2 = A * A;
  Dual2 lam_m = (B - s) / A2;
  Dual2 lam_p = (B + s) / A2;
  Dual2 c1 = A * lam_m;
  Dual2 c2 = A * lam_p;

  DerivedCoeffs d{};
  d.alpha = A.v;
  d.beta = B.v;
  d.gamma = G.v;
  d.lam_m = lam_m.v;
  d.lam_p = lam_p.v;
  d.c1 = c1.v;
  d.c2 = c2.v;
  d.alpha_x = A.dx;
  d.alpha_u = A.du;
  d.c1_x = c1.dx;
  d.c1_u = c1.du;
  d.c2_x = c2.dx;
  d.c2_u = c2.du;
  d.lam_m_u = lam_m.du;
  d.lam_p_u = lam_p.du;
  d.lam_m_uu = lam_m.duu;
  d.lam_p_uu = lam_p.duu;
  d.lam_m_ux = lam_m.dxu;
  d.lam_p_ux = lam_p.dxu;

  double dc = d.c2 - d.c1;
  if (!(d.c1 < 0.0) || !(d.c2 > 0.0) || !(dc > 0.0))
    throw NumericalError("wave speeds lost their sign: c1 < 0 < c2 violated");
  d.a1 = (d.c1 * d.alpha_u - d.alpha * d.c1_u) / (2.0 * d.alpha * dc);
  d.a2 = (d.c2 * d.alpha_u - d.alpha * d.c2_u) / (2.0 * d.alpha * dc);
  d.b = (d.alpha * (d.c1_x - d.c2_x) + (d.c1 - d.c2) * d.alpha_x) / (2.0 * d.alpha * dc);
  double common = (d.c2 * d.c1_x - d.c1 * d.c2_x) / (2.0 * dc);
  d.d1 = common + (d.alpha * d.c1_x - d.c1 * d.alpha_x) / (2.0 * d.alpha);
  d.d2 = common + (d.alpha * d.c2_x - d.c2 * d.alpha_x) / (2.0 * d.alpha);
  return d;
}

SolverCoeffs CoefficientSet::derived_fast(double x, double u) const {
  if (constant_ && cached_.inv_dc != 0.0) return cached_;

  Dual1 A = alpha_.eval_d1(x, u);
  Dual1 B = beta_.eval_d1(x, u);
  Dual1 G = gamma_.eval_d1(x, u);

  Dual1 disc = B * B + A * A * G * G;
  if (!(disc.v > 0.0))
    throw NumericalError("non-hyperbolic point: beta^2 + alpha^2 gamma^2 <= 0");
  Dual1 s = vw_sqrt(disc);
  Dual1 c1 = (B - s) / A;
  Dual1 c2 = (B + s) / A;

  SolverCoeffs sc{};
  sc.alpha = A.v;
  sc.c1 = c1.v;
  sc.c2 = c2.v;
  sc.alpha_x = A.dx;
  sc.c1_x = c1.dx;
  sc.c2_x = c2.dx;
  double dc = sc.c2 - sc.c1;
  if (!(sc.c1 < 0.0) || !(sc.c2 > 0.0) || !(dc > 0.0))
    throw NumericalError("wave speeds lost their sign: c1 < 0 < c2 violated");
  sc.inv_dc = 1.0 / dc;
  sc.a1 = (sc.c1 * A.du - sc.alpha * c1.du) * sc.inv_dc / (2.0 * sc.alpha);
  sc.a2 = (sc.c2 * A.du - sc.alpha * c2.du) * sc.inv_dc / (2.0 * sc.alpha);
  sc.b = (sc.alpha * (c1.dx - c2.dx) + (sc.c1 - sc.c2) * A.dx) * sc.inv_dc / (2.0 * sc.alpha);
  double common = (sc.c2 * c1.dx - sc.c1 * c2.dx) * sc.inv_dc / 2.0;
  sc.d1 = common + (sc.alpha * c1.dx - sc.c1 * A.dx) / (2.0 * sc.alpha);
  sc.d2 = common + (sc.alpha * c2.dx - sc.c2 * A.dx) / (2.0 * sc.alpha);
  sc.et = (sc.c1 * c2.dx - sc.c2 * c1.dx) * sc.inv_dc / 2.0;
  return sc;
}

ConditionReport validate_conditions(const CoefficientSet& cs, int n_samples, double tol) {
  if (n_samples < 2) throw ConfigError("validate_conditions needs n_samples >= 2 per axis");

  ConditionReport rep;
  rep.n_samples = n_samples;
  rep.tol = tol;
  rep.min_speed_gap = std::numeric_limits<double>::infinity();

  const DomainRect& dom = cs.domain();
  const CoeffBounds& bd = cs.bounds();
  double hx = (dom.x_hi - dom.x_lo) / (n_samples - 1);
  double hu = (dom.u_hi - dom.u_lo) / (n_samples - 1);

  auto push = [](std::vector<ConditionViolation>& vec, long& total,
                 double x, double u, const char* kind, double value) {
    ++total;
    if (vec.size() < kViolationCap) vec.push_back({x, u, kind, value});
  };

  for (int ix = 0; ix < n_samples; ++ix) {
    double x = dom.x_lo + ix * hx;
    for (int iu = 0; iu < n_samples; ++iu) {
      double u = dom.u_lo + iu * hu;
      DerivedCoeffs d;
      try {
        d = cs.derived_at(x, u);
      } catch (const Error&) {
        push(rep.bound_violations, rep.total_bound_violations, x, u, "eval_error",
             std::numeric_limits<double>::quiet_NaN());
        continue;
      }

      if (d.alpha < bd.alpha1) push(rep.bound_violations, rep.total_bound_violations, x, u, "alpha_low", d.alpha);
      if (d.alpha > bd.alpha2) push(rep.bound_violations, rep.total_bound_violations, x, u, "alpha_high", d.alpha);
      if (std::abs(d.beta) > bd.beta2) push(rep.bound_violations, rep.total_bound_violations, x, u, "beta_abs", d.beta);
      if (d.gamma < bd.gamma1) push(rep.bound_violations, rep.total_bound_violations, x, u, "gamma_low", d.gamma);
      if (d.gamma > bd.gamma2) push(rep.bound_violations, rep.total_bound_violations, x, u, "gamma_high", d.gamma);

      Dual1 A = cs.alpha().eval_d1(x, u);
      Dual1 B = cs.beta().eval_d1(x, u);
      Dual1 G = cs.gamma().eval_d1(x, u);
      double ga = std::hypot(A.dx, A.du);
      double gb = std::hypot(B.dx, B.du);
      double gg = std::hypot(G.dx, G.du);
      if (!std::isfinite(ga) || !std::isfinite(gb) || !std::isfinite(gg))
        push(rep.bound_violations, rep.total_bound_violations, x, u, "nonfinite_grad", 0.0);
      rep.sup_grad_alpha = std::max(rep.sup_grad_alpha, ga);
      rep.sup_grad_beta = std::max(rep.sup_grad_beta, gb);
      rep.sup_grad_gamma = std::max(rep.sup_grad_gamma, gg);
      rep.sup_abs_c = std::max({rep.sup_abs_c, -d.c1, d.c2});
      rep.min_speed_gap = std::min(rep.min_speed_gap, d.c2 - d.c1);

      if (std::abs(d.lam_m_u) <= tol && std::abs(d.lam_m_uu) <= tol && std::abs(d.lam_m_ux) <= tol)
        push(rep.generic_flags, rep.total_generic_flags, x, u, "gencon_minus", d.lam_m_u);
      if (std::abs(d.lam_p_u) <= tol && std::abs(d.lam_p_uu) <= tol && std::abs(d.lam_p_ux) <= tol)
        push(rep.generic_flags, rep.total_generic_flags, x, u, "gencon_plus", d.lam_p_u);
    }
  }
  return rep;
}

CoefficientExprs builtin_coefficients(const std::string& name,
                                      const std::map<std::string, double>& params) {
  if (name == "constant") {
    double a = bound_param(params, "alpha", false, 1.0);
    double b = bound_param(params, "beta", false, 0.0);
    double g = bound_param(params, "gamma", false, 1.0);
    return {parse_expr(num(a)), parse_expr(num(b)), parse_expr(num(g))};
  }
  if (name == "oseen_franck") {
    double k1 = bound_param(params, "K1", true, 0.0);
    double k3 = bound_param(params, "K3", true, 0.0);
    if (k1 <= 0 || k3 <= 0) throw ConfigError("oseen_franck needs K1 > 0 and K3 > 0");
    return {parse_expr("1"), parse_expr("0"),
            parse_expr("sqrt(" + num(k1) + "*cos(u)^2 + " + num(k3) + "*sin(u)^2)")};
  }
  if (name == "poly_u") {
    double c0 = bound_param(params, "c0", true, 0.0);
    double c1 = bound_param(params, "c1", false, 0.0);
    double c2 = bound_param(params, "c2", false, 0.0);
    return {parse_expr("1"), parse_expr("0"),
            parse_expr(num(c0) + " + " + num(c1) + "*u + " + num(c2) + "*u^2")};
  }
  throw ConfigError("unknown builtin coefficient family '" + name + "'");
}

std::vector<std::string> builtin_coefficient_names() {
  return {"constant", "oseen_franck", "poly_u"};
}

}  // namespace vwave
