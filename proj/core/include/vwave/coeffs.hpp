#ifndef VWAVE_COEFFS_HPP
#define VWAVE_COEFFS_HPP

#include <map>
#include <string>
#include <vector>

#include "vwave/expr.hpp"

namespace vwave {

// Declared structural bounds: 0 < alpha1 <= alpha <= alpha2,
// |beta| <= beta2, 0 < gamma1 <= gamma <= gamma2.
struct CoeffBounds {
  double alpha1 = 0.5, alpha2 = 2.0;
  double beta2 = 1.0;
  double gamma1 = 0.5, gamma2 = 2.0;
};

// Rectangle on which the declared bounds are audited by sampling.
struct DomainRect {
  double x_lo = -10, x_hi = 10;
  double u_lo = -10, u_hi = 10;
};

// Everything the first-order system needs at one point (x, u), including the
// second eigenvalue partials used by the singularity classifier.
struct DerivedCoeffs {
  double alpha, beta, gamma;
  double lam_m, lam_p;          // eigenvalues, lam_m < 0 < lam_p
  double c1, c2;                // wave speeds alpha*lam_-, alpha*lam_+
  double a1, a2, b, d1, d2;     // source coefficients of the R-S system
  double alpha_x, alpha_u;
  double c1_x, c1_u, c2_x, c2_u;
  double lam_m_u, lam_p_u;
  double lam_m_uu, lam_p_uu;
  double lam_m_ux, lam_p_ux;
};

// Slim variant for the solver hot path (first partials only).
struct SolverCoeffs {
  double alpha, c1, c2;
  double a1, a2, b, d1, d2;
  double et;      // (c1*c2_x - c2*c1_x) / (2(c2-c1))
  double inv_dc;  // 1 / (c2 - c1)
  double alpha_x, c1_x, c2_x;
};

class CoefficientSet {
 public:
  CoefficientSet(Expr alpha, Expr beta, Expr gamma,
                 CoeffBounds bounds = {}, DomainRect domain = {});

  const Expr& alpha() const { return alpha_; }
  const Expr& beta() const { return beta_; }
  const Expr& gamma() const { return gamma_; }
  const CoeffBounds& bounds() const { return bounds_; }
  const DomainRect& domain() const { return domain_; }

  bool constant() const { return constant_; }

  // Upper bound on max(|c1|, c2) implied by the declared bounds.
  double wave_speed_bound() const;
  // Lower bound on c2 - c1 implied by the declared bounds (2*gamma1).
  double speed_gap_bound() const;

  DerivedCoeffs derived_at(double x, double u) const;
  SolverCoeffs derived_fast(double x, double u) const;

 private:
  Expr alpha_, beta_, gamma_;
  CoeffBounds bounds_;
  DomainRect domain_;
  bool constant_;
  SolverCoeffs cached_{};  // valid when constant_
};

struct ConditionViolation {
  double x, u;
  std::string kind;  // e.g. "alpha_low", "gamma_high", "gencon_minus"
  double value;
};

// Result of sampling the structural conditions over the validation domain.
// Violations are data, not errors; suprema are reported for the user to judge.
struct ConditionReport {
  int n_samples = 0;
  double tol = 1e-10;
  long total_bound_violations = 0;
  long total_generic_flags = 0;
  std::vector<ConditionViolation> bound_violations;  // capped sample
  std::vector<ConditionViolation> generic_flags;     // capped sample
  double sup_grad_alpha = 0, sup_grad_beta = 0, sup_grad_gamma = 0;
  double sup_abs_c = 0;    // sampled sup of max(|c1|, c2)
  double min_speed_gap = 0;

  bool bounds_ok() const { return total_bound_violations == 0; }
  bool generic_ok() const { return total_generic_flags == 0; }
};

// Samples an n x n grid over the validation rectangle and audits the
// declared bounds, gradient finiteness and the generic eigenvalue condition
// (a flag is raised where d_u lambda, d_uu lambda and d_ux lambda all vanish
// within `tol`).
ConditionReport validate_conditions(const CoefficientSet& cs, int n_samples,
                                    double tol = 1e-10);

// Named builtin coefficient families for reproducible experiment configs.
// Names: "constant" (alpha, beta, gamma), "oseen_franck" (K1, K3),
// "poly_u" (c0, c1, c2).
struct CoefficientExprs {
  Expr alpha, beta, gamma;
};
CoefficientExprs builtin_coefficients(const std::string& name,
                                      const std::map<std::string, double>& params);
std::vector<std::string> builtin_coefficient_names();

}  // namespace vwave

#endif
