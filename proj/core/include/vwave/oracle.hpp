#ifndef VWAVE_ORACLE_HPP
#define VWAVE_ORACLE_HPP

#include <span>
#include <utility>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/initdata.hpp"

namespace vwave {

// Desk-scale ground-truth generators. Nothing here touches the solver, so
// cross-checks against it are genuinely independent.
namespace oracle {

// Closed-form solution of the constant-coefficient problem,
//   u(x,t) = F(x - lam_+ t) + G(x - lam_- t),
// with F', G' resolved from the initial traces. Throws
// NonConstantCoefficientsError when any coefficient depends on (x, u).
double dalembert(const CoefficientSet& cs, const InitialData& d, double x, double t);

// Finite-difference residual of the constant-coefficient equation
// alpha^2 u_tt + 2 beta u_tx - gamma^2 u_xx at (x, t), using 4th-order
// central stencils of step h on the closed form above.
double dalembert_pde_residual(const CoefficientSet& cs, const InitialData& d,
                              double x, double t, double h = 0.02);

struct AtomicMeasure {
  std::vector<std::pair<double, double>> atoms;  // (position, mass >= 0)
};

// Bounded-Lipschitz distance between small atomic measures by dense grid
// search over the breakpoint values (step `resolution`, DP-accelerated so the
// result equals exhaustive search over the grid) followed by a coordinate
// ascent polish. Documented exactness gap <= 1e-3 on unit-scale masses.
double bl_bruteforce(const AtomicMeasure& a, const AtomicMeasure& b,
                     double resolution = 1e-3);

// Least-squares slope of log(e) against log(h).
double convergence_order(std::span<const std::pair<double, double>> h_and_err);

}  // namespace oracle
}  // namespace vwave

#endif
