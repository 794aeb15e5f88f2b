#ifndef VWAVE_TEST_SUPPORT_HPP
#define VWAVE_TEST_SUPPORT_HPP

#include <cmath>
#include <random>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/goursat.hpp"
#include "vwave/initdata.hpp"
#include "vwave/runner.hpp"

namespace vwtest {

using namespace vwave;

// alpha = 1, beta = 0, gamma = 1 with snug declared bounds
inline CoefficientSet linear_wave_cs() {
  return CoefficientSet(parse_expr("1"), parse_expr("0"), parse_expr("1"),
                        CoeffBounds{0.9, 1.1, 0.1, 0.9, 1.1}, DomainRect{-20, 20, -6, 6});
}

// alpha = 1, beta = 0, gamma = sqrt(2 + sin u): the generic nonlinear case
inline CoefficientSet sine_speed_cs() {
  return CoefficientSet(parse_expr("1"), parse_expr("0"), parse_expr("sqrt(2 + sin(u))"),
                        CoeffBounds{0.9, 1.1, 0.1, 1.0, 1.8}, DomainRect{-20, 20, -6, 6});
}

inline InitialData gaussian_data(double amp = 1.0, double support = 4.0) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g*exp(-x^2)", amp);
  return make_initial_data(parse_expr(buf), parse_expr("0"), support);
}

inline InitialData velocity_bump_data(double amp = 1.0, double support = 3.0) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g*exp(-2*x^2)", amp);
  return make_initial_data(parse_expr("0"), parse_expr(buf), support);
}

// steep profile that drives h toward zero before t = 1 for sine_speed_cs
inline InitialData steep_data() {
  return make_initial_data(parse_expr("2*exp(-16*x^2)"), parse_expr("0"), 1.0);
}

inline StateField solve_for(const CoefficientSet& cs, const InitialData& d, double dx,
                            double T, int threads = 0) {
  SolverBlock sb;
  sb.threads = threads;
  PreparedRun pr = prepare_run(cs, d, dx, T, sb);
  BoundaryData bd = boundary_gamma0(cs, d, -pr.n_s, pr.n_s, dx);
  return solve(bd, cs, pr.gs, pr.opts);
}

inline std::mt19937 rng(unsigned seed = 20240817u) { return std::mt19937(seed); }

}  // namespace vwtest

#endif
