#ifndef VWAVE_GOURSAT_HPP
#define VWAVE_GOURSAT_HPP

#include <limits>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/initdata.hpp"
#include "vwave/state.hpp"

namespace vwave {

struct SolveOptions {
  int corrector_iters = 3;
  bool renormalize = true;
  // Marching stops after the first anti-diagonal whose minimum t exceeds this.
  double t_stop = std::numeric_limits<double>::infinity();
  int threads = 0;  // 0 = use hardware concurrency (capped at 8)
  double divergence_factor = 4.0;
};

// Right-hand sides of the characteristic system at one node.
struct NodeRhs {
  double lY, hY, pY;       // Y-direction unknowns
  double mX, gX, qX;       // X-direction unknowns
  double uX, xX, tX;       // X-direction transport of u, x, t
  double uY, xY, tY;       // Y-direction audit equations
};

NodeRhs node_rhs(const StateNode& n, const SolverCoeffs& c);

// Projects (a, c - 1/2) onto the circle of radius 1/2 centered at (0, 1/2).
// Returns the pre-projection drift |r - 1/2|, or -1 if the point coincides
// with the center (projection undefined; inputs left unchanged).
double circle_renormalize(double& a, double& c);

struct CellResult {
  StateNode node;
  NodeRhs rhs;                       // at the final node state
  double drift = 0;                  // max circle drift seen in this update
  double res_u = 0, res_x = 0, res_t = 0;  // trapezoid residuals of the Y-equations
  bool renorm_failed = false;
};

// One trapezoidal predictor-corrector update from solved west/south neighbors.
CellResult cell_update(const StateNode& west, const NodeRhs& west_rhs,
                       const StateNode& south, const NodeRhs& south_rhs,
                       const CoefficientSet& cs, double dx,
                       const SolveOptions& opts, int i, int j);

// Marches the anti-diagonals k = 1, 2, ... of gs from gamma_0 data.
// The boundary nodes must coincide with the lattice diagonal i + j = 0.
StateField solve(const BoundaryData& bd, const CoefficientSet& cs,
                 const GridSpec& gs, const SolveOptions& opts = {});

// Centered-difference audit of the cross-derivative identity and the
// Y-direction transport equations; entries are zero on non-interior nodes.
struct ResidualFields {
  int k_lo = 0, k_hi = 0;
  std::vector<std::vector<double>> cross, res_u, res_x, res_t;  // row-aligned
  double max_cross = 0, max_u = 0, max_x = 0, max_t = 0;
  int argmax_cross_i = 0, argmax_cross_j = 0;
};
ResidualFields consistency_residuals(const StateField& state, const CoefficientSet& cs);

}  // namespace vwave

#endif
