#ifndef VWAVE_VARIATION_HPP
#define VWAVE_VARIATION_HPP

#include <string>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/goursat.hpp"
#include "vwave/initdata.hpp"
#include "vwave/physmap.hpp"
#include "vwave/state.hpp"

namespace vwave {

// First-order variations (U, L, M, H, G, P, Q, X, T) of the nine unknowns,
// on the same anti-diagonal layout as StateField.
struct PertNode {
  double U = 0, L = 0, M = 0, H = 0, G = 0, P = 0, Q = 0, X = 0, T = 0;
};

class PerturbationField {
 public:
  PerturbationField(GridSpec gs, int k_lo, int k_hi);

  const GridSpec& grid() const { return gs_; }
  int k_lo() const { return k_lo_; }
  int k_hi() const { return k_hi_; }
  bool has(int i, int j) const {
    int k = i + j;
    return k >= k_lo_ && k <= k_hi_ && i >= gs_.row_i_lo(k) && i <= gs_.row_i_hi(k);
  }
  const PertNode& at(int i, int j) const {
    int k = i + j;
    return rows_[k - k_lo_][i - gs_.row_i_lo(k)];
  }
  PertNode& at(int i, int j) {
    int k = i + j;
    return rows_[k - k_lo_][i - gs_.row_i_lo(k)];
  }

 private:
  GridSpec gs_;
  int k_lo_, k_hi_;
  std::vector<std::vector<PertNode>> rows_;
};

// A theta-parameterized family of solved states on one shared lattice.
struct PathOfSolutions {
  std::vector<double> thetas;       // uniform grid 0 = theta_0 < ... < theta_N = 1
  std::vector<InitialData> data;    // per node
  std::vector<StateField> states;   // per node, solved
  std::vector<PerturbationField> perts;  // fd_perturbation at every node
  GridSpec gs;
  std::string tag;  // "linear-RS" or "user"

  int n_nodes() const { return static_cast<int>(thetas.size()); }
};

// Connects dataA to dataB through linear blends of the Riemann data
//   R^theta = (1-theta) R_A + theta R_B  (same for S),
// recovering u0^theta by integrating u_x = (R - S)/(c2 - c1)(x, u) from the
// left far field (anchored at the blend of the endpoint constants) and
// setting u1^theta = (c2 S - c1 R)/(alpha (c2 - c1)). Endpoint nodes
// reproduce the inputs to round-off. n_theta is the number of theta
// intervals (must be even, >= 2).
PathOfSolutions linear_rs_path(const CoefficientSet& cs, const InitialData& dataA,
                               const InitialData& dataB, int n_theta, const GridSpec& gs,
                               const SolveOptions& opts = {});

// Solves a user-supplied list of data sets on a shared lattice.
PathOfSolutions make_path(const CoefficientSet& cs, std::vector<InitialData> data,
                          const GridSpec& gs, const SolveOptions& opts = {},
                          const std::string& tag = "user");

// Centered (interior) or one-sided (ends) theta-differences of the solved
// states, divided by the theta step.
PerturbationField fd_perturbation(const PathOfSolutions& path, int k);

// Physical tangent quantities on a slice (canonical gauge):
//   w = X - (c1/alpha) T,  z = X - (c2/alpha) T,  U as-is,
//   rhat/shat assembled division-free on smooth samples.
struct TangentSample {
  double w = 0, z = 0, U = 0, rhat = 0, shat = 0;
  bool singular = false;
};
struct PhysicalTangent {
  std::vector<TangentSample> samples;
};

PhysicalTangent physical_tangent(const StateField& state, const PerturbationField& pert,
                                 const TimeSlice& slice, const CoefficientSet& cs);

// Interpolates the perturbation at a slice sample's crossing edge.
PertNode pert_at_sample(const PerturbationField& pert, const SliceSample& s);

}  // namespace vwave

#endif
