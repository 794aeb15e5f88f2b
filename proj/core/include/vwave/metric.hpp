#ifndef VWAVE_METRIC_HPP
#define VWAVE_METRIC_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/initdata.hpp"
#include "vwave/oracle.hpp"
#include "vwave/physmap.hpp"
#include "vwave/variation.hpp"

namespace vwave {

// Term weights kappa_0..kappa_6 of the transport norm. The default follows
// the delta-power template (1, d, d^4, d^2, d^2, d^3, d^4) with d = 0.1.
struct MetricWeights {
  std::array<double, 7> kappa{};
  double delta = 0.1;

  static MetricWeights from_delta(double delta);
  static MetricWeights from_kappa(const std::array<double, 7>& kappa);
  // true when kappa matches the delta-power template (relative tol 1e-12)
  bool follows_template() const;
  void validate() const;  // throws ConfigError unless all positive
};

// Interaction potentials along a slice: Wm = 1 + S^2-mass to the left,
// Wp = 1 + R^2-mass to the right, assembled division-free.
struct PotentialField {
  std::vector<double> Wm, Wp;
};
PotentialField potentials(const TimeSlice& slice);

// The decay-budget integrals G1, G2 over a slice (integrands clipped at
// singular samples; R, S capped at r_cap there).
std::pair<double, double> interaction_integrals(const TimeSlice& slice,
                                                const CoefficientSet& cs,
                                                double r_cap = 1e6);

struct NormBreakdown {
  std::array<double, 7> term_minus{};  // integrals of |J_k| Wm dX
  std::array<double, 7> term_plus{};   // integrals of |H_k| Wp (-dY)
  double weighted_total = 0;
  std::string gauge;  // "canonical-XY" or "physical-x"

  double recompute_total(const MetricWeights& w) const;
};

// Transport norm of a tangent field along a slice, assembled from the
// transformed-coordinate integrands (division-free, valid through
// singularities).
NormBreakdown tangent_norm(const StateField& state, const PerturbationField& pert,
                           const TimeSlice& slice, const MetricWeights& weights,
                           const CoefficientSet& cs);

// The same norm assembled from the physical-coordinate integrands; refuses
// slices with singular samples.
NormBreakdown tangent_norm_physical(const TimeSlice& slice, const PhysicalTangent& tangent,
                                    const MetricWeights& weights, const CoefficientSet& cs);

// Composite-Simpson length of the path's tangent norms at the level curve
// t = tau. An upper bound: no relabeling optimization is attempted.
double path_length(const PathOfSolutions& path, double tau, const MetricWeights& weights,
                   const CoefficientSet& cs);

struct LipschitzSeries {
  std::vector<std::pair<double, double>> lengths;  // (tau, path length)
  double ratio = 0;                                // max length / length(0)
};
LipschitzSeries lipschitz_ratio(const PathOfSolutions& path, const std::vector<double>& taus,
                                const MetricWeights& weights, const CoefficientSet& cs,
                                double eps_floor = 1e-12);

// L1 distance of u between two slices on their common x-range.
double l1_dist(const TimeSlice& a, const TimeSlice& b);

// H1 + W(1,1) + L1 + L2 norm sum of the data differences, by quadrature.
double sobolev_bound(const InitialData& a, const InitialData& b, const CoefficientSet& cs);

// Bounded-Lipschitz (Kantorovich-Rubinstein) distance between the energy
// measures of two slices, discretized per cell onto the union grid and
// solved exactly as a chain-structured linear program.
double kr_dist(const TimeSlice& a, const TimeSlice& b, const CoefficientSet& cs);
// Same LP on explicit atomic measures (exact; used against the brute-force oracle).
double kr_dist(const oracle::AtomicMeasure& a, const oracle::AtomicMeasure& b);

// Energy measure of a slice as per-cell atoms at segment midpoints.
oracle::AtomicMeasure slice_energy_atoms(const TimeSlice& slice, const CoefficientSet& cs);

// Admissible comparison constants assembled from the declared bounds,
// the weights and sampled coefficient suprema:
//   l1_dist   <= C1 * path_length
//   kr_dist   <= C2 * path_length
//   sobolev   >= path_length / C3   (canonical path at tau = 0)
struct ComparisonConstants {
  double C1 = 0, C2 = 0, C3 = 0;
};
ComparisonConstants comparison_constants(const CoefficientSet& cs, const MetricWeights& w,
                                         double total_energy);

}  // namespace vwave

#endif
