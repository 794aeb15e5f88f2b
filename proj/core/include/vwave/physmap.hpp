#ifndef VWAVE_PHYSMAP_HPP
#define VWAVE_PHYSMAP_HPP

#include <span>
#include <string>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/state.hpp"

namespace vwave {

struct SliceSample {
  int col_i = 0;     // lattice column
  int edge_j = 0;    // crossing edge between (col_i, edge_j) and (col_i, edge_j + 1)
  double frac = 0;   // interpolation weight toward edge_j + 1
  double X = 0, Y = 0;
  double u = 0, l = 0, m = 0, h = 1, g = 1, p = 1, q = 1, x = 0;
  bool singular = false;  // h or g below eps_sing
};

// The level curve t = tau, sampled once per lattice column, ordered by
// increasing X (so Y is nonincreasing and x nondecreasing along the slice).
struct TimeSlice {
  double tau = 0;
  double eps_sing = 1e-3;
  double e0 = 0;  // initial energy inherited from the parent state
  std::vector<SliceSample> samples;

  std::size_t size() const { return samples.size(); }
  bool any_singular() const;
  // (1 - h)/h and (1 - g)/g, capped at `cap` on singular samples.
  double R2(std::size_t k, double cap = 1e12) const;
  double S2(std::size_t k, double cap = 1e12) const;
};

TimeSlice extract_slice(const StateField& state, double tau, double eps_sing = 1e-3);

struct EnergyReport {
  double tau = 0;
  double E_minus = 0, E_plus = 0, total = 0;
  double E0 = 0;     // quadrature of the initial energy density
  double drift = 0;  // (total - E0) / E0
  double mass_R2 = 0, mass_S2 = 0;  // plain R^2 dx and S^2 dx masses
};

// Trapezoid integrals of the division-free densities (1-h)p dX and
// (1-g)q (-dY), weighted by the direction factors -c1/(c2-c1), c2/(c2-c1).
EnergyReport energy(const TimeSlice& slice, const CoefficientSet& cs);

// Monotone linear interpolation of u along the slice; at x-ties (singular
// segments) the common u value is used. Queries must lie inside
// [x_first, x_last].
std::vector<double> sample_u(const TimeSlice& slice, std::span<const double> xs);

void export_slice_csv(const TimeSlice& slice, const std::string& path, double r2_cap = 1e12);

}  // namespace vwave

#endif
