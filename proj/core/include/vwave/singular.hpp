#ifndef VWAVE_SINGULAR_HPP
#define VWAVE_SINGULAR_HPP

#include <string>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/state.hpp"

namespace vwave {

enum class SingularFamily { kBackward, kForward };  // h = 0 resp. g = 0

struct CurveVertex {
  double X, Y;  // lattice coordinates of the level crossing
  double x, t;  // mapped through the solved field
};

struct SingularCurve {
  SingularFamily family;
  std::vector<CurveVertex> pts;
};

// Marching-squares extraction of the zero level set of h or g, with a small
// positive level shift so grazing minima are caught. Curves are stitched into
// ordered polylines and mapped through (x, t).
std::vector<SingularCurve> zero_curves(const StateField& state, SingularFamily family,
                                       double eps_level = 1e-3);

enum class SingularType { kInterior, kEndpoint, kCrossing };

struct SingularWitness {
  double h = 0, g = 0;
  double l_X = 0, l_XX = 0, m_Y = 0, m_YY = 0;
  double lam_m_u = 0, lam_p_u = 0;
};

struct SingularPoint {
  double X, Y, x, t;
  SingularFamily family;
  SingularType type;
  SingularWitness witness;
};

struct ClassifyTols {
  double tol_hg = 1e-7;  // "= 0" threshold for h and g (10 x circle tolerance)
  double tol_c = 0;      // derivative threshold; 0 means use the grid step
};

// Types every curve vertex (interior by default), locates endpoint candidates
// at sign changes of l_X (resp. m_Y) along each curve, and reports curve
// crossings found by a bounding-box sweep over segment pairs.
std::vector<SingularPoint> classify(const StateField& state, const CoefficientSet& cs,
                                    const std::vector<SingularCurve>& curves,
                                    ClassifyTols tols = {});

struct GenericFlag {
  int i, j;
  int triple;  // index into the six forbidden value triples
  double v0, v1, v2;
  double x, t;
};

struct GenericReport {
  double tol_hg = 0, tol_c = 0;
  long flag_count = 0;
  std::vector<GenericFlag> flags;  // capped sample
  static const char* triple_name(int triple);
};

// Scans lattice nodes for the six forbidden degenerate triples:
//   (h, l_X, l_XX), (g, m_Y, m_YY), (h, g, l_X), (h, g, m_Y),
//   (h, d_u lam_-, l_X), (g, d_u lam_+, m_Y).
GenericReport generic_report(const StateField& state, const CoefficientSet& cs,
                             ClassifyTols tols = {});

void export_curves_csv(const std::vector<SingularCurve>& curves, const std::string& path);
void export_singular_json(const std::vector<SingularCurve>& curves,
                          const std::vector<SingularPoint>& points,
                          const GenericReport& rep, const std::string& path);

}  // namespace vwave

#endif
