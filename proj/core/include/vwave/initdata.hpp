#ifndef VWAVE_INITDATA_HPP
#define VWAVE_INITDATA_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/expr.hpp"

namespace vwave {

// A 1-D profile, either a closed-form expression of x or a sampled table.
// Sampled u0-type profiles use monotone cubic interpolation (no overshoot,
// keeps h in (0,1] downstream); u1-type profiles interpolate linearly and
// extend by zero. Expression profiles must not reference u.
class Profile {
 public:
  enum class Interp { kMonotoneCubic, kLinear, kHermite };

  static Profile from_expr(const Expr& e);
  static Profile sampled(std::vector<double> xs, std::vector<double> ys, Interp kind);
  // Cubic Hermite with caller-provided node slopes (no monotonicity limiter);
  // used for internally constructed path data where the slopes are exact.
  static Profile sampled_hermite(std::vector<double> xs, std::vector<double> ys,
                                 std::vector<double> slopes);

  double value(double x) const;
  double deriv(double x) const;
  bool is_expr() const { return expr_.has_value(); }

 private:
  Profile() = default;
  std::optional<Expr> expr_;
  std::vector<double> xs_, ys_, slopes_;
  Interp kind_ = Interp::kLinear;
};

// Initial data (u0, u1): u0 constant outside [-L, L], u1 zero outside.
struct InitialData {
  Profile u0, u1;
  double support = 1.0;  // L
};

InitialData make_initial_data(const Expr& u0, const Expr& u1, double support);
InitialData make_initial_data(Profile u0, Profile u1, double support);

// CSV import with required header row "x,u0,u1".
InitialData load_initial_csv(const std::string& path);

// Riemann variables of the data at a point:
//   R0 = alpha*u1 + c2*u0x,  S0 = alpha*u1 + c1*u0x, coefficients at (x, u0(x)).
std::pair<double, double> riemann_initial(const CoefficientSet& cs,
                                          const InitialData& d, double x);

// Data on the anti-diagonal X+Y=0, sampled at lattice points s_k = k*ds.
struct BoundaryData {
  double ds = 0;
  int i_lo = 0, i_hi = 0;  // s_k = k*ds for k in [i_lo, i_hi]
  std::vector<double> u, l, m, h, g, p, q, x, t;
  double e0 = 0;  // trapezoid of alpha^2 u1^2 + gamma^2 u0x^2 over the s-range

  int size() const { return i_hi - i_lo + 1; }
  double s(int idx) const { return (i_lo + idx) * ds; }
};

BoundaryData boundary_gamma0(const CoefficientSet& cs, const InitialData& d,
                             int i_lo, int i_hi, double ds);

// Centered-difference residuals of the boundary compatibility relations:
//   r_u = du/ds - (p l - q m)/(c2 - c1)
//   r_x = dx/ds - (c2 p h - c1 q g)/(c2 - c1)
//   r_t = dt/ds - alpha (p h - q g)/(c2 - c1)
// End entries are zero (no centered stencil there).
struct CompatibilityResiduals {
  std::vector<double> r_u, r_x, r_t;
  double max_u = 0, max_x = 0, max_t = 0;
};
CompatibilityResiduals compatibility_residuals(const BoundaryData& bd,
                                               const CoefficientSet& cs);

// Light-cone margin: the solved region keeps the time-T slice away from the
// data truncation, 2*T*max(|c1|,c2)/alpha1 + 2*dx with the bound-implied speeds.
double domain_margin(const CoefficientSet& cs, double T, double dx);

}  // namespace vwave

#endif
