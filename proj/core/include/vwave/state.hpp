#ifndef VWAVE_STATE_HPP
#define VWAVE_STATE_HPP

#include <algorithm>
#include <string>
#include <vector>

namespace vwave {

// Uniform characteristic lattice: node (i, j) sits at (X, Y) = (i*dx, j*dx).
struct GridSpec {
  double dx = 0.01;
  int i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;

  double X(int i) const { return i * dx; }
  double Y(int j) const { return j * dx; }
  int k_min() const { return i_lo + j_lo; }
  int k_max() const { return i_hi + j_hi; }
  // i-range of the anti-diagonal i + j = k inside the index box
  int row_i_lo(int k) const { return std::max(i_lo, k - j_hi); }
  int row_i_hi(int k) const { return std::min(i_hi, k - j_lo); }
  int row_width(int k) const { return row_i_hi(k) - row_i_lo(k) + 1; }
  bool contains(int i, int j) const {
    return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
  }

  // Square box [-n, n]^2 whose anti-diagonal carries the boundary data.
  static GridSpec square(double dx, int n) { return {dx, -n, n, -n, n}; }
};

struct StateNode {
  double u = 0, l = 0, m = 0, h = 1, g = 1, p = 1, q = 1, x = 0, t = 0;
  bool solved = false;
};

// The nine unknowns on the lattice, stored by anti-diagonals. Rows are
// allocated for k in [k_lo, k_hi]; within a row, position 0 corresponds to
// i = grid().row_i_lo(k). Immutable after solve; shareable across threads.
class StateField {
 public:
  StateField(GridSpec gs, int k_lo, int k_hi);

  const GridSpec& grid() const { return gs_; }
  int k_lo() const { return k_lo_; }
  int k_hi() const { return k_hi_; }

  bool has(int i, int j) const {
    int k = i + j;
    return k >= k_lo_ && k <= k_hi_ && i >= gs_.row_i_lo(k) && i <= gs_.row_i_hi(k);
  }
  bool solved(int i, int j) const { return has(i, j) && at(i, j).solved; }

  const StateNode& at(int i, int j) const {
    int k = i + j;
    return rows_[k - k_lo_][i - gs_.row_i_lo(k)];
  }
  StateNode& at(int i, int j) {
    int k = i + j;
    return rows_[k - k_lo_][i - gs_.row_i_lo(k)];
  }

  std::vector<StateNode>& row(int k) { return rows_[k - k_lo_]; }
  const std::vector<StateNode>& row(int k) const { return rows_[k - k_lo_]; }

  // Drops rows above k_new_hi (used when marching stops early).
  void truncate(int k_new_hi);

  // ---- run metadata / solve diagnostics ----
  double e0 = 0;             // energy of the boundary data
  double covered_time = 0;   // max over rows of (min t on the row)
  double max_circle_drift = 0;
  long renorm_failures = 0;
  double max_res_u = 0, max_res_x = 0, max_res_t = 0;  // trapezoid Y-audit
  double min_h = 1, min_g = 1;

 private:
  GridSpec gs_;
  int k_lo_, k_hi_;
  std::vector<std::vector<StateNode>> rows_;
};

// Plain-text persistence: CSV body (i,j,X,Y,u,l,m,h,g,p,q,x,t) plus a JSON
// side-car with the grid spec and the coefficient config hash.
void export_state_csv(const StateField& state, const std::string& csv_path,
                      const std::string& json_path, const std::string& coeff_hash);
StateField import_state_csv(const std::string& csv_path, const std::string& json_path);

}  // namespace vwave

#endif
