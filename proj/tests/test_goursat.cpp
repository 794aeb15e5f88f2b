#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "test_support.hpp"
#include "vwave/errors.hpp"
#include "vwave/goursat.hpp"
#include "vwave/oracle.hpp"
#include "vwave/physmap.hpp"

using namespace vwave;

TEST_CASE("zero data: exact closed form on a 200x200 box") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData zero = make_initial_data(parse_expr("0"), parse_expr("0"), 1.0);
  double dx = 0.02;
  int n = 100;
  GridSpec gs = GridSpec::square(dx, n);
  BoundaryData bd = boundary_gamma0(cs, zero, -n, n, dx);
  StateField state = solve(bd, cs, gs);

  double max_err = 0;
  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      int j = k - i;
      const StateNode& nd = state.at(i, j);
      max_err = std::max(max_err, std::abs(nd.u));
      max_err = std::max(max_err, std::abs(nd.l));
      max_err = std::max(max_err, std::abs(nd.m));
      max_err = std::max(max_err, std::abs(nd.h - 1.0));
      max_err = std::max(max_err, std::abs(nd.g - 1.0));
      max_err = std::max(max_err, std::abs(nd.p - 1.0));
      max_err = std::max(max_err, std::abs(nd.q - 1.0));
      max_err = std::max(max_err, std::abs(nd.x - 0.5 * (gs.X(i) - gs.Y(j))));
      max_err = std::max(max_err, std::abs(nd.t - 0.5 * (gs.X(i) + gs.Y(j))));
    }
  }
  CHECK(max_err <= 1e-13);
}

TEST_CASE("constant data: translation invariance in u") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData c = make_initial_data(parse_expr("0.7"), parse_expr("0"), 1.0);
  double dx = 0.05;
  int n = 40;
  GridSpec gs = GridSpec::square(dx, n);
  BoundaryData bd = boundary_gamma0(cs, c, -n, n, dx);
  StateField state = solve(bd, cs, gs);
  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      const StateNode& nd = state.at(i, k - i);
      CHECK(std::abs(nd.u - 0.7) <= 1e-13);
      CHECK(std::abs(nd.h - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("gaussian linear wave converges to the d'Alembert oracle at order 2") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData g = vwtest::gaussian_data();
  double T = 1.0;
  std::vector<std::pair<double, double>> errs;
  for (double dx : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    StateField state = vwtest::solve_for(cs, g, dx, T);
    TimeSlice slice = extract_slice(state, T);
    double err = 0;
    for (const SliceSample& s : slice.samples)
      err = std::max(err, std::abs(s.u - oracle::dalembert(cs, g, s.x, T)));
    errs.push_back({dx, err});
  }
  double order = oracle::convergence_order(errs);
  CHECK(order > 1.8);
  CHECK(order < 2.3);
  CHECK(errs.back().second < 1e-3);
}

TEST_CASE("Y-direction residual of u halves ~4x when the step halves") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData g = vwtest::gaussian_data();
  StateField a = vwtest::solve_for(cs, g, 1.0 / 32, 0.5);
  StateField b = vwtest::solve_for(cs, g, 1.0 / 64, 0.5);
  double ratio = a.max_res_u / b.max_res_u;
  CHECK(ratio > 2.8);
  CHECK(ratio < 6.0);
}

TEST_CASE("circle_renormalize") {
  double l = 0.0, h = 1.0;
  CHECK(circle_renormalize(l, h) == doctest::Approx(0.0));
  CHECK(l == 0.0);
  CHECK(h == 1.0);

  l = 0.6;
  h = 0.5;
  double drift = circle_renormalize(l, h);
  CHECK(drift == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(l == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h == doctest::Approx(0.5).epsilon(1e-14));

  // center of the circle: projection undefined, inputs unchanged
  l = 0.0;
  h = 0.5;
  CHECK(circle_renormalize(l, h) == -1.0);
  CHECK(l == 0.0);
  CHECK(h == 0.5);

  // random off-circle points land on the circle to machine precision
  std::mt19937 gen = vwtest::rng(5u);
  std::uniform_real_distribution<double> dl(-0.8, 0.8), dh(-0.1, 1.1);
  for (int trial = 0; trial < 200; ++trial) {
    double a = dl(gen), c = dh(gen);
    if (std::abs(a) + std::abs(c - 0.5) < 1e-12) continue;
    circle_renormalize(a, c);
    CHECK(std::abs(a * a + c * c - c) <= 1e-15);
  }
}

TEST_CASE("nonpositive p on the data line is caught") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData g = vwtest::gaussian_data();
  int n = 20;
  double dx = 0.05;
  GridSpec gs = GridSpec::square(dx, n);
  BoundaryData bd = boundary_gamma0(cs, g, -n, n, dx);
  bd.p[n] = -0.5;  // poison one node
  CHECK_THROWS_AS(solve(bd, cs, gs), NonpositivePQError);
}

TEST_CASE("consistency residuals: zero data vanish, gaussian is second order") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData zero = make_initial_data(parse_expr("0"), parse_expr("0"), 1.0);
  StateField z = vwtest::solve_for(cs, zero, 0.05, 0.3);
  ResidualFields rz = consistency_residuals(z, cs);
  CHECK(rz.max_cross <= 1e-13);
  CHECK(rz.max_u <= 1e-13);

  InitialData g = vwtest::gaussian_data(0.8, 3.0);
  StateField a = vwtest::solve_for(cs, g, 1.0 / 32, 0.5);
  StateField b = vwtest::solve_for(cs, g, 1.0 / 64, 0.5);
  ResidualFields ra = consistency_residuals(a, cs);
  ResidualFields rb = consistency_residuals(b, cs);
  double ratio = ra.max_cross / rb.max_cross;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.5);
}

TEST_CASE("a corrupted node is localized by the residual field") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data(0.8, 3.0);
  StateField state = vwtest::solve_for(cs, g, 1.0 / 32, 0.5);
  int k_mid = state.k_hi() / 2;
  int i_mid = (state.grid().row_i_lo(k_mid) + state.grid().row_i_hi(k_mid)) / 2;
  state.at(i_mid, k_mid - i_mid).u += 0.01;
  ResidualFields rf = consistency_residuals(state, cs);
  CHECK(std::abs(rf.argmax_cross_i - i_mid) + std::abs(rf.argmax_cross_j - (k_mid - i_mid)) <= 2);
}

TEST_CASE("steep data drives h toward zero while p, q stay positive") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData steep = vwtest::steep_data();
  StateField state = vwtest::solve_for(cs, steep, 1.0 / 128, 1.0);
  CHECK(state.min_h < 1e-2);  // incipient cusp
  CHECK(state.covered_time >= 1.0);

  const GridSpec& gs = state.grid();
  double min_p = 1e300, min_q = 1e300;
  bool monotone = true;
  bool in_range = true;
  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      int j = k - i;
      const StateNode& nd = state.at(i, j);
      min_p = std::min(min_p, nd.p);
      min_q = std::min(min_q, nd.q);
      if (nd.h < 0.0 || nd.g < 0.0) in_range = false;
      if (state.solved(i - 1, j)) {
        if (nd.t < state.at(i - 1, j).t - 1e-12) monotone = false;
        if (nd.x < state.at(i - 1, j).x - 1e-12) monotone = false;
      }
      if (state.solved(i, j - 1)) {
        if (nd.t < state.at(i, j - 1).t - 1e-12) monotone = false;
        if (nd.x > state.at(i, j - 1).x + 1e-12) monotone = false;
      }
    }
  }
  CHECK(min_p > 0.0);
  CHECK(min_q > 0.0);
  CHECK(monotone);
  CHECK(in_range);

  // post-solve circle residuals stay within the renormalization tolerance
  double circ = 0;
  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      const StateNode& nd = state.at(i, k - i);
      circ = std::max(circ, std::abs(nd.l * nd.l + nd.h * nd.h - nd.h));
      circ = std::max(circ, std::abs(nd.m * nd.m + nd.g * nd.g - nd.g));
    }
  }
  CHECK(circ <= 1e-8);
}

TEST_CASE("per-step circle drift shrinks at third order in the step") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data(0.8, 3.0);
  StateField a = vwtest::solve_for(cs, g, 1.0 / 32, 0.4);
  StateField b = vwtest::solve_for(cs, g, 1.0 / 64, 0.4);
  double ratio = a.max_circle_drift / b.max_circle_drift;
  CHECK(ratio > 5.0);   // local truncation: about 8x per halving
  CHECK(ratio < 13.0);
}

TEST_CASE("state CSV round trip") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData g = vwtest::gaussian_data();
  StateField state = vwtest::solve_for(cs, g, 0.25, 0.5);
  export_state_csv(state, "state_rt.csv", "state_rt.json", "deadbeef");
  StateField back = import_state_csv("state_rt.csv", "state_rt.json");
  CHECK(back.k_hi() == state.k_hi());
  const GridSpec& gs = state.grid();
  double err = 0;
  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      const StateNode& na = state.at(i, k - i);
      const StateNode& nb = back.at(i, k - i);
      err = std::max(err, std::abs(na.u - nb.u));
      err = std::max(err, std::abs(na.p - nb.p));
      err = std::max(err, std::abs(na.t - nb.t));
    }
  }
  CHECK(err == 0.0);  // %.17g round-trips doubles exactly
  std::remove("state_rt.csv");
  std::remove("state_rt.json");
}

TEST_CASE("determinant positivity at solved nodes") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData steep = vwtest::steep_data();
  StateField state = vwtest::solve_for(cs, steep, 1.0 / 64, 0.8);
  const GridSpec& gs = state.grid();
  for (int k = state.k_lo(); k <= state.k_hi(); k += 7) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; i += 3) {
      const StateNode& nd = state.at(i, k - i);
      SolverCoeffs sc = cs.derived_fast(nd.x, nd.u);
      double det = sc.alpha * nd.p * nd.q * nd.g * nd.h * sc.inv_dc;
      CHECK(det >= 0.0);
    }
  }
}

TEST_CASE("solver is deterministic across thread counts") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data(0.8, 3.0);
  StateField s1 = vwtest::solve_for(cs, g, 1.0 / 32, 0.5, 1);
  StateField s2 = vwtest::solve_for(cs, g, 1.0 / 32, 0.5, 2);
  const GridSpec& gs = s1.grid();
  double diff = 0;
  for (int k = s1.k_lo(); k <= std::min(s1.k_hi(), s2.k_hi()); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      diff = std::max(diff, std::abs(s1.at(i, k - i).u - s2.at(i, k - i).u));
      diff = std::max(diff, std::abs(s1.at(i, k - i).p - s2.at(i, k - i).p));
    }
  }
  CHECK(diff == 0.0);
}
