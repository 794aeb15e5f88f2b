#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "test_support.hpp"
#include "vwave/errors.hpp"
#include "vwave/initdata.hpp"

using namespace vwave;

TEST_CASE("riemann_initial basics") {
  CoefficientSet cs = vwtest::linear_wave_cs();

  InitialData zero = make_initial_data(parse_expr("0"), parse_expr("0"), 1.0);
  auto [r0, s0] = riemann_initial(cs, zero, 0.3);
  CHECK(r0 == 0.0);
  CHECK(s0 == 0.0);

  // u0 = 0, u1 = phi: R0 = S0 = phi
  InitialData vel = make_initial_data(parse_expr("0"), parse_expr("exp(-x^2)"), 3.0);
  auto [r1, s1] = riemann_initial(cs, vel, 0.5);
  double phi = std::exp(-0.25);
  CHECK(r1 == doctest::Approx(phi).epsilon(1e-14));
  CHECK(s1 == doctest::Approx(phi).epsilon(1e-14));

  // gaussian u0, u1 = 0: hand-differentiated values
  InitialData g = vwtest::gaussian_data();
  auto [r2, s2] = riemann_initial(cs, g, 0.0);
  CHECK(r2 == doctest::Approx(0.0));
  CHECK(s2 == doctest::Approx(0.0));
  auto [r3, s3] = riemann_initial(cs, g, 1.0);
  double u0x = -2.0 * std::exp(-1.0);
  CHECK(r3 == doctest::Approx(u0x).epsilon(1e-13));       // about -0.7358
  CHECK(s3 == doctest::Approx(-u0x).epsilon(1e-13));      // about +0.7358
}

TEST_CASE("boundary_gamma0 zero data") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData zero = make_initial_data(parse_expr("0"), parse_expr("0"), 1.0);
  BoundaryData bd = boundary_gamma0(cs, zero, -16, 16, 0.125);
  for (int k = 0; k < bd.size(); ++k) {
    CHECK(bd.h[k] == 1.0);
    CHECK(bd.g[k] == 1.0);
    CHECK(bd.l[k] == 0.0);
    CHECK(bd.m[k] == 0.0);
    CHECK(bd.p[k] == 1.0);
    CHECK(bd.q[k] == 1.0);
    CHECK(bd.u[k] == 0.0);
    CHECK(bd.t[k] == 0.0);
    CHECK(bd.x[k] == doctest::Approx(bd.s(k)).epsilon(1e-15));
  }
  CHECK(bd.e0 == 0.0);
}

TEST_CASE("boundary identities at a node with R = 1") {
  // choose u1 so that R(0) = 1: with u0 = 0, R = u1
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData d = make_initial_data(parse_expr("0"), parse_expr("exp(-x^2)"), 3.0);
  BoundaryData bd = boundary_gamma0(cs, d, -8, 8, 0.5);
  int mid = -bd.i_lo;  // s = 0 where u1 = 1
  CHECK(bd.h[mid] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bd.l[mid] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bd.p[mid] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("boundary circle and reciprocal identities hold to 1e-14") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data();
  BoundaryData bd = boundary_gamma0(cs, g, -64, 64, 0.0625);
  for (int k = 0; k < bd.size(); ++k) {
    CHECK(std::abs(bd.l[k] * bd.l[k] + bd.h[k] * bd.h[k] - bd.h[k]) <= 1e-14);
    CHECK(std::abs(bd.m[k] * bd.m[k] + bd.g[k] * bd.g[k] - bd.g[k]) <= 1e-14);
    CHECK(std::abs(bd.p[k] * bd.h[k] - 1.0) <= 1e-14);
    CHECK(std::abs(bd.q[k] * bd.g[k] - 1.0) <= 1e-14);
    CHECK(bd.h[k] > 0.0);
    CHECK(bd.h[k] <= 1.0);
    CHECK(bd.p[k] >= 1.0);
  }
}

TEST_CASE("compatibility residuals: zero data exactly zero") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData zero = make_initial_data(parse_expr("0"), parse_expr("0"), 1.0);
  BoundaryData bd = boundary_gamma0(cs, zero, -16, 16, 0.125);
  CompatibilityResiduals res = compatibility_residuals(bd, cs);
  CHECK(res.max_u == 0.0);
  CHECK(res.max_x == 0.0);
  CHECK(res.max_t == 0.0);
}

TEST_CASE("compatibility residuals converge at second order") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data();
  double r_prev = -1;
  double ds = 0.1;
  double max_coarse = 0, max_fine = 0;
  {
    BoundaryData bd = boundary_gamma0(cs, g, int(-6 / ds), int(6 / ds), ds);
    CompatibilityResiduals res = compatibility_residuals(bd, cs);
    max_coarse = std::max({res.max_u, res.max_x, res.max_t});
  }
  {
    BoundaryData bd = boundary_gamma0(cs, g, int(-12 / ds), int(12 / ds), ds / 2);
    CompatibilityResiduals res = compatibility_residuals(bd, cs);
    max_fine = std::max({res.max_u, res.max_x, res.max_t});
  }
  r_prev = max_coarse / max_fine;
  CHECK(r_prev > 3.0);  // halving the step reduces the residual about 4x
  CHECK(r_prev < 5.5);
}

TEST_CASE("injected fault in p spikes the residuals locally") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data();
  BoundaryData bd = boundary_gamma0(cs, g, -60, 60, 0.05);
  CompatibilityResiduals clean = compatibility_residuals(bd, cs);
  double background = std::max({clean.max_x, clean.max_t, 1e-12});

  int node = bd.size() / 2 + 3;
  bd.p[node] += 0.1;
  CompatibilityResiduals res = compatibility_residuals(bd, cs);
  CHECK(res.max_x > 10.0 * background);
  CHECK(res.max_t > 10.0 * background);
  // the spike localizes at the tampered node's neighborhood
  double peak = 0;
  int argpeak = -1;
  for (int k = 0; k < bd.size(); ++k)
    if (std::abs(res.r_x[k]) > peak) {
      peak = std::abs(res.r_x[k]);
      argpeak = k;
    }
  CHECK(std::abs(argpeak - node) <= 1);
}

TEST_CASE("sampled profiles: monotone cubic has no overshoot") {
  // a step-like sample set; monotone interpolation must stay within [0, 1]
  std::vector<double> xs, ys;
  for (int k = 0; k <= 20; ++k) {
    double x = -1.0 + 0.1 * k;
    xs.push_back(x);
    ys.push_back(x < 0 ? 0.0 : 1.0);
  }
  Profile p = Profile::sampled(xs, ys, Profile::Interp::kMonotoneCubic);
  for (int k = 0; k <= 1000; ++k) {
    double x = -1.0 + 2.0 * k / 1000.0;
    double v = p.value(x);
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("CSV import round trip") {
  std::string path = "initdata_test.csv";
  {
    std::ofstream f(path);
    f << "x,u0,u1\n";
    for (int k = 0; k <= 40; ++k) {
      double x = -2.0 + 0.1 * k;
      char buf[120];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, std::exp(-x * x),
                    0.5 * std::exp(-2 * x * x));
      f << buf;
    }
  }
  InitialData d = load_initial_csv(path);
  CHECK(d.support == doctest::Approx(2.0));
  CHECK(d.u0.value(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.u1.value(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  // interior interpolation error of the smooth profile is small
  CHECK(d.u0.value(0.05) == doctest::Approx(std::exp(-0.0025)).epsilon(1e-3));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_initial_csv("no_such_file.csv"), ConfigError);
  {
    std::ofstream f(path);
    f << "a,b,c\n1,2,3\n";
  }
  CHECK_THROWS_AS(load_initial_csv(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("hermite profile reproduces its node data and slopes") {
  std::vector<double> xs{0, 1, 2}, ys{0, 1, 0}, ms{1, 0, -1};
  Profile p = Profile::sampled_hermite(xs, ys, ms);
  CHECK(p.value(1.0) == doctest::Approx(1.0));
  CHECK(p.deriv(1.0 + 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(p.value(2.5) == doctest::Approx(0.0));  // constant extension
}
