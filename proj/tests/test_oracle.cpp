#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "vwave/errors.hpp"
#include "vwave/oracle.hpp"

using namespace vwave;
using oracle::AtomicMeasure;

TEST_CASE("dalembert symmetric point and zero data") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  InitialData g = vwtest::gaussian_data();
  CHECK(oracle::dalembert(cs, g, 0.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  InitialData zero = make_initial_data(parse_expr("0"), parse_expr("0"), 1.0);
  CHECK(oracle::dalembert(cs, zero, 0.3, 0.7) == 0.0);
  CHECK(oracle::dalembert(cs, zero, -2.0, 1.5) == 0.0);
}

TEST_CASE("dalembert rejects non-constant coefficients") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  InitialData g = vwtest::gaussian_data();
  CHECK_THROWS_AS(oracle::dalembert(cs, g, 0.0, 1.0), NonConstantCoefficientsError);
}

TEST_CASE("dalembert with beta: pulses move at the two eigen-speeds") {
  CoefficientSet cs(parse_expr("1"), parse_expr("0.5"), parse_expr("1"),
                    CoeffBounds{0.9, 1.1, 0.6, 0.9, 1.1}, DomainRect{-8, 8, -2, 2});
  InitialData g = vwtest::gaussian_data(1.0, 5.0);
  DerivedCoeffs d = cs.derived_at(0, 0);
  double lam_p = d.lam_p;  // 0.5 + sqrt(1.25)
  CHECK(lam_p == doctest::Approx(0.5 + std::sqrt(1.25)).epsilon(1e-14));

  // at t = 3 the two pulses have separated; locate the forward peak
  double t = 3.0;
  double best_x = 0, best_u = -1;
  for (int k = 0; k <= 6000; ++k) {
    double x = 1.0 + 7.0 * k / 6000.0;
    double u = oracle::dalembert(cs, g, x, t);
    if (u > best_u) {
      best_u = u;
      best_x = x;
    }
  }
  CHECK(std::abs(best_x - lam_p * t) <= 0.01);
  // and the backward peak
  best_u = -1;
  double best_xm = 0;
  for (int k = 0; k <= 6000; ++k) {
    double x = -5.0 + 5.0 * k / 6000.0;
    double u = oracle::dalembert(cs, g, x, t);
    if (u > best_u) {
      best_u = u;
      best_xm = x;
    }
  }
  CHECK(std::abs(best_xm - d.lam_m * t) <= 0.01);
}

TEST_CASE("dalembert satisfies the PDE to 1e-8 by finite differences") {
  // a wide profile keeps the high-order FD truncation tiny
  CoefficientSet cs(parse_expr("1.2"), parse_expr("0.3"), parse_expr("0.9"),
                    CoeffBounds{1.0, 1.5, 0.4, 0.8, 1.0}, DomainRect{-8, 8, -2, 2});
  InitialData d = make_initial_data(parse_expr("exp(-x^2/4)"),
                                    parse_expr("0.3*exp(-x^2/5)"), 6.0);
  for (double x : {-1.0, 0.0, 0.7}) {
    for (double t : {0.4, 1.1}) {
      CHECK(std::abs(oracle::dalembert_pde_residual(cs, d, x, t, 0.02)) <= 1e-8);
    }
  }
}

TEST_CASE("bl_bruteforce pinned examples") {
  AtomicMeasure empty;
  AtomicMeasure one{{{0.0, 1.0}}};
  AtomicMeasure one_shift{{{0.5, 1.0}}};

  CHECK(oracle::bl_bruteforce(one, one) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(oracle::bl_bruteforce(one, one_shift) == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(oracle::bl_bruteforce(one, empty) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bl_bruteforce atom cap") {
  AtomicMeasure big;
  for (int k = 0; k < 17; ++k) big.atoms.push_back({0.1 * k, 1.0});
  CHECK_THROWS_AS(oracle::bl_bruteforce(big, AtomicMeasure{}), TooManyAtomsError);
}

TEST_CASE("bl_bruteforce symmetry and triangle inequality on random triples") {
  std::mt19937 gen = vwtest::rng(7u);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  auto rand_measure = [&]() {
    AtomicMeasure m;
    int n = count(gen);
    for (int k = 0; k < n; ++k) m.atoms.push_back({pos(gen), mass(gen)});
    return m;
  };
  for (int trial = 0; trial < 12; ++trial) {
    AtomicMeasure A = rand_measure(), B = rand_measure(), C = rand_measure();
    double ab = oracle::bl_bruteforce(A, B);
    double ba = oracle::bl_bruteforce(B, A);
    double ac = oracle::bl_bruteforce(A, C);
    double cb = oracle::bl_bruteforce(C, B);
    CHECK(std::abs(ab - ba) <= 2e-3);
    CHECK(ab <= ac + cb + 2e-3);
  }
}

TEST_CASE("convergence_order pinned examples") {
  std::vector<std::pair<double, double>> quadratic{{1, 1}, {0.5, 0.25}, {0.25, 0.0625}};
  CHECK(oracle::convergence_order(quadratic) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> linear{{1, 1}, {0.5, 0.5}};
  CHECK(oracle::convergence_order(linear) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> bad{{1, 1}, {0.5, -0.5}};
  CHECK_THROWS_AS(oracle::convergence_order(bad), ConfigError);
}

TEST_CASE("convergence_order tolerates noise") {
  std::mt19937 gen = vwtest::rng(3u);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < 6; ++k) {
    double h = std::pow(0.5, k);
    pts.push_back({h, h * h * noise(gen)});
  }
  double slope = oracle::convergence_order(pts);
  CHECK(slope > 1.8);
  CHECK(slope < 2.2);
}
