#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vwave/coeffs.hpp"
#include "vwave/errors.hpp"

using namespace vwave;

TEST_CASE("constant coefficients annihilate the derivative-built terms") {
  CoefficientSet cs = vwtest::linear_wave_cs();
  DerivedCoeffs d = cs.derived_at(0.7, -1.3);
  CHECK(d.lam_p == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.lam_m == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(d.c1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(d.c2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.a1 == 0.0);
  CHECK(d.a2 == 0.0);
  CHECK(d.b == 0.0);
  CHECK(d.d1 == 0.0);
  CHECK(d.d2 == 0.0);
  CHECK(d.lam_m_u == 0.0);
  CHECK(d.lam_m_uu == 0.0);
}

TEST_CASE("gamma = exp(u): hand-derived a1, a2 at u = 0") {
  CoefficientSet cs(parse_expr("1"), parse_expr("0"), parse_expr("exp(u)"),
                    CoeffBounds{0.9, 1.1, 0.1, 0.3, 3.0}, DomainRect{-1, 1, -1, 1});
  DerivedCoeffs d = cs.derived_at(0.4, 0.0);
  CHECK(d.c2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.c1 == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.a1 == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(d.a2 == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(d.b == doctest::Approx(0.0));
  CHECK(d.d1 == doctest::Approx(0.0));
  CHECK(d.d2 == doctest::Approx(0.0));
}

TEST_CASE("eigenvalue identities hold to near machine precision") {
  CoefficientSet cs(parse_expr("1 + 0.1*tanh(x)"), parse_expr("0.3*cos(u)"),
                    parse_expr("sqrt(2 + sin(u + x/2))"),
                    CoeffBounds{0.8, 1.2, 0.4, 0.9, 1.9}, DomainRect{-3, 3, -3, 3});
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    for (double u : {-1.1, 0.2, 2.4}) {
      DerivedCoeffs d = cs.derived_at(x, u);
      double prod = d.lam_p * d.lam_m;
      double expect_prod = -d.gamma * d.gamma / (d.alpha * d.alpha);
      CHECK(std::abs(prod - expect_prod) <= 1e-12 * std::abs(expect_prod));
      double sum = d.lam_p + d.lam_m;
      double expect_sum = 2.0 * d.beta / (d.alpha * d.alpha);
      CHECK(std::abs(sum - expect_sum) <=
            1e-12 * std::max(1.0, std::abs(expect_sum)));
      CHECK(d.c1 < 0.0);
      CHECK(d.c2 > 0.0);

      // a1 + a2 assembled from parts
      double dc = d.c2 - d.c1;
      double assembled = (d.c1 * d.alpha_u - d.alpha * d.c1_u + d.c2 * d.alpha_u -
                          d.alpha * d.c2_u) / (2.0 * d.alpha * dc);
      CHECK(std::abs((d.a1 + d.a2) - assembled) <=
            1e-12 * std::max(1.0, std::abs(assembled)));
    }
  }
}

TEST_CASE("a_i, b, d_i agree with finite-difference evaluation of their formulas") {
  CoefficientSet cs(parse_expr("1 + 0.05*sin(x)"), parse_expr("0.2*tanh(u)"),
                    parse_expr("sqrt(2 + sin(u))"),
                    CoeffBounds{0.9, 1.1, 0.3, 0.9, 1.9}, DomainRect{-3, 3, -3, 3});
  const double h = 1e-5;
  auto cvals = [&](double x, double u) {
    DerivedCoeffs d = cs.derived_at(x, u);
    return std::array<double, 3>{d.alpha, d.c1, d.c2};
  };
  for (double x : {-1.0, 0.5}) {
    for (double u : {-0.7, 1.2}) {
      DerivedCoeffs d = cs.derived_at(x, u);
      auto fp = cvals(x + h, u), fm = cvals(x - h, u);
      auto gp = cvals(x, u + h), gm = cvals(x, u - h);
      double ax = (fp[0] - fm[0]) / (2 * h), au = (gp[0] - gm[0]) / (2 * h);
      double c1x = (fp[1] - fm[1]) / (2 * h), c1u = (gp[1] - gm[1]) / (2 * h);
      double c2x = (fp[2] - fm[2]) / (2 * h), c2u = (gp[2] - gm[2]) / (2 * h);
      double dc = d.c2 - d.c1;
      double a1_fd = (d.c1 * au - d.alpha * c1u) / (2 * d.alpha * dc);
      double a2_fd = (d.c2 * au - d.alpha * c2u) / (2 * d.alpha * dc);
      double b_fd = (d.alpha * (c1x - c2x) + (d.c1 - d.c2) * ax) / (2 * d.alpha * dc);
      double d1_fd = (d.c2 * c1x - d.c1 * c2x) / (2 * dc) + (d.alpha * c1x - d.c1 * ax) / (2 * d.alpha);
      double d2_fd = (d.c2 * c1x - d.c1 * c2x) / (2 * dc) + (d.alpha * c2x - d.c2 * ax) / (2 * d.alpha);
      CHECK(d.a1 == doctest::Approx(a1_fd).epsilon(1e-6));
      CHECK(d.a2 == doctest::Approx(a2_fd).epsilon(1e-6));
      CHECK(d.b == doctest::Approx(b_fd).epsilon(1e-6));
      CHECK(d.d1 == doctest::Approx(d1_fd).epsilon(1e-6));
      CHECK(d.d2 == doctest::Approx(d2_fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("derived_fast matches derived_at") {
  CoefficientSet cs = vwtest::sine_speed_cs();
  for (double x : {-1.0, 0.0, 2.0}) {
    for (double u : {-0.5, 0.8}) {
      DerivedCoeffs d = cs.derived_at(x, u);
      SolverCoeffs s = cs.derived_fast(x, u);
      CHECK(s.alpha == doctest::Approx(d.alpha).epsilon(1e-14));
      CHECK(s.c1 == doctest::Approx(d.c1).epsilon(1e-14));
      CHECK(s.c2 == doctest::Approx(d.c2).epsilon(1e-14));
      CHECK(s.a1 == doctest::Approx(d.a1).epsilon(1e-13));
      CHECK(s.a2 == doctest::Approx(d.a2).epsilon(1e-13));
      CHECK(s.b == doctest::Approx(d.b).epsilon(1e-13));
      CHECK(s.d1 == doctest::Approx(d.d1).epsilon(1e-13));
      CHECK(s.d2 == doctest::Approx(d.d2).epsilon(1e-13));
    }
  }
}

TEST_CASE("validate: constant case passes bounds but is flagged as degenerate") {
  CoefficientSet cs(parse_expr("1"), parse_expr("0"), parse_expr("1"),
                    CoeffBounds{0.5, 2.0, 1.0, 0.5, 2.0}, DomainRect{-2, 2, -2, 2});
  ConditionReport rep = validate_conditions(cs, 9);
  CHECK(rep.bounds_ok());
  CHECK(!rep.generic_ok());
  CHECK(rep.total_generic_flags == 2L * 9 * 9);  // both families at every sample
}

TEST_CASE("validate: sine speed passes bounds and the generic condition") {
  CoefficientSet cs(parse_expr("1"), parse_expr("0"), parse_expr("sqrt(2 + sin(u))"),
                    CoeffBounds{0.9, 1.1, 0.1, 1.0, 2.0}, DomainRect{-3, 3, -3, 3});
  ConditionReport rep = validate_conditions(cs, 41);
  CHECK(rep.bounds_ok());
  CHECK(rep.generic_ok());
  // dense-sampling oracle at ~10x resolution agrees
  ConditionReport dense = validate_conditions(cs, 401);
  CHECK(dense.bounds_ok());
  CHECK(dense.generic_ok());
}

TEST_CASE("validate: forced gamma bound violation is reported at all samples") {
  CoefficientSet cs(parse_expr("1"), parse_expr("0"), parse_expr("sqrt(2 + sin(u))"),
                    CoeffBounds{0.9, 1.1, 0.1, 3.0, 4.0}, DomainRect{-3, 3, -3, 3});
  ConditionReport rep = validate_conditions(cs, 11);
  CHECK(rep.total_bound_violations == 11L * 11);
  CHECK(!rep.bound_violations.empty());
  CHECK(rep.bound_violations.front().kind == "gamma_low");
}

TEST_CASE("builtin families") {
  CoefficientExprs of = builtin_coefficients("oseen_franck", {{"K1", 1.0}, {"K3", 2.0}});
  // gamma(0) = sqrt(K1), gamma(pi/2) = sqrt(K3)
  CHECK(of.gamma.eval(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(of.gamma.eval(0, M_PI / 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(of.alpha.is_constant());

  CoefficientExprs pl = builtin_coefficients("poly_u", {{"c0", 1.5}, {"c1", 0.25}});
  CHECK(pl.gamma.eval(0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(builtin_coefficients("nope", {}), ConfigError);
  CHECK_THROWS_AS(builtin_coefficients("oseen_franck", {{"K1", 1.0}}), ConfigError);
}

TEST_CASE("bad declared bounds are rejected") {
  CHECK_THROWS_AS(CoefficientSet(parse_expr("1"), parse_expr("0"), parse_expr("1"),
                                 CoeffBounds{0.0, 1.0, 1.0, 0.5, 2.0}, DomainRect{}),
                  ConfigError);
  CHECK_THROWS_AS(CoefficientSet(parse_expr("1"), parse_expr("0"), parse_expr("1"),
                                 CoeffBounds{0.5, 2.0, -1.0, 0.5, 2.0}, DomainRect{}),
                  ConfigError);
}
