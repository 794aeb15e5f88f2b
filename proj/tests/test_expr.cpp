#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vwave/errors.hpp"
#include "vwave/expr.hpp"

using namespace vwave;

TEST_CASE("parse basics") {
  Expr one = parse_expr("1");
  CHECK(one.is_constant());
  CHECK(one.eval(3.0, -2.0) == 1.0);

  Expr e = parse_expr("sqrt(1 + u^2)");
  CHECK(e.eval(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(!e.depends_on_x());
  CHECK(e.depends_on_u());

  Expr f = parse_expr("x*u + sin(u)");
  CHECK(f.eval(0.0, 0.0) == 0.0);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_expr(""), ParseError);
  CHECK_THROWS_AS(parse_expr("   "), ParseError);
  CHECK_THROWS_AS(parse_expr("sin(x"), ParseError);
  CHECK_THROWS_AS(parse_expr("1 + * 2"), ParseError);
  try {
    parse_expr("x + foo(u)");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  // trailing garbage
  CHECK_THROWS_AS(parse_expr("x + 1 )"), ParseError);
}

TEST_CASE("print-parse round trip is idempotent") {
  std::vector<std::string> cases = {
      "1", "sqrt(1 + u^2)", "x*u + sin(u)", "exp(-x^2)", "tanh(x/2) - cos(u)^3",
      "2.5*x^(-2) + 1e-3", "-(x + u)*(x - u)"};
  for (const auto& text : cases) {
    Expr e = parse_expr(text);
    std::string printed = e.to_string();
    Expr e2 = parse_expr(printed);
    CHECK(e2.to_string() == printed);
    // same values too
    for (double x : {-1.3, 0.7}) {
      for (double u : {-0.4, 1.9}) {
        double a, b;
        bool ea = false, eb = false;
        try { a = e.eval(x, u); } catch (const EvalDomainError&) { ea = true; a = 0; }
        try { b = e2.eval(x, u); } catch (const EvalDomainError&) { eb = true; b = 0; }
        CHECK(ea == eb);
        if (!ea) CHECK(a == doctest::Approx(b).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("eval_d2 exact second-order derivatives") {
  // x*u + sin(u) at (0,0)
  Dual2 d = parse_expr("x*u + sin(u)").eval_d2(0.0, 0.0);
  CHECK(d.v == doctest::Approx(0.0));
  CHECK(d.dx == doctest::Approx(0.0));
  CHECK(d.du == doctest::Approx(1.0));
  CHECK(d.dxx == doctest::Approx(0.0));
  CHECK(d.dxu == doctest::Approx(1.0));
  CHECK(d.duu == doctest::Approx(0.0));

  // u^2 at (0,3)
  Dual2 p = parse_expr("u^2").eval_d2(0.0, 3.0);
  CHECK(p.v == doctest::Approx(9.0));
  CHECK(p.du == doctest::Approx(6.0));
  CHECK(p.duu == doctest::Approx(2.0));

  // exp(x) at (1,0)
  Dual2 q = parse_expr("exp(x)").eval_d2(1.0, 0.0);
  double e1 = std::exp(1.0);
  CHECK(q.v == doctest::Approx(e1).epsilon(1e-14));
  CHECK(q.dx == doctest::Approx(e1).epsilon(1e-14));
  CHECK(q.dxx == doctest::Approx(e1).epsilon(1e-14));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(parse_expr("sqrt(x)").eval(-1.0, 0.0), EvalDomainError);
  CHECK_THROWS_AS(parse_expr("1/x").eval(0.0, 0.0), EvalDomainError);
  CHECK_THROWS_AS(parse_expr("sqrt(x)").eval_d1(0.0, 0.0), EvalDomainError);
  CHECK_THROWS_AS(parse_expr("x^(0.5)").eval(-2.0, 0.0), EvalDomainError);
  // integer powers of negative bases are fine
  CHECK(parse_expr("x^3").eval(-2.0, 0.0) == doctest::Approx(-8.0));
  CHECK(parse_expr("x^(-2)").eval(2.0, 0.0) == doctest::Approx(0.25));
}

namespace {

// random expression corpus for the finite-difference property test
std::string random_expr(std::mt19937& gen, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> num(0.2, 2.5);
  switch (pick(gen)) {
    case 0: return std::to_string(num(gen));
    case 1: return "x";
    case 2: return "u";
    case 3: return "(" + random_expr(gen, depth - 1) + " + " + random_expr(gen, depth - 1) + ")";
    case 4: return "(" + random_expr(gen, depth - 1) + " - " + random_expr(gen, depth - 1) + ")";
    case 5: return "(" + random_expr(gen, depth - 1) + " * " + random_expr(gen, depth - 1) + ")";
    case 6: return "sin(" + random_expr(gen, depth - 1) + ")";
    case 7: return "cos(" + random_expr(gen, depth - 1) + ")";
    case 8: return "tanh(" + random_expr(gen, depth - 1) + ")";
    default: return "exp(0.3*" + random_expr(gen, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("dual partials match central finite differences on a random corpus") {
  std::mt19937 gen(911u);
  const double h = 1e-4;
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Expr e = parse_expr(random_expr(gen, 3));
    std::uniform_real_distribution<double> pt(-1.2, 1.2);
    double x = pt(gen), u = pt(gen);
    Dual2 d;
    try {
      d = e.eval_d2(x, u);
    } catch (const EvalDomainError&) {
      continue;
    }
    auto f = [&](double xx, double uu) { return e.eval(xx, uu); };
    double fdx = (f(x + h, u) - f(x - h, u)) / (2 * h);
    double fdu = (f(x, u + h) - f(x, u - h)) / (2 * h);
    double fdxx = (f(x + h, u) - 2 * f(x, u) + f(x - h, u)) / (h * h);
    double fduu = (f(x, u + h) - 2 * f(x, u) + f(x, u - h)) / (h * h);
    double fdxu = (f(x + h, u + h) - f(x + h, u - h) - f(x - h, u + h) + f(x - h, u - h)) /
                  (4 * h * h);
    double scale = std::max({1.0, std::abs(d.dx), std::abs(d.du)});
    CHECK(std::abs(d.dx - fdx) / scale < 1e-6);
    CHECK(std::abs(d.du - fdu) / scale < 1e-6);
    // second differences have O(h^2) truncation and 1/h^2 roundoff; stay loose
    double scale2 = std::max({1.0, std::abs(d.dxx), std::abs(d.duu), std::abs(d.dxu)});
    CHECK(std::abs(d.dxx - fdxx) / scale2 < 2e-5);
    CHECK(std::abs(d.duu - fduu) / scale2 < 2e-5);
    CHECK(std::abs(d.dxu - fdxu) / scale2 < 2e-5);
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("non-finite evaluation is reported") {
  CHECK_THROWS_AS(parse_expr("exp(x)").eval(1e6, 0.0), EvalDomainError);
}
