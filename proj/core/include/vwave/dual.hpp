#ifndef VWAVE_DUAL_HPP
#define VWAVE_DUAL_HPP

#include <cmath>

#include "vwave/errors.hpp"

namespace vwave {

// Forward-mode dual numbers over the two variables (x, u).
// Dual1 carries first partials, Dual2 carries first and second partials.
// Arithmetic reproduces the exact Taylor coefficients of the composed
// elementary functions, so downstream sign tests are noise-free.

struct Dual1 {
  double v = 0, dx = 0, du = 0;

  static Dual1 constant(double c) { return {c, 0, 0}; }
  static Dual1 var_x(double x) { return {x, 1, 0}; }
  static Dual1 var_u(double u) { return {u, 0, 1}; }
};

struct Dual2 {
  double v = 0, dx = 0, du = 0, dxx = 0, dxu = 0, duu = 0;

  static Dual2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }
  static Dual2 var_x(double x) { return {x, 1, 0, 0, 0, 0}; }
  static Dual2 var_u(double u) { return {u, 0, 1, 0, 0, 0}; }
};

inline Dual1 operator+(const Dual1& a, const Dual1& b) {
  return {a.v + b.v, a.dx + b.dx, a.du + b.du};
}
inline Dual1 operator-(const Dual1& a, const Dual1& b) {
  return {a.v - b.v, a.dx - b.dx, a.du - b.du};
}
inline Dual1 operator-(const Dual1& a) { return {-a.v, -a.dx, -a.du}; }
inline Dual1 operator*(const Dual1& a, const Dual1& b) {
  return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.du * b.v + a.v * b.du};
}
inline Dual1 operator*(double c, const Dual1& a) { return {c * a.v, c * a.dx, c * a.du}; }
inline Dual1 operator/(const Dual1& a, const Dual1& b) {
  if (b.v == 0.0) throw EvalDomainError("division by zero");
  double inv = 1.0 / b.v;
  double q = a.v * inv;
  return {q, (a.dx - q * b.dx) * inv, (a.du - q * b.du) * inv};
}

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v,   a.dx + b.dx,   a.du + b.du,
          a.dxx + b.dxx, a.dxu + b.dxu, a.duu + b.duu};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v,   a.dx - b.dx,   a.du - b.du,
          a.dxx - b.dxx, a.dxu - b.dxu, a.duu - b.duu};
}
inline Dual2 operator-(const Dual2& a) {
  return {-a.v, -a.dx, -a.du, -a.dxx, -a.dxu, -a.duu};
}
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.du * b.v + a.v * b.du,
          a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
          a.dxu * b.v + a.dx * b.du + a.du * b.dx + a.v * b.dxu,
          a.duu * b.v + 2.0 * a.du * b.du + a.v * b.duu};
}
inline Dual2 operator*(double c, const Dual2& a) {
  return {c * a.v, c * a.dx, c * a.du, c * a.dxx, c * a.dxu, c * a.duu};
}

namespace detail {

// Compose f with an inner dual given f(v), f'(v), f''(v).
inline Dual1 compose(const Dual1& g, double f, double f1) {
  return {f, f1 * g.dx, f1 * g.du};
}
inline Dual2 compose(const Dual2& g, double f, double f1, double f2) {
  return {f,
          f1 * g.dx,
          f1 * g.du,
          f2 * g.dx * g.dx + f1 * g.dxx,
          f2 * g.dx * g.du + f1 * g.dxu,
          f2 * g.du * g.du + f1 * g.duu};
}

}  // namespace detail

inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  if (b.v == 0.0) throw EvalDomainError("division by zero");
  double inv = 1.0 / b.v;
  Dual2 r = detail::compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
  return a * r;
}

// ---- elementary functions -------------------------------------------------

inline double vw_sin(double x) { return std::sin(x); }
inline double vw_cos(double x) { return std::cos(x); }
inline double vw_exp(double x) { return std::exp(x); }
inline double vw_tanh(double x) { return std::tanh(x); }
inline double vw_sqrt(double x) {
  if (x < 0.0) throw EvalDomainError("sqrt of a negative number");
  return std::sqrt(x);
}

inline Dual1 vw_sin(const Dual1& g) { return detail::compose(g, std::sin(g.v), std::cos(g.v)); }
inline Dual1 vw_cos(const Dual1& g) { return detail::compose(g, std::cos(g.v), -std::sin(g.v)); }
inline Dual1 vw_exp(const Dual1& g) {
  double e = std::exp(g.v);
  return detail::compose(g, e, e);
}
inline Dual1 vw_tanh(const Dual1& g) {
  double t = std::tanh(g.v);
  return detail::compose(g, t, 1.0 - t * t);
}
inline Dual1 vw_sqrt(const Dual1& g) {
  if (g.v <= 0.0) throw EvalDomainError("sqrt domain (argument must be positive for derivatives)");
  double s = std::sqrt(g.v);
  return detail::compose(g, s, 0.5 / s);
}

inline Dual2 vw_sin(const Dual2& g) {
  double s = std::sin(g.v), c = std::cos(g.v);
  return detail::compose(g, s, c, -s);
}
inline Dual2 vw_cos(const Dual2& g) {
  double s = std::sin(g.v), c = std::cos(g.v);
  return detail::compose(g, c, -s, -c);
}
inline Dual2 vw_exp(const Dual2& g) {
  double e = std::exp(g.v);
  return detail::compose(g, e, e, e);
}
inline Dual2 vw_tanh(const Dual2& g) {
  double t = std::tanh(g.v);
  double f1 = 1.0 - t * t;
  return detail::compose(g, t, f1, -2.0 * t * f1);
}
inline Dual2 vw_sqrt(const Dual2& g) {
  if (g.v <= 0.0) throw EvalDomainError("sqrt domain (argument must be positive for derivatives)");
  double s = std::sqrt(g.v);
  double f1 = 0.5 / s;
  return detail::compose(g, s, f1, -0.25 / (g.v * s));
}

inline double vw_div(double a, double b) {
  if (b == 0.0) throw EvalDomainError("division by zero");
  return a / b;
}
inline Dual1 vw_div(const Dual1& a, const Dual1& b) { return a / b; }
inline Dual2 vw_div(const Dual2& a, const Dual2& b) { return a / b; }

// x^c with constant real exponent; integer exponents are exact and defined
// for any base, fractional exponents require a positive base.
inline double vw_pow(double x, double c, bool integral) {
  if (!integral && x < 0.0) throw EvalDomainError("fractional power of a negative base");
  return std::pow(x, c);
}
inline Dual1 vw_pow(const Dual1& g, double c, bool integral) {
  if (c == 0.0) return Dual1::constant(1.0);
  if (c == 1.0) return g;
  if (!integral && g.v <= 0.0) throw EvalDomainError("fractional power needs a positive base");
  if (integral && g.v == 0.0 && c < 1.0) throw EvalDomainError("negative power of zero");
  double f = std::pow(g.v, c);
  double f1 = c * std::pow(g.v, c - 1.0);
  return detail::compose(g, f, f1);
}
inline Dual2 vw_pow(const Dual2& g, double c, bool integral) {
  if (c == 0.0) return Dual2::constant(1.0);
  if (c == 1.0) return g;
  if (!integral && g.v <= 0.0) throw EvalDomainError("fractional power needs a positive base");
  if (integral && g.v == 0.0 && c < 2.0) throw EvalDomainError("negative power of zero");
  double f = std::pow(g.v, c);
  double f1 = c * std::pow(g.v, c - 1.0);
  double f2 = (g.v == 0.0 && c == 2.0) ? 2.0 : c * (c - 1.0) * std::pow(g.v, c - 2.0);
  return detail::compose(g, f, f1, f2);
}

}  // namespace vwave

#endif
