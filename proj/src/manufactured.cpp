#include "ugfem/manufactured.hpp"

#include <cmath>

#include "ugfem/errors.hpp"

namespace ugfem {

ManufacturedCase sin_sin_case() {
  ManufacturedCase c;
  c.name = "sin_sin";
  const double pi = M_PI;
  c.u = [pi](const Vec2& x) { return std::sin(2 * pi * x.x()) * std::sin(pi * x.y()); };
  c.grad_u = [pi](const Vec2& x) {
    return Vec2(2 * pi * std::cos(2 * pi * x.x()) * std::sin(pi * x.y()),
                pi * std::sin(2 * pi * x.x()) * std::cos(pi * x.y()));
  };
  c.p = [g = c.grad_u](const Vec2& x) { return Vec2(-g(x)); };
  c.f = [pi](const Vec2& x) { return 5 * pi * pi * std::sin(2 * pi * x.x()) * std::sin(pi * x.y()); };
  c.div_p = c.f;
  c.alpha = [](const Vec2&) { return Mat2::Identity().eval(); };
  return c;
}

ManufacturedCase polynomial_case() {
  ManufacturedCase c;
  c.name = "polynomial";
  c.u = [](const Vec2& x) { return x.x() * (1 - x.x()) * x.y() * (1 - x.y()); };
  c.grad_u = [](const Vec2& x) {
    return Vec2((1 - 2 * x.x()) * x.y() * (1 - x.y()), x.x() * (1 - x.x()) * (1 - 2 * x.y()));
  };
  c.p = [g = c.grad_u](const Vec2& x) { return Vec2(-g(x)); };
  c.f = [](const Vec2& x) { return 2 * x.y() * (1 - x.y()) + 2 * x.x() * (1 - x.x()); };
  c.div_p = c.f;
  c.alpha = [](const Vec2&) { return Mat2::Identity().eval(); };
  return c;
}

ManufacturedCase zero_case() {
  ManufacturedCase c;
  c.name = "zero";
  c.u = [](const Vec2&) { return 0.0; };
  c.grad_u = [](const Vec2&) { return Vec2(0, 0); };
  c.p = c.grad_u;
  c.f = c.u;
  c.div_p = c.u;
  c.alpha = [](const Vec2&) { return Mat2::Identity().eval(); };
  return c;
}

ManufacturedCase variable_alpha_case() {
  ManufacturedCase c = sin_sin_case();
  c.name = "variable_alpha";
  c.alpha_identity = false;
  c.alpha_piecewise_constant = false;
  const double pi = M_PI;
  auto a = [](const Vec2& x) { return 1 + x.squaredNorm(); };
  c.alpha = [a](const Vec2& x) { return (a(x) * Mat2::Identity()).eval(); };
  c.p = [a, g = c.grad_u](const Vec2& x) { return Vec2(-a(x) * g(x)); };
  // -div(a grad u) = -a lap u - grad a · grad u, lap u = -5 pi^2 u.
  c.f = [a, pi, g = c.grad_u, u = c.u](const Vec2& x) {
    return a(x) * 5 * pi * pi * u(x) - 2 * x.dot(g(x));
  };
  c.div_p = c.f;
  return c;
}

ManufacturedCase case_from_name(const std::string& name) {
  if (name == "sin_sin") return sin_sin_case();
  if (name == "polynomial") return polynomial_case();
  if (name == "zero") return zero_case();
  if (name == "variable_alpha") return variable_alpha_case();
  fail(ErrorCode::InvalidArgument, "unknown manufactured case '" + name + "'");
}

}  // namespace ugfem
