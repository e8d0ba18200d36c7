#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "ugfem/fe_space.hpp"

namespace ugfem {

using Mat2 = Eigen::Matrix2d;

/// Exact data for -div(alpha grad u) = f in the unit square, u = 0 on the
/// boundary, p = -alpha grad u, c = alpha^{-1}.
struct ManufacturedCase {
  std::string name;
  ScalarFunction u;
  VectorFunction grad_u;
  VectorFunction p;
  ScalarFunction div_p;
  ScalarFunction f;
  std::function<Mat2(const Vec2&)> alpha;
  bool alpha_identity = true;
  bool alpha_piecewise_constant = true;

  Mat2 c(const Vec2& x) const { return alpha(x).inverse(); }
};

/// u = sin(2 pi x) sin(pi y), alpha = I.
ManufacturedCase sin_sin_case();

/// u = x(1-x)y(1-y), alpha = I (polynomial, used for exactness checks).
ManufacturedCase polynomial_case();

/// f = 0, u = 0.
ManufacturedCase zero_case();

/// sin-sin u with alpha = (1 + x^2 + y^2) I; f derived accordingly.
ManufacturedCase variable_alpha_case();

ManufacturedCase case_from_name(const std::string& name);

}  // namespace ugfem
