#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "ugfem/mesh.hpp"

namespace ugfem {

inline int monomial_count(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

/// Monomials ((x - xc)/s)^a ((y - yc)/s)^b, a + b <= degree, graded order:
/// index of (a, b) is n(n+1)/2 + b with n = a + b.
class ScaledMonomials {
 public:
  ScaledMonomials(int degree, const Vec2& center, double scale);

  int degree() const { return degree_; }
  int size() const { return monomial_count(degree_); }
  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }
  static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }

  /// val(i, q) = m_i(pts[q]); derivatives are with respect to x and y.
  void eval(const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::MatrixXd* dx = nullptr,
            Eigen::MatrixXd* dy = nullptr) const;

 private:
  int degree_;
  Vec2 center_;
  double scale_;
};

/// Shifted Legendre P_j(2t - 1), j = 0..n, at t.
void shifted_legendre(int n, double t, double* out);

}  // namespace ugfem
