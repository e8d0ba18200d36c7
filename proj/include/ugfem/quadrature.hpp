#pragma once

#include <array>
#include <vector>

#include "ugfem/mesh.hpp"

namespace ugfem {

constexpr int kMaxQuadratureDegree = 20;

/// Reference rule. Triangle points are (x, y) on {x, y >= 0, x + y <= 1};
/// edge points use only the first coordinate, t in [0, 1].
struct QuadratureRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule on the reference triangle, invariant under the six vertex permutations.
const QuadratureRule& triangle_rule(int degree);

/// Gauss-Legendre rule on [0, 1].
const QuadratureRule& edge_rule(int degree);

/// Gauss-Legendre nodes and weights on [0, 1] with n points.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct PhysicalQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<double> params;  // edge parameter t of each point (edges only)

  int size() const { return static_cast<int>(weights.size()); }
};

/// Affine push-forward onto triangle (a, b, c); weights scale by 2|area|.
PhysicalQuadrature push_forward(const QuadratureRule& rule, const Vec2& a, const Vec2& b, const Vec2& c);

/// Push-forward onto segment a -> b; weights scale by its length.
PhysicalQuadrature push_forward(const QuadratureRule& rule, const Vec2& a, const Vec2& b);

PhysicalQuadrature element_quadrature(const Mesh& mesh, int K, int degree);

/// Points run along the edge parameter (lower global vertex to higher).
PhysicalQuadrature edge_quadrature(const Mesh& mesh, int e, int degree);

}  // namespace ugfem
