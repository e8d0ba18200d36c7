#include "ugfem/quadrature.hpp"

#include <cmath>

#include "ugfem/errors.hpp"

namespace ugfem {

namespace {

// Legendre P_n(x) and its derivative.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss-Legendre needs at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

QuadratureRule make_edge_rule(int degree) {
  QuadratureRule r;
  std::vector<double> x, w;
  gauss_legendre(degree / 2 + 1, x, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.points.push_back({x[i], 0.0});
    r.weights.push_back(w[i]);
  }
  r.exactness_degree = degree;
  return r;
}

// Collapsed tensor Gauss rule, then averaged over the vertex permutations.
QuadratureRule make_triangle_rule(int degree) {
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre((degree + 1) / 2 + 1, xu, wu);
  gauss_legendre(degree / 2 + 1, xv, wv);
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  QuadratureRule r;
  for (std::size_t i = 0; i < xu.size(); ++i)
    for (std::size_t j = 0; j < xv.size(); ++j) {
      double x = xu[i], y = xv[j] * (1.0 - xu[i]);
      double w = wu[i] * wv[j] * (1.0 - xu[i]);
      double lam[3] = {1.0 - x - y, x, y};
      for (const auto& p : perms) {
        r.points.push_back({lam[p[1]], lam[p[2]]});
        r.weights.push_back(w / 6.0);
      }
    }
  r.exactness_degree = degree;
  return r;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const auto table = [] {
    std::vector<QuadratureRule> t;
    for (int d = 0; d <= kMaxQuadratureDegree; ++d) t.push_back(make_triangle_rule(d));
    return t;
  }();
  require(degree >= 0, ErrorCode::InvalidArgument, "triangle rule degree must be >= 0");
  if (degree > kMaxQuadratureDegree)
    fail(ErrorCode::UnsupportedDegree, "triangle rule degree " + std::to_string(degree) + " exceeds 20");
  return table[degree];
}

const QuadratureRule& edge_rule(int degree) {
  static const auto table = [] {
    std::vector<QuadratureRule> t;
    for (int d = 0; d <= kMaxQuadratureDegree; ++d) t.push_back(make_edge_rule(d));
    return t;
  }();
  require(degree >= 0, ErrorCode::InvalidArgument, "edge rule degree must be >= 0");
  if (degree > kMaxQuadratureDegree)
    fail(ErrorCode::UnsupportedDegree, "edge rule degree " + std::to_string(degree) + " exceeds 20");
  return table[degree];
}

PhysicalQuadrature push_forward(const QuadratureRule& rule, const Vec2& a, const Vec2& b, const Vec2& c) {
  Vec2 e1 = b - a, e2 = c - a;
  double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  require(jac > 0, ErrorCode::InvalidArgument, "degenerate triangle in push_forward");
  PhysicalQuadrature q;
  q.points.reserve(rule.size());
  q.weights.reserve(rule.size());
  for (int i = 0; i < rule.size(); ++i) {
    q.points.push_back(a + rule.points[i][0] * e1 + rule.points[i][1] * e2);
    q.weights.push_back(rule.weights[i] * jac);
  }
  return q;
}

PhysicalQuadrature push_forward(const QuadratureRule& rule, const Vec2& a, const Vec2& b) {
  double len = (b - a).norm();
  require(len > 0, ErrorCode::InvalidArgument, "degenerate edge in push_forward");
  PhysicalQuadrature q;
  for (int i = 0; i < rule.size(); ++i) {
    double t = rule.points[i][0];
    q.points.push_back((1.0 - t) * a + t * b);
    q.weights.push_back(rule.weights[i] * len);
    q.params.push_back(t);
  }
  return q;
}

PhysicalQuadrature element_quadrature(const Mesh& mesh, int K, int degree) {
  const auto& t = mesh.triangles[K];
  return push_forward(triangle_rule(degree), mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
}

PhysicalQuadrature edge_quadrature(const Mesh& mesh, int e, int degree) {
  return push_forward(edge_rule(degree), mesh.vertices[mesh.edges[e][0]], mesh.vertices[mesh.edges[e][1]]);
}

}  // namespace ugfem
