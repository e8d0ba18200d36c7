#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "ugfem/errors.hpp"
#include "ugfem/mesh.hpp"
#include "ugfem/quadrature.hpp"

using namespace ugfem;

namespace {

// Structural invariants shared by every generator.
void expect_invariants(const Mesh& m) {
  EXPECT_NO_THROW(validate(m));
  for (int K = 0; K < m.num_elements(); ++K) {
    const auto& t = m.triangles[K];
    const Vec2 a = m.vertices[t[1]] - m.vertices[t[0]], b = m.vertices[t[2]] - m.vertices[t[0]];
    EXPECT_GT(a.x() * b.y() - a.y() * b.x(), 0.0);
    Vec2 closed = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      const int e = m.element_edges[K][i];
      closed += m.h_e[e] * m.outward_normal(K, i);
      // n_K points away from the opposite vertex
      EXPECT_GT(m.outward_normal(K, i).dot(m.edge_midpoint(e) - m.vertices[t[i]]), 0.0);
    }
    EXPECT_LT(closed.norm(), 1e-14);
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const bool two = m.edge_elements[e][1] >= 0;
    EXPECT_EQ(two, !m.is_boundary_edge(e));
    EXPECT_LT(m.edge_elements[e][0], two ? m.edge_elements[e][1] : m.num_elements());
  }
}

// int_K div q = int_dK q·n_K for q = (x^i y^j, x^j y^i).
double divergence_theorem_defect(const Mesh& m, int deg) {
  double worst = 0.0;
  for (int K = 0; K < m.num_elements(); ++K)
    for (int i = 0; i <= deg; ++i)
      for (int j = 0; i + j <= deg; ++j) {
        auto q = [&](const Vec2& x) { return Vec2(std::pow(x.x(), i) * std::pow(x.y(), j), std::pow(x.x(), j) * std::pow(x.y(), i)); };
        auto div = [&](const Vec2& x) {
          return (i ? i * std::pow(x.x(), i - 1) * std::pow(x.y(), j) : 0.0) + (i ? i * std::pow(x.x(), j) * std::pow(x.y(), i - 1) : 0.0);
        };
        double vol = 0.0, bnd = 0.0, scale = 0.0;
        PhysicalQuadrature vq = element_quadrature(m, K, deg);
        for (int p = 0; p < vq.size(); ++p) vol += vq.weights[p] * div(vq.points[p]);
        for (int l = 0; l < 3; ++l) {
          PhysicalQuadrature eq = edge_quadrature(m, m.element_edges[K][l], deg + 1);
          for (int p = 0; p < eq.size(); ++p) {
            const double c = eq.weights[p] * q(eq.points[p]).dot(m.outward_normal(K, l));
            bnd += c;
            scale += std::abs(c);
          }
        }
        worst = std::max(worst, std::abs(vol - bnd) / std::max(scale, 1e-300));
      }
  return worst;
}

}  // namespace

TEST(Mesh, SingleCellCounts) {
  Mesh m = build_uniform(1);
  EXPECT_EQ(m.num_elements(), 2);
  EXPECT_EQ(m.num_edges(), 5);
  EXPECT_EQ(m.num_interior_edges(), 1);
  expect_invariants(m);
}

TEST(Mesh, UniformSizes) {
  Mesh m = build_uniform(4);
  EXPECT_EQ(m.num_elements(), 32);
  for (double h : m.h_K) EXPECT_NEAR(h, std::sqrt(2.0) / 4, 1e-15);
  expect_invariants(m);
}

TEST(Mesh, CenterDiagonalsOfTwoByTwo) {
  // The four cell diagonals run from (i/2, j/2) to ((i+1)/2, (j+1)/2); each
  // is interior and shared by the two triangles of its cell.
  Mesh m = build_uniform(2);
  int found = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 d = m.vertices[m.edges[e][1]] - m.vertices[m.edges[e][0]];
    if (std::abs(std::abs(d.x()) - 0.5) < 1e-14 && std::abs(std::abs(d.y()) - 0.5) < 1e-14) {
      ++found;
      EXPECT_GE(m.edge_elements[e][0], 0);
      EXPECT_GE(m.edge_elements[e][1], 0);
      const Vec2 c0 = m.centroid(m.edge_elements[e][0]), c1 = m.centroid(m.edge_elements[e][1]);
      EXPECT_EQ(std::floor(c0.x() * 2), std::floor(c1.x() * 2));
      EXPECT_EQ(std::floor(c0.y() * 2), std::floor(c1.y() * 2));
    }
  }
  EXPECT_EQ(found, 4);
}

TEST(Mesh, BothDiagonalPatterns) {
  for (auto pat : {DiagonalPattern::LowerLeftUpperRight, DiagonalPattern::UpperLeftLowerRight}) {
    Mesh m = build_uniform(3, pat);
    expect_invariants(m);
    double area = 0.0;
    for (double a : m.area) area += a;
    EXPECT_NEAR(area, 1.0, 1e-14);
  }
}

TEST(Mesh, DivergenceTheorem) {
  EXPECT_LT(divergence_theorem_defect(build_uniform(2), 6), 1e-12);
  EXPECT_LT(divergence_theorem_defect(build_unstructured(0.3, 5), 6), 1e-12);
}

TEST(Mesh, UnstructuredSizeAndQuality) {
  Mesh m = build_unstructured(0.1, 1);
  EXPECT_GE(m.num_elements(), 150);
  EXPECT_LE(m.num_elements(), 330);
  EXPECT_GE(min_angle_degrees(m), 20.0);
  expect_invariants(m);
  for (double h : {0.0485, 0.0238}) EXPECT_GE(min_angle_degrees(build_unstructured(h, 1)), 20.0);
}

TEST(Mesh, UnstructuredDeterministic) {
  Mesh a = build_unstructured(0.15, 42), b = build_unstructured(0.15, 42);
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_EQ(a.vertices[i], b.vertices[i]);
  EXPECT_EQ(a.triangles, b.triangles);
}

TEST(Mesh, FileRoundTrip) {
  const char* node = "4 2 0 0\n1 0 0\n2 1 0\n3 0 1\n4 1 1\n";
  const char* ele = "# two triangles\n2 3 0\n1 1 2 4\n2 1 4 3\n";
  LoadedMesh l = load_mesh(node, ele);
  Mesh ref = build_uniform(1);
  EXPECT_TRUE(l.warnings.empty());
  EXPECT_EQ(l.mesh.triangles, ref.triangles);
  EXPECT_EQ(l.mesh.edges, ref.edges);
  Mesh u = build_unstructured(0.3, 2);
  LoadedMesh back = load_mesh(to_node_text(u), to_ele_text(u));
  EXPECT_EQ(back.mesh.triangles, u.triangles);
  for (std::size_t i = 0; i < u.vertices.size(); ++i) EXPECT_EQ(back.mesh.vertices[i], u.vertices[i]);
}

TEST(Mesh, ClockwiseTriangleIsReoriented) {
  LoadedMesh l = load_mesh("4 2 0 0\n1 0 0\n2 1 0\n3 0 1\n4 1 1\n", "2 3 0\n1 1 4 2\n2 1 4 3\n");
  EXPECT_EQ(l.warnings.size(), 1u);
  expect_invariants(l.mesh);
  EXPECT_NEAR(l.mesh.area[0], 0.5, 1e-15);
}

TEST(Mesh, TruncatedEleNamesLine) {
  try {
    load_mesh("4 2 0 0\n1 0 0\n2 1 0\n3 0 1\n4 1 1\n", "2 3 0\n1 1 2 4\n2 1 4\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}
