#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ugfem {

using Vec2 = Eigen::Vector2d;

/// Conforming triangulation with edge topology and the fixed normal convention.
///
/// Local edge i of a triangle is the edge opposite local vertex i. Edges are
/// stored as (a, b) with a < b; the edge parameter t in [0, 1] runs from a to b.
/// edge_elements[e] = (K+, K-) with K+ the lower element index, K- = -1 on the
/// boundary. n_e points out of K+ (out of the domain on boundary edges).
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 2>> edge_elements;
  std::vector<std::array<int, 3>> element_edges;
  std::vector<std::array<int, 3>> element_edge_signs;  // +1 where n_K = n_e
  std::vector<char> edge_on_boundary;
  std::vector<char> vertex_on_boundary;
  std::vector<Vec2> edge_normals;
  std::vector<double> h_K;
  std::vector<double> h_e;
  std::vector<double> area;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  bool is_boundary_edge(int e) const { return edge_on_boundary[e] != 0; }
  int num_interior_edges() const;

  Vec2 centroid(int K) const;
  Vec2 edge_point(int e, double t) const;
  Vec2 edge_midpoint(int e) const { return edge_point(e, 0.5); }
  /// Outward unit normal of element K on its local edge i.
  Vec2 outward_normal(int K, int i) const { return element_edge_signs[K][i] * edge_normals[element_edges[K][i]]; }
  int local_edge_index(int K, int e) const;
  double max_h() const;
};

enum class DiagonalPattern { LowerLeftUpperRight, UpperLeftLowerRight };

/// Builds topology, normals and sizes from raw arrays. Clockwise triangles are
/// reoriented; a note for each is appended to `warnings` when given.
Mesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
               std::vector<std::string>* warnings = nullptr);

/// n x n grid of the unit square, every cell split into two triangles.
Mesh build_uniform(int n, DiagonalPattern pattern = DiagonalPattern::LowerLeftUpperRight);

/// Quality Delaunay mesh of the unit square with element size near target_h.
Mesh build_unstructured(double target_h, std::uint64_t seed);

struct LoadedMesh {
  Mesh mesh;
  std::vector<std::string> warnings;
};

/// Parses Triangle-style .node/.ele texts (1-based indices).
LoadedMesh load_mesh(std::string_view node_text, std::string_view ele_text);

/// Writes Triangle-style texts for a mesh.
std::string to_node_text(const Mesh& mesh);
std::string to_ele_text(const Mesh& mesh);

/// Throws Error(Internal) naming the first violated structural invariant.
void validate(const Mesh& mesh);

double min_angle_degrees(const Mesh& mesh);

using MeshPtr = std::shared_ptr<const Mesh>;

}  // namespace ugfem
