#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ugfem/mesh.hpp"
#include "ugfem/polynomial.hpp"

namespace ugfem {

enum class Family {
  PDiscScalar,       // V_h^k
  PDiscVector,       // Q_h^k
  RTDisc,            // Q_h^{k,RT}
  LagrangeCont,      // continuous P_k, k >= 1
  CR,                // Crouzeix-Raviart, k = 0 (piecewise linear)
  RTConf,            // H(div)-conforming RT_k
  BDMConf,           // H(div)-conforming BDM_k, k >= 1
  EdgeScalar,        // P_k(e) on every edge
  EdgeNormalVector,  // P_k(e) n_e on every edge
};

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Local basis values on one element at a set of points. Rows index local
/// basis functions, columns points. Scalar families fill val/dx/dy, vector
/// families fill vx/vy/div.
struct BasisValues {
  Eigen::MatrixXd val, dx, dy;
  Eigen::MatrixXd vx, vy, div;
};

/// Discrete space with global DOF map. Element bases are polynomials in
/// physical coordinates (scaled monomials about the centroid), so points are
/// physical and no reference mapping is involved; H(div) DOFs are normal
/// moments against the outward normal, made global with the K+/K- sign.
class FESpace {
 public:
  FESpace(Family family, int degree, MeshPtr mesh, bool zero_boundary = false);

  Family family() const { return family_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  bool zero_boundary() const { return zero_boundary_; }
  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }

  bool is_edge_space() const { return family_ == Family::EdgeScalar || family_ == Family::EdgeNormalVector; }
  bool is_vector() const;
  /// Highest total polynomial degree of the functions in the space.
  int poly_degree() const;
  std::string describe() const;

  /// Number of basis functions per element (or per edge for edge spaces).
  int local_dim() const { return local_dim_; }

  /// Global index per local basis function of element K (-1: fixed to zero).
  const std::vector<int>& element_dofs(int K) const { return dofs_[K]; }
  /// Orientation sign per local basis function (H(div) edge DOFs; else +1).
  const std::vector<double>& element_signs(int K) const { return signs_[K]; }
  /// Global index per local basis function of edge e (edge spaces).
  const std::vector<int>& edge_dofs(int e) const { return dofs_[e]; }

  /// Local basis at physical points of element K.
  void evaluate(int K, const std::vector<Vec2>& pts, BasisValues& out, bool derivatives = true) const;

  /// Local basis at reference-triangle points of element K.
  BasisValues eval_basis(int K, const std::vector<std::array<double, 2>>& ref_pts) const;

  /// Edge basis (orthonormal shifted Legendre in the edge parameter) at
  /// parameters t; for EdgeNormalVector the vector value is this times n_e.
  void eval_edge(int e, const std::vector<double>& t, Eigen::MatrixXd& val) const;

  /// Local coefficients of a global vector on element K (edge e for edge
  /// spaces), with orientation signs applied.
  Eigen::VectorXd gather(int entity, const Eigen::VectorXd& global) const;

  /// Indices of the global DOFs that live on boundary entities (H(div) normal
  /// moments, Lagrange/CR boundary nodes, boundary edge DOFs).
  std::vector<int> boundary_dofs() const;

 private:
  void build_discontinuous();
  void build_lagrange();
  void build_cr();
  void build_hdiv();
  void build_edge();

  Family family_;
  int degree_;
  MeshPtr mesh_;
  bool zero_boundary_;
  int dim_ = 0;
  int local_dim_ = 0;
  int mono_degree_ = 0;
  std::vector<std::vector<int>> dofs_;
  std::vector<std::vector<double>> signs_;
  // Per element: coefficients of the local basis in scaled monomials.
  std::vector<Eigen::MatrixXd> cx_, cy_;
  std::vector<char> boundary_dof_;
};

using SpacePtr = std::shared_ptr<const FESpace>;

SpacePtr make_space(Family family, int degree, MeshPtr mesh, bool zero_boundary = false);

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// L2 projection onto a volume space. Discontinuous families are projected
/// element by element; conforming families use the global mass matrix.
Eigen::VectorXd l2_project_volume(const FESpace& space, const ScalarFunction& f, int quad_degree = -1);
Eigen::VectorXd l2_project_volume(const FESpace& space, const VectorFunction& f, int quad_degree = -1);

/// L2 projection of g (restricted to edge e) onto the local P_k(e) basis of an
/// edge space; returns the k+1 local coefficients.
Eigen::VectorXd l2_project_edge(const FESpace& space, const ScalarFunction& g, int e, int quad_degree = -1);

/// Same, from values of g at the points of an edge quadrature of edge e.
Eigen::VectorXd l2_project_edge_values(const FESpace& space, int e, const std::vector<double>& params,
                                       const std::vector<double>& weights, const Eigen::VectorXd& values);

/// Local mass matrix of element K (signs not applied).
Eigen::MatrixXd local_mass(const FESpace& space, int K, int quad_degree = -1);

}  // namespace ugfem
