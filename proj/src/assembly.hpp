#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ugfem/dg_calculus.hpp"
#include "ugfem/fe_space.hpp"
#include "ugfem/manufactured.hpp"
#include "ugfem/method_config.hpp"
#include "ugfem/quadrature.hpp"

namespace ugfem::detail {

using Triplet = Eigen::Triplet<double>;

/// Global indices (-1: constrained) and signs of a local basis, possibly
/// concatenated from several spaces with block offsets.
struct LocalDofs {
  std::vector<int> idx;
  std::vector<double> sign;

  void append(const std::vector<int>& dofs, const std::vector<double>* signs, int offset);
  int size() const { return static_cast<int>(idx.size()); }
};

LocalDofs element_dofs(const FESpace& S, int K, int offset);
LocalDofs edge_dofs(const FESpace& S, int e, int offset);

class Triplets {
 public:
  /// Adds sign_r * sign_c * M(r, c) for every unconstrained pair.
  void add(const LocalDofs& rows, const LocalDofs& cols, const Eigen::MatrixXd& M);
  /// Adds the block and its transpose (for off-diagonal saddle blocks).
  void add_symmetric_pair(const LocalDofs& rows, const LocalDofs& cols, const Eigen::MatrixXd& M);
  /// Adds a sparse block at an offset, optionally transposed.
  void add_sparse(const Eigen::SparseMatrix<double>& S, int row_offset, int col_offset, double scale,
                  bool transpose);
  Eigen::SparseMatrix<double> build(int rows, int cols) const;

 private:
  std::vector<Triplet> t_;
};

void scatter(Eigen::VectorXd& global, const LocalDofs& dofs, const Eigen::VectorXd& local);

inline Eigen::Map<const Eigen::VectorXd> weights(const PhysicalQuadrature& q) {
  return Eigen::Map<const Eigen::VectorXd>(q.weights.data(), static_cast<Eigen::Index>(q.weights.size()));
}

int quadrature_degree(const MethodConfig& config, const SpaceBundle& spaces);

/// (A psi_j, psi_i)_K with the matrix field A(x) (c or alpha); unit matrix when null.
Eigen::MatrixXd weighted_vector_mass(const FESpace& Q, int K, const std::function<Mat2(const Vec2&)>* A,
                                     const PhysicalQuadrature& q);

/// (c psi_j, psi_i)_K with c = alpha^{-1}.
Eigen::MatrixXd c_mass(const FESpace& Q, int K, const ManufacturedCase& data, const PhysicalQuadrature& q);

/// (alpha grad phi_j, grad phi_i)_K.
Eigen::MatrixXd stiffness(const FESpace& V, int K, const ManufacturedCase& data, const PhysicalQuadrature& q);

/// (f, phi_i)_K.
Eigen::VectorXd load(const FESpace& V, int K, const ScalarFunction& f, const PhysicalQuadrature& q);

/// Normal components psi_i · n of a vector basis at the points of q.
Eigen::MatrixXd normal_values(const FESpace& Q, int K, const PhysicalQuadrature& q, const Vec2& n);

/// Values of a scalar basis at the points of q.
Eigen::MatrixXd scalar_values(const FESpace& V, int K, const PhysicalQuadrature& q);

/// +1 for the K+ side of an edge, -1 for K-.
inline double side_sign(int side) { return side == 0 ? 1.0 : -1.0; }

}  // namespace ugfem::detail
