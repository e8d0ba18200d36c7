#pragma once

#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ugfem/fe_space.hpp"
#include "ugfem/field.hpp"

namespace ugfem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Rows: DOFs of the product-space argument (volume block first, then the
/// trace block). Columns: DOFs of the primal argument.
struct DGOperator {
  SparseMatrix matrix;
  int volume_rows = 0;
  int trace_rows = 0;
  std::string tag;
};

/// Default exact degree for a product of two polynomials of degree <= m.
int default_quadrature_degree(int max_poly_degree);

/// <grad_dg u, (q, q^)> = (grad_h u, q) - sum_K <u, q^·n_K>_{dK}.
/// Q^ must be an Edge_normal_vector space.
DGOperator assemble_dg_gradient(const FESpace& V, const FESpace& Q, const FESpace& Qhat, int quad_degree = -1);

/// <div_dg q, (v, v^)> = (div_h q, v) - sum_K <q·n_K, v^>_{dK}.
/// V^ must be an Edge_scalar space.
DGOperator assemble_dg_divergence(const FESpace& Q, const FESpace& V, const FESpace& Vhat, int quad_degree = -1);

enum class EdgeOp {
  AvgScalar,         // {v}
  AvgVector,         // {q}
  JumpScalarVector,  // [[v]] = v+ n+ + v- n-
  JumpScalar,        // [v] = [[v]]·n_e
  JumpVectorNormal,  // [q] = q+·n+ + q-·n-
  AvgNormal,         // {{q}} = {q}·n_e
};

/// Values at the points of q (an edge quadrature of e). Scalar results are
/// returned as a 1 x nq matrix, vector results as 2 x nq. Boundary edges use
/// [[v]] = v n, [v] = v, {v} = v, {q} = q, [q] = q·n.
Eigen::MatrixXd jump_average(const ScalarField& v, int e, EdgeOp op, const PhysicalQuadrature& q, const Mesh& mesh);
Eigen::MatrixXd jump_average(const VectorField& p, int e, EdgeOp op, const PhysicalQuadrature& q, const Mesh& mesh);

/// r_e(w) in Q: (r_e(w), q)_Omega = -<w, {q}>_e for all q in Q; w is 2 x nq
/// at the points of the edge quadrature q_e. Returns global coefficients.
Eigen::VectorXd lifting_volume(const FESpace& Q, int e, const PhysicalQuadrature& q_e, const Eigen::MatrixXd& w);

/// r_e(w) in V: (r_e(w), v)_Omega = -<w, {v}>_e for all v in V.
Eigen::VectorXd lifting_scalar(const FESpace& V, int e, const PhysicalQuadrature& q_e, const Eigen::VectorXd& w);

/// Local form of the lifting: for each side s of e (K+ then K-), the matrix
/// R_s with r_e restricted to K_s = R_s * w_weighted, where w_weighted holds
/// w at the edge points times the weights. Vector version stacks the x then
/// y components of w.
struct LocalLifting {
  int element[2] = {-1, -1};
  Eigen::MatrixXd map[2];
};
LocalLifting local_lifting_volume(const FESpace& Q, int e, const PhysicalQuadrature& q_e);
LocalLifting local_lifting_scalar(const FESpace& V, int e, const PhysicalQuadrature& q_e);

}  // namespace ugfem
