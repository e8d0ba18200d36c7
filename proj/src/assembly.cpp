#include "assembly.hpp"

#include <algorithm>

namespace ugfem::detail {

void LocalDofs::append(const std::vector<int>& dofs, const std::vector<double>* signs, int offset) {
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    idx.push_back(dofs[i] >= 0 ? dofs[i] + offset : -1);
    sign.push_back(signs ? (*signs)[i] : 1.0);
  }
}

LocalDofs element_dofs(const FESpace& S, int K, int offset) {
  LocalDofs d;
  d.append(S.element_dofs(K), &S.element_signs(K), offset);
  return d;
}

LocalDofs edge_dofs(const FESpace& S, int e, int offset) {
  LocalDofs d;
  d.append(S.edge_dofs(e), nullptr, offset);
  return d;
}

void Triplets::add(const LocalDofs& rows, const LocalDofs& cols, const Eigen::MatrixXd& M) {
  for (int i = 0; i < rows.size(); ++i) {
    if (rows.idx[i] < 0) continue;
    for (int j = 0; j < cols.size(); ++j) {
      if (cols.idx[j] < 0) continue;
      double v = M(i, j);
      if (v != 0.0) t_.emplace_back(rows.idx[i], cols.idx[j], rows.sign[i] * cols.sign[j] * v);
    }
  }
}

void Triplets::add_symmetric_pair(const LocalDofs& rows, const LocalDofs& cols, const Eigen::MatrixXd& M) {
  add(rows, cols, M);
  add(cols, rows, M.transpose());
}

void Triplets::add_sparse(const Eigen::SparseMatrix<double>& S, int row_offset, int col_offset, double scale,
                          bool transpose) {
  for (int c = 0; c < S.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, c); it; ++it) {
      int r = static_cast<int>(it.row()), cc = static_cast<int>(it.col());
      if (transpose) std::swap(r, cc);
      t_.emplace_back(row_offset + r, col_offset + cc, scale * it.value());
    }
}

Eigen::SparseMatrix<double> Triplets::build(int rows, int cols) const {
  Eigen::SparseMatrix<double> A(rows, cols);
  A.setFromTriplets(t_.begin(), t_.end());
  A.prune(0.0);
  return A;
}

void scatter(Eigen::VectorXd& global, const LocalDofs& dofs, const Eigen::VectorXd& local) {
  for (int i = 0; i < dofs.size(); ++i)
    if (dofs.idx[i] >= 0) global(dofs.idx[i]) += dofs.sign[i] * local(i);
}

int quadrature_degree(const MethodConfig& config, const SpaceBundle& sp) {
  if (config.quad_degree >= 0) return std::min(config.quad_degree, kMaxQuadratureDegree);
  int m = 0;
  if (sp.q) m = std::max(m, sp.q->poly_degree());
  if (sp.u) m = std::max(m, sp.u->poly_degree());
  if (sp.trace) m = std::max(m, sp.trace->degree());
  return default_quadrature_degree(m);
}

Eigen::MatrixXd weighted_vector_mass(const FESpace& Q, int K, const std::function<Mat2(const Vec2&)>* A,
                                     const PhysicalQuadrature& q) {
  BasisValues b;
  Q.evaluate(K, q.points, b, false);
  auto w = weights(q);
  if (!A) return b.vx * w.asDiagonal() * b.vx.transpose() + b.vy * w.asDiagonal() * b.vy.transpose();
  const int n = static_cast<int>(b.vx.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < q.size(); ++k) {
    Mat2 a = (*A)(q.points[k]);
    Eigen::VectorXd ax = a(0, 0) * b.vx.col(k) + a(0, 1) * b.vy.col(k);
    Eigen::VectorXd ay = a(1, 0) * b.vx.col(k) + a(1, 1) * b.vy.col(k);
    out += w(k) * (b.vx.col(k) * ax.transpose() + b.vy.col(k) * ay.transpose());
  }
  return out;
}

Eigen::MatrixXd c_mass(const FESpace& Q, int K, const ManufacturedCase& data, const PhysicalQuadrature& q) {
  if (data.alpha_identity) return weighted_vector_mass(Q, K, nullptr, q);
  std::function<Mat2(const Vec2&)> c = [&data](const Vec2& x) { return data.c(x); };
  return weighted_vector_mass(Q, K, &c, q);
}

Eigen::MatrixXd stiffness(const FESpace& V, int K, const ManufacturedCase& data, const PhysicalQuadrature& q) {
  BasisValues b;
  V.evaluate(K, q.points, b, true);
  auto w = weights(q);
  if (data.alpha_identity) return b.dx * w.asDiagonal() * b.dx.transpose() + b.dy * w.asDiagonal() * b.dy.transpose();
  const int n = static_cast<int>(b.dx.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < q.size(); ++k) {
    Mat2 a = data.alpha(q.points[k]);
    Eigen::VectorXd ax = a(0, 0) * b.dx.col(k) + a(0, 1) * b.dy.col(k);
    Eigen::VectorXd ay = a(1, 0) * b.dx.col(k) + a(1, 1) * b.dy.col(k);
    out += w(k) * (b.dx.col(k) * ax.transpose() + b.dy.col(k) * ay.transpose());
  }
  return out;
}

Eigen::VectorXd load(const FESpace& V, int K, const ScalarFunction& f, const PhysicalQuadrature& q) {
  BasisValues b;
  V.evaluate(K, q.points, b, false);
  Eigen::VectorXd fw(q.size());
  for (int k = 0; k < q.size(); ++k) fw(k) = f(q.points[k]) * q.weights[k];
  return b.val * fw;
}

Eigen::MatrixXd normal_values(const FESpace& Q, int K, const PhysicalQuadrature& q, const Vec2& n) {
  BasisValues b;
  Q.evaluate(K, q.points, b, false);
  return n.x() * b.vx + n.y() * b.vy;
}

Eigen::MatrixXd scalar_values(const FESpace& V, int K, const PhysicalQuadrature& q) {
  BasisValues b;
  V.evaluate(K, q.points, b, false);
  return b.val;
}

}  // namespace ugfem::detail
