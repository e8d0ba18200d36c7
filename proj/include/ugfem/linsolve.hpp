#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace ugfem {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolveInfo {
  double residual = 0.0;  // ||Ax - b|| / (||A|| ||x|| + ||b||), infinity norms
  double rcond = 0.0;     // 1-norm reciprocal condition estimate
  int refinement_steps = 0;
};

/// Sparse direct factorization (supernodal LU with partial pivoting, which
/// also covers indefinite saddle-point systems). A zero pivot or a 1-norm
/// reciprocal condition estimate below 1e-13 raises SingularFactorization
/// carrying the offending unknown.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& A);
  ~DirectSolver();
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;

  /// Solves with iterative refinement until the backward error is <= 1e-14
  /// or stagnates; raises NotConverged above 1e-10.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveInfo* info = nullptr) const;
  double rcond() const { return rcond_; }
  int size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SparseMatrix A_;
  int n_ = 0;
  double rcond_ = 0.0;
};

Eigen::VectorXd factor_solve(const SparseMatrix& A, const Eigen::VectorXd& b, SolveInfo* info = nullptr);

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
};

/// Smallest `count` eigenpairs of A v = lambda M v (A symmetric, M SPD), dense.
EigenPairs gen_eig_smallest(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, int count);
EigenPairs gen_eig_smallest(const SparseMatrix& A, const SparseMatrix& M, int count);

}  // namespace ugfem
