#include "ugfem/linsolve.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "ugfem/errors.hpp"

namespace ugfem {

namespace {

constexpr double kSingularRcond = 1e-13;

double inf_norm(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double backward_error(double anorm, const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& r) {
  double denom = anorm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  return denom > 0 ? r.lpNorm<Eigen::Infinity>() / denom : r.lpNorm<Eigen::Infinity>();
}

}  // namespace

struct DirectSolver::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

namespace {

/// Hager's 1-norm estimate of ||A^-1||; y returns the last A^-1 x, which is
/// dominated by the near-null direction when A is close to singular.
double inverse_norm_estimate(Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>& lu, int n,
                             Eigen::VectorXd& y) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double est = 0.0;
  for (int it = 0; it < 5; ++it) {
    y = lu.solve(x);
    est = y.lpNorm<1>();
    if (!std::isfinite(est)) return INFINITY;
    Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    Eigen::VectorXd z = lu.transpose().solve(xi);
    Eigen::Index j;
    double zmax = z.cwiseAbs().maxCoeff(&j);
    if (it > 0 && zmax <= z.dot(x)) break;
    x.setZero();
    x(j) = 1.0;
  }
  return est;
}

double one_norm(const SparseMatrix& A) {
  double m = 0.0;
  for (int c = 0; c < A.outerSize(); ++c) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

DirectSolver::DirectSolver(const SparseMatrix& A) : impl_(std::make_unique<Impl>()), A_(A), n_(static_cast<int>(A.rows())) {
  require(A.rows() == A.cols(), ErrorCode::InvalidArgument, "matrix must be square");
  A_.makeCompressed();
  if (n_ == 0) return;
  auto& lu = impl_->lu;
  lu.analyzePattern(A_);
  lu.factorize(A_);
  if (lu.info() != Eigen::Success) {
    // Eigen reports an exactly zero pivot as "... AT <column>"
    std::string msg = lu.lastErrorMessage();
    long col = -1;
    auto pos = msg.find_last_of(' ');
    if (pos != std::string::npos) col = std::strtol(msg.c_str() + pos + 1, nullptr, 10) - 1;
    throw SingularFactorization(col, "matrix of size " + std::to_string(n_) + " is singular: " + msg);
  }
  Eigen::VectorXd y;
  const double inv = inverse_norm_estimate(lu, n_, y);
  rcond_ = std::isfinite(inv) && inv > 0 ? 1.0 / (one_norm(A_) * inv) : 0.0;
  if (!(rcond_ >= kSingularRcond)) {
    Eigen::Index worst = 0;
    if (y.allFinite()) y.cwiseAbs().maxCoeff(&worst);
    std::ostringstream s;
    s << "matrix of size " << n_ << " is numerically singular (rcond " << rcond_ << ", null direction peaks at unknown "
      << worst << ")";
    throw SingularFactorization(static_cast<long>(worst), s.str());
  }
}

DirectSolver::~DirectSolver() = default;

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b, SolveInfo* info) const {
  require(b.size() == n_, ErrorCode::InvalidArgument, "right-hand side size mismatch");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
  if (n_ == 0) return x;
  const auto& lu = impl_->lu;
  const double anorm = inf_norm(A_);
  x = lu.solve(b);
  Eigen::VectorXd r = b - A_ * x;
  double err = backward_error(anorm, x, b, r);
  int steps = 0;
  while (err > 1e-15 && steps < 5) {
    Eigen::VectorXd xn = x + lu.solve(r);
    Eigen::VectorXd rn = b - A_ * xn;
    double en = backward_error(anorm, xn, b, rn);
    ++steps;
    if (!(en < err)) break;
    x = xn;
    r = rn;
    err = en;
  }
  if (info) {
    info->residual = err;
    info->rcond = rcond_;
    info->refinement_steps = steps;
  }
  require(std::isfinite(err) && err <= 1e-10, ErrorCode::NotConverged,
          "direct solve residual " + std::to_string(err) + " above 1e-10");
  return x;
}

Eigen::VectorXd factor_solve(const SparseMatrix& A, const Eigen::VectorXd& b, SolveInfo* info) {
  DirectSolver solver(A);
  return solver.solve(b, info);
}

EigenPairs gen_eig_smallest(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, int count) {
  require(A.rows() == A.cols() && M.rows() == M.cols() && A.rows() == M.rows(), ErrorCode::InvalidArgument,
          "pencil dimensions do not match");
  require(count >= 1 && count <= A.rows(), ErrorCode::InvalidArgument, "invalid eigenpair count");
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument, "M is not symmetric positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  require(es.info() == Eigen::Success, ErrorCode::NotConverged, "generalized eigensolver did not converge");
  EigenPairs out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  return out;
}

EigenPairs gen_eig_smallest(const SparseMatrix& A, const SparseMatrix& M, int count) {
  return gen_eig_smallest(Eigen::MatrixXd(A), Eigen::MatrixXd(M), count);
}

}  // namespace ugfem
