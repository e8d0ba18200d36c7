#include "ugfem/infsup.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ugfem/errors.hpp"
#include "ugfem/norms.hpp"
#include "ugfem/schemes.hpp"

namespace ugfem {

namespace {

const std::pair<InfSupKind, const char*> kNames[] = {
    {InfSupKind::WG_grad, "WG_grad"}, {InfSupKind::WG_div, "WG_div"},
    {InfSupKind::HDG_div, "HDG_div"}, {InfSupKind::MDG, "MDG"}};

Eigen::MatrixXd slice(const SparseMatrix& A, const Block& rows, const Block& cols) {
  return Eigen::MatrixXd(A.block(rows.offset, cols.offset, rows.size, cols.size));
}

InfSupResult from_values(const Eigen::VectorXd& lambda) {
  InfSupResult r;
  r.size = static_cast<int>(lambda.size());
  r.lambda_max = lambda.cwiseAbs().maxCoeff();
  double lmin = r.lambda_max;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) <= 1e-10 * r.lambda_max)
      ++r.kernel_dim;
    else
      lmin = std::min(lmin, std::abs(lambda(i)));
  }
  r.beta = std::sqrt(lmin);
  return r;
}

}  // namespace

std::string to_string(InfSupKind k) {
  for (auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

InfSupKind infsup_kind_from_string(const std::string& name) {
  for (auto& [kind, n] : kNames)
    if (name == n) return kind;
  fail(ErrorCode::InvalidArgument, "unknown inf-sup kind '" + name + "'");
}

InfSupResult schur_pencil_beta(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, const Eigen::MatrixXd& N) {
  require(B.cols() == M.rows() && B.rows() == N.rows(), ErrorCode::InvalidArgument,
          "inf-sup matrices have mismatched sizes");
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument, "trial Gram matrix is not positive definite");
  Eigen::MatrixXd S = B * llt.solve(B.transpose());
  S = 0.5 * (S + S.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, N, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::NotConverged, "inf-sup eigensolver did not converge");
  return from_values(es.eigenvalues());
}

InfSupResult infsup_estimate(const MethodConfig& config, MeshPtr mesh, double rho, InfSupKind which) {
  require(rho > 0.0, ErrorCode::InvalidArgument, "rho must be positive");
  MethodConfig cfg = config;
  cfg.rho = rho;
  const ManufacturedCase data = zero_case();
  NormParams np;
  np.rho = rho;
  np.eta_e = cfg.eta_e;

  switch (which) {
    case InfSupKind::WG_grad: {
      require(cfg.scheme == Scheme::WG || cfg.scheme == Scheme::HybridPrimal, ErrorCode::Incompatible,
              "WG_grad inf-sup needs a WG configuration");
      LinearSystem sys = assemble_wg(cfg, mesh, data);
      np.trace = sys.spaces.trace;
      const Block &bp = sys.block("p"), &bh = sys.block("p_hat"), &bu = sys.block("u");
      Block flux{"p~", bp.offset, bp.size + bh.size};
      Eigen::MatrixXd B = slice(sys.matrix, bu, flux);
      Eigen::MatrixXd M(norm_gram(NormKind::WG_p, sys.spaces, np));
      Eigen::MatrixXd N(norm_gram(NormKind::WG_u, sys.spaces, np));
      return schur_pencil_beta(B, M, N);
    }
    case InfSupKind::WG_div: {
      require(cfg.scheme == Scheme::WG, ErrorCode::Incompatible, "WG_div inf-sup needs a WG configuration");
      cfg.eta_rule = StabRule::InvRhoInvHK;
      LinearSystem sys = assemble_wg(cfg, mesh, data);
      np.trace = sys.spaces.trace;
      const Block &bp = sys.block("p"), &bh = sys.block("p_hat"), &bu = sys.block("u");
      Block flux{"p~", bp.offset, bp.size + bh.size};
      Eigen::MatrixXd B = slice(sys.matrix, bu, flux);
      Eigen::MatrixXd M(norm_gram(NormKind::WG_div, sys.spaces, np));
      Eigen::MatrixXd N(norm_gram(NormKind::L2Scalar, sys.spaces, np));
      return schur_pencil_beta(B, M, N);
    }
    case InfSupKind::HDG_div: {
      require(cfg.scheme == Scheme::HDG || cfg.scheme == Scheme::HDGReduced || cfg.scheme == Scheme::HybridMixed,
              ErrorCode::Incompatible, "HDG_div inf-sup needs an HDG configuration");
      SpaceBundle sp = make_spaces(cfg, mesh);
      np.trace = sp.trace;
      DGOperator D = assemble_dg_divergence(*sp.q, *sp.u, *sp.trace);
      Eigen::MatrixXd B(D.matrix);
      Eigen::MatrixXd M(norm_gram(NormKind::HDG_div, sp, np));
      Eigen::MatrixXd N(norm_gram(NormKind::HDG_u0, sp, np));
      return schur_pencil_beta(B, M, N);
    }
    case InfSupKind::MDG: {
      require(cfg.scheme == Scheme::MixedDG_Jump || cfg.scheme == Scheme::MixedDG_Lifting, ErrorCode::Incompatible,
              "MDG inf-sup needs a mixed DG configuration");
      LinearSystem sys = assemble_mixed_dg(cfg, mesh, data);
      Eigen::MatrixXd B = slice(sys.matrix, sys.block("u"), sys.block("p"));
      Eigen::MatrixXd M(norm_gram(NormKind::MDG, sys.spaces, np));
      Eigen::MatrixXd N(norm_gram(NormKind::L2Scalar, sys.spaces, np));
      return schur_pencil_beta(B, M, N);
    }
  }
  fail(ErrorCode::Internal, "unhandled inf-sup kind");
}

}  // namespace ugfem
