#pragma once

#include <string>

#include "ugfem/method_config.hpp"

namespace ugfem {

/// Which stability statement is measured.
///   WG_grad  inf_v sup_p~ b_w(p~, v) / (|v|_{WG_u} |p~|_{WG_p})
///   WG_div   inf_v sup_p~ b_w(p~, v) / (|v| |p~|_{WG_div})
///   HDG_div  inf_u~ sup_q b_h(q, u~) / (|q|_{HDG_div} |u~|_{HDG_u0})
///   MDG      inf_v sup_q b_MDG(q, v) / (|q|_{MDG} |v|)
enum class InfSupKind { WG_grad, WG_div, HDG_div, MDG };

std::string to_string(InfSupKind k);
InfSupKind infsup_kind_from_string(const std::string& name);

struct InfSupResult {
  double beta = 0.0;        // sqrt of the smallest nonzero pencil eigenvalue
  double lambda_max = 0.0;  // largest pencil eigenvalue
  int kernel_dim = 0;       // eigenvalues below 1e-10 * lambda_max
  int size = 0;             // pencil dimension
  bool stable() const { return kernel_dim == 0; }
};

/// Dense estimate on the spaces of `config` (scheme family must match the
/// kind). rho enters the norms only; b does not depend on the stabilization.
/// Meant for small meshes (uniform n <= 16).
InfSupResult infsup_estimate(const MethodConfig& config, MeshPtr mesh, double rho, InfSupKind which);

/// Same from explicit matrices: inf over the row unknowns of B (Gram N), sup
/// over its column unknowns (Gram M).
InfSupResult schur_pencil_beta(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, const Eigen::MatrixXd& N);

}  // namespace ugfem
