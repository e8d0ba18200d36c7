#pragma once

#include <Eigen/Core>

#include "ugfem/norms.hpp"
#include "ugfem/schemes.hpp"

namespace ugfem {

/// Residual of the equations of `system` with `trial` inserted in place of the
/// discrete unknowns: entry i is the bilinear forms evaluated at (trial, basis
/// function i) minus rhs_i, with every integral taken by quadrature of degree
/// quad_degree. For discrete trial fields this equals A x - b. Supported:
/// WG, HybridPrimal, HDG, HDG_reduced, HybridMixed, MixedDG_Jump,
/// MixedDG_Lifting.
Eigen::VectorXd form_residual(const LinearSystem& system, const FieldSet& trial, int quad_degree);

struct ConsistencyReport {
  double max_residual = 0.0;  // max_i |r_i|
  double rhs_scale = 0.0;     // max_i |b_i|
  double relative = 0.0;      // max_residual / rhs_scale
};

/// Inserts the exact solution of `data` (u, p, p^ = p·n_e, u^ = u).
ConsistencyReport consistency_check(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data,
                                    int quad_degree);

}  // namespace ugfem
