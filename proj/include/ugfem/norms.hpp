#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ugfem/field.hpp"
#include "ugfem/manufactured.hpp"
#include "ugfem/method_config.hpp"
#include "ugfem/schemes.hpp"

namespace ugfem {

/// Norm families. Parameter-dependent ones read rho (and eta_e for MDG).
///   L2Scalar    ||u||
///   L2Vector    ||p||
///   DivBroken   ||div_h p||
///   HdivBroken  (||p||^2 + ||div_h p||^2)^1/2
///   H1Broken    |u|_{1,h} = ||grad_h u||
///   WG_p        (c p, p) + rho sum_K h_K ||(p - p^)·n_K||^2_dK
///   WG_u        ||grad_h u||^2 + rho^-1 sum_e h_e^-1 ||Q_e [u]||^2_e
///   WG_div      (c p, p) + ||div_h p||^2 + rho^-1 sum_K h_K^-1 ||(p - p^)·n_K||^2_dK
///   HDG_div     (c p, p) + ||div_h p||^2 + rho^-1 sum_{e interior} h_e^-1 ||P_e [p]||^2_e
///   HDG_u0      ||u||^2 + rho sum_{e interior} h_e ||u^||^2_e
///   HDG_u1      ||grad_h u||^2 + rho^-1 sum_K h_K^-1 ||P u - u^||^2_dK
///   MDG         (c p, p) + ||div_h p||^2 + sum_{e interior} eta_e h_e^-1 ||[p]||^2_e
/// Q_e / P_e is the L2 projection onto the trace space on e (identity when no
/// trace space is given, or for HDG_u1 when `project` is false).
enum class NormKind { L2Scalar, L2Vector, DivBroken, HdivBroken, H1Broken, WG_p, WG_u, WG_div, HDG_div, HDG_u0,
                      HDG_u1, MDG };

std::string to_string(NormKind k);
NormKind norm_kind_from_string(const std::string& name);

/// Fields a norm may read; absent members are null. p_hat is the n_e
/// component of the flux trace.
struct FieldSet {
  ScalarFieldPtr u;
  VectorFieldPtr p;
  EdgeFieldPtr p_hat;
  EdgeFieldPtr u_hat;
};

FieldSet solution_fields(const DiscreteSolution& s);
/// Exact u, p, p^ = p·n_e and u^ = u.
FieldSet exact_fields(const ManufacturedCase& data, MeshPtr mesh);
/// a - b memberwise; a member is kept only when present in both.
FieldSet difference(const FieldSet& a, const FieldSet& b);

struct NormParams {
  double rho = 1.0;
  double eta_e = 1.0;
  SpacePtr trace;                        // projection target for Q_e / P_e
  bool project = true;                   // HDG_u1: apply P_e to u
  std::function<Mat2(const Vec2&)> c;    // null: identity
  int quad_degree = 12;
};

/// Norm of a field set on `mesh` by quadrature. Throws Incompatible when a
/// field required by the kind is missing.
double error_norm(const Mesh& mesh, const FieldSet& f, NormKind kind, const NormParams& params);

/// Gram matrix of a norm on coefficient vectors of a space bundle. Unknown
/// layout: [p; p^] for WG_p and WG_div, [u; u^] for HDG_u0 and HDG_u1, [p] for
/// the other flux norms and [u] for the other scalar norms.
SparseMatrix norm_gram(NormKind kind, const SpaceBundle& spaces, const NormParams& params);

/// Distance between two discrete solutions on the same mesh.
double limit_distance(const DiscreteSolution& a, const DiscreteSolution& b, NormKind kind,
                      const NormParams& params);

}  // namespace ugfem
