#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ugfem/dg_calculus.hpp"
#include "ugfem/manufactured.hpp"
#include "ugfem/method_config.hpp"

namespace ugfem {

/// Contiguous block of unknowns ("p", "p_hat", "u", "u_hat").
struct Block {
  std::string name;
  int offset = 0;
  int size = 0;
};

/// Optional extra data of the mixed and primal variational forms:
/// g1 enters the flux equation as (g1, q), g2 as <g2, v>_{dT} (mixed) or
/// <g2, q·n_K>_{dT} (primal); g2 may be two-valued, hence the element index.
struct ExtraData {
  VectorFunction g1;
  std::function<double(int K, const Vec2& x)> g2;
  bool empty() const { return !g1 && !g2; }
};

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<Block> blocks;
  bool symmetric = true;
  MethodConfig config;
  SpaceBundle spaces;
  std::shared_ptr<const ManufacturedCase> data;
  ExtraData extra;

  int size() const { return static_cast<int>(rhs.size()); }
  /// Block by name; throws Internal when absent.
  const Block& block(const std::string& name) const;
  bool has_block(const std::string& name) const;
};

struct DiscreteSolution {
  MethodConfig config;
  SpaceBundle spaces;
  Eigen::VectorXd p;      // coefficients in spaces.q
  Eigen::VectorXd u;      // coefficients in spaces.u
  Eigen::VectorXd trace;  // p^ or u^ in spaces.trace (empty when absent)
  double residual = 0.0;  // relative residual of the assembled system

  VectorFieldPtr p_field() const;
  ScalarFieldPtr u_field() const;
};

/// WG (eta from config.eta_rule) and HybridPrimal (eta = 0).
/// Unknowns (p, p^, u).
LinearSystem assemble_wg(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data);

/// Primal WG: the p-block of the HDG-type system eliminated, unknowns (u, u^).
LinearSystem assemble_primal_wg_condensed(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data);

/// HDG, HDG_reduced and HybridMixed (tau = 0). Unknowns (p, u, u^).
LinearSystem assemble_hdg(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data);

/// MixedRT / MixedBDM. Unknowns (p, u).
LinearSystem assemble_mixed(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data,
                            const ExtraData& extra = {});

/// ConformingPrimal / NonconformingCR stiffness system. Unknowns (u).
LinearSystem assemble_primal(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data,
                             const ExtraData& extra = {});

/// Primal DG with the numerical fluxes of the LDG/Brezzi (two-field, unknowns
/// (p, u)) and IP/Bassi (flux p^ = {-alpha grad u} + penalty; the flux
/// equation is eliminated exactly, unknowns (u)) families.
LinearSystem assemble_primal_dg(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data);

/// MixedDG_Jump / MixedDG_Lifting. Unknowns (p, u).
LinearSystem assemble_mixed_dg(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data);

/// Dispatches on config.scheme.
LinearSystem assemble(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data);

enum class Substitution { UHatAvgPlusBetaJump, PHatAvg };
std::string to_string(Substitution s);

/// Eliminates the trace unknowns by the affine substitution
///   u^ = P({u} + beta·[[u]]) (HDG source) or p^ = P({p}·n_e) (WG source)
/// and returns T' A T, T' b over the remaining (p, u) unknowns.
LinearSystem substitute_traces(const LinearSystem& source, Substitution s);

/// The substitution matrix T (full unknowns x source-remaining unknowns).
SparseMatrix substitution_matrix(const LinearSystem& source, Substitution s);

/// Solves with the sparse direct solver and splits the fields. For (u)-only
/// systems p is recovered from the flux equation.
DiscreteSolution solve(const LinearSystem& system);

/// Recovered flux of a primal solution: p = -P_Q(alpha grad_h u) (plus the
/// lifted jumps for IP/Bassi).
Eigen::VectorXd recover_flux(const LinearSystem& system, const Eigen::VectorXd& u);

/// max |A - A'| / max |A|.
double asymmetry(const SparseMatrix& A);

/// Largest absolute entry.
double max_abs(const SparseMatrix& A);

}  // namespace ugfem
