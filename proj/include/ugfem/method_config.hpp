#pragma once

#include <string>

#include "ugfem/fe_space.hpp"

namespace ugfem {

enum class Scheme {
  ConformingPrimal,
  NonconformingCR,
  MixedRT,
  MixedBDM,
  HybridPrimal,
  WG,
  PrimalWGCondensed,
  HybridMixed,
  HDG,
  HDGReduced,
  PrimalDG_IP,
  PrimalDG_LDG,
  PrimalDG_Bassi,
  PrimalDG_Brezzi,
  MixedDG_Jump,
  MixedDG_Lifting,
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// Stabilization scale per (element, edge).
/// Calibrated: per-edge factor that makes the trace substitution of the
/// hybrid schemes reproduce the LDG / mixed-LDG penalty exactly.
enum class StabRule { RhoTimesHK, InvRhoInvHK, Zero, Calibrated };

std::string to_string(StabRule r);
StabRule stab_rule_from_string(const std::string& name);

/// Space triple selector; meaning of k follows the scheme:
///   Equal      Q = P_k^2,        V = P_k,     trace P_k
///   RTType     Q = RT_k (broken), V = P_k,    trace P_k
///   BDMType    Q = P_{k+1}^2,    V = P_k,     trace P_{k+1}
///   PrimalType Q = P_k^2,        V = P_{k+1}, trace P_k (flux traces) or P_{k+1} (scalar traces)
enum class SpaceVariant { Default, Equal, RTType, BDMType, PrimalType };

std::string to_string(SpaceVariant v);
SpaceVariant space_variant_from_string(const std::string& name);

struct MethodConfig {
  Scheme scheme = Scheme::WG;
  int k = 0;
  double rho = 1.0;
  StabRule eta_rule = StabRule::RhoTimesHK;  // WG and primal WG
  StabRule tau_rule = StabRule::RhoTimesHK;  // HDG family
  double eta_e = 1.0;
  Vec2 beta = Vec2::Zero();
  int trace_degree = -1;  // -1: from the space variant
  SpaceVariant spaces = SpaceVariant::Default;
  double calibration_scale = 1.0;  // multiplies Calibrated factors
  int quad_degree = -1;            // -1: 2 * (max polynomial degree) + 2

  /// Flux blend gamma of the primal DG fluxes (1 for LDG/Brezzi, 0 for IP/Bassi).
  double gamma() const;
  /// Space variant after resolving Default for the scheme.
  SpaceVariant resolved_spaces() const;
  std::string describe() const;
};

/// Throws InvalidArgument / Incompatible for unusable parameter combinations.
void validate(const MethodConfig& config);

/// Spaces of one discretization. q: flux space, u: scalar space, trace:
/// p^ (Edge_normal_vector) or u^ (Edge_scalar, zero on the boundary).
struct SpaceBundle {
  MeshPtr mesh;
  SpacePtr q, u, trace;
};

SpaceBundle make_spaces(const MethodConfig& config, MeshPtr mesh);

/// Value of the stabilization scale on element K, local edge i.
double stabilization(const MethodConfig& config, StabRule rule, const Mesh& mesh, int K, int i);

}  // namespace ugfem
