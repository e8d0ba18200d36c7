#include "ugfem/method_config.hpp"

#include <cmath>
#include <sstream>

#include "ugfem/errors.hpp"

namespace ugfem {

namespace {

constexpr Scheme kAllSchemes[] = {
    Scheme::ConformingPrimal, Scheme::NonconformingCR, Scheme::MixedRT,        Scheme::MixedBDM,
    Scheme::HybridPrimal,     Scheme::WG,              Scheme::PrimalWGCondensed, Scheme::HybridMixed,
    Scheme::HDG,              Scheme::HDGReduced,      Scheme::PrimalDG_IP,    Scheme::PrimalDG_LDG,
    Scheme::PrimalDG_Bassi,   Scheme::PrimalDG_Brezzi, Scheme::MixedDG_Jump,   Scheme::MixedDG_Lifting};

bool is_hdg_family(Scheme s) {
  return s == Scheme::HDG || s == Scheme::HDGReduced || s == Scheme::HybridMixed || s == Scheme::PrimalWGCondensed;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::ConformingPrimal: return "ConformingPrimal";
    case Scheme::NonconformingCR: return "NonconformingCR";
    case Scheme::MixedRT: return "MixedRT";
    case Scheme::MixedBDM: return "MixedBDM";
    case Scheme::HybridPrimal: return "HybridPrimal";
    case Scheme::WG: return "WG";
    case Scheme::PrimalWGCondensed: return "PrimalWG_condensed";
    case Scheme::HybridMixed: return "HybridMixed";
    case Scheme::HDG: return "HDG";
    case Scheme::HDGReduced: return "HDG_reduced";
    case Scheme::PrimalDG_IP: return "PrimalDG_IP";
    case Scheme::PrimalDG_LDG: return "PrimalDG_LDG";
    case Scheme::PrimalDG_Bassi: return "PrimalDG_Bassi";
    case Scheme::PrimalDG_Brezzi: return "PrimalDG_Brezzi";
    case Scheme::MixedDG_Jump: return "MixedDG_Jump";
    case Scheme::MixedDG_Lifting: return "MixedDG_Lifting";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  for (Scheme s : kAllSchemes)
    if (to_string(s) == name) return s;
  fail(ErrorCode::InvalidArgument, "unknown scheme '" + name + "'");
}

std::string to_string(StabRule r) {
  switch (r) {
    case StabRule::RhoTimesHK: return "rho_times_hK";
    case StabRule::InvRhoInvHK: return "inv_rho_inv_hK";
    case StabRule::Zero: return "zero";
    case StabRule::Calibrated: return "calibrated";
  }
  return "?";
}

StabRule stab_rule_from_string(const std::string& name) {
  for (StabRule r : {StabRule::RhoTimesHK, StabRule::InvRhoInvHK, StabRule::Zero, StabRule::Calibrated})
    if (to_string(r) == name) return r;
  fail(ErrorCode::InvalidArgument, "unknown stabilization rule '" + name + "'");
}

std::string to_string(SpaceVariant v) {
  switch (v) {
    case SpaceVariant::Default: return "default";
    case SpaceVariant::Equal: return "equal";
    case SpaceVariant::RTType: return "rt";
    case SpaceVariant::BDMType: return "bdm";
    case SpaceVariant::PrimalType: return "primal";
  }
  return "?";
}

SpaceVariant space_variant_from_string(const std::string& name) {
  for (SpaceVariant v : {SpaceVariant::Default, SpaceVariant::Equal, SpaceVariant::RTType, SpaceVariant::BDMType,
                         SpaceVariant::PrimalType})
    if (to_string(v) == name) return v;
  fail(ErrorCode::InvalidArgument, "unknown space variant '" + name + "'");
}

double MethodConfig::gamma() const {
  return (scheme == Scheme::PrimalDG_IP || scheme == Scheme::PrimalDG_Bassi) ? 0.0 : 1.0;
}

SpaceVariant MethodConfig::resolved_spaces() const {
  if (spaces != SpaceVariant::Default) return spaces;
  switch (scheme) {
    case Scheme::WG:
      return eta_rule == StabRule::RhoTimesHK ? SpaceVariant::PrimalType : SpaceVariant::RTType;
    case Scheme::HDG:
    case Scheme::HDGReduced:
      if (tau_rule == StabRule::RhoTimesHK) return SpaceVariant::BDMType;
      if (tau_rule == StabRule::InvRhoInvHK) return SpaceVariant::PrimalType;
      return SpaceVariant::Equal;
    case Scheme::HybridMixed: return SpaceVariant::RTType;
    case Scheme::HybridPrimal:
    case Scheme::PrimalWGCondensed: return SpaceVariant::PrimalType;
    case Scheme::MixedDG_Jump: return SpaceVariant::BDMType;
    // the scalar lifting only sees degree k moments of the jump, which is exact for RT normal traces
    case Scheme::MixedDG_Lifting: return SpaceVariant::RTType;
    default: return SpaceVariant::Equal;
  }
}

std::string MethodConfig::describe() const {
  std::ostringstream s;
  s << to_string(scheme) << " k=" << k << " rho=" << rho << " spaces=" << to_string(resolved_spaces());
  if (scheme == Scheme::WG || scheme == Scheme::PrimalWGCondensed) s << " eta=" << to_string(eta_rule);
  if (scheme == Scheme::HDG || scheme == Scheme::HDGReduced) s << " tau=" << to_string(tau_rule);
  if (trace_degree >= 0) s << " r=" << trace_degree;
  return s.str();
}

void validate(const MethodConfig& c) {
  require(c.k >= 0, ErrorCode::InvalidArgument, "k must be >= 0");
  require(std::isfinite(c.rho) && c.rho > 0, ErrorCode::InvalidArgument, "rho must be positive");
  require(std::isfinite(c.eta_e), ErrorCode::InvalidArgument, "eta_e must be finite");
  require(c.calibration_scale > 0, ErrorCode::InvalidArgument, "calibration scale must be positive");
  switch (c.scheme) {
    case Scheme::NonconformingCR:
      require(c.k == 0, ErrorCode::Incompatible, "NonconformingCR needs k = 0");
      break;
    case Scheme::WG:
      require(c.eta_rule != StabRule::Zero, ErrorCode::InvalidArgument, "WG requires a nonzero eta_rule (use HybridPrimal for eta = 0)");
      break;
    case Scheme::PrimalWGCondensed:
      require(c.eta_rule != StabRule::Zero, ErrorCode::InvalidArgument, "primal WG requires a nonzero eta_rule");
      break;
    case Scheme::HDG:
    case Scheme::HDGReduced:
      require(c.tau_rule != StabRule::Zero, ErrorCode::InvalidArgument, "HDG requires a nonzero tau_rule (use HybridMixed for tau = 0)");
      break;
    case Scheme::PrimalDG_IP:
    case Scheme::PrimalDG_LDG:
    case Scheme::PrimalDG_Bassi:
    case Scheme::PrimalDG_Brezzi:
    case Scheme::MixedDG_Jump:
    case Scheme::MixedDG_Lifting:
      require(c.eta_e > 0, ErrorCode::InvalidArgument, "eta_e must be > 0 (coercivity is lost otherwise)");
      break;
    default: break;
  }
  if (c.scheme == Scheme::PrimalDG_IP || c.scheme == Scheme::PrimalDG_Bassi || c.scheme == Scheme::PrimalDG_Brezzi)
    require(c.beta.isZero(), ErrorCode::Incompatible, to_string(c.scheme) + " uses beta = 0");
  if (c.trace_degree >= 0) {
    bool has_trace = c.scheme == Scheme::WG || c.scheme == Scheme::HybridPrimal || is_hdg_family(c.scheme);
    require(has_trace, ErrorCode::Incompatible, "trace_degree is only meaningful for hybrid schemes");
  }
  SpaceVariant v = c.resolved_spaces();
  switch (c.scheme) {
    case Scheme::ConformingPrimal:
    case Scheme::NonconformingCR:
    case Scheme::MixedRT:
    case Scheme::MixedBDM:
      require(c.spaces == SpaceVariant::Default, ErrorCode::Incompatible, to_string(c.scheme) + " has fixed spaces");
      break;
    case Scheme::PrimalDG_IP:
    case Scheme::PrimalDG_LDG:
    case Scheme::PrimalDG_Bassi:
    case Scheme::PrimalDG_Brezzi:
      require(v == SpaceVariant::Equal, ErrorCode::Incompatible, "primal DG uses Q = P_k^2, V = P_k");
      break;
    case Scheme::MixedDG_Jump:
    case Scheme::MixedDG_Lifting:
      // Equal (P_k^2, P_k) is accepted as the deliberately unstable pair
      require(v != SpaceVariant::PrimalType, ErrorCode::Incompatible,
              "mixed DG uses (P_{k+1}^2, P_k), (RT_k, P_k) or (P_k^2, P_k)");
      break;
    default: break;
  }
}

SpaceBundle make_spaces(const MethodConfig& c, MeshPtr mesh) {
  validate(c);
  SpaceBundle b;
  b.mesh = mesh;
  const int k = c.k;
  auto vol = [&](Family f, int d, bool zb = false) { return make_space(f, d, mesh, zb); };
  switch (c.scheme) {
    case Scheme::ConformingPrimal:
      b.u = vol(Family::LagrangeCont, k + 1, true);
      b.q = vol(Family::PDiscVector, k);
      return b;
    case Scheme::NonconformingCR:
      b.u = vol(Family::CR, 0, true);
      b.q = vol(Family::PDiscVector, 0);
      return b;
    case Scheme::MixedRT:
      b.q = vol(Family::RTConf, k);
      b.u = vol(Family::PDiscScalar, k);
      return b;
    case Scheme::MixedBDM:
      b.q = vol(Family::BDMConf, k + 1);
      b.u = vol(Family::PDiscScalar, k);
      return b;
    default: break;
  }
  int qdeg = k, udeg = k, tdeg = k;
  Family qf = Family::PDiscVector;
  switch (c.resolved_spaces()) {
    case SpaceVariant::RTType: qf = Family::RTDisc; break;
    case SpaceVariant::BDMType: qdeg = k + 1; tdeg = k + 1; break;
    case SpaceVariant::PrimalType:
      // a flux trace matches the normal trace of Q = P_k, a scalar trace matches V = P_{k+1}
      udeg = k + 1;
      tdeg = (c.scheme == Scheme::WG || c.scheme == Scheme::HybridPrimal) ? k : k + 1;
      break;
    default: break;
  }
  if (c.trace_degree >= 0) tdeg = c.trace_degree;
  b.q = vol(qf, qdeg);
  b.u = vol(Family::PDiscScalar, udeg);
  if (c.scheme == Scheme::WG || c.scheme == Scheme::HybridPrimal)
    b.trace = make_space(Family::EdgeNormalVector, tdeg, mesh, false);
  else if (is_hdg_family(c.scheme))
    b.trace = make_space(Family::EdgeScalar, tdeg, mesh, true);
  return b;
}

double stabilization(const MethodConfig& c, StabRule rule, const Mesh& m, int K, int i) {
  const double hK = m.h_K[K];
  const int e = m.element_edges[K][i];
  switch (rule) {
    case StabRule::RhoTimesHK: return c.rho * hK;
    case StabRule::InvRhoInvHK: return 1.0 / (c.rho * hK);
    case StabRule::Zero: return 0.0;
    case StabRule::Calibrated: {
      const double base = c.calibration_scale * c.eta_e / m.h_e[e];
      if (m.is_boundary_edge(e)) return base;
      double bn = c.beta.dot(m.edge_normals[e]);
      return 2.0 * base / (1.0 + 4.0 * bn * bn);
    }
  }
  return 0.0;
}

}  // namespace ugfem
