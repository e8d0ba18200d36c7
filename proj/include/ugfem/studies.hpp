#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ugfem/convergence.hpp"
#include "ugfem/infsup.hpp"
#include "ugfem/study_config.hpp"

namespace ugfem {

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct InfSupReport {
  InfSupKind kind = InfSupKind::WG_grad;
  std::vector<double> h;
  std::vector<int> elements;
  std::vector<double> rho;
  std::vector<std::vector<InfSupResult>> beta;  // beta[level][rho]
  Metadata metadata;

  double min_beta() const;
  double max_beta() const;
  double ratio() const { return max_beta() / min_beta(); }
  bool all_stable() const;
};

struct EquivalenceRow {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return deviation <= tolerance; }
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  Metadata metadata;
  bool pass() const;
};

struct StudyResult {
  StudyKind kind = StudyKind::HConvergence;
  ConvergenceReport convergence;  // h_convergence and rho sweeps
  InfSupReport infsup;
  EquivalenceReport equivalence;
};

/// Meshes of every grid level, in order. File grids are read from disk.
std::vector<MeshPtr> build_grid(const GridSpec& grid);
/// Mesh size of a level: 1/n for uniform grids, N_ele^(-1/2) otherwise.
double level_size(const GridSpec& grid, int level, const Mesh& mesh);

ConvergenceReport run_h_convergence(const StudyConfig& config);
ConvergenceReport run_rho_sweep(const StudyConfig& config);
InfSupReport run_infsup_uniformity(const StudyConfig& config);
EquivalenceReport run_equivalence(const StudyConfig& config);
StudyResult run_study(const StudyConfig& config);

/// Largest entrywise difference between the two systems of a pair (matrix and
/// rhs), relative to max(1, largest entry of the target system). Settings of
/// `method` used: k, rho, eta_rule (condensed pair), eta_e, beta,
/// calibration_scale and, when not Default, spaces.
double equivalence_deviation(EquivalencePair pair, const MethodConfig& method, MeshPtr mesh);

struct CheckOutcome {
  bool pass = true;
  std::vector<std::string> failures;
};

/// Acceptance targets of --check:
///   h_convergence  final rates within check.rate_tolerance of check.rates
///                  (every final rate defined when check.rates is absent)
///   rho sweeps     distances strictly decreasing, final rates >= check.rate_min
///   infsup         no kernel, max/min beta <= check.ratio_max
///   equivalence    every deviation within tolerance
CheckOutcome check_study(const StudyConfig& config, const StudyResult& result);

}  // namespace ugfem
