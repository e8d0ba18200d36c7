#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ugfem/infsup.hpp"
#include "ugfem/method_config.hpp"
#include "ugfem/norms.hpp"

namespace ugfem {

enum class StudyKind { HConvergence, RhoSweepWGMixed, RhoSweepHDGPrimal, InfSupUniformity, EquivalenceCheck };
std::string to_string(StudyKind k);
StudyKind study_kind_from_string(const std::string& name);

enum class GridKind { Uniform, Unstructured, File };
std::string to_string(GridKind k);
GridKind grid_kind_from_string(const std::string& name);

enum class OutputFormat { CSV, Markdown };
std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& name);

enum class EquivalencePair { HDG_LDG, WG_MDG, CondensedSchur };
std::string to_string(EquivalencePair p);
EquivalencePair equivalence_pair_from_string(const std::string& name);

/// Uniform: `levels` are cell counts n. Unstructured: `levels` are target
/// element sizes. File: one (node, ele) pair per level.
struct GridSpec {
  GridKind kind = GridKind::Uniform;
  std::vector<double> levels;
  std::uint64_t seed = 1;
  std::vector<std::string> node_files, ele_files;

  int level_count() const;
};

struct StudyConfig {
  StudyKind study = StudyKind::HConvergence;
  MethodConfig method;
  std::string case_name = "sin_sin";
  GridSpec grid;
  std::vector<NormKind> norms;
  std::vector<double> rho_list;
  Scheme reference = Scheme::MixedRT;  // rho sweeps
  InfSupKind infsup_kind = InfSupKind::WG_grad;
  std::vector<EquivalencePair> pairs;
  double tolerance = 1e-10;  // equivalence deviation
  OutputFormat format = OutputFormat::CSV;
  // --check targets
  std::vector<double> check_rates;  // h_convergence: expected final rate per norm
  double check_rate_tolerance = 0.15;
  double check_rate_min = 0.8;      // rho sweeps: final-interval floor
  double check_ratio_max = 3.0;     // inf-sup max/min
};

/// Key/value pairs of the text format: `key = value`, `#` comments, blank
/// lines ignored. Later keys override earlier ones. Throws ParseError.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Builds a validated config: study defaults first, then every key.
/// Throws InvalidArgument / ParseError / Incompatible.
StudyConfig build_study_config(const std::map<std::string, std::string>& keys);
StudyConfig parse_study_config(std::string_view text);

/// Every setting as `key = value` lines; parse_study_config(to_text(c))
/// reproduces c.
std::string to_text(const StudyConfig& c);

void validate(const StudyConfig& c);

}  // namespace ugfem
