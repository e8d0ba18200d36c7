#include "ugfem/study_config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ugfem/errors.hpp"

namespace ugfem {

namespace {

constexpr StudyKind kStudies[] = {StudyKind::HConvergence, StudyKind::RhoSweepWGMixed, StudyKind::RhoSweepHDGPrimal,
                                  StudyKind::InfSupUniformity, StudyKind::EquivalenceCheck};
constexpr EquivalencePair kPairs[] = {EquivalencePair::HDG_LDG, EquivalencePair::WG_MDG,
                                      EquivalencePair::CondensedSchur};

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorCode::ParseError, "key '" + key + "': cannot read '" + value + "' (" + why + ")");
}

// Accepts plain numbers and fractions "a/b".
double to_double(const std::string& key, const std::string& v) {
  const auto slash = v.find('/');
  if (slash != std::string::npos)
    return to_double(key, trim(v.substr(0, slash))) / to_double(key, trim(v.substr(slash + 1)));
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "expected a number");
  }
  if (used != v.size() || !std::isfinite(x)) bad_value(key, v, "expected a number");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) bad_value(key, v, "expected an integer");
  return static_cast<long long>(x);
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F name) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + name(xs[i]);
  return out;
}

void apply_defaults(StudyConfig& c) {
  MethodConfig& m = c.method;
  switch (c.study) {
    case StudyKind::HConvergence:
      m.scheme = Scheme::MixedDG_Jump;
      c.grid.levels = {4, 8, 16};
      break;
    case StudyKind::RhoSweepWGMixed:
      m.scheme = Scheme::WG;
      m.eta_rule = StabRule::InvRhoInvHK;
      c.grid.levels = {4};
      c.rho_list = {0.25, 0.125, 0.0625};
      c.norms = {NormKind::L2Scalar, NormKind::L2Vector, NormKind::DivBroken};
      break;
    case StudyKind::RhoSweepHDGPrimal:
      m.scheme = Scheme::HDG;
      m.tau_rule = StabRule::InvRhoInvHK;
      c.grid.levels = {4};
      for (double r = 0.25; r >= 1.0 / 512; r /= 2) c.rho_list.push_back(r);
      c.norms = {NormKind::L2Scalar, NormKind::H1Broken};
      c.reference = Scheme::ConformingPrimal;
      break;
    case StudyKind::InfSupUniformity:
      m.scheme = Scheme::WG;
      c.grid.levels = {2, 4, 8};
      c.rho_list = {1.0, 0.25, 0.0625};
      break;
    case StudyKind::EquivalenceCheck:
      c.grid.levels = {2};
      c.pairs.assign(std::begin(kPairs), std::end(kPairs));
      break;
  }
}

bool is_primal(Scheme s) {
  switch (s) {
    case Scheme::ConformingPrimal:
    case Scheme::NonconformingCR:
    case Scheme::PrimalWGCondensed:
    case Scheme::PrimalDG_IP:
    case Scheme::PrimalDG_LDG:
    case Scheme::PrimalDG_Bassi:
    case Scheme::PrimalDG_Brezzi:
    case Scheme::HDG:
    case Scheme::HDGReduced: return true;
    default: return false;
  }
}

InfSupKind default_infsup_kind(const MethodConfig& m) {
  switch (m.scheme) {
    case Scheme::WG: return m.eta_rule == StabRule::RhoTimesHK ? InfSupKind::WG_grad : InfSupKind::WG_div;
    case Scheme::HDG:
    case Scheme::HDGReduced: return InfSupKind::HDG_div;
    default: return InfSupKind::MDG;
  }
}

// Applies one key; returns false when the key is unknown.
bool apply(StudyConfig& c, const std::string& key, const std::string& v) {
  MethodConfig& m = c.method;
  if (key == "study") return true;  // consumed before the defaults
  if (key == "scheme" || key == "scheme.name") m.scheme = scheme_from_string(v);
  else if (key == "scheme.k") m.k = static_cast<int>(to_integer(key, v));
  else if (key == "scheme.rho") m.rho = to_double(key, v);
  else if (key == "scheme.eta_rule") m.eta_rule = stab_rule_from_string(v);
  else if (key == "scheme.tau_rule") m.tau_rule = stab_rule_from_string(v);
  else if (key == "scheme.eta_e") m.eta_e = to_double(key, v);
  else if (key == "scheme.spaces") m.spaces = space_variant_from_string(v);
  else if (key == "scheme.trace_degree") m.trace_degree = static_cast<int>(to_integer(key, v));
  else if (key == "scheme.quad_degree") m.quad_degree = static_cast<int>(to_integer(key, v));
  else if (key == "scheme.calibration_scale") m.calibration_scale = to_double(key, v);
  else if (key == "scheme.beta") {
    auto b = to_doubles(key, v);
    if (b.size() != 2) bad_value(key, v, "expected two components");
    m.beta = Vec2(b[0], b[1]);
  } else if (key == "case") c.case_name = v;
  else if (key == "grid.kind") c.grid.kind = grid_kind_from_string(v);
  else if (key == "grid.levels") c.grid.levels = to_doubles(key, v);
  else if (key == "grid.seed") c.grid.seed = static_cast<std::uint64_t>(to_integer(key, v));
  else if (key == "grid.node") c.grid.node_files = split_list(v);
  else if (key == "grid.ele") c.grid.ele_files = split_list(v);
  else if (key == "norms") {
    c.norms.clear();
    for (const auto& s : split_list(v)) c.norms.push_back(norm_kind_from_string(s));
  } else if (key == "rho.list") c.rho_list = to_doubles(key, v);
  else if (key == "reference") c.reference = scheme_from_string(v);
  else if (key == "infsup.kind") c.infsup_kind = infsup_kind_from_string(v);
  else if (key == "equivalence.pairs") {
    c.pairs.clear();
    for (const auto& s : split_list(v)) c.pairs.push_back(equivalence_pair_from_string(s));
  } else if (key == "equivalence.tolerance") c.tolerance = to_double(key, v);
  else if (key == "output.format") c.format = output_format_from_string(v);
  else if (key == "check.rates") c.check_rates = to_doubles(key, v);
  else if (key == "check.rate_tolerance") c.check_rate_tolerance = to_double(key, v);
  else if (key == "check.rate_min") c.check_rate_min = to_double(key, v);
  else if (key == "check.ratio_max") c.check_ratio_max = to_double(key, v);
  else return false;
  return true;
}

}  // namespace

std::string to_string(StudyKind k) {
  switch (k) {
    case StudyKind::HConvergence: return "h_convergence";
    case StudyKind::RhoSweepWGMixed: return "rho_sweep_wg_mixed";
    case StudyKind::RhoSweepHDGPrimal: return "rho_sweep_hdg_primal";
    case StudyKind::InfSupUniformity: return "infsup_uniformity";
    case StudyKind::EquivalenceCheck: return "equivalence_check";
  }
  return "?";
}

StudyKind study_kind_from_string(const std::string& name) {
  for (StudyKind k : kStudies)
    if (to_string(k) == name) return k;
  fail(ErrorCode::InvalidArgument, "unknown study '" + name + "'");
}

std::string to_string(GridKind k) {
  switch (k) {
    case GridKind::Uniform: return "uniform";
    case GridKind::Unstructured: return "unstructured";
    case GridKind::File: return "file";
  }
  return "?";
}

GridKind grid_kind_from_string(const std::string& name) {
  for (GridKind k : {GridKind::Uniform, GridKind::Unstructured, GridKind::File})
    if (to_string(k) == name) return k;
  fail(ErrorCode::InvalidArgument, "unknown grid kind '" + name + "'");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::CSV ? "csv" : "md"; }

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::CSV;
  if (name == "md" || name == "markdown") return OutputFormat::Markdown;
  fail(ErrorCode::InvalidArgument, "unknown output format '" + name + "'");
}

std::string to_string(EquivalencePair p) {
  switch (p) {
    case EquivalencePair::HDG_LDG: return "hdg_ldg";
    case EquivalencePair::WG_MDG: return "wg_mdg";
    case EquivalencePair::CondensedSchur: return "condensed_schur";
  }
  return "?";
}

EquivalencePair equivalence_pair_from_string(const std::string& name) {
  for (EquivalencePair p : kPairs)
    if (to_string(p) == name) return p;
  fail(ErrorCode::InvalidArgument, "unknown equivalence pair '" + name + "'");
}

int GridSpec::level_count() const {
  return kind == GridKind::File ? static_cast<int>(node_files.size()) : static_cast<int>(levels.size());
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    require(eq != std::string::npos, ErrorCode::ParseError,
            "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    require(!key.empty(), ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key");
    require(!value.empty(), ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty value for " + key);
    out[key] = value;
  }
  return out;
}

StudyConfig build_study_config(const std::map<std::string, std::string>& keys) {
  StudyConfig c;
  if (auto it = keys.find("study"); it != keys.end()) c.study = study_kind_from_string(it->second);
  apply_defaults(c);
  // the scheme decides dependent defaults, so it goes first
  for (const char* first : {"scheme", "scheme.name"})
    if (auto it = keys.find(first); it != keys.end()) apply(c, first, it->second);
  for (const auto& [k, v] : keys)
    require(apply(c, k, v), ErrorCode::InvalidArgument, "unknown key '" + k + "'");
  if (c.study == StudyKind::RhoSweepWGMixed && !keys.count("reference"))
    c.reference = c.method.resolved_spaces() == SpaceVariant::BDMType ? Scheme::MixedBDM : Scheme::MixedRT;
  if (c.study == StudyKind::InfSupUniformity && !keys.count("infsup.kind"))
    c.infsup_kind = default_infsup_kind(c.method);
  if (c.norms.empty()) {
    c.norms = is_primal(c.method.scheme)
                  ? std::vector<NormKind>{NormKind::L2Scalar, NormKind::H1Broken, NormKind::L2Vector}
                  : std::vector<NormKind>{NormKind::L2Scalar, NormKind::L2Vector, NormKind::DivBroken};
  }
  validate(c);
  return c;
}

StudyConfig parse_study_config(std::string_view text) { return build_study_config(parse_key_values(text)); }

std::string to_text(const StudyConfig& c) {
  const MethodConfig& m = c.method;
  std::ostringstream s;
  s << "study = " << to_string(c.study) << "\n";
  s << "scheme = " << to_string(m.scheme) << "\n";
  s << "scheme.k = " << m.k << "\n";
  s << "scheme.rho = " << format_double(m.rho) << "\n";
  s << "scheme.eta_rule = " << to_string(m.eta_rule) << "\n";
  s << "scheme.tau_rule = " << to_string(m.tau_rule) << "\n";
  s << "scheme.eta_e = " << format_double(m.eta_e) << "\n";
  s << "scheme.beta = " << format_double(m.beta.x()) << "," << format_double(m.beta.y()) << "\n";
  s << "scheme.spaces = " << to_string(m.spaces) << "\n";
  s << "scheme.trace_degree = " << m.trace_degree << "\n";
  s << "scheme.quad_degree = " << m.quad_degree << "\n";
  s << "scheme.calibration_scale = " << format_double(m.calibration_scale) << "\n";
  s << "case = " << c.case_name << "\n";
  s << "grid.kind = " << to_string(c.grid.kind) << "\n";
  if (c.grid.kind == GridKind::File) {
    s << "grid.node = " << join(c.grid.node_files, [](const std::string& x) { return x; }) << "\n";
    s << "grid.ele = " << join(c.grid.ele_files, [](const std::string& x) { return x; }) << "\n";
  } else {
    s << "grid.levels = " << join_doubles(c.grid.levels) << "\n";
  }
  s << "grid.seed = " << c.grid.seed << "\n";
  s << "norms = " << join(c.norms, [](NormKind k) { return to_string(k); }) << "\n";
  if (!c.rho_list.empty()) s << "rho.list = " << join_doubles(c.rho_list) << "\n";
  s << "reference = " << to_string(c.reference) << "\n";
  s << "infsup.kind = " << to_string(c.infsup_kind) << "\n";
  if (!c.pairs.empty())
    s << "equivalence.pairs = " << join(c.pairs, [](EquivalencePair p) { return to_string(p); }) << "\n";
  s << "equivalence.tolerance = " << format_double(c.tolerance) << "\n";
  s << "output.format = " << to_string(c.format) << "\n";
  if (!c.check_rates.empty()) s << "check.rates = " << join_doubles(c.check_rates) << "\n";
  s << "check.rate_tolerance = " << format_double(c.check_rate_tolerance) << "\n";
  s << "check.rate_min = " << format_double(c.check_rate_min) << "\n";
  s << "check.ratio_max = " << format_double(c.check_ratio_max) << "\n";
  return s.str();
}

void validate(const StudyConfig& c) {
  validate(c.method);
  case_from_name(c.case_name);
  const GridSpec& g = c.grid;
  if (g.kind == GridKind::File) {
    require(!g.node_files.empty() && g.node_files.size() == g.ele_files.size(), ErrorCode::InvalidArgument,
            "file grids need matching grid.node and grid.ele lists");
  } else {
    require(!g.levels.empty(), ErrorCode::InvalidArgument, "grid.levels is empty");
    for (double l : g.levels) {
      if (g.kind == GridKind::Uniform)
        require(l >= 1 && l == std::floor(l), ErrorCode::InvalidArgument, "uniform levels must be positive integers");
      else
        require(l > 0 && l < 1, ErrorCode::InvalidArgument, "unstructured levels are target sizes in (0, 1)");
    }
  }
  require(c.check_rates.empty() || c.check_rates.size() == c.norms.size(), ErrorCode::InvalidArgument,
          "check.rates needs one value per norm");
  auto rho_list_ok = [&] {
    for (double r : c.rho_list) require(r > 0, ErrorCode::InvalidArgument, "rho values must be positive");
  };
  switch (c.study) {
    case StudyKind::HConvergence:
      require(g.level_count() >= 2, ErrorCode::InvalidArgument, "h_convergence needs at least two grid levels");
      break;
    case StudyKind::RhoSweepWGMixed:
      require(c.method.scheme == Scheme::WG, ErrorCode::Incompatible, "rho_sweep_wg_mixed needs scheme WG");
      require(c.method.eta_rule == StabRule::InvRhoInvHK, ErrorCode::Incompatible,
              "the WG to mixed limit needs eta_rule inv_rho_inv_hK");
      require(c.reference == Scheme::MixedRT || c.reference == Scheme::MixedBDM, ErrorCode::Incompatible,
              "rho_sweep_wg_mixed needs reference MixedRT or MixedBDM");
      require(c.method.resolved_spaces() ==
                  (c.reference == Scheme::MixedRT ? SpaceVariant::RTType : SpaceVariant::BDMType),
              ErrorCode::Incompatible, "WG spaces must match the mixed reference (RT or BDM type)");
      [[fallthrough]];
    case StudyKind::RhoSweepHDGPrimal:
      if (c.study == StudyKind::RhoSweepHDGPrimal) {
        require(c.method.scheme == Scheme::HDG || c.method.scheme == Scheme::HDGReduced, ErrorCode::Incompatible,
                "rho_sweep_hdg_primal needs scheme HDG or HDG_reduced");
        require(c.method.tau_rule == StabRule::InvRhoInvHK, ErrorCode::Incompatible,
                "the HDG to primal limit needs tau_rule inv_rho_inv_hK");
        require(c.method.resolved_spaces() == SpaceVariant::PrimalType, ErrorCode::Incompatible,
                "the HDG to primal limit needs primal type spaces");
        require(c.reference == Scheme::ConformingPrimal, ErrorCode::Incompatible,
                "rho_sweep_hdg_primal needs reference ConformingPrimal");
      }
      require(g.level_count() == 1, ErrorCode::InvalidArgument, "rho sweeps run on a single grid level");
      require(c.rho_list.size() >= 2, ErrorCode::InvalidArgument, "rho sweeps need at least two rho values");
      rho_list_ok();
      break;
    case StudyKind::InfSupUniformity:
      require(!c.rho_list.empty(), ErrorCode::InvalidArgument, "infsup_uniformity needs rho.list");
      rho_list_ok();
      if (g.kind == GridKind::Uniform)
        for (double l : g.levels)
          require(l <= 16, ErrorCode::InvalidArgument, "inf-sup estimates are dense: uniform levels must be <= 16");
      break;
    case StudyKind::EquivalenceCheck:
      require(!c.pairs.empty(), ErrorCode::InvalidArgument, "equivalence_check needs equivalence.pairs");
      require(c.tolerance > 0, ErrorCode::InvalidArgument, "equivalence tolerance must be positive");
      break;
  }
}

}  // namespace ugfem
