#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ugfem/errors.hpp"
#include "ugfem/report.hpp"

namespace {

constexpr int kOk = 0, kConfigError = 1, kNumericalFailure = 2, kCheckFailed = 3;

int exit_code(ugfem::ErrorCode code) {
  switch (code) {
    case ugfem::ErrorCode::SingularFactorization:
    case ugfem::ErrorCode::NotConverged:
    case ugfem::ErrorCode::Instability:
    case ugfem::ErrorCode::Internal: return kNumericalFailure;
    default: return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ugfem: finite element convergence, limit, inf-sup and equivalence studies"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run the study described by a key = value config file");

  std::string config_path, output_path;
  std::map<std::string, std::string> flag_keys;
  std::vector<std::string> sets;
  bool check = false;
  run->add_option("config", config_path, "config file")->required();
  auto key_option = [&](const char* flag, const char* key, const char* help) {
    run->add_option_function<std::string>(flag, [&flag_keys, key](const std::string& v) { flag_keys[key] = v; },
                                          help);
  };
  key_option("--scheme", "scheme", "scheme name, e.g. WG, HDG, MixedDG_Jump");
  key_option("--k", "scheme.k", "polynomial degree parameter");
  key_option("--study", "study", "h_convergence, rho_sweep_wg_mixed, rho_sweep_hdg_primal, infsup_uniformity, equivalence_check");
  key_option("--rho-list", "rho.list", "comma separated rho values (fractions allowed)");
  key_option("--levels", "grid.levels", "uniform cell counts or unstructured target sizes");
  key_option("--grid", "grid.kind", "uniform, unstructured or file");
  key_option("--mesh-node", "grid.node", "comma separated .node files");
  key_option("--mesh-ele", "grid.ele", "comma separated .ele files");
  key_option("--seed", "grid.seed", "seed of the unstructured generator");
  key_option("--out", "output.format", "csv or md");
  run->add_option("--set", sets, "extra key=value overrides");
  run->add_option("--output", output_path, "write the table here instead of stdout");
  run->add_flag("--check", check, "exit 3 when the study misses its acceptance targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << config_path << "\n";
      return kConfigError;
    }
    std::ostringstream text;
    text << in.rdbuf();
    auto keys = ugfem::parse_key_values(text.str());
    for (const auto& [k, v] : flag_keys) keys[k] = v;
    for (const auto& s : sets) {
      for (const auto& [k, v] : ugfem::parse_key_values(s)) keys[k] = v;
    }
    const ugfem::StudyConfig config = ugfem::build_study_config(keys);
    const ugfem::StudyResult result = ugfem::run_study(config);
    const std::string table = ugfem::emit(result, config.format);
    if (output_path.empty()) {
      std::cout << table;
    } else {
      std::ofstream out(output_path, std::ios::binary);
      out << table;
      if (!out) {
        std::cerr << "error: cannot write " << output_path << "\n";
        return kConfigError;
      }
    }
    if (check) {
      const ugfem::CheckOutcome outcome = ugfem::check_study(config, result);
      for (const auto& f : outcome.failures) std::cerr << "check failed: " << f << "\n";
      if (!outcome.pass) return kCheckFailed;
      std::cerr << "check passed\n";
    }
  } catch (const ugfem::Error& e) {
    std::cerr << "error (" << ugfem::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}
