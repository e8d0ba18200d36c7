#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ugfem/errors.hpp"
#include "ugfem/report.hpp"
#include "ugfem/studies.hpp"
#include "ugfem/study_config.hpp"

using namespace ugfem;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) out.push_back(item);
  return out;
}

// Non-comment lines of a CSV table.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  for (const std::string& line : split(text, '\n'))
    if (!line.empty() && line[0] != '#') rows.push_back(split(line, ','));
  return rows;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / ("ugfem_harness_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UGFEM_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

StudyConfig config(const std::string& text) { return parse_study_config(text); }

}  // namespace

TEST(StudyConfigTest, KeyValueParsing) {
  auto kv = parse_key_values("# comment\nstudy = h_convergence  # trailing\n\n scheme.k=2\nscheme.k = 3\n");
  EXPECT_EQ(kv.at("study"), "h_convergence");
  EXPECT_EQ(kv.at("scheme.k"), "3");
  try {
    parse_key_values("study = h_convergence\nthis line has no equals\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(StudyConfigTest, DefaultsAndOverrides) {
  StudyConfig c = config("study = rho_sweep_wg_mixed\nscheme.spaces = bdm\n");
  EXPECT_EQ(c.method.scheme, Scheme::WG);
  EXPECT_EQ(c.method.eta_rule, StabRule::InvRhoInvHK);
  EXPECT_EQ(c.reference, Scheme::MixedBDM);
  EXPECT_EQ(c.rho_list.size(), 3u);
  EXPECT_EQ(c.grid.levels, std::vector<double>{4});
  StudyConfig h = config("study = rho_sweep_hdg_primal\nscheme.k = 1\n");
  EXPECT_EQ(h.reference, Scheme::ConformingPrimal);
  EXPECT_EQ(h.rho_list.back(), 1.0 / 512);
  StudyConfig f = config("study = h_convergence\ngrid.levels = 2, 4\nrho.list = 1/3\n");
  EXPECT_EQ(f.method.scheme, Scheme::MixedDG_Jump);
  EXPECT_DOUBLE_EQ(f.rho_list.at(0), 1.0 / 3);
}

TEST(StudyConfigTest, RoundTrip) {
  for (const char* text : {"study = h_convergence\nscheme = WG\nscheme.k = 2\nscheme.rho = 0.3\ngrid.kind = unstructured\ngrid.levels = 0.2, 0.1\ngrid.seed = 9\noutput.format = md\n",
                           "study = rho_sweep_hdg_primal\nscheme.k = 1\n", "study = infsup_uniformity\nscheme = HDG\n",
                           "study = equivalence_check\nequivalence.pairs = wg_mdg\nequivalence.tolerance = 1e-9\n"}) {
    StudyConfig c = config(text);
    const std::string once = to_text(c);
    EXPECT_EQ(to_text(parse_study_config(once)), once) << text;
  }
}

TEST(StudyConfigTest, Validation) {
  EXPECT_EQ(code_of([] { config("study = h_convergence\ngrid.levels = 4\n"); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { config("study = rho_sweep_wg_mixed\nrho.list = 1/4\n"); }), ErrorCode::InvalidArgument);
  EXPECT_NE(code_of([] { config("study = rho_sweep_wg_mixed\nscheme.eta_rule = rho_times_hK\n"); }), ErrorCode::Internal);
  EXPECT_NE(code_of([] { config("study = nonsense\n"); }), ErrorCode::Internal);
  EXPECT_NE(code_of([] { config("study = h_convergence\nscheme.k = two\n"); }), ErrorCode::Internal);
  EXPECT_NE(code_of([] { config("study = h_convergence\nunknown.key = 1\n"); }), ErrorCode::Internal);
  EXPECT_NE(code_of([] { config("study = infsup_uniformity\ngrid.levels = 2, 32\n"); }), ErrorCode::Internal);
}

TEST(Report, ConvergenceCsv) {
  ConvergenceReport r;
  r.variable = Variable::H;
  r.columns = {"L2_scalar", "L2_vector"};
  r.rows = {{0.25, 32, {0.1, 1e-20}}, {0.125, 128, {0.025, 1e-21}}, {0.0625, 512, {0.00625, 1e-22}}};
  r.metadata = {{"scheme", "WG"}};
  r.compute_rates();
  const std::string text = emit(r, OutputFormat::CSV);
  EXPECT_EQ(text.rfind("# scheme = WG", 0), 0u);
  auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"h", "L2_scalar", "rate1", "L2_vector", "rate2"}));
  for (const auto& row : rows) EXPECT_EQ(row.size(), 1 + 2 * r.columns.size());
  EXPECT_EQ(rows[1][2], "--");
  EXPECT_EQ(rows[2][2], "2.00");
  EXPECT_EQ(rows[2][4], "undef");
  // values parse back to the table entries
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(std::stod(rows[i + 1][0]), r.rows[i].value);
    EXPECT_NEAR(std::stod(rows[i + 1][1]), r.rows[i].errors[0], 1e-6 * r.rows[i].errors[0]);
  }
  const std::string md = emit(r, OutputFormat::Markdown);
  EXPECT_NE(md.find("| --"), std::string::npos);
  EXPECT_NE(md.find("1/8"), std::string::npos);
  EXPECT_EQ(format_error(0.00146501), "0.00146501");
  EXPECT_EQ(format_rate(2.036), "2.04");
}

TEST(Studies, HConvergenceRowsMatchLevels) {
  StudyConfig c = config("study = h_convergence\nscheme = MixedRT\nscheme.k = 0\ngrid.levels = 4, 8, 16\nnorms = L2_scalar, L2_vector\n");
  ConvergenceReport r = run_h_convergence(c);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[2].elements, 512);
  EXPECT_DOUBLE_EQ(r.rows[1].value, 1.0 / 8);
  // RT0: first order in u and p
  EXPECT_NEAR(*r.final_rate(r.column("L2_scalar")), 1.0, 0.1);
  EXPECT_NEAR(*r.final_rate(r.column("L2_vector")), 1.0, 0.1);
}

TEST(Studies, ConformingP1Rates) {
  StudyConfig c = config("study = h_convergence\nscheme = ConformingPrimal\nscheme.k = 0\ngrid.levels = 8, 16, 32\nnorms = L2_scalar, H1_broken\n");
  ConvergenceReport r = run_h_convergence(c);
  EXPECT_NEAR(*r.final_rate(0), 2.0, 0.1);
  EXPECT_NEAR(*r.final_rate(1), 1.0, 0.1);
}

TEST(Studies, InteriorPenaltyRate) {
  StudyConfig c = config("study = h_convergence\nscheme = PrimalDG_IP\nscheme.k = 1\nscheme.eta_e = 20\ngrid.levels = 8, 16, 32\nnorms = L2_scalar\n");
  EXPECT_NEAR(*run_h_convergence(c).final_rate(0), 2.0, 0.15);
}

TEST(Studies, MixedDGLowestOrderUnstructured) {
  // two unstructured levels of 226 and 972 elements
  StudyConfig c = config("study = h_convergence\nscheme = MixedDG_Jump\nscheme.k = 0\ngrid.kind = unstructured\ngrid.levels = 0.1, 0.0485\n"
                         "norms = L2_scalar, L2_vector, div_broken\n");
  ConvergenceReport r = run_h_convergence(c);
  EXPECT_NEAR(*r.final_rate(0), 0.99, 0.15);
  EXPECT_NEAR(*r.final_rate(1), 1.98, 0.15);
  EXPECT_NEAR(*r.final_rate(2), 0.99, 0.15);
}

TEST(Studies, WGToRaviartThomas) {
  ConvergenceReport r = run_rho_sweep(config("study = rho_sweep_wg_mixed\nscheme.spaces = rt\n"));
  const int div = r.column("div_broken");
  EXPECT_NEAR(r.rows[2].errors[div], 0.025444, 0.05 * 0.025444);
  EXPECT_NEAR(*r.rates[1][div], 1.00, 0.1);
}

TEST(Studies, WGToBDM) {
  ConvergenceReport r = run_rho_sweep(config("study = rho_sweep_wg_mixed\nscheme.spaces = bdm\n"));
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    for (std::size_t j = 0; j < r.columns.size(); ++j) {
      EXPECT_GE(*r.rates[i][j], 0.9);
      EXPECT_LE(*r.rates[i][j], 1.1);
    }
}

TEST(Studies, HDGToPrimal) {
  ConvergenceReport r0 = run_rho_sweep(config("study = rho_sweep_hdg_primal\nscheme.k = 0\n"));
  EXPECT_NEAR(*r0.final_rate(r0.column("L2_scalar")), 0.95, 0.1);
  ConvergenceReport r1 = run_rho_sweep(config("study = rho_sweep_hdg_primal\nscheme.k = 1\n"));
  EXPECT_NEAR(*r1.final_rate(r1.column("H1_broken")), 0.85, 0.1);
}

TEST(Studies, InfSupSingleCell) {
  InfSupReport r = run_infsup_uniformity(config("study = infsup_uniformity\ngrid.levels = 1\nrho.list = 1\n"));
  ASSERT_EQ(r.beta.size(), 1u);
  ASSERT_EQ(r.beta[0].size(), 1u);
  EXPECT_DOUBLE_EQ(r.ratio(), 1.0);
}

TEST(Studies, EquivalenceAndCheck) {
  StudyConfig c = config("study = equivalence_check\nscheme.k = 0\n");
  StudyResult r = run_study(c);
  EXPECT_EQ(r.equivalence.rows.size(), 3u);
  EXPECT_TRUE(r.equivalence.pass());
  EXPECT_TRUE(check_study(c, r).pass);
  StudyConfig off = config("study = equivalence_check\nscheme.k = 0\nscheme.calibration_scale = 2\nequivalence.pairs = hdg_ldg\n");
  StudyResult bad = run_study(off);
  EXPECT_GT(bad.equivalence.rows[0].deviation, 0.1);
  EXPECT_FALSE(check_study(off, bad).pass);
}

TEST(Studies, MeshSizes) {
  GridSpec u;
  u.levels = {4};
  EXPECT_DOUBLE_EQ(level_size(u, 0, build_uniform(4)), 0.25);
  GridSpec s;
  s.kind = GridKind::Unstructured;
  s.levels = {0.2};
  Mesh m = build_unstructured(0.2, 1);
  EXPECT_DOUBLE_EQ(level_size(s, 0, m), 1.0 / std::sqrt(double(m.num_elements())));
}

TEST(Cli, ExitCodesAndDeterminism) {
  const fs::path dir = scratch_dir();
  write(dir / "ok.cfg", "study = h_convergence\nscheme = MixedRT\ngrid.levels = 2, 4\n");
  write(dir / "bad.cfg", "study = h_convergence\ngrid.levels = 4\n");
  write(dir / "singular.cfg", "study = h_convergence\nscheme = HybridPrimal\nscheme.k = 1\ngrid.levels = 2, 4\n");
  write(dir / "miss.cfg", "study = h_convergence\nscheme = MixedRT\ngrid.levels = 2, 4\nnorms = L2_scalar\ncheck.rates = 5\n");
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " --output " + a), 0);
  EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " --output " + b), 0);
  EXPECT_FALSE(read(a).empty());
  EXPECT_EQ(read(a), read(b));
  EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " --check"), 0);
  EXPECT_EQ(run_cli("run " + (dir / "bad.cfg").string()), 1);
  EXPECT_EQ(run_cli("run " + (dir / "missing.cfg").string()), 1);
  EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " --k notanumber"), 1);
  EXPECT_EQ(run_cli("run"), 1);
  EXPECT_EQ(run_cli("run " + (dir / "singular.cfg").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "miss.cfg").string() + " --check"), 3);
  EXPECT_EQ(run_cli("run " + (dir / "miss.cfg").string()), 0);
  // flags override the file
  EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " --scheme MixedBDM --levels 2,4,8 --out md --output " + a), 0);
  EXPECT_NE(read(a).find("MixedBDM"), std::string::npos);
  EXPECT_EQ(read(a).find(",rate1,"), std::string::npos);
  fs::remove_all(dir);
}
