// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "ugfem/consistency.hpp"
#include "ugfem/errors.hpp"
#include "ugfem/infsup.hpp"
#include "ugfem/manufactured.hpp"
#include "ugfem/report.hpp"
#include "ugfem/schemes.hpp"
#include "ugfem/studies.hpp"
#include "ugfem/study_config.hpp"

using namespace ugfem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "MISS ") + note);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Largest solver residual reported by the studies, for criterion 9.
double g_max_residual = 0.0;

void note_residual(const Metadata& md) {
  for (const auto& [k, v] : md)
    if (k == "max_solver_residual") g_max_residual = std::max(g_max_residual, std::stod(v));
}

ConvergenceReport sweep(const std::string& text) {
  ConvergenceReport r = run_rho_sweep(parse_study_config(text));
  note_residual(r.metadata);
  return r;
}

// Criterion 1: mixed DG h-convergence on three unstructured levels.
Outcome mixed_dg_rates() {
  Outcome o;
  for (int k = 0; k <= 2; ++k) {
    ConvergenceReport r = run_h_convergence(parse_study_config(
        "study = h_convergence\nscheme = MixedDG_Jump\nscheme.k = " + std::to_string(k) +
        "\ngrid.kind = unstructured\ngrid.levels = 0.1, 0.0485, 0.0238\ngrid.seed = 1\n"
        "norms = L2_scalar, L2_vector, div_broken\n"));
    note_residual(r.metadata);
    const double u = r.final_rate(0).value_or(NAN), p = r.final_rate(1).value_or(NAN), d = r.final_rate(2).value_or(NAN);
    const bool ok = std::abs(u - (k + 1)) <= 0.15 && std::abs(d - (k + 1)) <= 0.15 && std::abs(p - (k + 2)) <= 0.2;
    std::ostringstream s;
    s << "k=" << k << " N=" << r.rows[0].elements << "/" << r.rows[1].elements << "/" << r.rows[2].elements
      << " rates u " << fmt("%.2f", u) << " p " << fmt("%.2f", p) << " div " << fmt("%.2f", d);
    o.require(ok, s.str());
  }
  return o;
}

bool monotone_decreasing(const ConvergenceReport& r, int j) {
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (!(r.rows[i].errors[j] < r.rows[i - 1].errors[j])) return false;
  return true;
}

// Criteria 2 and 3: WG approaching the RT or BDM mixed solution as rho -> 0.
Outcome wg_limit(const std::string& spaces) {
  Outcome o;
  for (int k = 0; k <= 1; ++k) {
    ConvergenceReport r = sweep("study = rho_sweep_wg_mixed\nscheme.k = " + std::to_string(k) + "\nscheme.spaces = " + spaces +
                                "\nrho.list = 1/4, 1/8, 1/16\n");
    bool ok = true;
    double lo = 1e300, hi = -1e300;
    for (std::size_t j = 0; j < r.columns.size(); ++j) {
      ok = ok && monotone_decreasing(r, static_cast<int>(j));
      for (std::size_t i = 1; i < r.rows.size(); ++i) {
        const double rate = r.rates[i][j].value_or(NAN);
        ok = ok && rate >= 0.85 && rate <= 1.15;
        lo = std::min(lo, rate);
        hi = std::max(hi, rate);
      }
    }
    o.require(ok, "k=" + std::to_string(k) + " rates in [" + fmt("%.2f", lo) + ", " + fmt("%.2f", hi) + "]" +
                      " div distance at 1/16 " + fmt("%.4g", r.rows.back().errors[r.column("div_broken")]));
  }
  return o;
}

// Criterion 4: HDG approaching the conforming primal solution.
Outcome hdg_limit() {
  Outcome o;
  for (int k = 0; k <= 1; ++k) {
    ConvergenceReport r = sweep("study = rho_sweep_hdg_primal\nscheme.k = " + std::to_string(k) + "\n");
    for (std::size_t j = 0; j < r.columns.size(); ++j) {
      const double first = r.rates[1][j].value_or(NAN), last = r.final_rate(static_cast<int>(j)).value_or(NAN);
      double floor = 1e300;
      for (std::size_t i = 1; i < r.rows.size(); ++i) floor = std::min(floor, r.rates[i][j].value_or(NAN));
      const bool ok = monotone_decreasing(r, static_cast<int>(j)) && last >= 0.8 && last >= first && floor >= 0.4;
      o.require(ok, "k=" + std::to_string(k) + " " + r.columns[j] + " rates " + fmt("%.2f", first) + " -> " + fmt("%.2f", last) +
                        " min " + fmt("%.2f", floor));
    }
  }
  return o;
}

// Criterion 5: trace substitution and condensation identities.
Outcome equivalences() {
  Outcome o;
  auto mesh = oracle::uniform_mesh(2);
  for (int k = 0; k <= 1; ++k) {
    MethodConfig c;
    c.k = k;
    for (auto pair : {EquivalencePair::HDG_LDG, EquivalencePair::WG_MDG, EquivalencePair::CondensedSchur}) {
      const double d = equivalence_deviation(pair, c, mesh);
      o.require(d <= 1e-10, to_string(pair) + " k=" + std::to_string(k) + " " + fmt("%.1e", d));
    }
  }
  return o;
}

// Criterion 6: DG calculus properties on random fields.
Outcome dg_calculus() {
  Outcome o;
  oracle::Rng rng(2024);
  std::vector<MeshPtr> meshes = {oracle::uniform_mesh(3), std::make_shared<Mesh>(build_unstructured(0.3, 7))};
  auto worst = [&](int draws, const std::function<double(MeshPtr, int)>& f) {
    double w = 0.0;
    for (int i = 0; i < draws; ++i) w = std::max(w, f(meshes[i % 2], (i / 2) % 3));
    return w;
  };
  for (int cond = 1; cond <= 3; ++cond) {
    const double w = worst(100, [&](MeshPtr m, int k) { return oracle::duality_residual(cond, m, k, rng); });
    o.require(w <= 1e-11, "duality (" + std::string(cond, 'i') + ") 100 draws max " + fmt("%.1e", w));
  }
  double w = 0.0;
  for (int which = 1; which <= 3; ++which)
    w = std::max(w, worst(12, [&](MeshPtr m, int k) { return oracle::consistency_residual(which, m, k, rng); }));
  o.require(w <= 1e-11, "conforming consistency max " + fmt("%.1e", w));
  w = worst(30, [&](MeshPtr m, int k) {
    return std::max(oracle::trace_identity_residual(m, k, rng), oracle::pointwise_identity_residual(m, k, rng));
  });
  o.require(w <= 1e-12, "trace identities max " + fmt("%.1e", w));
  w = worst(30, [&](MeshPtr m, int k) {
    return std::max(oracle::lifting_residual(m, k, false, rng), oracle::lifting_residual(m, k, true, rng));
  });
  o.require(w <= 1e-12, "lifting relation max " + fmt("%.1e", w));
  return o;
}

// Criterion 7: inf-sup uniformity in (h, rho) plus the degenerate control.
Outcome infsup() {
  Outcome o;
  struct Family {
    Scheme scheme;
    SpaceVariant spaces;
    InfSupKind kind;
  };
  const std::vector<Family> families = {
      {Scheme::WG, SpaceVariant::PrimalType, InfSupKind::WG_grad}, {Scheme::WG, SpaceVariant::RTType, InfSupKind::WG_div},
      {Scheme::WG, SpaceVariant::BDMType, InfSupKind::WG_div},     {Scheme::HDG, SpaceVariant::BDMType, InfSupKind::HDG_div},
      {Scheme::HDG, SpaceVariant::RTType, InfSupKind::HDG_div},    {Scheme::MixedDG_Jump, SpaceVariant::BDMType, InfSupKind::MDG},
      {Scheme::MixedDG_Jump, SpaceVariant::RTType, InfSupKind::MDG}};
  const std::vector<int> ns = {2, 4, 8};
  const std::vector<double> rhos = {1.0, 0.25, 1.0 / 16};
  for (const Family& f : families)
    for (int k = 0; k <= 1; ++k) {
      MethodConfig c;
      c.scheme = f.scheme;
      c.spaces = f.spaces;
      c.k = k;
      double lo = 1e300, hi = 0.0;
      bool stable = true;
      for (int n : ns)
        for (double rho : rhos) {
          InfSupResult r = infsup_estimate(c, oracle::uniform_mesh(n), rho, f.kind);
          stable = stable && r.stable();
          lo = std::min(lo, r.beta);
          hi = std::max(hi, r.beta);
        }
      o.require(stable && hi / lo <= 3.0, to_string(f.kind) + "/" + to_string(f.spaces) + " k=" + std::to_string(k) +
                                              " ratio " + fmt("%.2f", hi / lo));
    }
  // equal-order P0/P0 mixed DG: beta should fall by at least 2x per refinement
  MethodConfig c;
  c.scheme = Scheme::MixedDG_Jump;
  c.spaces = SpaceVariant::Equal;
  double best = 0.0;
  for (double rho : rhos) {
    std::vector<double> b;
    for (int n : ns) b.push_back(infsup_estimate(c, oracle::uniform_mesh(n), rho, InfSupKind::MDG).beta);
    for (std::size_t i = 1; i < b.size(); ++i) best = std::max(best, b[i - 1] / b[i]);
  }
  o.require(best >= 2.0, "control MDG/equal k=0 largest per-refinement drop " + fmt("%.3f", best) + "x (needs 2x)");
  return o;
}

// Criterion 8: exact solution inserted into the discrete forms.
Outcome consistency() {
  Outcome o;
  auto mesh = oracle::uniform_mesh(16);
  for (Scheme s : {Scheme::WG, Scheme::HDG, Scheme::MixedDG_Jump})
    for (int k = 0; k <= 1; ++k) {
      MethodConfig c;
      c.scheme = s;
      c.k = k;
      ConsistencyReport r = consistency_check(c, mesh, sin_sin_case(), 2 * k + 6);
      o.require(r.relative <= 1e-8, to_string(s) + " k=" + std::to_string(k) + " " + fmt("%.1e", r.relative));
    }
  return o;
}

// Criterion 9: solver residuals, symmetry, reproducible tables.
Outcome infrastructure() {
  Outcome o;
  auto mesh = std::make_shared<Mesh>(build_unstructured(0.2, 3));
  double res = 0.0, asym = 0.0;
  for (Scheme s : {Scheme::ConformingPrimal, Scheme::NonconformingCR, Scheme::MixedRT, Scheme::MixedBDM, Scheme::HybridPrimal,
                   Scheme::WG, Scheme::PrimalWGCondensed, Scheme::HybridMixed, Scheme::HDG, Scheme::HDGReduced,
                   Scheme::PrimalDG_IP, Scheme::PrimalDG_LDG, Scheme::PrimalDG_Bassi, Scheme::PrimalDG_Brezzi,
                   Scheme::MixedDG_Jump, Scheme::MixedDG_Lifting})
    for (int k = 0; k <= 2; ++k) {
      if ((s == Scheme::NonconformingCR && k > 0) || (s == Scheme::HybridPrimal && k % 2 == 1)) continue;
      MethodConfig c;
      c.scheme = s;
      c.k = k;
      LinearSystem sys = assemble(c, mesh, sin_sin_case());
      asym = std::max(asym, asymmetry(sys.matrix));
      res = std::max(res, solve(sys).residual);
    }
  o.require(res <= 1e-10, "scheme sweep residual " + fmt("%.1e", res));
  o.require(g_max_residual <= 1e-10, "study residuals " + fmt("%.1e", g_max_residual));
  o.require(asym <= 1e-12, "asymmetry " + fmt("%.1e", asym));
  for (const char* text : {"study = h_convergence\nscheme = WG\nscheme.k = 1\ngrid.kind = unstructured\ngrid.levels = 0.2, 0.1\n",
                           "study = rho_sweep_wg_mixed\nscheme.spaces = bdm\n", "study = infsup_uniformity\ngrid.levels = 2, 4\n"}) {
    StudyConfig c = parse_study_config(text);
    const std::string a = emit(run_study(c), OutputFormat::CSV), b = emit(run_study(c), OutputFormat::CSV);
    o.require(a == b, to_string(c.study) + " csv " + (a == b ? "identical" : "differs"));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, mixed_dg_rates}, {2, [] { return wg_limit("rt"); }}, {3, [] { return wg_limit("bdm"); }},
      {4, hdg_limit},      {5, equivalences},                  {6, dg_calculus},
      {7, infsup},         {8, consistency},                   {9, infrastructure}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("%s criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
