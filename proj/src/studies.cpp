#include "ugfem/studies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <Eigen/Dense>

#include "ugfem/errors.hpp"

namespace ugfem {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Metadata config_metadata(const StudyConfig& c) {
  Metadata md;
  std::istringstream in(to_text(c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) md.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return md;
}

// Rethrows with the level in the message, keeping the error code.
template <class F>
auto at_level(int level, const Mesh& mesh, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "level " + std::to_string(level) + " (" + std::to_string(mesh.num_elements()) +
                              " elements): " + e.what());
  }
}

NormParams norm_params(const MethodConfig& cfg, const SpaceBundle& spaces, const ManufacturedCase& data) {
  NormParams np;
  np.rho = cfg.rho;
  np.eta_e = cfg.eta_e;
  np.trace = spaces.trace;
  if (!data.alpha_identity) np.c = [&data](const Vec2& x) { return data.c(x); };
  const int deg = std::max(spaces.q ? spaces.q->poly_degree() : 0, spaces.u ? spaces.u->poly_degree() : 0);
  np.quad_degree = std::min(2 * deg + 4, kMaxQuadratureDegree);
  return np;
}

template <class T>
std::vector<T> collect(std::vector<std::future<T>>& futures) {
  std::vector<T> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

void add_max_residual(Metadata& md, double r) {
  std::ostringstream s;
  s << r;
  md.emplace_back("max_solver_residual", s.str());
}

Eigen::MatrixXd dense(const SparseMatrix& A) { return Eigen::MatrixXd(A); }

double system_deviation(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::MatrixXd& At,
                        const Eigen::VectorXd& bt) {
  require(A.rows() == At.rows() && A.cols() == At.cols() && b.size() == bt.size(), ErrorCode::Incompatible,
          "compared systems have different sizes");
  const double scale = std::max({1.0, At.cwiseAbs().maxCoeff(), bt.size() ? bt.cwiseAbs().maxCoeff() : 0.0});
  double dev = (A - At).cwiseAbs().maxCoeff();
  if (b.size()) dev = std::max(dev, (b - bt).cwiseAbs().maxCoeff());
  return dev / scale;
}

}  // namespace

double InfSupReport::min_beta() const {
  double m = INFINITY;
  for (const auto& row : beta)
    for (const auto& r : row) m = std::min(m, r.beta);
  return m;
}

double InfSupReport::max_beta() const {
  double m = 0.0;
  for (const auto& row : beta)
    for (const auto& r : row) m = std::max(m, r.beta);
  return m;
}

bool InfSupReport::all_stable() const {
  for (const auto& row : beta)
    for (const auto& r : row)
      if (!r.stable()) return false;
  return true;
}

bool EquivalenceReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const EquivalenceRow& r) { return r.pass(); });
}

std::vector<MeshPtr> build_grid(const GridSpec& g) {
  std::vector<MeshPtr> meshes;
  for (int i = 0; i < g.level_count(); ++i) {
    switch (g.kind) {
      case GridKind::Uniform:
        meshes.push_back(std::make_shared<Mesh>(build_uniform(static_cast<int>(g.levels[i]))));
        break;
      case GridKind::Unstructured:
        meshes.push_back(std::make_shared<Mesh>(build_unstructured(g.levels[i], g.seed)));
        break;
      case GridKind::File:
        meshes.push_back(
            std::make_shared<Mesh>(load_mesh(read_file(g.node_files[i]), read_file(g.ele_files[i])).mesh));
        break;
    }
  }
  return meshes;
}

double level_size(const GridSpec& g, int level, const Mesh& mesh) {
  if (g.kind == GridKind::Uniform) return 1.0 / g.levels[level];
  return 1.0 / std::sqrt(static_cast<double>(mesh.num_elements()));
}

ConvergenceReport run_h_convergence(const StudyConfig& c) {
  require(c.study == StudyKind::HConvergence, ErrorCode::Incompatible, "not an h_convergence config");
  validate(c);
  const auto meshes = build_grid(c.grid);
  const ManufacturedCase data = case_from_name(c.case_name);
  struct LevelResult {
    std::vector<double> errors;
    double residual;
  };
  std::vector<std::future<LevelResult>> futures;
  for (int i = 0; i < static_cast<int>(meshes.size()); ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      MeshPtr mesh = meshes[i];
      return at_level(i, *mesh, [&] {
        DiscreteSolution sol = solve(assemble(c.method, mesh, data));
        FieldSet err = difference(solution_fields(sol), exact_fields(data, mesh));
        NormParams np = norm_params(c.method, sol.spaces, data);
        LevelResult r{{}, sol.residual};
        for (NormKind k : c.norms) r.errors.push_back(error_norm(*mesh, err, k, np));
        return r;
      });
    }));
  }
  const auto results = collect(futures);
  ConvergenceReport rep;
  rep.variable = Variable::H;
  for (NormKind k : c.norms) rep.columns.push_back(to_string(k));
  double max_res = 0.0;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    rep.rows.push_back({level_size(c.grid, static_cast<int>(i), *meshes[i]), meshes[i]->num_elements(),
                        results[i].errors});
    max_res = std::max(max_res, results[i].residual);
  }
  rep.compute_rates();
  rep.metadata = config_metadata(c);
  add_max_residual(rep.metadata, max_res);
  return rep;
}

ConvergenceReport run_rho_sweep(const StudyConfig& c) {
  require(c.study == StudyKind::RhoSweepWGMixed || c.study == StudyKind::RhoSweepHDGPrimal, ErrorCode::Incompatible,
          "not a rho sweep config");
  validate(c);
  MeshPtr mesh = build_grid(c.grid).front();
  const ManufacturedCase data = case_from_name(c.case_name);
  MethodConfig ref_cfg;
  ref_cfg.scheme = c.reference;
  ref_cfg.k = c.method.k;
  ref_cfg.quad_degree = c.method.quad_degree;
  DiscreteSolution ref;
  try {
    ref = solve(assemble(ref_cfg, mesh, data));
  } catch (const Error& e) {
    throw Error(e.code(), "reference " + to_string(c.reference) + ": " + e.what());
  }
  struct RhoResult {
    std::vector<double> distances;
    double residual;
  };
  std::vector<std::future<RhoResult>> futures;
  for (double rho : c.rho_list) {
    futures.push_back(std::async(std::launch::async, [&, rho] {
      MethodConfig cfg = c.method;
      cfg.rho = rho;
      try {
        DiscreteSolution sol = solve(assemble(cfg, mesh, data));
        NormParams np = norm_params(cfg, sol.spaces, data);
        RhoResult r{{}, sol.residual};
        for (NormKind k : c.norms) r.distances.push_back(limit_distance(sol, ref, k, np));
        return r;
      } catch (const Error& e) {
        std::ostringstream s;
        s << "rho = " << rho << ": " << e.what();
        throw Error(e.code(), s.str());
      }
    }));
  }
  const auto results = collect(futures);
  ConvergenceReport rep;
  rep.variable = Variable::Rho;
  for (NormKind k : c.norms) rep.columns.push_back(to_string(k));
  double max_res = ref.residual;
  for (std::size_t i = 0; i < c.rho_list.size(); ++i) {
    rep.rows.push_back({c.rho_list[i], mesh->num_elements(), results[i].distances});
    max_res = std::max(max_res, results[i].residual);
  }
  rep.compute_rates();
  rep.metadata = config_metadata(c);
  add_max_residual(rep.metadata, max_res);
  return rep;
}

InfSupReport run_infsup_uniformity(const StudyConfig& c) {
  require(c.study == StudyKind::InfSupUniformity, ErrorCode::Incompatible, "not an infsup_uniformity config");
  validate(c);
  const auto meshes = build_grid(c.grid);
  InfSupReport rep;
  rep.kind = c.infsup_kind;
  rep.rho = c.rho_list;
  std::vector<std::future<std::vector<InfSupResult>>> futures;
  for (int i = 0; i < static_cast<int>(meshes.size()); ++i) {
    rep.h.push_back(level_size(c.grid, i, *meshes[i]));
    rep.elements.push_back(meshes[i]->num_elements());
    futures.push_back(std::async(std::launch::async, [&, i] {
      return at_level(i, *meshes[i], [&] {
        std::vector<InfSupResult> row;
        for (double rho : c.rho_list) {
          MethodConfig cfg = c.method;
          cfg.rho = rho;
          row.push_back(infsup_estimate(cfg, meshes[i], rho, c.infsup_kind));
        }
        return row;
      });
    }));
  }
  rep.beta = collect(futures);
  rep.metadata = config_metadata(c);
  std::ostringstream s;
  s << rep.ratio();
  rep.metadata.emplace_back("beta_ratio", s.str());
  rep.metadata.emplace_back("stable", rep.all_stable() ? "yes" : "no");
  return rep;
}

double equivalence_deviation(EquivalencePair pair, const MethodConfig& m, MeshPtr mesh) {
  const ManufacturedCase data = sin_sin_case();
  const SpaceVariant v = m.spaces == SpaceVariant::Default ? SpaceVariant::Equal : m.spaces;
  auto base = [&](Scheme s) {
    MethodConfig c;
    c.scheme = s;
    c.k = m.k;
    c.rho = m.rho;
    c.eta_e = m.eta_e;
    c.beta = m.beta;
    c.calibration_scale = m.calibration_scale;
    c.quad_degree = m.quad_degree;
    return c;
  };
  switch (pair) {
    case EquivalencePair::HDG_LDG: {
      MethodConfig src = base(Scheme::HDG);
      src.tau_rule = StabRule::Calibrated;
      src.spaces = v;
      MethodConfig tgt = base(Scheme::PrimalDG_LDG);
      LinearSystem a = substitute_traces(assemble(src, mesh, data), Substitution::UHatAvgPlusBetaJump);
      LinearSystem b = assemble(tgt, mesh, data);
      return system_deviation(dense(a.matrix), a.rhs, dense(b.matrix), b.rhs);
    }
    case EquivalencePair::WG_MDG: {
      MethodConfig src = base(Scheme::WG);
      src.eta_rule = StabRule::Calibrated;
      src.spaces = v;
      src.beta = Vec2::Zero();  // p^ = {p}·n_e carries no upwind weight
      MethodConfig tgt = base(Scheme::MixedDG_Jump);
      tgt.spaces = v;
      LinearSystem a = substitute_traces(assemble(src, mesh, data), Substitution::PHatAvg);
      LinearSystem b = assemble(tgt, mesh, data);
      return system_deviation(dense(a.matrix), a.rhs, dense(b.matrix), b.rhs);
    }
    case EquivalencePair::CondensedSchur: {
      const StabRule rule = m.eta_rule == StabRule::Zero ? StabRule::InvRhoInvHK : m.eta_rule;
      MethodConfig cond = base(Scheme::PrimalWGCondensed);
      cond.eta_rule = rule;
      cond.spaces = m.spaces;
      MethodConfig full = base(Scheme::HDG);
      full.tau_rule = rule;
      full.spaces = cond.resolved_spaces();
      LinearSystem a = assemble(cond, mesh, data);
      LinearSystem f = assemble(full, mesh, data);
      // eliminate p from [p; u; u^]: the condensed system is minus the Schur complement
      const int np = f.block("p").size, nr = f.size() - np;
      Eigen::MatrixXd F = dense(f.matrix);
      Eigen::LLT<Eigen::MatrixXd> App(F.topLeftCorner(np, np));
      require(App.info() == Eigen::Success, ErrorCode::Internal, "flux mass matrix is not positive definite");
      Eigen::MatrixXd S = F.bottomRightCorner(nr, nr) -
                          F.bottomLeftCorner(nr, np) * App.solve(F.topRightCorner(np, nr));
      Eigen::VectorXd g = f.rhs.tail(nr) - F.bottomLeftCorner(nr, np) * App.solve(f.rhs.head(np));
      return system_deviation(dense(a.matrix), a.rhs, -S, -g);
    }
  }
  return INFINITY;
}

EquivalenceReport run_equivalence(const StudyConfig& c) {
  require(c.study == StudyKind::EquivalenceCheck, ErrorCode::Incompatible, "not an equivalence_check config");
  validate(c);
  const auto meshes = build_grid(c.grid);
  EquivalenceReport rep;
  for (int i = 0; i < static_cast<int>(meshes.size()); ++i)
    for (EquivalencePair p : c.pairs) {
      std::string name = to_string(p);
      if (meshes.size() > 1) name += "@" + std::to_string(meshes[i]->num_elements());
      const double dev = at_level(i, *meshes[i], [&] { return equivalence_deviation(p, c.method, meshes[i]); });
      rep.rows.push_back({name, dev, c.tolerance});
    }
  rep.metadata = config_metadata(c);
  return rep;
}

StudyResult run_study(const StudyConfig& c) {
  StudyResult r;
  r.kind = c.study;
  switch (c.study) {
    case StudyKind::HConvergence: r.convergence = run_h_convergence(c); break;
    case StudyKind::RhoSweepWGMixed:
    case StudyKind::RhoSweepHDGPrimal: r.convergence = run_rho_sweep(c); break;
    case StudyKind::InfSupUniformity: r.infsup = run_infsup_uniformity(c); break;
    case StudyKind::EquivalenceCheck: r.equivalence = run_equivalence(c); break;
  }
  return r;
}

CheckOutcome check_study(const StudyConfig& c, const StudyResult& r) {
  CheckOutcome out;
  auto failure = [&](const std::string& why) {
    out.pass = false;
    out.failures.push_back(why);
  };
  auto fmt = [](double x) {
    std::ostringstream s;
    s << x;
    return s.str();
  };
  const ConvergenceReport& rep = r.convergence;
  switch (c.study) {
    case StudyKind::HConvergence:
      for (std::size_t j = 0; j < rep.columns.size(); ++j) {
        auto rate = rep.final_rate(static_cast<int>(j));
        if (!rate) {
          failure(rep.columns[j] + ": final rate undefined");
        } else if (!c.check_rates.empty() && std::abs(*rate - c.check_rates[j]) > c.check_rate_tolerance) {
          failure(rep.columns[j] + ": final rate " + fmt(*rate) + " outside " + fmt(c.check_rates[j]) + " +- " +
                  fmt(c.check_rate_tolerance));
        }
      }
      break;
    case StudyKind::RhoSweepWGMixed:
    case StudyKind::RhoSweepHDGPrimal:
      for (std::size_t j = 0; j < rep.columns.size(); ++j) {
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
          if (!(rep.rows[i].errors[j] < rep.rows[i - 1].errors[j]))
            failure(rep.columns[j] + ": distance does not decrease at rho = " + fmt(rep.rows[i].value));
        auto rate = rep.final_rate(static_cast<int>(j));
        if (!rate || *rate < c.check_rate_min)
          failure(rep.columns[j] + ": final rate " + (rate ? fmt(*rate) : "undefined") + " below " +
                  fmt(c.check_rate_min));
      }
      break;
    case StudyKind::InfSupUniformity:
      if (!r.infsup.all_stable()) failure("discrete kernel detected");
      if (r.infsup.ratio() > c.check_ratio_max)
        failure("beta ratio " + fmt(r.infsup.ratio()) + " above " + fmt(c.check_ratio_max));
      break;
    case StudyKind::EquivalenceCheck:
      for (const auto& row : r.equivalence.rows)
        if (!row.pass()) failure(row.name + ": deviation " + fmt(row.deviation) + " above " + fmt(row.tolerance));
      break;
  }
  return out;
}

}  // namespace ugfem
