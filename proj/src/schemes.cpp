#include "ugfem/schemes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "assembly.hpp"
#include "ugfem/errors.hpp"
#include "ugfem/linsolve.hpp"

namespace ugfem {

using namespace detail;

const Block& LinearSystem::block(const std::string& name) const {
  for (const Block& b : blocks)
    if (b.name == name) return b;
  fail(ErrorCode::Internal, "system has no block '" + name + "'");
}

bool LinearSystem::has_block(const std::string& name) const {
  return std::any_of(blocks.begin(), blocks.end(), [&](const Block& b) { return b.name == name; });
}

VectorFieldPtr DiscreteSolution::p_field() const { return std::make_shared<DiscreteVector>(spaces.q, p); }
ScalarFieldPtr DiscreteSolution::u_field() const { return std::make_shared<DiscreteScalar>(spaces.u, u); }

namespace {

LinearSystem start(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data) {
  LinearSystem sys;
  sys.config = config;
  sys.spaces = make_spaces(config, std::move(mesh));
  sys.data = std::make_shared<ManufacturedCase>(data);
  return sys;
}

void set_blocks(LinearSystem& sys, std::initializer_list<std::pair<const char*, int>> sizes) {
  int off = 0;
  for (auto& [name, n] : sizes) {
    sys.blocks.push_back({name, off, n});
    off += n;
  }
  sys.rhs = Eigen::VectorXd::Zero(off);
}

int total(const LinearSystem& sys) { return static_cast<int>(sys.rhs.size()); }

/// Adds -(f, v) (or +(f, v) with sign = 1) into the rows of block `name`.
void add_load(LinearSystem& sys, const FESpace& V, const std::string& name, double sign, int qd) {
  const Mesh& m = V.mesh();
  const int off = sys.block(name).offset;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    scatter(sys.rhs, element_dofs(V, K, off), sign * load(V, K, sys.data->f, q));
  }
}

void add_c_mass(Triplets& T, const FESpace& Q, int off, const ManufacturedCase& data, int qd) {
  const Mesh& m = Q.mesh();
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    LocalDofs d = element_dofs(Q, K, off);
    T.add(d, d, c_mass(Q, K, data, q));
  }
}

/// -tau <P u - u^, P v - v^> over all element boundaries; P = identity or the
/// L2 projection onto the trace space on each edge.
void add_trace_stabilizer(Triplets& T, const MethodConfig& cfg, StabRule rule, double sign, const FESpace& V,
                          const FESpace& Vh, int uoff, int uhoff, bool project, int qd) {
  const Mesh& m = V.mesh();
  Eigen::MatrixXd bh;
  for (int K = 0; K < m.num_elements(); ++K) {
    for (int i = 0; i < 3; ++i) {
      const double tau = stabilization(cfg, rule, m, K, i);
      if (tau == 0.0) continue;
      const int e = m.element_edges[K][i];
      PhysicalQuadrature q = edge_quadrature(m, e, qd);
      Eigen::MatrixXd val = scalar_values(V, K, q);
      Vh.eval_edge(e, q.params, bh);
      LocalDofs d = element_dofs(V, K, uoff);
      LocalDofs dh = edge_dofs(Vh, e, uhoff);
      for (int j = 0; j < dh.size(); ++j) d.idx.push_back(dh.idx[j]), d.sign.push_back(1.0);
      const int nv = static_cast<int>(val.rows()), nh = static_cast<int>(bh.rows());
      Eigen::MatrixXd loc;
      if (project) {
        Eigen::MatrixXd Tc(nh, nv + nh);
        Tc << bh * weights(q).asDiagonal() * val.transpose(), -Eigen::MatrixXd::Identity(nh, nh);
        loc = Tc.transpose() * Tc;
      } else {
        Eigen::MatrixXd Tm(nv + nh, q.size());
        Tm << val, -bh;
        loc = Tm * weights(q).asDiagonal() * Tm.transpose();
      }
      T.add(d, d, sign * tau * loc);
    }
  }
}

/// Riesz representative in the broken space Q of q -> (g1, q) + <g2, q·n_K>_{dT}.
Eigen::VectorXd flux_data_representative(const FESpace& Q, const ExtraData& extra, int qd) {
  const Mesh& m = Q.mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Q.dim());
  if (extra.empty()) return out;
  BasisValues b;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(Q.local_dim());
    if (extra.g1) {
      Q.evaluate(K, q.points, b, false);
      for (int k = 0; k < q.size(); ++k) {
        Vec2 g = extra.g1(q.points[k]);
        r += q.weights[k] * (g.x() * b.vx.col(k) + g.y() * b.vy.col(k));
      }
    }
    if (extra.g2) {
      for (int i = 0; i < 3; ++i) {
        PhysicalQuadrature qe = edge_quadrature(m, m.element_edges[K][i], qd);
        Eigen::MatrixXd qn = normal_values(Q, K, qe, m.outward_normal(K, i));
        for (int k = 0; k < qe.size(); ++k) r += qe.weights[k] * extra.g2(K, qe.points[k]) * qn.col(k);
      }
    }
    Eigen::VectorXd c = local_mass(Q, K, qd).llt().solve(r);
    scatter(out, element_dofs(Q, K, 0), c);
  }
  return out;
}

}  // namespace

LinearSystem assemble_wg(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data) {
  require(cfg.scheme == Scheme::WG || cfg.scheme == Scheme::HybridPrimal, ErrorCode::Incompatible,
          "assemble_wg needs scheme WG or HybridPrimal");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u, &Qh = *sys.spaces.trace;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  set_blocks(sys, {{"p", Q.dim()}, {"p_hat", Qh.dim()}, {"u", V.dim()}});
  Triplets T;
  add_c_mass(T, Q, 0, data, qd);
  if (cfg.scheme == Scheme::WG) {
    Eigen::MatrixXd bh;
    for (int K = 0; K < m.num_elements(); ++K) {
      for (int i = 0; i < 3; ++i) {
        const double eta = stabilization(cfg, cfg.eta_rule, m, K, i);
        const int e = m.element_edges[K][i];
        const double s = m.element_edge_signs[K][i];
        PhysicalQuadrature q = edge_quadrature(m, e, qd);
        Eigen::MatrixXd qn = normal_values(Q, K, q, m.outward_normal(K, i));
        Qh.eval_edge(e, q.params, bh);
        Eigen::MatrixXd Tm(qn.rows() + bh.rows(), q.size());
        Tm << qn, -s * bh;
        LocalDofs d = element_dofs(Q, K, 0);
        LocalDofs dh = edge_dofs(Qh, e, Q.dim());
        for (int j = 0; j < dh.size(); ++j) d.idx.push_back(dh.idx[j]), d.sign.push_back(1.0);
        T.add(d, d, eta * Tm * weights(q).asDiagonal() * Tm.transpose());
      }
    }
  }
  DGOperator G = assemble_dg_gradient(V, Q, Qh, qd);
  const int uoff = sys.block("u").offset;
  T.add_sparse(G.matrix, 0, uoff, 1.0, false);
  T.add_sparse(G.matrix, uoff, 0, 1.0, true);
  sys.matrix = T.build(total(sys), total(sys));
  add_load(sys, V, "u", -1.0, qd);
  return sys;
}

LinearSystem assemble_hdg(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data) {
  require(cfg.scheme == Scheme::HDG || cfg.scheme == Scheme::HDGReduced || cfg.scheme == Scheme::HybridMixed,
          ErrorCode::Incompatible, "assemble_hdg needs scheme HDG, HDG_reduced or HybridMixed");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u, &Vh = *sys.spaces.trace;
  const int qd = quadrature_degree(cfg, sys.spaces);
  set_blocks(sys, {{"p", Q.dim()}, {"u", V.dim()}, {"u_hat", Vh.dim()}});
  Triplets T;
  add_c_mass(T, Q, 0, data, qd);
  DGOperator D = assemble_dg_divergence(Q, V, Vh, qd);
  T.add_sparse(D.matrix, Q.dim(), 0, -1.0, false);
  T.add_sparse(D.matrix, 0, Q.dim(), -1.0, true);
  if (cfg.scheme != Scheme::HybridMixed)
    add_trace_stabilizer(T, cfg, cfg.tau_rule, -1.0, V, Vh, Q.dim(), Q.dim() + V.dim(),
                         cfg.scheme == Scheme::HDGReduced, qd);
  sys.matrix = T.build(total(sys), total(sys));
  add_load(sys, V, "u", -1.0, qd);
  return sys;
}

LinearSystem assemble_primal_wg_condensed(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data) {
  require(cfg.scheme == Scheme::PrimalWGCondensed, ErrorCode::Incompatible,
          "assemble_primal_wg_condensed needs scheme PrimalWG_condensed");
  require(data.alpha_piecewise_constant, ErrorCode::Unsupported,
          "flux elimination needs a piecewise constant alpha");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u, &Vh = *sys.spaces.trace;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  set_blocks(sys, {{"u", V.dim()}, {"u_hat", Vh.dim()}});
  // (alpha w, w') with w = div_dg^* (u, u^) in Q: D M^-1 M_alpha M^-1 D'.
  DGOperator D = assemble_dg_divergence(Q, V, Vh, qd);
  Triplets X;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    Eigen::MatrixXd M = weighted_vector_mass(Q, K, nullptr, q);
    Eigen::MatrixXd Ma = data.alpha_identity ? M : weighted_vector_mass(Q, K, &data.alpha, q);
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    Eigen::MatrixXd Minv = llt.solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
    LocalDofs d = element_dofs(Q, K, 0);
    X.add(d, d, Minv * Ma * Minv);
  }
  SparseMatrix Xm = X.build(Q.dim(), Q.dim());
  SparseMatrix DXD = D.matrix * Xm * SparseMatrix(D.matrix.transpose());
  Triplets T;
  T.add_sparse(DXD, 0, 0, 1.0, false);
  add_trace_stabilizer(T, cfg, cfg.eta_rule, 1.0, V, Vh, 0, V.dim(), false, qd);
  sys.matrix = T.build(total(sys), total(sys));
  add_load(sys, V, "u", 1.0, qd);
  return sys;
}

LinearSystem assemble_mixed(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data,
                            const ExtraData& extra) {
  require(cfg.scheme == Scheme::MixedRT || cfg.scheme == Scheme::MixedBDM, ErrorCode::Incompatible,
          "assemble_mixed needs scheme MixedRT or MixedBDM");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  sys.extra = extra;
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  set_blocks(sys, {{"p", Q.dim()}, {"u", V.dim()}});
  Triplets T;
  add_c_mass(T, Q, 0, data, qd);
  BasisValues bq;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    Q.evaluate(K, q.points, bq, true);
    Eigen::MatrixXd val = scalar_values(V, K, q);
    // rows v, cols q: -(div q, v)
    T.add_symmetric_pair(element_dofs(V, K, Q.dim()), element_dofs(Q, K, 0),
                         -val * weights(q).asDiagonal() * bq.div.transpose());
    if (extra.g1) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(Q.local_dim());
      for (int k = 0; k < q.size(); ++k) {
        Vec2 g = extra.g1(q.points[k]);
        r += q.weights[k] * (g.x() * bq.vx.col(k) + g.y() * bq.vy.col(k));
      }
      scatter(sys.rhs, element_dofs(Q, K, 0), r);
    }
    if (extra.g2) {
      for (int i = 0; i < 3; ++i) {
        PhysicalQuadrature qe = edge_quadrature(m, m.element_edges[K][i], qd);
        Eigen::MatrixXd ve = scalar_values(V, K, qe);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(V.local_dim());
        for (int k = 0; k < qe.size(); ++k) r += qe.weights[k] * extra.g2(K, qe.points[k]) * ve.col(k);
        scatter(sys.rhs, element_dofs(V, K, Q.dim()), -r);
      }
    }
  }
  sys.matrix = T.build(total(sys), total(sys));
  add_load(sys, V, "u", -1.0, qd);
  return sys;
}

LinearSystem assemble_primal(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data,
                             const ExtraData& extra) {
  require(cfg.scheme == Scheme::ConformingPrimal || cfg.scheme == Scheme::NonconformingCR, ErrorCode::Incompatible,
          "assemble_primal needs scheme ConformingPrimal or NonconformingCR");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  sys.extra = extra;
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  set_blocks(sys, {{"u", V.dim()}});
  Triplets T;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    LocalDofs d = element_dofs(V, K, 0);
    T.add(d, d, stiffness(V, K, data, q));
  }
  sys.matrix = T.build(total(sys), total(sys));
  add_load(sys, V, "u", 1.0, qd);
  if (!extra.empty()) {
    // (alpha G, grad v) with G the representative of the g-terms in Q.
    DiscreteVector G(sys.spaces.q, flux_data_representative(Q, extra, qd));
    Eigen::MatrixXd gv;
    BasisValues bv;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, qd);
      G.eval(K, q.points, gv, nullptr);
      V.evaluate(K, q.points, bv, true);
      Eigen::VectorXd r = Eigen::VectorXd::Zero(V.local_dim());
      for (int k = 0; k < q.size(); ++k) {
        Vec2 ag = data.alpha(q.points[k]) * Vec2(gv(0, k), gv(1, k));
        r += q.weights[k] * (ag.x() * bv.dx.col(k) + ag.y() * bv.dy.col(k));
      }
      scatter(sys.rhs, element_dofs(V, K, 0), r);
    }
  }
  return sys;
}

LinearSystem assemble(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data) {
  switch (cfg.scheme) {
    case Scheme::ConformingPrimal:
    case Scheme::NonconformingCR: return assemble_primal(cfg, std::move(mesh), data);
    case Scheme::MixedRT:
    case Scheme::MixedBDM: return assemble_mixed(cfg, std::move(mesh), data);
    case Scheme::HybridPrimal:
    case Scheme::WG: return assemble_wg(cfg, std::move(mesh), data);
    case Scheme::PrimalWGCondensed: return assemble_primal_wg_condensed(cfg, std::move(mesh), data);
    case Scheme::HybridMixed:
    case Scheme::HDG:
    case Scheme::HDGReduced: return assemble_hdg(cfg, std::move(mesh), data);
    case Scheme::PrimalDG_IP:
    case Scheme::PrimalDG_LDG:
    case Scheme::PrimalDG_Bassi:
    case Scheme::PrimalDG_Brezzi: return assemble_primal_dg(cfg, std::move(mesh), data);
    case Scheme::MixedDG_Jump:
    case Scheme::MixedDG_Lifting: return assemble_mixed_dg(cfg, std::move(mesh), data);
  }
  fail(ErrorCode::Internal, "unhandled scheme");
}

Eigen::VectorXd recover_flux(const LinearSystem& sys, const Eigen::VectorXd& u) {
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
  const Mesh& m = V.mesh();
  const ManufacturedCase& data = *sys.data;
  const int qd = quadrature_degree(sys.config, sys.spaces);
  const bool lifted = sys.config.scheme == Scheme::PrimalDG_IP || sys.config.scheme == Scheme::PrimalDG_Bassi;
  DiscreteScalar uh(sys.spaces.u, u);
  Eigen::VectorXd G = flux_data_representative(Q, sys.extra, qd);
  DiscreteVector Gf(sys.spaces.q, G);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(Q.dim());
  BasisValues bq;
  Eigen::VectorXd uval;
  Eigen::MatrixXd ugrad, gval;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    Q.evaluate(K, q.points, bq, false);
    uh.eval(K, q.points, uval, &ugrad);
    Gf.eval(K, q.points, gval, nullptr);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(Q.local_dim());
    if (lifted) {
      // (c p, q) = -(grad_h u, q) + <[[u]], {q}>_E
      for (int k = 0; k < q.size(); ++k)
        r -= q.weights[k] * (ugrad(0, k) * bq.vx.col(k) + ugrad(1, k) * bq.vy.col(k));
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        PhysicalQuadrature qe = edge_quadrature(m, e, qd);
        Eigen::MatrixXd jump = jump_average(uh, e, EdgeOp::JumpScalarVector, qe, m);
        const double avg = m.is_boundary_edge(e) ? 1.0 : 0.5;
        BasisValues be;
        Q.evaluate(K, qe.points, be, false);
        for (int k = 0; k < qe.size(); ++k)
          r += avg * qe.weights[k] * (jump(0, k) * be.vx.col(k) + jump(1, k) * be.vy.col(k));
      }
      Eigen::VectorXd c = c_mass(Q, K, data, q).llt().solve(r);
      scatter(p, element_dofs(Q, K, 0), c);
    } else {
      // p = P_Q(alpha (G - grad_h u))
      for (int k = 0; k < q.size(); ++k) {
        Vec2 v(gval(0, k) - ugrad(0, k), gval(1, k) - ugrad(1, k));
        if (!data.alpha_identity) v = data.alpha(q.points[k]) * v;
        r += q.weights[k] * (v.x() * bq.vx.col(k) + v.y() * bq.vy.col(k));
      }
      Eigen::VectorXd c = local_mass(Q, K, qd).llt().solve(r);
      scatter(p, element_dofs(Q, K, 0), c);
    }
  }
  return p;
}

namespace {

/// Flux of the eliminated system: (c p, q) = <div_dg q, (u, u^)>.
Eigen::VectorXd condensed_flux(const LinearSystem& sys, const Eigen::VectorXd& x) {
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u, &Vh = *sys.spaces.trace;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(sys.config, sys.spaces);
  DGOperator D = assemble_dg_divergence(Q, V, Vh, qd);
  Eigen::VectorXd r = D.matrix.transpose() * x;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(Q.dim());
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    LocalDofs d = element_dofs(Q, K, 0);
    Eigen::VectorXd rl(d.size());
    for (int i = 0; i < d.size(); ++i) rl(i) = d.sign[i] * r(d.idx[i]);
    scatter(p, d, c_mass(Q, K, *sys.data, q).llt().solve(rl));
  }
  return p;
}

}  // namespace

DiscreteSolution solve(const LinearSystem& sys) {
  DiscreteSolution sol;
  sol.config = sys.config;
  sol.spaces = sys.spaces;
  SolveInfo info;
  Eigen::VectorXd x;
  try {
    x = factor_solve(sys.matrix, sys.rhs, &info);
  } catch (const SingularFactorization& e) {
    throw SingularFactorization(e.pivot_index(), to_string(sys.config.scheme) + ": " + e.what());
  } catch (const Error& e) {
    fail(e.code(), to_string(sys.config.scheme) + ": " + e.what());
  }
  sol.residual = info.residual;
  auto take = [&](const char* name) {
    const Block& b = sys.block(name);
    return Eigen::VectorXd(x.segment(b.offset, b.size));
  };
  sol.u = take("u");
  if (sys.has_block("p"))
    sol.p = take("p");
  else if (sys.config.scheme == Scheme::PrimalWGCondensed)
    sol.p = condensed_flux(sys, x);
  else
    sol.p = recover_flux(sys, sol.u);
  if (sys.has_block("p_hat")) sol.trace = take("p_hat");
  if (sys.has_block("u_hat")) sol.trace = take("u_hat");
  return sol;
}

double max_abs(const SparseMatrix& A) {
  double m = 0.0;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double asymmetry(const SparseMatrix& A) {
  if (A.rows() != A.cols()) return INFINITY;
  SparseMatrix d = A - SparseMatrix(A.transpose());
  double s = max_abs(A);
  return s > 0 ? max_abs(d) / s : max_abs(d);
}

}  // namespace ugfem
