#include "ugfem/norms.hpp"

#include <cmath>

#include "assembly.hpp"
#include "ugfem/errors.hpp"

namespace ugfem {

using namespace detail;

namespace {

const std::pair<NormKind, const char*> kNames[] = {
    {NormKind::L2Scalar, "L2_scalar"}, {NormKind::L2Vector, "L2_vector"}, {NormKind::DivBroken, "div_broken"},
    {NormKind::HdivBroken, "Hdiv_broken"}, {NormKind::H1Broken, "H1_broken"}, {NormKind::WG_p, "WG_p_norm"},
    {NormKind::WG_u, "WG_u_norm"}, {NormKind::WG_div, "WG_div_norm"}, {NormKind::HDG_div, "HDG_div_norm"},
    {NormKind::HDG_u0, "HDG_u0_norm"}, {NormKind::HDG_u1, "HDG_u1_norm"}, {NormKind::MDG, "MDG_norm"},
};

// ---- field quadrature -------------------------------------------------------

struct FieldNorm {
  const Mesh& m;
  const FieldSet& f;
  const NormParams& prm;

  template <class T>
  const T& need(const std::shared_ptr<const T>& ptr, const char* what) const {
    require(static_cast<bool>(ptr), ErrorCode::Incompatible, std::string("norm needs the field ") + what);
    return *ptr;
  }

  // (c p, p) + wd ||div p||^2 (+ wl ||p||^2 with identity weight)
  double flux_volume(double w_c, double w_div, double w_l2) const {
    const VectorField& p = need(f.p, "p");
    double s = 0.0;
    Eigen::MatrixXd v;
    Eigen::VectorXd d;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, prm.quad_degree);
      p.eval(K, q.points, v, w_div != 0.0 ? &d : nullptr);
      for (int i = 0; i < q.size(); ++i) {
        Vec2 pi = v.col(i);
        double c = prm.c ? pi.dot(prm.c(q.points[i]) * pi) : pi.squaredNorm();
        s += q.weights[i] * (w_c * c + w_l2 * pi.squaredNorm() + (w_div != 0.0 ? w_div * d(i) * d(i) : 0.0));
      }
    }
    return s;
  }

  double scalar_volume(double w_l2, double w_grad) const {
    const ScalarField& u = need(f.u, "u");
    double s = 0.0;
    Eigen::VectorXd v;
    Eigen::MatrixXd g;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, prm.quad_degree);
      u.eval(K, q.points, v, w_grad != 0.0 ? &g : nullptr);
      for (int i = 0; i < q.size(); ++i)
        s += q.weights[i] * (w_l2 * v(i) * v(i) + (w_grad != 0.0 ? w_grad * g.col(i).squaredNorm() : 0.0));
    }
    return s;
  }

  // ||P_e w||^2 or ||w||^2 on e
  double edge_sq(int e, const PhysicalQuadrature& q, const Eigen::VectorXd& w, bool project) const {
    if (project && prm.trace) return l2_project_edge_values(*prm.trace, e, q.params, q.weights, w).squaredNorm();
    return (weights(q).array() * w.array().square()).sum();
  }

  // sum_K scale(K) ||(p - p^)·n_K||^2_dK
  double flux_trace_defect(bool inverse) const {
    const VectorField& p = need(f.p, "p");
    const EdgeField& ph = need(f.p_hat, "p_hat");
    double s = 0.0;
    Eigen::VectorXd hv;
    for (int K = 0; K < m.num_elements(); ++K) {
      const double w = inverse ? 1.0 / (prm.rho * m.h_K[K]) : prm.rho * m.h_K[K];
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        PhysicalQuadrature q = edge_quadrature(m, e, prm.quad_degree);
        ph.eval(e, q, hv);
        Eigen::VectorXd d = normal_trace_values(p, K, q, m.outward_normal(K, i)) - m.element_edge_signs[K][i] * hv;
        s += w * edge_sq(e, q, d, false);
      }
    }
    return s;
  }

  // sum_e scale(e) ||P_e [u]||^2 over all edges ([u] = u on the boundary)
  double scalar_jumps(double scale_inv_rho) const {
    const ScalarField& u = need(f.u, "u");
    double s = 0.0;
    for (int e = 0; e < m.num_edges(); ++e) {
      PhysicalQuadrature q = edge_quadrature(m, e, prm.quad_degree);
      auto [kp, km] = m.edge_elements[e];
      Eigen::VectorXd j = trace_values(u, kp, q);
      if (km >= 0) j -= trace_values(u, km, q);
      s += scale_inv_rho / (prm.rho * m.h_e[e]) * edge_sq(e, q, j, true);
    }
    return s;
  }

  // sum_{e interior} w(e) ||P_e [p]||^2
  double flux_jumps(bool project, bool use_eta) const {
    const VectorField& p = need(f.p, "p");
    double s = 0.0;
    for (int e = 0; e < m.num_edges(); ++e) {
      if (m.is_boundary_edge(e)) continue;
      PhysicalQuadrature q = edge_quadrature(m, e, prm.quad_degree);
      auto [kp, km] = m.edge_elements[e];
      const Vec2 n = m.edge_normals[e];
      Eigen::VectorXd j = normal_trace_values(p, kp, q, n) - normal_trace_values(p, km, q, n);
      const double w = use_eta ? prm.eta_e / m.h_e[e] : 1.0 / (prm.rho * m.h_e[e]);
      s += w * edge_sq(e, q, j, project);
    }
    return s;
  }

  double hdg_u0() const {
    const EdgeField& uh = need(f.u_hat, "u_hat");
    double s = scalar_volume(1.0, 0.0);
    Eigen::VectorXd v;
    for (int e = 0; e < m.num_edges(); ++e) {
      if (m.is_boundary_edge(e)) continue;
      PhysicalQuadrature q = edge_quadrature(m, e, prm.quad_degree);
      uh.eval(e, q, v);
      s += prm.rho * m.h_e[e] * edge_sq(e, q, v, false);
    }
    return s;
  }

  double hdg_u1() const {
    const ScalarField& u = need(f.u, "u");
    const EdgeField& uh = need(f.u_hat, "u_hat");
    double s = scalar_volume(0.0, 1.0);
    Eigen::VectorXd v;
    for (int K = 0; K < m.num_elements(); ++K) {
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        PhysicalQuadrature q = edge_quadrature(m, e, prm.quad_degree);
        uh.eval(e, q, v);
        // P u - u^ = P (u - u^) since u^ lies in the trace space
        Eigen::VectorXd d = trace_values(u, K, q) - v;
        s += edge_sq(e, q, d, prm.project) / (prm.rho * m.h_K[K]);
      }
    }
    return s;
  }

  double squared(NormKind k) const {
    switch (k) {
      case NormKind::L2Scalar: return scalar_volume(1.0, 0.0);
      case NormKind::L2Vector: return flux_volume(0.0, 0.0, 1.0);
      case NormKind::DivBroken: return flux_volume(0.0, 1.0, 0.0);
      case NormKind::HdivBroken: return flux_volume(0.0, 1.0, 1.0);
      case NormKind::H1Broken: return scalar_volume(0.0, 1.0);
      case NormKind::WG_p: return flux_volume(1.0, 0.0, 0.0) + flux_trace_defect(false);
      case NormKind::WG_u: return scalar_volume(0.0, 1.0) + scalar_jumps(1.0);
      case NormKind::WG_div: return flux_volume(1.0, 1.0, 0.0) + flux_trace_defect(true);
      case NormKind::HDG_div: return flux_volume(1.0, 1.0, 0.0) + flux_jumps(true, false);
      case NormKind::HDG_u0: return hdg_u0();
      case NormKind::HDG_u1: return hdg_u1();
      case NormKind::MDG: return flux_volume(1.0, 1.0, 0.0) + flux_jumps(false, true);
    }
    return 0.0;
  }
};

// ---- Gram matrices ----------------------------------------------------------

struct GramBuilder {
  const SpaceBundle& sp;
  const NormParams& prm;
  const Mesh& m;
  int qd;
  Triplets T;

  GramBuilder(const SpaceBundle& s, const NormParams& p) : sp(s), prm(p), m(*s.mesh) {
    int deg = 0;
    if (sp.q) deg = std::max(deg, sp.q->poly_degree());
    if (sp.u) deg = std::max(deg, sp.u->poly_degree());
    if (sp.trace) deg = std::max(deg, sp.trace->degree());
    qd = default_quadrature_degree(deg);
  }

  const FESpace& need(const SpacePtr& s, const char* what) const {
    require(static_cast<bool>(s), ErrorCode::Incompatible, std::string("norm Gram needs the space ") + what);
    return *s;
  }

  void flux_volume(double w_c, double w_div, double w_l2) {
    const FESpace& Q = need(sp.q, "q");
    BasisValues b;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, qd);
      LocalDofs d = element_dofs(Q, K, 0);
      Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(Q.local_dim(), Q.local_dim());
      if (w_c != 0.0) loc += w_c * weighted_vector_mass(Q, K, prm.c ? &prm.c : nullptr, q);
      if (w_l2 != 0.0) loc += w_l2 * weighted_vector_mass(Q, K, nullptr, q);
      if (w_div != 0.0) {
        Q.evaluate(K, q.points, b, true);
        loc += w_div * b.div * weights(q).asDiagonal() * b.div.transpose();
      }
      T.add(d, d, loc);
    }
  }

  void scalar_volume(double w_l2, double w_grad) {
    const FESpace& V = need(sp.u, "u");
    BasisValues b;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, qd);
      V.evaluate(K, q.points, b, w_grad != 0.0);
      auto w = weights(q);
      Eigen::MatrixXd loc = w_l2 * b.val * w.asDiagonal() * b.val.transpose();
      if (w_grad != 0.0)
        loc += w_grad * (b.dx * w.asDiagonal() * b.dx.transpose() + b.dy * w.asDiagonal() * b.dy.transpose());
      T.add(element_dofs(V, K, 0), element_dofs(V, K, 0), loc);
    }
  }

  // Rows of `vals` are basis functions; adds scale ||P_e(vals' x)||^2 or scale ||vals' x||^2.
  void add_edge_square(const LocalDofs& d, int e, const PhysicalQuadrature& q, const Eigen::MatrixXd& vals,
                       double scale, bool project) {
    if (project && prm.trace) {
      Eigen::MatrixXd bh;
      prm.trace->eval_edge(e, q.params, bh);
      Eigen::MatrixXd P = bh * weights(q).asDiagonal() * vals.transpose();
      T.add(d, d, scale * P.transpose() * P);
    } else {
      T.add(d, d, scale * vals * weights(q).asDiagonal() * vals.transpose());
    }
  }

  void flux_trace_defect(bool inverse) {
    const FESpace& Q = need(sp.q, "q");
    const FESpace& Qh = need(sp.trace, "trace");
    Eigen::MatrixXd bh;
    for (int K = 0; K < m.num_elements(); ++K) {
      const double w = inverse ? 1.0 / (prm.rho * m.h_K[K]) : prm.rho * m.h_K[K];
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        PhysicalQuadrature q = edge_quadrature(m, e, qd);
        Eigen::MatrixXd qn = normal_values(Q, K, q, m.outward_normal(K, i));
        Qh.eval_edge(e, q.params, bh);
        Eigen::MatrixXd vals(qn.rows() + bh.rows(), q.size());
        vals << qn, -m.element_edge_signs[K][i] * bh;
        LocalDofs d = element_dofs(Q, K, 0);
        d.append(Qh.edge_dofs(e), nullptr, Q.dim());
        add_edge_square(d, e, q, vals, w, false);
      }
    }
  }

  void scalar_jumps() {
    const FESpace& V = need(sp.u, "u");
    for (int e = 0; e < m.num_edges(); ++e) {
      PhysicalQuadrature q = edge_quadrature(m, e, qd);
      auto [kp, km] = m.edge_elements[e];
      Eigen::MatrixXd vp = scalar_values(V, kp, q);
      LocalDofs d = element_dofs(V, kp, 0);
      Eigen::MatrixXd vals = vp;
      if (km >= 0) {
        Eigen::MatrixXd vm = scalar_values(V, km, q);
        vals.resize(vp.rows() + vm.rows(), q.size());
        vals << vp, -vm;
        LocalDofs dm = element_dofs(V, km, 0);
        d.append(std::vector<int>(dm.idx.begin(), dm.idx.end()), &dm.sign, 0);
      }
      add_edge_square(d, e, q, vals, 1.0 / (prm.rho * m.h_e[e]), true);
    }
  }

  void flux_jumps(bool project, bool use_eta) {
    const FESpace& Q = need(sp.q, "q");
    for (int e = 0; e < m.num_edges(); ++e) {
      if (m.is_boundary_edge(e)) continue;
      PhysicalQuadrature q = edge_quadrature(m, e, qd);
      auto [kp, km] = m.edge_elements[e];
      const Vec2 n = m.edge_normals[e];
      Eigen::MatrixXd qp = normal_values(Q, kp, q, n), qm = normal_values(Q, km, q, n);
      Eigen::MatrixXd vals(qp.rows() + qm.rows(), q.size());
      vals << qp, -qm;
      LocalDofs d = element_dofs(Q, kp, 0);
      LocalDofs dm = element_dofs(Q, km, 0);
      d.append(dm.idx, &dm.sign, 0);
      const double w = use_eta ? prm.eta_e / m.h_e[e] : 1.0 / (prm.rho * m.h_e[e]);
      add_edge_square(d, e, q, vals, w, project);
    }
  }

  void trace_l2_interior() {
    const FESpace& V = need(sp.u, "u");
    const FESpace& Vh = need(sp.trace, "trace");
    for (int e = 0; e < m.num_edges(); ++e) {
      if (m.is_boundary_edge(e)) continue;
      LocalDofs d = edge_dofs(Vh, e, V.dim());
      const int n = d.size();
      T.add(d, d, prm.rho * m.h_e[e] * Eigen::MatrixXd::Identity(n, n));
    }
  }

  void hdg_trace_defect() {
    const FESpace& V = need(sp.u, "u");
    const FESpace& Vh = need(sp.trace, "trace");
    Eigen::MatrixXd bh;
    for (int K = 0; K < m.num_elements(); ++K) {
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        PhysicalQuadrature q = edge_quadrature(m, e, qd);
        Eigen::MatrixXd val = scalar_values(V, K, q);
        Vh.eval_edge(e, q.params, bh);
        LocalDofs d = element_dofs(V, K, 0);
        d.append(Vh.edge_dofs(e), nullptr, V.dim());
        const int nv = static_cast<int>(val.rows()), nh = static_cast<int>(bh.rows());
        const double w = 1.0 / (prm.rho * m.h_K[K]);
        if (prm.project) {
          Eigen::MatrixXd Tc(nh, nv + nh);
          Tc << bh * weights(q).asDiagonal() * val.transpose(), -Eigen::MatrixXd::Identity(nh, nh);
          T.add(d, d, w * Tc.transpose() * Tc);
        } else {
          Eigen::MatrixXd vals(nv + nh, q.size());
          vals << val, -bh;
          add_edge_square(d, e, q, vals, w, false);
        }
      }
    }
  }
};

}  // namespace

std::string to_string(NormKind k) {
  for (auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

NormKind norm_kind_from_string(const std::string& name) {
  for (auto& [kind, n] : kNames)
    if (name == n) return kind;
  fail(ErrorCode::InvalidArgument, "unknown norm kind '" + name + "'");
}

FieldSet solution_fields(const DiscreteSolution& s) {
  FieldSet f;
  f.u = s.u_field();
  f.p = s.p_field();
  if (s.spaces.trace && s.trace.size() == s.spaces.trace->dim()) {
    auto t = std::make_shared<DiscreteEdge>(s.spaces.trace, s.trace);
    if (s.spaces.trace->family() == Family::EdgeNormalVector)
      f.p_hat = t;
    else
      f.u_hat = t;
  }
  return f;
}

FieldSet exact_fields(const ManufacturedCase& data, MeshPtr mesh) {
  FieldSet f;
  f.u = std::make_shared<AnalyticScalar>(data.u, data.grad_u);
  f.p = std::make_shared<AnalyticVector>(data.p, data.div_p);
  ScalarFunction u = data.u;
  VectorFunction p = data.p;
  f.u_hat = std::make_shared<AnalyticEdge>([u](int, const Vec2& x) { return u(x); });
  f.p_hat = std::make_shared<AnalyticEdge>([p, mesh](int e, const Vec2& x) { return p(x).dot(mesh->edge_normals[e]); });
  return f;
}

FieldSet difference(const FieldSet& a, const FieldSet& b) {
  FieldSet d;
  if (a.u && b.u) d.u = difference(a.u, b.u);
  if (a.p && b.p) d.p = difference(a.p, b.p);
  if (a.p_hat && b.p_hat) d.p_hat = difference(a.p_hat, b.p_hat);
  if (a.u_hat && b.u_hat) d.u_hat = difference(a.u_hat, b.u_hat);
  return d;
}

double error_norm(const Mesh& mesh, const FieldSet& f, NormKind kind, const NormParams& params) {
  require(params.rho > 0.0, ErrorCode::InvalidArgument, "norm parameter rho must be positive");
  FieldNorm fn{mesh, f, params};
  return std::sqrt(std::max(0.0, fn.squared(kind)));
}

SparseMatrix norm_gram(NormKind kind, const SpaceBundle& spaces, const NormParams& params) {
  require(params.rho > 0.0, ErrorCode::InvalidArgument, "norm parameter rho must be positive");
  GramBuilder g(spaces, params);
  int n = 0;
  switch (kind) {
    case NormKind::L2Scalar: g.scalar_volume(1.0, 0.0); break;
    case NormKind::H1Broken: g.scalar_volume(0.0, 1.0); break;
    case NormKind::L2Vector: g.flux_volume(0.0, 0.0, 1.0); break;
    case NormKind::DivBroken: g.flux_volume(0.0, 1.0, 0.0); break;
    case NormKind::HdivBroken: g.flux_volume(0.0, 1.0, 1.0); break;
    case NormKind::WG_p:
      g.flux_volume(1.0, 0.0, 0.0);
      g.flux_trace_defect(false);
      break;
    case NormKind::WG_div:
      g.flux_volume(1.0, 1.0, 0.0);
      g.flux_trace_defect(true);
      break;
    case NormKind::WG_u:
      g.scalar_volume(0.0, 1.0);
      g.scalar_jumps();
      break;
    case NormKind::HDG_div:
      g.flux_volume(1.0, 1.0, 0.0);
      g.flux_jumps(true, false);
      break;
    case NormKind::MDG:
      g.flux_volume(1.0, 1.0, 0.0);
      g.flux_jumps(false, true);
      break;
    case NormKind::HDG_u0:
      g.scalar_volume(1.0, 0.0);
      g.trace_l2_interior();
      break;
    case NormKind::HDG_u1:
      g.scalar_volume(0.0, 1.0);
      g.hdg_trace_defect();
      break;
  }
  switch (kind) {
    case NormKind::WG_p:
    case NormKind::WG_div: n = spaces.q->dim() + spaces.trace->dim(); break;
    case NormKind::HDG_u0:
    case NormKind::HDG_u1: n = spaces.u->dim() + spaces.trace->dim(); break;
    case NormKind::L2Scalar:
    case NormKind::H1Broken:
    case NormKind::WG_u: n = spaces.u->dim(); break;
    default: n = spaces.q->dim(); break;
  }
  return g.T.build(n, n);
}

double limit_distance(const DiscreteSolution& a, const DiscreteSolution& b, NormKind kind,
                      const NormParams& params) {
  require(a.spaces.mesh == b.spaces.mesh ||
              (a.spaces.mesh->num_elements() == b.spaces.mesh->num_elements() &&
               a.spaces.mesh->vertices == b.spaces.mesh->vertices),
          ErrorCode::Incompatible, "limit distance needs both solutions on the same mesh");
  return error_norm(*a.spaces.mesh, difference(solution_fields(a), solution_fields(b)), kind, params);
}

}  // namespace ugfem
