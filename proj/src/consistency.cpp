#include "ugfem/consistency.hpp"

#include "assembly.hpp"
#include "ugfem/errors.hpp"

namespace ugfem {

using namespace detail;

namespace {

struct Eval {
  const LinearSystem& sys;
  const FieldSet& f;
  const Mesh& m;
  int qd;
  Eigen::VectorXd r;

  Eval(const LinearSystem& s, const FieldSet& fs, int q)
      : sys(s), f(fs), m(*s.spaces.mesh), qd(q), r(Eigen::VectorXd::Zero(s.size())) {}

  template <class T>
  const T& need(const std::shared_ptr<const T>& p, const char* what) const {
    require(static_cast<bool>(p), ErrorCode::Incompatible, std::string("form residual needs the field ") + what);
    return *p;
  }

  // Volume values of the trial fields on K.
  struct Vol {
    Eigen::MatrixXd p, grad_u;
    Eigen::VectorXd div_p, u;
  };
  Vol volume(int K, const PhysicalQuadrature& q, bool want_p, bool want_u) const {
    Vol v;
    if (want_p) need(f.p, "p").eval(K, q.points, v.p, &v.div_p);
    if (want_u) need(f.u, "u").eval(K, q.points, v.u, &v.grad_u);
    return v;
  }

  Eigen::MatrixXd c_times(const Eigen::MatrixXd& p, const PhysicalQuadrature& q) const {
    if (sys.data->alpha_identity) return p;
    Eigen::MatrixXd out(2, p.cols());
    for (int i = 0; i < q.size(); ++i) out.col(i) = sys.data->c(q.points[i]) * p.col(i);
    return out;
  }

  void add(const LocalDofs& d, const Eigen::VectorXd& local) { scatter(r, d, local); }

  // (F, q) for a vector basis, F given at the points.
  static Eigen::VectorXd vec_moment(const BasisValues& b, const Eigen::MatrixXd& F, const PhysicalQuadrature& q) {
    auto w = weights(q);
    return b.vx * w.cwiseProduct(F.row(0).transpose()) + b.vy * w.cwiseProduct(F.row(1).transpose());
  }

  void wg() {
    const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u, &Qh = *sys.spaces.trace;
    const int poff = sys.block("p").offset, hoff = sys.block("p_hat").offset, uoff = sys.block("u").offset;
    const EdgeField& ph = need(f.p_hat, "p_hat");
    const bool stab = sys.config.scheme == Scheme::WG;
    BasisValues bq, bv;
    Eigen::MatrixXd bh;
    Eigen::VectorXd phv;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, qd);
      Vol t = volume(K, q, true, true);
      Q.evaluate(K, q.points, bq, false);
      V.evaluate(K, q.points, bv, true);
      auto w = weights(q);
      // (c p + grad u, q)
      add(element_dofs(Q, K, poff), vec_moment(bq, c_times(t.p, q) + t.grad_u, q));
      // (grad v, p) + (f, v)
      Eigen::VectorXd rv = bv.dx * w.cwiseProduct(t.p.row(0).transpose()) +
                           bv.dy * w.cwiseProduct(t.p.row(1).transpose());
      Eigen::VectorXd fv(q.size());
      for (int i = 0; i < q.size(); ++i) fv(i) = sys.data->f(q.points[i]) * q.weights[i];
      add(element_dofs(V, K, uoff), rv + bv.val * fv);
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        const double s = m.element_edge_signs[K][i];
        const Vec2 nK = m.outward_normal(K, i);
        PhysicalQuadrature qe = edge_quadrature(m, e, qd);
        auto we = weights(qe);
        ph.eval(e, qe, phv);
        Eigen::VectorXd defect = normal_trace_values(*f.p, K, qe, nK) - s * phv;
        Eigen::VectorXd ut = trace_values(*f.u, K, qe);
        Qh.eval_edge(e, qe.params, bh);
        Eigen::MatrixXd qn = normal_values(Q, K, qe, nK);
        Eigen::MatrixXd vv = scalar_values(V, K, qe);
        // -<u, q^·n_K>
        Eigen::VectorXd rh = -s * bh * we.cwiseProduct(ut);
        // -<v, p^·n_K>
        add(element_dofs(V, K, uoff), -s * vv * we.cwiseProduct(phv));
        if (stab) {
          const double eta = stabilization(sys.config, sys.config.eta_rule, m, K, i);
          add(element_dofs(Q, K, poff), eta * qn * we.cwiseProduct(defect));
          rh -= eta * s * bh * we.cwiseProduct(defect);
        }
        add(edge_dofs(Qh, e, hoff), rh);
      }
    }
  }

  void hdg() {
    const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u, &Vh = *sys.spaces.trace;
    const int poff = sys.block("p").offset, uoff = sys.block("u").offset, hoff = sys.block("u_hat").offset;
    const EdgeField& uh = need(f.u_hat, "u_hat");
    const Scheme sc = sys.config.scheme;
    const bool project = sc == Scheme::HDGReduced;
    BasisValues bq, bv;
    Eigen::MatrixXd bh;
    Eigen::VectorXd uhv;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, qd);
      Vol t = volume(K, q, true, true);
      Q.evaluate(K, q.points, bq, true);
      V.evaluate(K, q.points, bv, false);
      auto w = weights(q);
      // (c p, q) - (div q, u)
      add(element_dofs(Q, K, poff), vec_moment(bq, c_times(t.p, q), q) - bq.div * w.cwiseProduct(t.u));
      // -(div p, v) + (f, v)
      Eigen::VectorXd fv(q.size());
      for (int i = 0; i < q.size(); ++i) fv(i) = sys.data->f(q.points[i]);
      add(element_dofs(V, K, uoff), bv.val * w.cwiseProduct(fv - t.div_p));
      for (int i = 0; i < 3; ++i) {
        const int e = m.element_edges[K][i];
        const Vec2 nK = m.outward_normal(K, i);
        PhysicalQuadrature qe = edge_quadrature(m, e, qd);
        auto we = weights(qe);
        uh.eval(e, qe, uhv);
        Vh.eval_edge(e, qe.params, bh);
        Eigen::MatrixXd qn = normal_values(Q, K, qe, nK);
        Eigen::MatrixXd vv = scalar_values(V, K, qe);
        // <q·n_K, u^>
        add(element_dofs(Q, K, poff), qn * we.cwiseProduct(uhv));
        // <p·n_K, v^>
        Eigen::VectorXd rh = bh * we.cwiseProduct(normal_trace_values(*f.p, K, qe, nK));
        if (sc != Scheme::HybridMixed) {
          const double tau = stabilization(sys.config, sys.config.tau_rule, m, K, i);
          Eigen::VectorXd d = trace_values(*f.u, K, qe) - uhv;
          if (project) {
            Eigen::VectorXd pd = bh * we.cwiseProduct(d);  // P(u - u^) in the orthonormal edge basis
            add(element_dofs(V, K, uoff), -tau * vv * we.cwiseProduct(bh.transpose() * pd));
            rh += tau * pd;
          } else {
            add(element_dofs(V, K, uoff), -tau * vv * we.cwiseProduct(d));
            rh += tau * bh * we.cwiseProduct(d);
          }
        }
        add(edge_dofs(Vh, e, hoff), rh);
      }
    }
  }

  void mixed_dg() {
    const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
    const int poff = sys.block("p").offset, uoff = sys.block("u").offset;
    const bool lifting = sys.config.scheme == Scheme::MixedDG_Lifting;
    const double eta = sys.config.eta_e;
    BasisValues bq, bv;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, qd);
      Vol t = volume(K, q, true, true);
      Q.evaluate(K, q.points, bq, true);
      V.evaluate(K, q.points, bv, false);
      auto w = weights(q);
      add(element_dofs(Q, K, poff), vec_moment(bq, c_times(t.p, q), q) - bq.div * w.cwiseProduct(t.u));
      Eigen::VectorXd fv(q.size());
      for (int i = 0; i < q.size(); ++i) fv(i) = sys.data->f(q.points[i]);
      add(element_dofs(V, K, uoff), bv.val * w.cwiseProduct(fv - t.div_p));
    }
    for (int e = 0; e < m.num_edges(); ++e) {
      if (m.is_boundary_edge(e)) continue;
      PhysicalQuadrature qe = edge_quadrature(m, e, qd);
      auto we = weights(qe);
      const int Kp = m.edge_elements[e][0], Km = m.edge_elements[e][1];
      const int el[2] = {Kp, Km};
      const Vec2 n = m.edge_normals[e];
      const Vec2 nside[2] = {n, -n};
      Eigen::VectorXd jump = normal_trace_values(*f.p, Kp, qe, n) - normal_trace_values(*f.p, Km, qe, n);
      Eigen::VectorXd avg = 0.5 * (trace_values(*f.u, Kp, qe) + trace_values(*f.u, Km, qe));
      LocalLifting L;
      Eigen::VectorXd rj[2];
      if (lifting) {
        L = local_lifting_scalar(V, e, qe);
        for (int a = 0; a < 2; ++a) rj[a] = local_mass(V, el[a]) * (L.map[a] * we.cwiseProduct(jump));
      }
      for (int s = 0; s < 2; ++s) {
        Eigen::MatrixXd qn = normal_values(Q, el[s], qe, nside[s]);
        Eigen::MatrixXd vv = scalar_values(V, el[s], qe);
        // <[q], {u}> and the jump penalty
        Eigen::VectorXd rq = qn * we.cwiseProduct(avg);
        if (lifting) {
          for (int a = 0; a < 2; ++a) rq += eta * (L.map[a] * we.asDiagonal() * qn.transpose()).transpose() * rj[a];
        } else {
          rq += eta / m.h_e[e] * qn * we.cwiseProduct(jump);
        }
        add(element_dofs(Q, el[s], poff), rq);
        // <[p], {v}>
        add(element_dofs(V, el[s], uoff), 0.5 * vv * we.cwiseProduct(jump));
      }
    }
  }
};

}  // namespace

Eigen::VectorXd form_residual(const LinearSystem& sys, const FieldSet& trial, int quad_degree) {
  require(quad_degree >= 0 && quad_degree <= kMaxQuadratureDegree, ErrorCode::UnsupportedDegree,
          "quadrature degree out of range");
  Eval ev(sys, trial, quad_degree);
  ev.need(trial.p, "p");
  ev.need(trial.u, "u");
  switch (sys.config.scheme) {
    case Scheme::WG:
    case Scheme::HybridPrimal: ev.wg(); break;
    case Scheme::HDG:
    case Scheme::HDGReduced:
    case Scheme::HybridMixed: ev.hdg(); break;
    case Scheme::MixedDG_Jump:
    case Scheme::MixedDG_Lifting: ev.mixed_dg(); break;
    default: fail(ErrorCode::Unsupported, "form residual is not available for " + to_string(sys.config.scheme));
  }
  return ev.r;
}

ConsistencyReport consistency_check(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data,
                                    int quad_degree) {
  MethodConfig cfg = config;
  cfg.quad_degree = quad_degree;
  LinearSystem sys = assemble(cfg, mesh, data);
  Eigen::VectorXd r = form_residual(sys, exact_fields(data, mesh), quad_degree);
  ConsistencyReport rep;
  rep.max_residual = r.lpNorm<Eigen::Infinity>();
  rep.rhs_scale = sys.rhs.lpNorm<Eigen::Infinity>();
  rep.relative = rep.rhs_scale > 0.0 ? rep.max_residual / rep.rhs_scale : rep.max_residual;
  return rep;
}

}  // namespace ugfem
