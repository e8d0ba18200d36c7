#include <cmath>

#include "assembly.hpp"
#include "ugfem/errors.hpp"
#include "ugfem/schemes.hpp"

namespace ugfem {

using namespace detail;

namespace {

struct EdgeSides {
  int count = 0;     // 1 on the boundary, 2 inside
  int element[2];    // K+, K-
  Vec2 normal[2];    // outward normal of each side
  double avg = 1.0;  // weight of one side in {.}
};

EdgeSides sides_of(const Mesh& m, int e) {
  EdgeSides s;
  s.count = m.is_boundary_edge(e) ? 1 : 2;
  for (int t = 0; t < s.count; ++t) {
    s.element[t] = m.edge_elements[e][t];
    s.normal[t] = side_sign(t) * m.edge_normals[e];
  }
  s.avg = s.count == 2 ? 0.5 : 1.0;
  return s;
}

/// Lifted-jump Gram blocks: G[s][t] = (r_e([[phi^s]]), r_e([[phi^t]])) for a
/// scalar space V lifted into the vector space Q (primal DG), or
/// (r_e([psi^s]), r_e([psi^t])) for Q lifted into V (mixed DG), where s, t
/// index the sides of e.
void lifted_gram(const FESpace& data_space, const FESpace& target, int e, const PhysicalQuadrature& q,
                 const EdgeSides& sd, Eigen::MatrixXd G[2][2]) {
  const bool into_vector = target.is_vector();
  LocalLifting L = into_vector ? local_lifting_volume(target, e, q) : local_lifting_scalar(target, e, q);
  auto w = weights(q);
  // coefficient maps per (target side a, data side t): R[a][t]
  Eigen::MatrixXd R[2][2];
  for (int t = 0; t < sd.count; ++t) {
    const int Kt = sd.element[t];
    Eigen::MatrixXd ww;  // rows: weighted data samples, cols: data basis
    if (into_vector) {
      Eigen::MatrixXd val = scalar_values(data_space, Kt, q);
      ww.resize(2 * q.size(), val.rows());
      ww.topRows(q.size()) = (w.asDiagonal() * val.transpose()) * sd.normal[t].x();
      ww.bottomRows(q.size()) = (w.asDiagonal() * val.transpose()) * sd.normal[t].y();
    } else {
      Eigen::MatrixXd qn = normal_values(data_space, Kt, q, sd.normal[t]);
      ww = w.asDiagonal() * qn.transpose();
    }
    for (int a = 0; a < sd.count; ++a) R[a][t] = L.map[a] * ww;
  }
  Eigen::MatrixXd M[2];
  for (int a = 0; a < sd.count; ++a) M[a] = local_mass(target, sd.element[a]);
  for (int s = 0; s < sd.count; ++s)
    for (int t = 0; t < sd.count; ++t) {
      G[s][t] = Eigen::MatrixXd::Zero(R[0][s].cols(), R[0][t].cols());
      for (int a = 0; a < sd.count; ++a) G[s][t] += R[a][s].transpose() * M[a] * R[a][t];
    }
}

/// Interior-penalty form (alpha grad u, grad v) - <{alpha grad u}, [[v]]>
/// - <[[u]], {alpha grad v}> plus the jump or lifted-jump penalty.
LinearSystem assemble_primal_dg_reduced(LinearSystem sys) {
  const MethodConfig& cfg = sys.config;
  const ManufacturedCase& data = *sys.data;
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  sys.blocks = {{"u", 0, V.dim()}};
  sys.rhs = Eigen::VectorXd::Zero(V.dim());
  Triplets T;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    LocalDofs d = element_dofs(V, K, 0);
    T.add(d, d, stiffness(V, K, data, q));
    scatter(sys.rhs, d, load(V, K, data.f, q));
  }
  BasisValues b;
  for (int e = 0; e < m.num_edges(); ++e) {
    EdgeSides sd = sides_of(m, e);
    PhysicalQuadrature q = edge_quadrature(m, e, qd);
    auto w = weights(q);
    Eigen::MatrixXd val[2], agn[2];  // values, and (alpha grad phi)·n_e
    for (int t = 0; t < sd.count; ++t) {
      V.evaluate(sd.element[t], q.points, b, true);
      val[t] = b.val;
      agn[t].resize(b.val.rows(), q.size());
      for (int k = 0; k < q.size(); ++k) {
        Vec2 n = m.edge_normals[e];
        if (!data.alpha_identity) n = data.alpha(q.points[k]).transpose() * n;
        agn[t].col(k) = n.x() * b.dx.col(k) + n.y() * b.dy.col(k);
      }
    }
    Eigen::MatrixXd G[2][2];
    const bool bassi = cfg.scheme == Scheme::PrimalDG_Bassi;
    if (bassi) lifted_gram(V, Q, e, q, sd, G);
    const double pen = bassi ? cfg.eta_e : cfg.eta_e / m.h_e[e];
    for (int s = 0; s < sd.count; ++s) {      // test side
      for (int t = 0; t < sd.count; ++t) {    // trial side
        // [[v]]·{alpha grad u} with [[v]] = v^s n^s = side_sign(s) v^s n_e
        const double ss = side_sign(s), st = side_sign(t);
        Eigen::MatrixXd loc = -sd.avg * ss * val[s] * w.asDiagonal() * agn[t].transpose()
                              - sd.avg * st * agn[s] * w.asDiagonal() * val[t].transpose();
        if (bassi)
          loc += pen * G[s][t];
        else
          loc += pen * ss * st * val[s] * w.asDiagonal() * val[t].transpose();
        T.add(element_dofs(V, sd.element[s], 0), element_dofs(V, sd.element[t], 0), loc);
      }
    }
  }
  sys.matrix = T.build(V.dim(), V.dim());
  return sys;
}

LinearSystem start(const MethodConfig& config, MeshPtr mesh, const ManufacturedCase& data) {
  LinearSystem sys;
  sys.config = config;
  sys.spaces = make_spaces(config, std::move(mesh));
  sys.data = std::make_shared<ManufacturedCase>(data);
  return sys;
}

}  // namespace

LinearSystem assemble_primal_dg(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data) {
  require(cfg.scheme == Scheme::PrimalDG_IP || cfg.scheme == Scheme::PrimalDG_LDG ||
              cfg.scheme == Scheme::PrimalDG_Bassi || cfg.scheme == Scheme::PrimalDG_Brezzi,
          ErrorCode::Incompatible, "assemble_primal_dg needs a PrimalDG scheme");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  if (cfg.gamma() == 0.0) return assemble_primal_dg_reduced(std::move(sys));

  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  const int nQ = Q.dim(), nV = V.dim();
  sys.blocks = {{"p", 0, nQ}, {"u", nQ, nV}};
  sys.rhs = Eigen::VectorXd::Zero(nQ + nV);
  Triplets T;
  BasisValues bq;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    LocalDofs dq = element_dofs(Q, K, 0), dv = element_dofs(V, K, nQ);
    T.add(dq, dq, c_mass(Q, K, data, q));
    Q.evaluate(K, q.points, bq, true);
    Eigen::MatrixXd val = scalar_values(V, K, q);
    // -(u, div q)
    T.add_symmetric_pair(dq, dv, -bq.div * weights(q).asDiagonal() * val.transpose());
    scatter(sys.rhs, dv, -load(V, K, data.f, q));
  }
  const bool brezzi = cfg.scheme == Scheme::PrimalDG_Brezzi;
  for (int e = 0; e < m.num_edges(); ++e) {
    EdgeSides sd = sides_of(m, e);
    PhysicalQuadrature q = edge_quadrature(m, e, qd);
    auto w = weights(q);
    Eigen::MatrixXd val[2], qn[2];
    for (int t = 0; t < sd.count; ++t) {
      val[t] = scalar_values(V, sd.element[t], q);
      qn[t] = normal_values(Q, sd.element[t], q, sd.normal[t]);
    }
    // <u^, q·n_K> with u^ = {u} + beta·[[u]] inside, 0 on the boundary
    if (sd.count == 2) {
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
          const double wt = 0.5 + cfg.beta.dot(sd.normal[t]);
          T.add_symmetric_pair(element_dofs(Q, sd.element[s], 0), element_dofs(V, sd.element[t], nQ),
                               wt * qn[s] * w.asDiagonal() * val[t].transpose());
        }
    }
    // -J(u, v)
    Eigen::MatrixXd G[2][2];
    if (brezzi) lifted_gram(V, Q, e, q, sd, G);
    for (int s = 0; s < sd.count; ++s)
      for (int t = 0; t < sd.count; ++t) {
        Eigen::MatrixXd loc = brezzi ? Eigen::MatrixXd(cfg.eta_e * G[s][t])
                                     : Eigen::MatrixXd(cfg.eta_e / m.h_e[e] * side_sign(s) * side_sign(t) * val[s] *
                                                       w.asDiagonal() * val[t].transpose());
        T.add(element_dofs(V, sd.element[s], nQ), element_dofs(V, sd.element[t], nQ), -loc);
      }
  }
  sys.matrix = T.build(nQ + nV, nQ + nV);
  return sys;
}

LinearSystem assemble_mixed_dg(const MethodConfig& cfg, MeshPtr mesh, const ManufacturedCase& data) {
  require(cfg.scheme == Scheme::MixedDG_Jump || cfg.scheme == Scheme::MixedDG_Lifting, ErrorCode::Incompatible,
          "assemble_mixed_dg needs a MixedDG scheme");
  LinearSystem sys = start(cfg, std::move(mesh), data);
  const FESpace &Q = *sys.spaces.q, &V = *sys.spaces.u;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(cfg, sys.spaces);
  const int nQ = Q.dim(), nV = V.dim();
  sys.blocks = {{"p", 0, nQ}, {"u", nQ, nV}};
  sys.rhs = Eigen::VectorXd::Zero(nQ + nV);
  Triplets T;
  BasisValues bq;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, qd);
    LocalDofs dq = element_dofs(Q, K, 0), dv = element_dofs(V, K, nQ);
    T.add(dq, dq, c_mass(Q, K, data, q));
    Q.evaluate(K, q.points, bq, true);
    Eigen::MatrixXd val = scalar_values(V, K, q);
    // -(div_h q, v)
    T.add_symmetric_pair(dq, dv, -bq.div * weights(q).asDiagonal() * val.transpose());
    scatter(sys.rhs, dv, -load(V, K, data.f, q));
  }
  const bool lifting = cfg.scheme == Scheme::MixedDG_Lifting;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e)) continue;
    EdgeSides sd = sides_of(m, e);
    PhysicalQuadrature q = edge_quadrature(m, e, qd);
    auto w = weights(q);
    Eigen::MatrixXd val[2], qn[2];
    for (int t = 0; t < 2; ++t) {
      val[t] = scalar_values(V, sd.element[t], q);
      qn[t] = normal_values(Q, sd.element[t], q, sd.normal[t]);
    }
    Eigen::MatrixXd G[2][2];
    if (lifting) lifted_gram(Q, V, e, q, sd, G);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        LocalDofs ds = element_dofs(Q, sd.element[s], 0);
        // <[q], {v}>
        T.add_symmetric_pair(ds, element_dofs(V, sd.element[t], nQ), 0.5 * qn[s] * w.asDiagonal() * val[t].transpose());
        Eigen::MatrixXd pen = lifting ? Eigen::MatrixXd(cfg.eta_e * G[s][t])
                                      : Eigen::MatrixXd(cfg.eta_e / m.h_e[e] * qn[s] * w.asDiagonal() * qn[t].transpose());
        T.add(ds, element_dofs(Q, sd.element[t], 0), pen);
      }
  }
  sys.matrix = T.build(nQ + nV, nQ + nV);
  return sys;
}

}  // namespace ugfem
