#include "support.hpp"

#include <algorithm>
#include <cmath>

#include "ugfem/quadrature.hpp"

namespace ugfem::oracle {

namespace {

Eigen::Map<const Eigen::VectorXd> weights(const PhysicalQuadrature& q) {
  return Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
}

std::shared_ptr<DiscreteScalar> random_scalar(SpacePtr s, Rng& rng) {
  return std::make_shared<DiscreteScalar>(s, random_vector(s->dim(), rng));
}

std::shared_ptr<DiscreteVector> random_vector_field(SpacePtr s, Rng& rng) {
  return std::make_shared<DiscreteVector>(s, random_vector(s->dim(), rng));
}

// Values of a discrete field at edge points from each side; count = 1 on the boundary.
struct Sides {
  int count = 0;
  int element[2] = {-1, -1};
  Vec2 normal[2];  // outward from element[s]
};

Sides sides(const Mesh& m, int e) {
  Sides s;
  s.count = m.is_boundary_edge(e) ? 1 : 2;
  for (int t = 0; t < s.count; ++t) {
    s.element[t] = m.edge_elements[e][t];
    s.normal[t] = t == 0 ? m.edge_normals[e] : Vec2(-m.edge_normals[e]);
  }
  return s;
}

int edge_degree(const Mesh&, int k) { return 2 * k + 4; }

}  // namespace

Eigen::VectorXd random_vector(int n, Rng& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = d(rng);
  return x;
}

MeshPtr uniform_mesh(int n) { return std::make_shared<Mesh>(build_uniform(n)); }

Eigen::VectorXd project_edges(const FESpace& E,
                              const std::function<Eigen::VectorXd(int, const PhysicalQuadrature&)>& g) {
  const Mesh& m = E.mesh();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(E.dim());
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& dofs = E.edge_dofs(e);
    if (std::all_of(dofs.begin(), dofs.end(), [](int d) { return d < 0; })) continue;
    PhysicalQuadrature q = edge_quadrature(m, e, 2 * E.degree() + 8);
    Eigen::VectorXd c = l2_project_edge_values(E, e, q.params, q.weights, g(e, q));
    for (std::size_t j = 0; j < dofs.size(); ++j)
      if (dofs[j] >= 0) x(dofs[j]) = c(j);
  }
  return x;
}

Eigen::VectorXd project_edges(const FESpace& E, const std::function<double(int, const Vec2&)>& g) {
  return project_edges(E, [&](int e, const PhysicalQuadrature& q) {
    Eigen::VectorXd v(q.size());
    for (int i = 0; i < q.size(); ++i) v(i) = g(e, q.points[i]);
    return v;
  });
}

double duality_residual(int condition, MeshPtr mesh, int k, Rng& rng) {
  const Mesh& m = *mesh;
  SpacePtr V, Q, Qh, Vh;
  switch (condition) {
    case 1:
      V = make_space(Family::PDiscScalar, k + 1, mesh);
      Q = make_space(Family::RTConf, k, mesh);
      Qh = make_space(Family::EdgeNormalVector, k, mesh);
      Vh = make_space(Family::EdgeScalar, k + 1, mesh, true);
      break;
    case 2:
      V = make_space(Family::LagrangeCont, k + 1, mesh, true);
      Q = make_space(Family::PDiscVector, k, mesh);
      Qh = make_space(Family::EdgeNormalVector, k, mesh);
      Vh = make_space(Family::EdgeScalar, k + 1, mesh, true);
      break;
    default:
      V = make_space(Family::PDiscScalar, k, mesh);
      Q = make_space(Family::PDiscVector, k, mesh);
      Qh = make_space(Family::EdgeNormalVector, k, mesh);
      Vh = make_space(Family::EdgeScalar, k, mesh, true);
      break;
  }
  auto u = random_scalar(V, rng);
  auto p = random_vector_field(Q, rng);
  Eigen::VectorXd ph = random_vector(Qh->dim(), rng), uh = random_vector(Vh->dim(), rng);
  auto normal_avg = [&](int e, const PhysicalQuadrature& q) {
    Sides s = sides(m, e);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(q.size());
    for (int t = 0; t < s.count; ++t) v += normal_trace_values(*p, s.element[t], q, m.edge_normals[e]);
    return Eigen::VectorXd(v / s.count);
  };
  auto scalar_avg = [&](int e, const PhysicalQuadrature& q) {
    Sides s = sides(m, e);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(q.size());
    for (int t = 0; t < s.count; ++t) v += trace_values(*u, s.element[t], q);
    return Eigen::VectorXd(v / s.count);
  };
  if (condition == 1 || condition == 3) ph = project_edges(*Qh, normal_avg);
  if (condition == 2 || condition == 3) uh = project_edges(*Vh, scalar_avg);

  DGOperator G = assemble_dg_gradient(*V, *Q, *Qh);
  DGOperator D = assemble_dg_divergence(*Q, *V, *Vh);
  Eigen::VectorXd pt(Q->dim() + Qh->dim()), ut(V->dim() + Vh->dim());
  pt << p->coeffs(), ph;
  ut << u->coeffs(), uh;
  const double first = pt.dot(G.matrix * u->coeffs());
  const double second = ut.dot(D.matrix * p->coeffs());
  return std::abs(first + second) / std::max({1.0, std::abs(first), std::abs(second)});
}

double consistency_residual(int which, MeshPtr mesh, int k, Rng& rng) {
  const Mesh& m = *mesh;
  if (which == 3) {
    SpacePtr Q = make_space(Family::RTConf, k, mesh);
    SpacePtr V = make_space(Family::PDiscScalar, k, mesh);
    SpacePtr Vh = make_space(Family::EdgeScalar, k + 1, mesh, true);
    auto q = random_vector_field(Q, rng);
    DGOperator D = assemble_dg_divergence(*Q, *V, *Vh);
    Eigen::VectorXd y = D.matrix * q->coeffs();
    // independent (div q, v)
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(V->dim());
    BasisValues bv;
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature pq = element_quadrature(m, K, 2 * k + 4);
      Eigen::MatrixXd val;
      Eigen::VectorXd div;
      q->eval(K, pq.points, val, &div);
      V->evaluate(K, pq.points, bv, false);
      Eigen::VectorXd loc = bv.val * weights(pq).cwiseProduct(div);
      const auto& dofs = V->element_dofs(K);
      for (std::size_t j = 0; j < dofs.size(); ++j) ref(dofs[j]) += loc(j);
    }
    const double scale = std::max(1e-300, ref.cwiseAbs().maxCoeff());
    const double trace = y.tail(D.trace_rows).cwiseAbs().maxCoeff();
    const double vol = (y.head(D.volume_rows) - ref).cwiseAbs().maxCoeff();
    return (trace + vol) / scale;
  }
  SpacePtr V = which == 1 ? make_space(Family::CR, 0, mesh, true) : make_space(Family::LagrangeCont, k + 1, mesh, true);
  const int qdeg = which == 1 ? 0 : k;
  SpacePtr Q = make_space(Family::PDiscVector, qdeg, mesh);
  SpacePtr Qh = make_space(Family::EdgeNormalVector, which == 1 ? 0 : k + 1, mesh);
  auto u = random_scalar(V, rng);
  DGOperator G = assemble_dg_gradient(*V, *Q, *Qh);
  Eigen::VectorXd y = G.matrix * u->coeffs();
  Eigen::VectorXd ref = Eigen::VectorXd::Zero(Q->dim());
  BasisValues bq;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature pq = element_quadrature(m, K, 2 * k + 4);
    Eigen::VectorXd val;
    Eigen::MatrixXd grad;
    u->eval(K, pq.points, val, &grad);
    Q->evaluate(K, pq.points, bq, false);
    auto w = weights(pq);
    Eigen::VectorXd loc = bq.vx * w.cwiseProduct(grad.row(0).transpose()) + bq.vy * w.cwiseProduct(grad.row(1).transpose());
    const auto& dofs = Q->element_dofs(K);
    for (std::size_t j = 0; j < dofs.size(); ++j) ref(dofs[j]) += loc(j);
  }
  const double scale = std::max(1e-300, ref.cwiseAbs().maxCoeff());
  const double trace = y.tail(G.trace_rows).cwiseAbs().maxCoeff();
  const double vol = (y.head(G.volume_rows) - ref).cwiseAbs().maxCoeff();
  return (trace + vol) / scale;
}

double trace_identity_residual(MeshPtr mesh, int k, Rng& rng) {
  const Mesh& m = *mesh;
  auto q = random_vector_field(make_space(Family::PDiscVector, k, mesh), rng);
  auto v = random_scalar(make_space(Family::PDiscScalar, k, mesh), rng);
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  for (int K = 0; K < m.num_elements(); ++K)
    for (int i = 0; i < 3; ++i) {
      const int e = m.element_edges[K][i];
      PhysicalQuadrature pq = edge_quadrature(m, e, edge_degree(m, k));
      Eigen::VectorXd qn = normal_trace_values(*q, K, pq, m.outward_normal(K, i));
      Eigen::VectorXd vv = trace_values(*v, K, pq);
      const double c = weights(pq).dot(qn.cwiseProduct(vv));
      lhs += c;
      scale += std::abs(c);
    }
  for (int e = 0; e < m.num_edges(); ++e) {
    PhysicalQuadrature pq = edge_quadrature(m, e, edge_degree(m, k));
    auto w = weights(pq);
    Eigen::MatrixXd avg = jump_average(*q, e, EdgeOp::AvgVector, pq, m);
    Eigen::MatrixXd jmp = jump_average(*v, e, EdgeOp::JumpScalarVector, pq, m);
    rhs += w.dot(avg.cwiseProduct(jmp).colwise().sum().transpose());
    if (!m.is_boundary_edge(e)) {
      Eigen::MatrixXd qj = jump_average(*q, e, EdgeOp::JumpVectorNormal, pq, m);
      Eigen::MatrixXd va = jump_average(*v, e, EdgeOp::AvgScalar, pq, m);
      rhs += w.dot(qj.cwiseProduct(va).row(0).transpose());
    }
  }
  return std::abs(lhs - rhs) / std::max(1.0, scale);
}

double pointwise_identity_residual(MeshPtr mesh, int k, Rng& rng) {
  const Mesh& m = *mesh;
  auto q = random_vector_field(make_space(Family::PDiscVector, k, mesh), rng);
  auto v = random_scalar(make_space(Family::PDiscScalar, k, mesh), rng);
  double worst = 0.0, scale = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    PhysicalQuadrature pq = edge_quadrature(m, e, edge_degree(m, k));
    Eigen::MatrixXd avg = jump_average(*q, e, EdgeOp::AvgVector, pq, m);
    Eigen::MatrixXd jv = jump_average(*v, e, EdgeOp::JumpScalarVector, pq, m);
    Eigen::MatrixXd an = jump_average(*q, e, EdgeOp::AvgNormal, pq, m);
    Eigen::MatrixXd js = jump_average(*v, e, EdgeOp::JumpScalar, pq, m);
    Eigen::VectorXd lhs = avg.cwiseProduct(jv).colwise().sum().transpose();
    Eigen::VectorXd rhs = an.cwiseProduct(js).transpose();
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    scale = std::max(scale, (avg.colwise().norm().cwiseProduct(jv.colwise().norm())).maxCoeff());
  }
  return worst / std::max(1e-300, scale);
}

double lifting_residual(MeshPtr mesh, int k, bool vector, Rng& rng) {
  const Mesh& m = *mesh;
  SpacePtr S = make_space(vector ? Family::PDiscVector : Family::PDiscScalar, k, mesh);
  std::uniform_int_distribution<int> pick(0, m.num_edges() - 1);
  const int e = pick(rng);
  PhysicalQuadrature pq = edge_quadrature(m, e, 2 * k + 2);
  const int nq = pq.size();
  Eigen::MatrixXd w(vector ? 2 : 1, nq);
  for (int r = 0; r < w.rows(); ++r) w.row(r) = random_vector(nq, rng).transpose();
  Eigen::VectorXd r = vector ? lifting_volume(*S, e, pq, w) : lifting_scalar(*S, e, pq, w.row(0).transpose());
  auto field = vector ? nullptr : std::make_shared<DiscreteScalar>(S, r);
  auto vfield = vector ? std::make_shared<DiscreteVector>(S, r) : nullptr;
  Sides s = sides(m, e);
  const double half = s.count == 2 ? 0.5 : 1.0;
  double worst = 0.0, scale = 0.0;
  BasisValues b;
  Eigen::VectorXd touched = Eigen::VectorXd::Zero(S->dim());
  for (int t = 0; t < s.count; ++t) {
    const int K = s.element[t];
    const auto& dofs = S->element_dofs(K);
    for (int d : dofs) touched(d) = 1.0;
    // (r, phi_i)_K
    PhysicalQuadrature vq = element_quadrature(m, K, 2 * k + 2);
    S->evaluate(K, vq.points, b, false);
    Eigen::VectorXd vol;
    if (vector) {
      Eigen::MatrixXd rv;
      vfield->eval(K, vq.points, rv, nullptr);
      vol = b.vx * weights(vq).cwiseProduct(rv.row(0).transpose()) + b.vy * weights(vq).cwiseProduct(rv.row(1).transpose());
    } else {
      Eigen::VectorXd rv;
      field->eval(K, vq.points, rv, nullptr);
      vol = b.val * weights(vq).cwiseProduct(rv);
    }
    // <w, {phi_i}>_e
    S->evaluate(K, pq.points, b, false);
    Eigen::VectorXd edge = vector ? Eigen::VectorXd(half * (b.vx * weights(pq).cwiseProduct(w.row(0).transpose()) +
                                                            b.vy * weights(pq).cwiseProduct(w.row(1).transpose())))
                                  : Eigen::VectorXd(half * b.val * weights(pq).cwiseProduct(w.row(0).transpose()));
    worst = std::max(worst, (vol + edge).cwiseAbs().maxCoeff());
    scale = std::max(scale, edge.cwiseAbs().maxCoeff());
  }
  const double outside = (r.array() * (1.0 - touched.array())).abs().maxCoeff();
  return worst / std::max(1e-300, scale) + outside;
}

double lifting_bound_ratio(MeshPtr mesh, int k, Rng& rng) {
  const Mesh& m = *mesh;
  SpacePtr S = make_space(Family::PDiscScalar, k, mesh);
  std::uniform_int_distribution<int> pick(0, m.num_edges() - 1);
  const int e = pick(rng);
  PhysicalQuadrature pq = edge_quadrature(m, e, 2 * k + 2);
  Eigen::VectorXd w = random_vector(pq.size(), rng);
  DiscreteScalar r(S, lifting_scalar(*S, e, pq, w));
  double rn = 0.0;
  Sides s = sides(m, e);
  for (int t = 0; t < s.count; ++t) {
    PhysicalQuadrature vq = element_quadrature(m, s.element[t], 2 * k + 2);
    Eigen::VectorXd v;
    r.eval(s.element[t], vq.points, v, nullptr);
    rn += weights(vq).dot(v.cwiseProduct(v));
  }
  const double wn = weights(pq).dot(w.cwiseProduct(w));
  return std::sqrt(rn) * std::sqrt(m.h_e[e]) / std::sqrt(wn);
}

}  // namespace ugfem::oracle
