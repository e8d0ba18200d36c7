#include "ugfem/dg_calculus.hpp"

#include <algorithm>

#include <Eigen/Cholesky>

#include "ugfem/errors.hpp"

namespace ugfem {

int default_quadrature_degree(int max_poly_degree) { return std::min(kMaxQuadratureDegree, 2 * max_poly_degree + 2); }

namespace {

void same_mesh(const FESpace& a, const FESpace& b) {
  require(&a.mesh() == &b.mesh(), ErrorCode::Incompatible, "spaces " + a.describe() + " and " + b.describe() + " live on different meshes");
}

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace

DGOperator assemble_dg_gradient(const FESpace& V, const FESpace& Q, const FESpace& Qhat, int quad_degree) {
  same_mesh(V, Q);
  same_mesh(V, Qhat);
  require(!V.is_vector() && !V.is_edge_space(), ErrorCode::Incompatible, "DG gradient needs a scalar volume space");
  require(Q.is_vector() && !Q.is_edge_space(), ErrorCode::Incompatible, "DG gradient needs a vector volume space");
  require(Qhat.family() == Family::EdgeNormalVector, ErrorCode::Incompatible, "DG gradient trace space must be Edge_normal_vector");
  const Mesh& m = V.mesh();
  if (quad_degree < 0) quad_degree = default_quadrature_degree(std::max({V.poly_degree(), Q.poly_degree(), Qhat.degree()}));
  std::vector<Eigen::Triplet<double>> trip;
  BasisValues bv, bq;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, quad_degree);
    V.evaluate(K, q.points, bv, true);
    Q.evaluate(K, q.points, bq, false);
    auto w = as_vector(q.weights).asDiagonal();
    Eigen::MatrixXd loc = bq.vx * w * bv.dx.transpose() + bq.vy * w * bv.dy.transpose();
    const auto &qi = Q.element_dofs(K), &vi = V.element_dofs(K);
    const auto &qs = Q.element_signs(K), &vs = V.element_signs(K);
    for (int i = 0; i < loc.rows(); ++i)
      for (int j = 0; j < loc.cols(); ++j)
        if (qi[i] >= 0 && vi[j] >= 0 && loc(i, j) != 0.0) trip.emplace_back(qi[i], vi[j], qs[i] * vs[j] * loc(i, j));
  }
  const int off = Q.dim();
  for (int e = 0; e < m.num_edges(); ++e) {
    PhysicalQuadrature q = edge_quadrature(m, e, quad_degree);
    Eigen::MatrixXd bh;
    Qhat.eval_edge(e, q.params, bh);
    const auto& hi = Qhat.edge_dofs(e);
    for (int side = 0; side < 2; ++side) {
      int K = m.edge_elements[e][side];
      if (K < 0) continue;
      double sgn = side == 0 ? 1.0 : -1.0;  // n_e · n_K
      V.evaluate(K, q.points, bv, false);
      Eigen::MatrixXd loc = -sgn * bh * as_vector(q.weights).asDiagonal() * bv.val.transpose();
      const auto& vi = V.element_dofs(K);
      const auto& vs = V.element_signs(K);
      for (int i = 0; i < loc.rows(); ++i)
        for (int j = 0; j < loc.cols(); ++j)
          if (hi[i] >= 0 && vi[j] >= 0) trip.emplace_back(off + hi[i], vi[j], vs[j] * loc(i, j));
    }
  }
  DGOperator op;
  op.matrix.resize(Q.dim() + Qhat.dim(), V.dim());
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.volume_rows = Q.dim();
  op.trace_rows = Qhat.dim();
  op.tag = "grad_dg[" + V.describe() + " -> " + Q.describe() + " x " + Qhat.describe() + "]";
  return op;
}

DGOperator assemble_dg_divergence(const FESpace& Q, const FESpace& V, const FESpace& Vhat, int quad_degree) {
  same_mesh(Q, V);
  same_mesh(Q, Vhat);
  require(Q.is_vector() && !Q.is_edge_space(), ErrorCode::Incompatible, "DG divergence needs a vector volume space");
  require(!V.is_vector() && !V.is_edge_space(), ErrorCode::Incompatible, "DG divergence needs a scalar volume space");
  require(Vhat.family() == Family::EdgeScalar, ErrorCode::Incompatible, "DG divergence trace space must be Edge_scalar");
  const Mesh& m = Q.mesh();
  if (quad_degree < 0) quad_degree = default_quadrature_degree(std::max({V.poly_degree(), Q.poly_degree(), Vhat.degree()}));
  std::vector<Eigen::Triplet<double>> trip;
  BasisValues bv, bq;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, quad_degree);
    V.evaluate(K, q.points, bv, false);
    Q.evaluate(K, q.points, bq, true);
    Eigen::MatrixXd loc = bv.val * as_vector(q.weights).asDiagonal() * bq.div.transpose();
    const auto &qi = Q.element_dofs(K), &vi = V.element_dofs(K);
    const auto &qs = Q.element_signs(K), &vs = V.element_signs(K);
    for (int i = 0; i < loc.rows(); ++i)
      for (int j = 0; j < loc.cols(); ++j)
        if (vi[i] >= 0 && qi[j] >= 0 && loc(i, j) != 0.0) trip.emplace_back(vi[i], qi[j], vs[i] * qs[j] * loc(i, j));
  }
  const int off = V.dim();
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& hi = Vhat.edge_dofs(e);
    if (std::all_of(hi.begin(), hi.end(), [](int d) { return d < 0; })) continue;
    PhysicalQuadrature q = edge_quadrature(m, e, quad_degree);
    Eigen::MatrixXd bh;
    Vhat.eval_edge(e, q.params, bh);
    for (int side = 0; side < 2; ++side) {
      int K = m.edge_elements[e][side];
      if (K < 0) continue;
      Vec2 nk = (side == 0 ? 1.0 : -1.0) * m.edge_normals[e];
      Q.evaluate(K, q.points, bq, false);
      Eigen::MatrixXd qn = nk.x() * bq.vx + nk.y() * bq.vy;
      Eigen::MatrixXd loc = -bh * as_vector(q.weights).asDiagonal() * qn.transpose();
      const auto& qi = Q.element_dofs(K);
      const auto& qs = Q.element_signs(K);
      for (int i = 0; i < loc.rows(); ++i)
        for (int j = 0; j < loc.cols(); ++j)
          if (hi[i] >= 0 && qi[j] >= 0) trip.emplace_back(off + hi[i], qi[j], qs[j] * loc(i, j));
    }
  }
  DGOperator op;
  op.matrix.resize(V.dim() + Vhat.dim(), Q.dim());
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.volume_rows = V.dim();
  op.trace_rows = Vhat.dim();
  op.tag = "div_dg[" + Q.describe() + " -> " + V.describe() + " x " + Vhat.describe() + "]";
  return op;
}

Eigen::MatrixXd jump_average(const ScalarField& v, int e, EdgeOp op, const PhysicalQuadrature& q, const Mesh& m) {
  const Vec2& n = m.edge_normals[e];
  const int kp = m.edge_elements[e][0], km = m.edge_elements[e][1];
  Eigen::VectorXd vp = trace_values(v, kp, q);
  Eigen::VectorXd vm = km >= 0 ? trace_values(v, km, q) : Eigen::VectorXd();
  const int nq = q.size();
  switch (op) {
    case EdgeOp::AvgScalar:
      return (km >= 0 ? Eigen::VectorXd(0.5 * (vp + vm)) : vp).transpose();
    case EdgeOp::JumpScalar:
      return (km >= 0 ? Eigen::VectorXd(vp - vm) : vp).transpose();
    case EdgeOp::JumpScalarVector: {
      Eigen::VectorXd j = km >= 0 ? Eigen::VectorXd(vp - vm) : vp;
      Eigen::MatrixXd out(2, nq);
      out.row(0) = n.x() * j.transpose();
      out.row(1) = n.y() * j.transpose();
      return out;
    }
    default: fail(ErrorCode::InvalidArgument, "edge operator needs a vector field");
  }
}

Eigen::MatrixXd jump_average(const VectorField& p, int e, EdgeOp op, const PhysicalQuadrature& q, const Mesh& m) {
  const Vec2& n = m.edge_normals[e];
  const int kp = m.edge_elements[e][0], km = m.edge_elements[e][1];
  Eigen::MatrixXd pp, pm;
  p.eval(kp, q.points, pp, nullptr);
  if (km >= 0) p.eval(km, q.points, pm, nullptr);
  switch (op) {
    case EdgeOp::AvgVector: return km >= 0 ? Eigen::MatrixXd(0.5 * (pp + pm)) : pp;
    case EdgeOp::AvgNormal: {
      Eigen::MatrixXd a = km >= 0 ? Eigen::MatrixXd(0.5 * (pp + pm)) : pp;
      return n.transpose() * a;
    }
    case EdgeOp::JumpVectorNormal: {
      Eigen::MatrixXd d = km >= 0 ? Eigen::MatrixXd(pp - pm) : pp;
      return n.transpose() * d;
    }
    default: fail(ErrorCode::InvalidArgument, "edge operator needs a scalar field");
  }
}

namespace {

LocalLifting local_lifting(const FESpace& S, int e, const PhysicalQuadrature& q) {
  const Mesh& m = S.mesh();
  LocalLifting out;
  const bool interior = m.edge_elements[e][1] >= 0;
  const double avg = interior ? 0.5 : 1.0;
  BasisValues b;
  for (int side = 0; side < 2; ++side) {
    int K = m.edge_elements[e][side];
    out.element[side] = K;
    if (K < 0) continue;
    S.evaluate(K, q.points, b, false);
    Eigen::MatrixXd mass = local_mass(S, K);
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    require(llt.info() == Eigen::Success, ErrorCode::Internal, "singular local mass in lifting");
    Eigen::MatrixXd vals;
    if (S.is_vector()) {
      vals.resize(b.vx.rows(), 2 * b.vx.cols());
      vals << b.vx, b.vy;
    } else {
      vals = b.val;
    }
    out.map[side] = -avg * llt.solve(vals);
  }
  return out;
}

Eigen::VectorXd apply_lifting(const FESpace& S, const LocalLifting& L, const Eigen::VectorXd& ww) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(S.dim());
  for (int side = 0; side < 2; ++side) {
    int K = L.element[side];
    if (K < 0) continue;
    Eigen::VectorXd c = L.map[side] * ww;
    const auto& ids = S.element_dofs(K);
    const auto& sg = S.element_signs(K);
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] >= 0) out(ids[i]) += sg[i] * c(i);
  }
  return out;
}

}  // namespace

LocalLifting local_lifting_volume(const FESpace& Q, int e, const PhysicalQuadrature& q_e) {
  require(Q.is_vector() && !Q.is_edge_space(), ErrorCode::Incompatible, "vector lifting needs a vector volume space");
  require(Q.family() != Family::RTConf && Q.family() != Family::BDMConf, ErrorCode::Incompatible,
          "lifting is defined on broken spaces");
  return local_lifting(Q, e, q_e);
}

LocalLifting local_lifting_scalar(const FESpace& V, int e, const PhysicalQuadrature& q_e) {
  require(!V.is_vector() && !V.is_edge_space(), ErrorCode::Incompatible, "scalar lifting needs a scalar volume space");
  require(V.family() == Family::PDiscScalar, ErrorCode::Incompatible, "lifting is defined on broken spaces");
  return local_lifting(V, e, q_e);
}

Eigen::VectorXd lifting_volume(const FESpace& Q, int e, const PhysicalQuadrature& q_e, const Eigen::MatrixXd& w) {
  require(w.rows() == 2 && w.cols() == q_e.size(), ErrorCode::InvalidArgument, "lifting data must be 2 x nq");
  LocalLifting L = local_lifting_volume(Q, e, q_e);
  Eigen::VectorXd ww(2 * q_e.size());
  for (int i = 0; i < q_e.size(); ++i) {
    ww(i) = w(0, i) * q_e.weights[i];
    ww(q_e.size() + i) = w(1, i) * q_e.weights[i];
  }
  return apply_lifting(Q, L, ww);
}

Eigen::VectorXd lifting_scalar(const FESpace& V, int e, const PhysicalQuadrature& q_e, const Eigen::VectorXd& w) {
  require(w.size() == q_e.size(), ErrorCode::InvalidArgument, "lifting data size mismatch");
  LocalLifting L = local_lifting_scalar(V, e, q_e);
  Eigen::VectorXd ww = w.cwiseProduct(as_vector(q_e.weights));
  return apply_lifting(V, L, ww);
}

}  // namespace ugfem
