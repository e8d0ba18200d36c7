#include "ugfem/fe_space.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ugfem/errors.hpp"
#include "ugfem/quadrature.hpp"

namespace ugfem {

std::string to_string(Family f) {
  switch (f) {
    case Family::PDiscScalar: return "P_disc_scalar";
    case Family::PDiscVector: return "P_disc_vector";
    case Family::RTDisc: return "RT_disc";
    case Family::LagrangeCont: return "Lagrange_cont";
    case Family::CR: return "CR";
    case Family::RTConf: return "RT_conf";
    case Family::BDMConf: return "BDM_conf";
    case Family::EdgeScalar: return "Edge_scalar";
    case Family::EdgeNormalVector: return "Edge_normal_vector";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::PDiscScalar, Family::PDiscVector, Family::RTDisc, Family::LagrangeCont, Family::CR,
                   Family::RTConf, Family::BDMConf, Family::EdgeScalar, Family::EdgeNormalVector})
    if (to_string(f) == name) return f;
  fail(ErrorCode::InvalidArgument, "unknown space family '" + name + "'");
}

namespace {

// Vector polynomial basis as pairs of coefficient rows over scalar monomials.
struct VectorBasis {
  Eigen::MatrixXd sx, sy;
};

VectorBasis vector_pk(int k, int mono_degree) {
  int nk = monomial_count(k), nm = monomial_count(mono_degree);
  VectorBasis b;
  b.sx = Eigen::MatrixXd::Zero(2 * nk, nm);
  b.sy = Eigen::MatrixXd::Zero(2 * nk, nm);
  for (int i = 0; i < nk; ++i) {
    b.sx(i, i) = 1.0;
    b.sy(nk + i, i) = 1.0;
  }
  return b;
}

// RT_k = P_k^2 + (x - x_c) * homogeneous P_k, in monomials of degree k + 1.
VectorBasis vector_rt(int k) {
  VectorBasis p = vector_pk(k, k + 1);
  int n0 = static_cast<int>(p.sx.rows());
  int nm = monomial_count(k + 1);
  VectorBasis b;
  b.sx = Eigen::MatrixXd::Zero(n0 + k + 1, nm);
  b.sy = Eigen::MatrixXd::Zero(n0 + k + 1, nm);
  b.sx.topRows(n0) = p.sx;
  b.sy.topRows(n0) = p.sy;
  for (int bexp = 0; bexp <= k; ++bexp) {
    int a = k - bexp;
    b.sx(n0 + bexp, ScaledMonomials::index(a + 1, bexp)) = 1.0;
    b.sy(n0 + bexp, ScaledMonomials::index(a, bexp + 1)) = 1.0;
  }
  return b;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& m, const std::vector<double>& w) {
  Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  return m * wv.asDiagonal() * m.transpose();
}

}  // namespace

FESpace::FESpace(Family family, int degree, MeshPtr mesh, bool zero_boundary)
    : family_(family), degree_(degree), mesh_(std::move(mesh)), zero_boundary_(zero_boundary) {
  require(mesh_ != nullptr, ErrorCode::InvalidArgument, "space needs a mesh");
  require(degree >= 0, ErrorCode::Incompatible, "negative degree for " + to_string(family));
  switch (family) {
    case Family::LagrangeCont:
      require(degree >= 1, ErrorCode::Incompatible, "Lagrange_cont needs k >= 1");
      build_lagrange();
      break;
    case Family::CR:
      require(degree == 0, ErrorCode::Incompatible, "CR is only defined for k = 0");
      build_cr();
      break;
    case Family::BDMConf:
      require(degree >= 1, ErrorCode::Incompatible, "BDM_conf needs k >= 1");
      build_hdiv();
      break;
    case Family::RTConf: build_hdiv(); break;
    case Family::EdgeScalar:
    case Family::EdgeNormalVector: build_edge(); break;
    default: build_discontinuous(); break;
  }
}

bool FESpace::is_vector() const {
  switch (family_) {
    case Family::PDiscVector:
    case Family::RTDisc:
    case Family::RTConf:
    case Family::BDMConf:
    case Family::EdgeNormalVector: return true;
    default: return false;
  }
}

int FESpace::poly_degree() const {
  switch (family_) {
    case Family::RTDisc:
    case Family::RTConf: return degree_ + 1;
    case Family::CR: return 1;
    default: return degree_;
  }
}

std::string FESpace::describe() const {
  return to_string(family_) + "(k=" + std::to_string(degree_) + (zero_boundary_ ? ",0" : "") + ")";
}

void FESpace::build_discontinuous() {
  const Mesh& m = *mesh_;
  const int nt = m.num_elements();
  VectorBasis vb;
  bool scalar = family_ == Family::PDiscScalar;
  if (family_ == Family::PDiscScalar) {
    mono_degree_ = degree_;
  } else if (family_ == Family::PDiscVector) {
    mono_degree_ = degree_;
    vb = vector_pk(degree_, degree_);
  } else {
    mono_degree_ = degree_ + 1;
    vb = vector_rt(degree_);
  }
  const int nm = monomial_count(mono_degree_);
  local_dim_ = scalar ? nm : static_cast<int>(vb.sx.rows());
  cx_.resize(nt);
  if (!scalar) cy_.resize(nt);
  dofs_.resize(nt);
  signs_.assign(nt, std::vector<double>(local_dim_, 1.0));
  for (int K = 0; K < nt; ++K) {
    ScaledMonomials mono(mono_degree_, m.centroid(K), m.h_K[K]);
    PhysicalQuadrature q = element_quadrature(m, K, 2 * mono_degree_);
    Eigen::MatrixXd val;
    mono.eval(q.points, val);
    Eigen::MatrixXd g;
    if (scalar) {
      g = weighted_gram(val, q.weights);
    } else {
      g = weighted_gram(vb.sx * val, q.weights) + weighted_gram(vb.sy * val, q.weights);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    require(llt.info() == Eigen::Success, ErrorCode::Internal, "local Gram matrix not positive definite");
    Eigen::MatrixXd linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
    if (scalar) {
      cx_[K] = linv;
    } else {
      cx_[K] = linv * vb.sx;
      cy_[K] = linv * vb.sy;
    }
    dofs_[K].resize(local_dim_);
    for (int i = 0; i < local_dim_; ++i) dofs_[K][i] = K * local_dim_ + i;
  }
  dim_ = nt * local_dim_;
  boundary_dof_.assign(dim_, 0);
}

void FESpace::build_lagrange() {
  const Mesh& m = *mesh_;
  const int p = degree_;
  mono_degree_ = p;
  local_dim_ = monomial_count(p);
  int next = 0;
  std::vector<int> vdof(m.num_vertices());
  std::vector<char> bflag;
  for (int v = 0; v < m.num_vertices(); ++v) {
    bool b = m.vertex_on_boundary[v];
    vdof[v] = (zero_boundary_ && b) ? -1 : next++;
    if (vdof[v] >= 0) bflag.push_back(b);
  }
  std::vector<std::vector<int>> edof(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    bool b = m.is_boundary_edge(e);
    for (int j = 1; j < p; ++j) {
      edof[e].push_back((zero_boundary_ && b) ? -1 : next++);
      if (edof[e].back() >= 0) bflag.push_back(b);
    }
  }
  const int nt = m.num_elements();
  dofs_.resize(nt);
  signs_.assign(nt, std::vector<double>(local_dim_, 1.0));
  cx_.resize(nt);
  for (int K = 0; K < nt; ++K) {
    const auto& t = m.triangles[K];
    std::vector<Vec2> nodes;
    std::vector<int> ids;
    for (int i = 0; i < 3; ++i) {
      nodes.push_back(m.vertices[t[i]]);
      ids.push_back(vdof[t[i]]);
    }
    for (int i = 0; i < 3; ++i) {
      int e = m.element_edges[K][i];
      for (int j = 1; j < p; ++j) {
        nodes.push_back(m.edge_point(e, double(j) / p));
        ids.push_back(edof[e][j - 1]);
      }
    }
    for (int i1 = 1; i1 < p; ++i1)
      for (int i2 = 1; i1 + i2 < p; ++i2) {
        int i3 = p - i1 - i2;
        nodes.push_back((i1 * m.vertices[t[0]] + i2 * m.vertices[t[1]] + i3 * m.vertices[t[2]]) / double(p));
        ids.push_back(next++);
        bflag.push_back(0);
      }
    ScaledMonomials mono(p, m.centroid(K), m.h_K[K]);
    Eigen::MatrixXd vand;
    mono.eval(nodes, vand);
    cx_[K] = vand.inverse();
    dofs_[K] = ids;
  }
  dim_ = next;
  boundary_dof_.assign(bflag.begin(), bflag.end());
}

void FESpace::build_cr() {
  const Mesh& m = *mesh_;
  mono_degree_ = 1;
  local_dim_ = 3;
  std::vector<int> edof(m.num_edges());
  int next = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    bool b = m.is_boundary_edge(e);
    edof[e] = (zero_boundary_ && b) ? -1 : next++;
    if (edof[e] >= 0) boundary_dof_.push_back(b);
  }
  dim_ = next;
  const int nt = m.num_elements();
  dofs_.resize(nt);
  signs_.assign(nt, std::vector<double>(3, 1.0));
  cx_.resize(nt);
  for (int K = 0; K < nt; ++K) {
    std::vector<Vec2> nodes;
    for (int i = 0; i < 3; ++i) {
      nodes.push_back(m.edge_midpoint(m.element_edges[K][i]));
      dofs_[K].push_back(edof[m.element_edges[K][i]]);
    }
    ScaledMonomials mono(1, m.centroid(K), m.h_K[K]);
    Eigen::MatrixXd vand;
    mono.eval(nodes, vand);
    cx_[K] = vand.inverse();
  }
}

void FESpace::build_hdiv() {
  const Mesh& m = *mesh_;
  const int k = degree_;
  const bool rt = family_ == Family::RTConf;
  mono_degree_ = rt ? k + 1 : k;
  VectorBasis vb = rt ? vector_rt(k) : vector_pk(k, k);
  const int n = static_cast<int>(vb.sx.rows());
  const int ne_dofs = k + 1;
  const int nb = n - 3 * ne_dofs;
  local_dim_ = n;

  int next = 0;
  std::vector<std::vector<int>> edof(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    bool b = m.is_boundary_edge(e);
    for (int j = 0; j < ne_dofs; ++j) {
      edof[e].push_back((zero_boundary_ && b) ? -1 : next++);
      if (edof[e].back() >= 0) boundary_dof_.push_back(b);
    }
  }
  const int nt = m.num_elements();
  dofs_.resize(nt);
  signs_.resize(nt);
  cx_.resize(nt);
  cy_.resize(nt);
  std::vector<double> leg(ne_dofs);
  for (int K = 0; K < nt; ++K) {
    ScaledMonomials mono(mono_degree_, m.centroid(K), m.h_K[K]);
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < 3; ++i) {
      int e = m.element_edges[K][i];
      Vec2 nk = m.outward_normal(K, i);
      PhysicalQuadrature q = edge_quadrature(m, e, mono_degree_ + k + 1);
      Eigen::MatrixXd val;
      mono.eval(q.points, val);
      Eigen::MatrixXd sn = nk.x() * (vb.sx * val) + nk.y() * (vb.sy * val);  // n x nq
      for (int j = 0; j < ne_dofs; ++j) {
        Eigen::VectorXd wl(q.size());
        for (int p = 0; p < q.size(); ++p) {
          shifted_legendre(k, q.params[p], leg.data());
          wl(p) = q.weights[p] * leg[j];
        }
        d.row(i * ne_dofs + j) = (sn * wl).transpose();
      }
    }
    if (nb > 0) {
      PhysicalQuadrature q = element_quadrature(m, K, 2 * mono_degree_);
      Eigen::MatrixXd val;
      mono.eval(q.points, val);
      Eigen::MatrixXd g = weighted_gram(vb.sx * val, q.weights) + weighted_gram(vb.sy * val, q.weights);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.topRows(3 * ne_dofs), Eigen::ComputeFullV);
      Eigen::MatrixXd kernel = svd.matrixV().rightCols(nb);
      d.bottomRows(nb) = kernel.transpose() * g;
    }
    Eigen::MatrixXd a = d.inverse().transpose();
    cx_[K] = a * vb.sx;
    cy_[K] = a * vb.sy;
    dofs_[K].resize(n);
    signs_[K].assign(n, 1.0);
    for (int i = 0; i < 3; ++i) {
      int e = m.element_edges[K][i];
      for (int j = 0; j < ne_dofs; ++j) {
        dofs_[K][i * ne_dofs + j] = edof[e][j];
        signs_[K][i * ne_dofs + j] = m.element_edge_signs[K][i];
      }
    }
    for (int l = 0; l < nb; ++l) {
      dofs_[K][3 * ne_dofs + l] = next++;
      boundary_dof_.push_back(0);
    }
  }
  dim_ = next;
}

void FESpace::build_edge() {
  const Mesh& m = *mesh_;
  local_dim_ = degree_ + 1;
  int next = 0;
  dofs_.resize(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    bool b = m.is_boundary_edge(e);
    for (int j = 0; j <= degree_; ++j) {
      dofs_[e].push_back((zero_boundary_ && b) ? -1 : next++);
      if (dofs_[e].back() >= 0) boundary_dof_.push_back(b);
    }
  }
  dim_ = next;
}

void FESpace::evaluate(int K, const std::vector<Vec2>& pts, BasisValues& out, bool derivatives) const {
  require(!is_edge_space(), ErrorCode::Incompatible, "evaluate() called on an edge space");
  const Mesh& m = *mesh_;
  ScaledMonomials mono(mono_degree_, m.centroid(K), m.h_K[K]);
  Eigen::MatrixXd val, dx, dy;
  mono.eval(pts, val, derivatives ? &dx : nullptr, derivatives ? &dy : nullptr);
  if (!is_vector()) {
    out.val.noalias() = cx_[K] * val;
    if (derivatives) {
      out.dx.noalias() = cx_[K] * dx;
      out.dy.noalias() = cx_[K] * dy;
    }
  } else {
    out.vx.noalias() = cx_[K] * val;
    out.vy.noalias() = cy_[K] * val;
    if (derivatives) out.div.noalias() = cx_[K] * dx + cy_[K] * dy;
  }
}

BasisValues FESpace::eval_basis(int K, const std::vector<std::array<double, 2>>& ref_pts) const {
  const Mesh& m = *mesh_;
  const auto& t = m.triangles[K];
  const Vec2 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
  std::vector<Vec2> pts;
  for (const auto& r : ref_pts) pts.push_back(a + r[0] * (b - a) + r[1] * (c - a));
  BasisValues out;
  evaluate(K, pts, out, true);
  return out;
}

void FESpace::eval_edge(int e, const std::vector<double>& t, Eigen::MatrixXd& val) const {
  require(is_edge_space(), ErrorCode::Incompatible, "eval_edge() called on a volume space");
  const double h = mesh_->h_e[e];
  val.resize(degree_ + 1, static_cast<Eigen::Index>(t.size()));
  std::vector<double> leg(degree_ + 1);
  for (std::size_t q = 0; q < t.size(); ++q) {
    shifted_legendre(degree_, t[q], leg.data());
    for (int j = 0; j <= degree_; ++j) val(j, q) = std::sqrt((2.0 * j + 1.0) / h) * leg[j];
  }
}

Eigen::VectorXd FESpace::gather(int entity, const Eigen::VectorXd& global) const {
  require(global.size() == dim_, ErrorCode::InvalidArgument, "coefficient vector size does not match " + describe());
  const auto& ids = dofs_[entity];
  Eigen::VectorXd local(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double s = is_edge_space() ? 1.0 : signs_[entity][i];
    local(i) = ids[i] < 0 ? 0.0 : s * global(ids[i]);
  }
  return local;
}

std::vector<int> FESpace::boundary_dofs() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(boundary_dof_.size()); ++i)
    if (boundary_dof_[i]) out.push_back(i);
  return out;
}

SpacePtr make_space(Family family, int degree, MeshPtr mesh, bool zero_boundary) {
  return std::make_shared<FESpace>(family, degree, std::move(mesh), zero_boundary);
}

Eigen::MatrixXd local_mass(const FESpace& space, int K, int quad_degree) {
  if (quad_degree < 0) quad_degree = 2 * space.poly_degree();
  PhysicalQuadrature q = element_quadrature(space.mesh(), K, quad_degree);
  BasisValues b;
  space.evaluate(K, q.points, b, false);
  if (space.is_vector()) return weighted_gram(b.vx, q.weights) + weighted_gram(b.vy, q.weights);
  return weighted_gram(b.val, q.weights);
}

namespace {

bool is_discontinuous(Family f) {
  return f == Family::PDiscScalar || f == Family::PDiscVector || f == Family::RTDisc;
}

// Projection with a load vector computed per element by `load(K, basis, q)`.
template <class Load>
Eigen::VectorXd project(const FESpace& space, int quad_degree, Load load) {
  require(!space.is_edge_space(), ErrorCode::Incompatible, "volume projection onto an edge space");
  const Mesh& m = space.mesh();
  if (quad_degree < 0) quad_degree = std::min(kMaxQuadratureDegree, 2 * space.poly_degree() + 4);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dim());
  if (is_discontinuous(space.family())) {
    for (int K = 0; K < m.num_elements(); ++K) {
      PhysicalQuadrature q = element_quadrature(m, K, quad_degree);
      BasisValues b;
      space.evaluate(K, q.points, b, false);
      Eigen::VectorXd rhs = load(b, q);
      Eigen::MatrixXd mass = space.is_vector() ? weighted_gram(b.vx, q.weights) + weighted_gram(b.vy, q.weights)
                                               : weighted_gram(b.val, q.weights);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(mass);
      require(ldlt.info() == Eigen::Success, ErrorCode::Internal, "singular local mass matrix");
      Eigen::VectorXd c = ldlt.solve(rhs);
      const auto& ids = space.element_dofs(K);
      for (std::size_t i = 0; i < ids.size(); ++i) out(ids[i]) = c(i);
    }
    return out;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int K = 0; K < m.num_elements(); ++K) {
    PhysicalQuadrature q = element_quadrature(m, K, quad_degree);
    BasisValues b;
    space.evaluate(K, q.points, b, false);
    Eigen::VectorXd rhs = load(b, q);
    Eigen::MatrixXd mass = space.is_vector() ? weighted_gram(b.vx, q.weights) + weighted_gram(b.vy, q.weights)
                                             : weighted_gram(b.val, q.weights);
    const auto& ids = space.element_dofs(K);
    const auto& sg = space.element_signs(K);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0) continue;
      out(ids[i]) += sg[i] * rhs(i);
      for (std::size_t j = 0; j < ids.size(); ++j)
        if (ids[j] >= 0) trip.emplace_back(ids[i], ids[j], sg[i] * sg[j] * mass(i, j));
    }
  }
  Eigen::SparseMatrix<double> mass(space.dim(), space.dim());
  mass.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mass);
  require(solver.info() == Eigen::Success, ErrorCode::Internal, "singular global mass matrix");
  return solver.solve(out);
}

}  // namespace

Eigen::VectorXd l2_project_volume(const FESpace& space, const ScalarFunction& f, int quad_degree) {
  require(!space.is_vector(), ErrorCode::Incompatible, "scalar projection onto vector space " + space.describe());
  return project(space, quad_degree, [&](const BasisValues& b, const PhysicalQuadrature& q) {
    Eigen::VectorXd fw(q.size());
    for (int i = 0; i < q.size(); ++i) fw(i) = f(q.points[i]) * q.weights[i];
    return Eigen::VectorXd(b.val * fw);
  });
}

Eigen::VectorXd l2_project_volume(const FESpace& space, const VectorFunction& f, int quad_degree) {
  require(space.is_vector(), ErrorCode::Incompatible, "vector projection onto scalar space " + space.describe());
  return project(space, quad_degree, [&](const BasisValues& b, const PhysicalQuadrature& q) {
    Eigen::VectorXd fx(q.size()), fy(q.size());
    for (int i = 0; i < q.size(); ++i) {
      Vec2 v = f(q.points[i]);
      fx(i) = v.x() * q.weights[i];
      fy(i) = v.y() * q.weights[i];
    }
    return Eigen::VectorXd(b.vx * fx + b.vy * fy);
  });
}

Eigen::VectorXd l2_project_edge_values(const FESpace& space, int e, const std::vector<double>& params,
                                       const std::vector<double>& weights, const Eigen::VectorXd& values) {
  require(space.is_edge_space(), ErrorCode::Incompatible, "edge projection onto volume space " + space.describe());
  Eigen::MatrixXd val;
  space.eval_edge(e, params, val);
  Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return val * (w.cwiseProduct(values));
}

Eigen::VectorXd l2_project_edge(const FESpace& space, const ScalarFunction& g, int e, int quad_degree) {
  if (quad_degree < 0) quad_degree = std::min(kMaxQuadratureDegree, 2 * space.degree() + 4);
  PhysicalQuadrature q = edge_quadrature(space.mesh(), e, quad_degree);
  Eigen::VectorXd v(q.size());
  for (int i = 0; i < q.size(); ++i) v(i) = g(q.points[i]);
  return l2_project_edge_values(space, e, q.params, q.weights, v);
}

}  // namespace ugfem
