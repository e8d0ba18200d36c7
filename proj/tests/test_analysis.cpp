#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "ugfem/consistency.hpp"
#include "ugfem/convergence.hpp"
#include "ugfem/errors.hpp"
#include "ugfem/infsup.hpp"
#include "ugfem/manufactured.hpp"
#include "ugfem/norms.hpp"
#include "ugfem/schemes.hpp"

using namespace ugfem;
using oracle::random_vector;
using oracle::Rng;

namespace {

FieldSet discrete_fields(SpacePtr q, const Eigen::VectorXd& p, SpacePtr v, const Eigen::VectorXd& u) {
  FieldSet f;
  if (q) f.p = std::make_shared<DiscreteVector>(q, p);
  if (v) f.u = std::make_shared<DiscreteScalar>(v, u);
  return f;
}

// sum over interior edges of eta/h_e ||[p]||^2 by an explicit edge loop.
double jump_penalty(const Mesh& m, const VectorField& p, double eta) {
  double s = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e)) continue;
    PhysicalQuadrature q = edge_quadrature(m, e, 8);
    const Vec2 n = m.edge_normals[e];
    Eigen::VectorXd a = normal_trace_values(p, m.edge_elements[e][0], q, n);
    Eigen::VectorXd b = normal_trace_values(p, m.edge_elements[e][1], q, n);
    for (int i = 0; i < q.size(); ++i) s += eta / m.h_e[e] * q.weights[i] * std::pow(a(i) - b(i), 2);
  }
  return s;
}

}  // namespace

TEST(Manufactured, DataIsConsistent) {
  // p = -alpha grad u and div p = f, checked by central differences
  for (const ManufacturedCase& c : {sin_sin_case(), polynomial_case(), variable_alpha_case()}) {
    const double d = 1e-5;
    for (Vec2 x : {Vec2(0.3, 0.7), Vec2(0.61, 0.2), Vec2(0.9, 0.45)}) {
      const Vec2 ex(d, 0), ey(0, d);
      Vec2 g((c.u(x + ex) - c.u(x - ex)) / (2 * d), (c.u(x + ey) - c.u(x - ey)) / (2 * d));
      EXPECT_LT((c.grad_u(x) - g).norm(), 1e-8) << c.name;
      EXPECT_LT((c.p(x) + c.alpha(x) * c.grad_u(x)).norm(), 1e-12) << c.name;
      const double div = (c.p(x + ex).x() - c.p(x - ex).x() + c.p(x + ey).y() - c.p(x - ey).y()) / (2 * d);
      EXPECT_NEAR(div, c.div_p(x), 1e-6 * (1 + std::abs(div))) << c.name;
      EXPECT_NEAR(c.f(x), c.div_p(x), 1e-12 * (1 + std::abs(div))) << c.name;
    }
    EXPECT_NEAR(c.u(Vec2(0.0, 0.4)), 0.0, 1e-15);
    EXPECT_NEAR(c.u(Vec2(0.4, 1.0)), 0.0, 1e-15);
  }
  // f = 5 pi^2 sin(2 pi x) sin(pi y)
  const Vec2 x(0.3, 0.6);
  EXPECT_NEAR(sin_sin_case().f(x), 5 * M_PI * M_PI * std::sin(2 * M_PI * 0.3) * std::sin(M_PI * 0.6), 1e-12);
}

TEST(Norms, ZeroFieldIsZero) {
  auto m = oracle::uniform_mesh(2);
  MethodConfig c;
  c.k = 1;
  SpaceBundle sp = make_spaces(c, m);
  FieldSet z = discrete_fields(sp.q, Eigen::VectorXd::Zero(sp.q->dim()), sp.u, Eigen::VectorXd::Zero(sp.u->dim()));
  z.p_hat = std::make_shared<DiscreteEdge>(sp.trace, Eigen::VectorXd::Zero(sp.trace->dim()));
  z.u_hat = std::make_shared<DiscreteEdge>(make_space(Family::EdgeScalar, 1, m, true), Eigen::VectorXd::Zero(make_space(Family::EdgeScalar, 1, m, true)->dim()));
  for (NormKind k : {NormKind::L2Scalar, NormKind::L2Vector, NormKind::DivBroken, NormKind::HdivBroken, NormKind::H1Broken,
                     NormKind::WG_p, NormKind::WG_u, NormKind::WG_div, NormKind::HDG_div, NormKind::HDG_u0, NormKind::HDG_u1,
                     NormKind::MDG})
    EXPECT_EQ(error_norm(*m, z, k, {}), 0.0) << to_string(k);
}

TEST(Norms, ConformingFieldHasNoJumpTerm) {
  auto m = std::make_shared<Mesh>(build_unstructured(0.3, 2));
  Rng rng(31);
  SpacePtr L = make_space(Family::LagrangeCont, 2, m, true);
  FieldSet f = discrete_fields(nullptr, {}, L, random_vector(L->dim(), rng));
  NormParams prm;
  prm.rho = 0.01;
  EXPECT_NEAR(error_norm(*m, f, NormKind::WG_u, prm), error_norm(*m, f, NormKind::H1Broken, prm),
              1e-10 * error_norm(*m, f, NormKind::H1Broken, prm));
}

TEST(Norms, MixedDGNormMatchesEdgeLoop) {
  auto m = std::make_shared<Mesh>(build_unstructured(0.3, 4));
  Rng rng(32);
  SpacePtr Q = make_space(Family::PDiscVector, 1, m);
  FieldSet f = discrete_fields(Q, random_vector(Q->dim(), rng), nullptr, {});
  NormParams prm;
  prm.eta_e = 3.0;
  const double l2 = error_norm(*m, f, NormKind::L2Vector, prm), div = error_norm(*m, f, NormKind::DivBroken, prm);
  const double mdg = error_norm(*m, f, NormKind::MDG, prm);
  EXPECT_NEAR(mdg * mdg, l2 * l2 + div * div + jump_penalty(*m, *f.p, 3.0), 1e-11 * mdg * mdg);
  const double hdiv = error_norm(*m, f, NormKind::HdivBroken, prm);
  EXPECT_NEAR(hdiv * hdiv, l2 * l2 + div * div, 1e-12 * hdiv * hdiv);
}

TEST(Norms, GramMatchesQuadrature) {
  auto m = std::make_shared<Mesh>(build_unstructured(0.35, 5));
  Rng rng(33);
  MethodConfig c;
  c.scheme = Scheme::MixedDG_Jump;
  c.k = 1;
  SpaceBundle sp = make_spaces(c, m);
  NormParams prm;
  prm.eta_e = 2.0;
  Eigen::VectorXd p = random_vector(sp.q->dim(), rng), u = random_vector(sp.u->dim(), rng);
  FieldSet f = discrete_fields(sp.q, p, sp.u, u);
  for (NormKind k : {NormKind::L2Vector, NormKind::DivBroken, NormKind::MDG}) {
    const double n = error_norm(*m, f, k, prm);
    EXPECT_NEAR(p.dot(norm_gram(k, sp, prm) * p), n * n, 1e-11 * n * n) << to_string(k);
  }
  for (NormKind k : {NormKind::L2Scalar, NormKind::H1Broken}) {
    const double n = error_norm(*m, f, k, prm);
    EXPECT_NEAR(u.dot(norm_gram(k, sp, prm) * u), n * n, 1e-11 * n * n) << to_string(k);
  }
}

TEST(Norms, MissingFieldIsIncompatible) {
  auto m = oracle::uniform_mesh(2);
  FieldSet f = exact_fields(sin_sin_case(), m);
  f.p = nullptr;
  try {
    error_norm(*m, f, NormKind::L2Vector, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Incompatible);
  }
}

TEST(Convergence, Rates) {
  std::vector<ConvergenceRow> rows = {{0.1, 0, {0.1}}, {0.05, 0, {0.025}}};
  RateTable r = convergence_rates(rows);
  ASSERT_TRUE(r[1][0].has_value());
  EXPECT_NEAR(*r[1][0], 2.0, 1e-12);
  EXPECT_TRUE(r[0].empty() || !r[0][0].has_value());
  // mesh size N^(-1/2) from element counts 220 and 976
  rows = {{1.0 / std::sqrt(220.0), 220, {0.0066776}}, {1.0 / std::sqrt(976.0), 976, {0.00146501}}};
  EXPECT_NEAR(*convergence_rates(rows)[1][0], 2.04, 0.005);
  rows = {{0.1, 0, {0.1, 0.0}}, {0.05, 0, {0.05, 0.0}}};
  r = convergence_rates(rows);
  EXPECT_NEAR(*r[1][0], 1.0, 1e-12);
  EXPECT_FALSE(r[1][1].has_value());
}

TEST(Convergence, RejectsBadInput) {
  EXPECT_THROW(convergence_rates({{0.1, 0, {1.0}}}), Error);
  EXPECT_THROW(convergence_rates({{0.1, 0, {1.0}}, {0.2, 0, {0.5}}, {0.15, 0, {0.3}}}), Error);
  EXPECT_THROW(convergence_rates({{0.1, 0, {1.0}}, {0.05, 0, {0.5, 0.2}}}), Error);
  EXPECT_THROW(convergence_rates({{0.1, 0, {1.0}}, {0.1, 0, {0.5}}}), Error);
}

TEST(InfSup, MixedRT0OnTwoByTwo) {
  auto m = oracle::uniform_mesh(2);
  SpacePtr Q = make_space(Family::RTConf, 0, m), V = make_space(Family::PDiscScalar, 0, m);
  SpacePtr Vh = make_space(Family::EdgeScalar, 0, m, true);
  DGOperator D = assemble_dg_divergence(*Q, *V, *Vh);
  // inf over v (rows), sup over q (columns)
  Eigen::MatrixXd B = Eigen::MatrixXd(D.matrix).topRows(V->dim());
  SpaceBundle sp{m, Q, V, nullptr};
  Eigen::MatrixXd Nv = Eigen::MatrixXd(norm_gram(NormKind::L2Scalar, sp, {}));
  Eigen::MatrixXd Mq = Eigen::MatrixXd(norm_gram(NormKind::HdivBroken, sp, {}));
  InfSupResult r = schur_pencil_beta(B, Mq, Nv);
  EXPECT_TRUE(r.stable());
  EXPECT_GT(r.beta, 0.1);
  // homogeneity: Gram matrices scaled by c and 1/c keep beta, both scaled
  // by c divide it by c
  EXPECT_NEAR(schur_pencil_beta(B, 4.0 * Mq, 0.25 * Nv).beta, r.beta, 1e-10);
  EXPECT_NEAR(schur_pencil_beta(B, 4.0 * Mq, 4.0 * Nv).beta, r.beta / 4.0, 1e-10);
}

TEST(InfSup, ConformantFamiliesUniform) {
  struct Case { Scheme s; SpaceVariant v; InfSupKind kind; };
  for (Case c : {Case{Scheme::WG, SpaceVariant::PrimalType, InfSupKind::WG_grad}, Case{Scheme::WG, SpaceVariant::RTType, InfSupKind::WG_div},
                 Case{Scheme::HDG, SpaceVariant::BDMType, InfSupKind::HDG_div}, Case{Scheme::MixedDG_Jump, SpaceVariant::BDMType, InfSupKind::MDG}}) {
    MethodConfig cfg;
    cfg.scheme = c.s;
    cfg.spaces = c.v;
    double lo = 1e300, hi = 0.0;
    for (int n : {2, 4})
      for (double rho : {1.0, 1.0 / 16}) {
        InfSupResult r = infsup_estimate(cfg, oracle::uniform_mesh(n), rho, c.kind);
        EXPECT_TRUE(r.stable()) << to_string(c.kind);
        lo = std::min(lo, r.beta);
        hi = std::max(hi, r.beta);
      }
    EXPECT_LE(hi / lo, 3.0) << to_string(c.kind);
  }
}

TEST(InfSup, EqualOrderMixedDGDegenerates) {
  // P0 fluxes with P0 scalars: beta shrinks like h
  MethodConfig cfg;
  cfg.scheme = Scheme::MixedDG_Jump;
  cfg.spaces = SpaceVariant::Equal;
  const double b2 = infsup_estimate(cfg, oracle::uniform_mesh(2), 1.0, InfSupKind::MDG).beta;
  const double b4 = infsup_estimate(cfg, oracle::uniform_mesh(4), 1.0, InfSupKind::MDG).beta;
  const double b8 = infsup_estimate(cfg, oracle::uniform_mesh(8), 1.0, InfSupKind::MDG).beta;
  EXPECT_GT(b2 / b4, 1.5);
  EXPECT_GT(b4 / b8, 1.5);
}

TEST(InfSup, KindMustMatchScheme) {
  MethodConfig cfg;
  cfg.scheme = Scheme::HDG;
  EXPECT_THROW(infsup_estimate(cfg, oracle::uniform_mesh(2), 1.0, InfSupKind::WG_grad), Error);
}

TEST(Consistency, DiscreteTrialReproducesAssembledResidual) {
  // with discrete fields inserted the form residual is A x - b
  auto m = std::make_shared<Mesh>(build_unstructured(0.35, 6));
  Rng rng(34);
  for (Scheme s : {Scheme::WG, Scheme::HDG, Scheme::HDGReduced, Scheme::HybridMixed, Scheme::MixedDG_Jump, Scheme::MixedDG_Lifting})
    for (int k = 0; k <= 1; ++k) {
      MethodConfig c;
      c.scheme = s;
      c.k = k;
      c.rho = 0.7;
      c.quad_degree = 2 * k + 6;
      LinearSystem sys = assemble(c, m, sin_sin_case());
      Eigen::VectorXd x = random_vector(sys.size(), rng);
      DiscreteSolution d;
      d.config = c;
      d.spaces = sys.spaces;
      d.p = x.segment(sys.block("p").offset, sys.block("p").size);
      d.u = x.segment(sys.block("u").offset, sys.block("u").size);
      for (const char* t : {"p_hat", "u_hat"})
        if (sys.has_block(t)) d.trace = x.segment(sys.block(t).offset, sys.block(t).size);
      Eigen::VectorXd r = form_residual(sys, solution_fields(d), 2 * k + 6);
      Eigen::VectorXd ref = sys.matrix * x - sys.rhs;
      EXPECT_LT((r - ref).cwiseAbs().maxCoeff(), 1e-11 * std::max(1.0, ref.cwiseAbs().maxCoeff())) << c.describe();
    }
}

TEST(Consistency, ExactSolutionSatisfiesSchemes) {
  auto m = oracle::uniform_mesh(16);
  for (Scheme s : {Scheme::WG, Scheme::HDG, Scheme::MixedDG_Jump})
    for (int k = 0; k <= 1; ++k) {
      MethodConfig c;
      c.scheme = s;
      c.k = k;
      ConsistencyReport r = consistency_check(c, m, sin_sin_case(), 2 * k + 6);
      EXPECT_LE(r.relative, 1e-8) << c.describe();
    }
}

TEST(Consistency, UnsupportedScheme) {
  MethodConfig c;
  c.scheme = Scheme::PrimalDG_IP;
  EXPECT_THROW(consistency_check(c, oracle::uniform_mesh(2), sin_sin_case(), 6), Error);
}
