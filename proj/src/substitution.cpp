#include "assembly.hpp"
#include "ugfem/errors.hpp"
#include "ugfem/schemes.hpp"

namespace ugfem {

using namespace detail;

std::string to_string(Substitution s) {
  return s == Substitution::UHatAvgPlusBetaJump ? "u_hat_eq_avg_plus_beta_jump" : "p_hat_eq_avg";
}

SparseMatrix substitution_matrix(const LinearSystem& src, Substitution s) {
  const Scheme sc = src.config.scheme;
  const bool hdg_source = sc == Scheme::HDG || sc == Scheme::HDGReduced || sc == Scheme::HybridMixed;
  const bool wg_source = sc == Scheme::WG || sc == Scheme::HybridPrimal;
  if (s == Substitution::UHatAvgPlusBetaJump)
    require(hdg_source, ErrorCode::Incompatible, "u_hat substitution needs an HDG-type source system");
  else
    require(wg_source, ErrorCode::Incompatible, "p_hat substitution needs a WG-type source system");

  const FESpace &Q = *src.spaces.q, &V = *src.spaces.u, &H = *src.spaces.trace;
  const Mesh& m = V.mesh();
  const int qd = quadrature_degree(src.config, src.spaces);
  const Block& bp = src.block("p");
  const Block& bu = src.block("u");
  const Block& bh = src.block(s == Substitution::UHatAvgPlusBetaJump ? "u_hat" : "p_hat");
  const int nQ = bp.size, nV = bu.size;
  Eigen::MatrixXd bhv;
  Triplets R;
  auto unit = [&R](int row, int col) {
    LocalDofs r, c;
    r.append({row}, nullptr, 0);
    c.append({col}, nullptr, 0);
    R.add(r, c, Eigen::MatrixXd::Ones(1, 1));
  };
  for (int i = 0; i < nQ; ++i) unit(bp.offset + i, i);
  for (int i = 0; i < nV; ++i) unit(bu.offset + i, nQ + i);
  for (int e = 0; e < m.num_edges(); ++e) {
    LocalDofs rows = edge_dofs(H, e, bh.offset);
    bool any = false;
    for (int d : rows.idx) any = any || d >= 0;
    if (!any) continue;
    PhysicalQuadrature q = edge_quadrature(m, e, qd);
    H.eval_edge(e, q.params, bhv);
    const bool interior = !m.is_boundary_edge(e);
    const int ns = interior ? 2 : 1;
    const double avg = interior ? 0.5 : 1.0;
    for (int t = 0; t < ns; ++t) {
      const int K = m.edge_elements[e][t];
      const Vec2 nt = side_sign(t) * m.edge_normals[e];
      if (s == Substitution::UHatAvgPlusBetaJump) {
        // u^ = P({u} + beta·[[u]]): weight of side t is 1/2 + beta·n^t
        const double wt = avg + src.config.beta.dot(nt);
        Eigen::MatrixXd val = scalar_values(V, K, q);
        R.add(rows, element_dofs(V, K, nQ), wt * bhv * weights(q).asDiagonal() * val.transpose());
      } else {
        // p^·n_e = P({p}·n_e)
        Eigen::MatrixXd qn = normal_values(Q, K, q, m.edge_normals[e]);
        R.add(rows, element_dofs(Q, K, 0), avg * bhv * weights(q).asDiagonal() * qn.transpose());
      }
    }
  }
  return R.build(src.size(), nQ + nV);
}

LinearSystem substitute_traces(const LinearSystem& src, Substitution s) {
  SparseMatrix T = substitution_matrix(src, s);
  LinearSystem out;
  out.config = src.config;
  out.spaces = src.spaces;
  out.spaces.trace = nullptr;
  out.data = src.data;
  out.extra = src.extra;
  const int nQ = src.block("p").size, nV = src.block("u").size;
  out.blocks = {{"p", 0, nQ}, {"u", nQ, nV}};
  SparseMatrix Tt = T.transpose();
  out.matrix = Tt * src.matrix * T;
  out.matrix.prune(0.0);
  out.rhs = Tt * src.rhs;
  out.symmetric = src.symmetric;
  return out;
}

}  // namespace ugfem
