#pragma once

#include <functional>
#include <random>

#include <Eigen/Core>

#include "ugfem/dg_calculus.hpp"
#include "ugfem/field.hpp"
#include "ugfem/fe_space.hpp"
#include "ugfem/mesh.hpp"

namespace ugfem::oracle {

using Rng = std::mt19937_64;

Eigen::VectorXd random_vector(int n, Rng& rng);
MeshPtr uniform_mesh(int n);

/// Global coefficients of an edge space, projecting g(e, x) edge by edge;
/// edges without DOFs (zero boundary) are skipped.
Eigen::VectorXd project_edges(const FESpace& E, const std::function<double(int, const Vec2&)>& g);
/// Same with g given at the points of each edge quadrature (values per edge).
Eigen::VectorXd project_edges(const FESpace& E,
                              const std::function<Eigen::VectorXd(int, const PhysicalQuadrature&)>& g);

/// Conditional duality <grad_dg u, (p, p^)> + <div_dg p, (u, u^)> for one
/// random draw under condition 1 (p^·n = p·n), 2 (u^ = u) or 3 (p^ = {p},
/// u^ = {u}); returns |sum| / max(1, |first|, |second|).
double duality_residual(int condition, MeshPtr mesh, int k, Rng& rng);

/// Consistency of the DG derivatives on conforming subspaces for one random
/// draw: 1 CR with P0 normal traces, 2 continuous Lagrange, 3 conforming RT.
/// Returns the largest trace-row entry plus the volume-row deviation from an
/// independent quadrature of (grad u, q) or (div q, v), relative to the
/// largest volume entry.
double consistency_residual(int which, MeshPtr mesh, int k, Rng& rng);

/// sum_K <q·n_K, v>_dK - <{q}, [[v]]>_E - <[q], {v}>_{E^i} for random broken
/// fields of degree k, relative to the sum of absolute edge contributions.
double trace_identity_residual(MeshPtr mesh, int k, Rng& rng);

/// max over edge points of |{q}·[[v]] - {{q}}[v]|, relative to max |{q}||[[v]]|.
double pointwise_identity_residual(MeshPtr mesh, int k, Rng& rng);

/// Defining relation of the lifting on a random edge with random data:
/// max_i |(r_e(w), phi_i) + <w, {phi_i}>_e| relative to max_i |<w, {phi_i}>_e|,
/// plus any coefficient outside the elements adjacent to e. vector selects
/// the lifting into broken P_k^2, else into broken P_k.
double lifting_residual(MeshPtr mesh, int k, bool vector, Rng& rng);

/// ||r_e(w)|| h_e^{1/2} / ||w||_e for the scalar lifting, random edge and data.
double lifting_bound_ratio(MeshPtr mesh, int k, Rng& rng);

}  // namespace ugfem::oracle
