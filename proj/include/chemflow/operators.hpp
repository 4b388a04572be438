#pragma once

#include "chemflow/fields.hpp"

namespace chemflow {

/**
 * @file operators.hpp
 * @brief Second-order finite-difference operators on the MAC grid.
 *
 * All flux-form operators conserve the discrete integral of their output by
 * telescoping, and divergence(gradient(f)) reproduces laplacian_neumann(f)
 * bit-for-bit because the Laplacian is implemented as that composition.
 */

struct PoissonSolverConfig {
    double rel_tol = 1e-10; ///< relative residual target, in (0, 1e-4]
    int max_iter = 50000;
    enum class Method { CG } method = Method::CG;
};

/// Throws ConfigError unless rel_tol is in (0, 1e-4] and max_iter >= 1.
void validate(const PoissonSolverConfig& cfg);

/// 2*dim+1 point Laplacian with mirrored ghosts (zero boundary flux).
ScalarField laplacian_neumann(const ScalarField& f);

/// Centered difference across each interior face; boundary faces get 0,
/// consistent with the homogeneous Neumann condition.
VectorField gradient_cells_to_faces(const ScalarField& f);

/// Conservative flux difference; for no-slip face data the cell sum of the
/// output vanishes to roundoff.
ScalarField divergence_faces_to_cells(const VectorField& F);

/// Conservative (flux-form) first-order upwind transport tendency -div(u f).
/// The discrete integral of the output is zero by telescoping.
ScalarField advect_scalar_upwind(const ScalarField& f, const VectorField& u);

/// Advective-form first-order upwind tendency -u.grad(f), assembled with
/// nonnegative coefficients so the update is a convex combination under the
/// CFL bound: the discrete maximum principle holds exactly even when the
/// advecting field carries a projection residual.
ScalarField advect_scalar_upwind_monotone(const ScalarField& f, const VectorField& u);

/// Solve laplacian(phi) = rhs with homogeneous Neumann walls; returns the
/// mean-zero solution. Throws IncompatibleRhs when |mean(rhs)| exceeds
/// 1e-10 * max|rhs|, NoConvergence when the iteration cap is hit.
ScalarField poisson_solve_neumann(const ScalarField& rhs, const PoissonSolverConfig& cfg);

/// Extended entry point: optional initial guess (warm start) and an optional
/// absolute max-norm residual target on top of the relative criterion
/// (pass 0 to disable). Used by the projection to pin the output divergence.
ScalarField poisson_solve_neumann(const ScalarField& rhs, const PoissonSolverConfig& cfg,
                                  const ScalarField* initial_guess, double abs_inf_target);

/// Divergence budget after projection: 1e-9 * ||u||_inf / min h.
double divergence_tolerance(const VectorField& u);

/// Discrete Helmholtz projection: u - grad(phi) with phi solving the Neumann
/// Poisson problem for div(u). Idempotent and nonexpansive within solver
/// tolerance; output divergence stays below divergence_tolerance(u).
VectorField project_divergence_free(const VectorField& u, const PoissonSolverConfig& cfg);

/// Projection with pressure-potential plumbing: warm start from a previous
/// potential and return the new one through potential_out (either may be null).
VectorField project_divergence_free(const VectorField& u, const PoissonSolverConfig& cfg,
                                    const ScalarField* potential_guess, ScalarField* potential_out);

/// Componentwise (I - coef * laplacian)^{-1} on the staggered grid with
/// no-slip walls (Dirichlet on boundary-normal faces, antisymmetric
/// tangential ghosts). Serves both the implicit viscous step (coef = dt)
/// and the screened stage of the velocity smoother (coef = eps).
VectorField screened_solve_faces(const VectorField& u, double coef, const PoissonSolverConfig& cfg);

/// Discrete analogue of the resolvent smoother (1 + eps*A)^{-1}: screened
/// solve componentwise, then Helmholtz projection. Nonexpansive in the
/// discrete L2 norm up to solver tolerance.
VectorField yosida_smooth(const VectorField& u, double eps, const PoissonSolverConfig& cfg);

/// Conservative centered advection tendency -(w . grad) u of the staggered
/// velocity u by the (discretely solenoidal) field w. Skew-symmetric:
/// the induced kinetic-energy production vanishes to roundoff.
VectorField advect_velocity(const VectorField& u, const VectorField& w);

/// Discrete integral of |grad u|^2, exactly dual to the no-slip face
/// Laplacian: <(-laplacian)u, u> = grad_norm_sq(u).
double grad_norm_sq(const VectorField& u);

/// Backward-Euler diffusion step (I - coef*laplacian)^{-1} f on cells with
/// Neumann walls, dimensionally split into direct tridiagonal solves. Each
/// 1-D factor is inverse-positive and row-stochastic, so nonnegativity, the
/// maximum principle and the cell sum are preserved exactly.
ScalarField diffuse_implicit_neumann(const ScalarField& f, double coef);

} // namespace chemflow
