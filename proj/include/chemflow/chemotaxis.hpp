#pragma once

#include "chemflow/fields.hpp"
#include "chemflow/operators.hpp"

namespace chemflow {

/**
 * @file chemotaxis.hpp
 * @brief One-step updates for the bacteria and oxygen equations.
 *
 * Reaction substeps are exact pointwise flows (closed-form logistic for n,
 * exponential consumption decay for c), so positivity of n and the sup-norm
 * monotonicity of c are properties of the scheme, not observations.
 */

struct ReactionParams {
    double chi = 0.0;   ///< chemotactic sensitivity, >= 0
    double kappa = 0.0; ///< logistic growth rate, >= 0
    double mu = 1.0;    ///< overcrowding coefficient, > 0
    double eps = 1e-3;  ///< regularization level, > 0
    /// Positivity slack separating roundoff from scheme failure;
    /// 0 selects 1e-12 * max(1, ||n||_inf) automatically.
    double pos_tol = 0.0;
};

void validate(const ReactionParams& p);

/// Regularized consumption ln(1 + eps*n)/eps. Lies in [0, n] and tends to n
/// as eps -> 0; switches to the series n - eps*n^2/2 for eps*n < 1e-8.
double consumption_rate(double n_value, double eps);

/// Saturated chemotactic face flux chi * m(n) * grad(c) with mobility
/// m(s) = s/(1 + eps*s) taken from the donor cell (upwind in the sign of
/// the face gradient of c). Zero on boundary faces.
VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, double chi, double eps);

/// max over faces of |m(n_donor) * grad(c)|, the chemotactic speed scale
/// entering the CFL bound (without the chi factor).
double max_chemotactic_speed(const ScalarField& n, const ScalarField& c, double eps);

/// Exact logistic substep: solves s' = kappa*s - mu*s^2 over dt.
double logistic_update(double n, double dt, double kappa, double mu);

struct ChemoStepOptions {
    bool implicit_diffusion = false;
    bool disable_reaction = false; ///< diagnostic mode for convergence-order tests
};

/// Advance the bacteria field one step: conservative transport (flux-form
/// upwind advection, chemotactic flux, diffusion), then the exact logistic
/// substep. With mass_residual non-null, reports
/// |integral(n_new) - integral(n_old) - reaction_increment|, which measures
/// the telescoping of the flux terms.
ScalarField step_n(const SimState& state, double dt, const ReactionParams& p,
                   const ChemoStepOptions& opt = {}, double* mass_residual = nullptr);

/// Advance the oxygen field one step: max-principle upwind transport,
/// diffusion, then the exact exponential consumption substep. The output
/// sup-norm never exceeds the input sup-norm (MonotonicityLoss otherwise).
ScalarField step_c(const SimState& state, double dt, const ReactionParams& p,
                   const ChemoStepOptions& opt = {});

/// Stability limit for the explicit pieces (no safety factor): the advective
/// bound, combined with the diffusive bound unless diffusion is implicit.
double explicit_stability_dt(const SimState& state, const ReactionParams& p,
                             bool implicit_diffusion);

} // namespace chemflow
