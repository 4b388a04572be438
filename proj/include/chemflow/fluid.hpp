#pragma once

#include <array>

#include "chemflow/fields.hpp"
#include "chemflow/operators.hpp"

namespace chemflow {

/**
 * @file fluid.hpp
 * @brief Fractional-step update of the regularized momentum equation.
 *
 * One step: smooth the advecting velocity, explicit conservative advection,
 * implicit (backward-Euler) viscosity, buoyancy and external force, then
 * the discrete Helmholtz projection. Pressure is the projection multiplier,
 * reported mean-zero.
 */

struct ForcingSpec {
    enum class Potential { Zero, Linear };
    enum class Force { Zero, ExpSine };

    Potential potential = Potential::Zero;
    /// grad(Phi) for the linear profile Phi(x) = g . x
    std::array<double, 3> gravity{0.0, 0.0, 0.0};

    Force force = Force::Zero;
    /// Component amplitudes of f0; the spatial profile is the separable
    /// sine bump prod_a sin(pi x_a / L_a), so ||f0||_inf = max_a |amplitude_a|.
    std::array<double, 3> force_amplitude{0.0, 0.0, 0.0};
    double force_lambda = 1.0; ///< decay rate of e^{-lambda t}, > 0
};

void validate(const ForcingSpec& spec, int dim);

/// grad(Phi) component (closed form; zero unless the linear profile is active).
double potential_gradient(const ForcingSpec& spec, int axis);

/// External force component at a face center of the given velocity component.
double force_at(const ForcingSpec& spec, const Domain& d, int comp, int i, int j, int k, double t);

struct FluidOptions {
    bool buoyancy_demeaned = false; ///< use n - mean(n) in the buoyancy term
};

/// Discrete kinetic energy (1/2) * integral |u|^2 on faces.
double kinetic_energy(const VectorField& u);

/// One momentum step; pressure_out (optional) receives the recovered
/// mean-zero pressure. Output is discretely divergence-free with exact
/// no-slip boundary faces.
VectorField momentum_step(const SimState& state, double dt, const ForcingSpec& forcing,
                          const PoissonSolverConfig& cfg, const FluidOptions& opt = {},
                          ScalarField* pressure_out = nullptr);

/// Residual of the discrete kinetic-energy balance across one step,
/// |dKE/dt - (-integral|grad u|^2 + integral n grad(Phi).u + integral u.f)|,
/// all integrals evaluated at the midpoint state. Diagnostic only.
double kinetic_energy_balance(const SimState& before, const SimState& after, double dt,
                              const ForcingSpec& forcing, const FluidOptions& opt = {});

} // namespace chemflow
