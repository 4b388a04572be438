#include "chemflow/fluid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chemflow/errors.hpp"

namespace chemflow {

void validate(const ForcingSpec& spec, int dim) {
    (void)dim;
    if (spec.force == ForcingSpec::Force::ExpSine && !(spec.force_lambda > 0.0))
        throw ConfigError("exponential forcing needs lambda > 0");
}

double potential_gradient(const ForcingSpec& spec, int axis) {
    return spec.potential == ForcingSpec::Potential::Linear ? spec.gravity[axis] : 0.0;
}

double force_at(const ForcingSpec& spec, const Domain& d, int comp, int i, int j, int k,
                double t) {
    if (spec.force == ForcingSpec::Force::Zero) return 0.0;
    const int idx[3] = {i, j, k};
    double profile = 1.0;
    for (int a = 0; a < d.dim; ++a) {
        const double x = a == comp ? idx[a] * d.spacing[a] : (idx[a] + 0.5) * d.spacing[a];
        profile *= std::sin(std::numbers::pi * x / d.length[a]);
    }
    return spec.force_amplitude[comp] * profile * std::exp(-spec.force_lambda * t);
}

double kinetic_energy(const VectorField& u) {
    double s = 0.0;
    for (int a = 0; a < u.dim(); ++a)
        for (double v : u.component(a)) s += v * v;
    return 0.5 * s * u.domain().cell_volume();
}

namespace {

/// Buoyancy force n*grad(Phi) plus external force at interior faces, added
/// in place as dt * force.
void add_forces(VectorField& u, const ScalarField& n, const ForcingSpec& forcing,
                const FluidOptions& opt, double dt, double t_eval) {
    const Domain& d = u.domain();
    const double nshift = opt.buoyancy_demeaned ? mean(n) : 0.0;
    for (int comp = 0; comp < d.dim; ++comp) {
        const double g = potential_gradient(forcing, comp);
        if (g == 0.0 && forcing.force == ForcingSpec::Force::Zero) continue;
        const auto fd = u.face_dims(comp);
        std::size_t stride = 1;
        for (int b = comp + 1; b < 3; ++b) stride *= d.cells[b];
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    if (idx[comp] == 0 || idx[comp] == fd[comp] - 1) continue; // no-slip
                    double f = 0.0;
                    if (g != 0.0) {
                        const std::size_t right = d.cell_index(i, j, k);
                        const double nbar =
                            0.5 * (n.data()[right] + n.data()[right - stride]) - nshift;
                        f += nbar * g;
                    }
                    f += force_at(forcing, d, comp, i, j, k, t_eval);
                    u.face(comp, i, j, k) += dt * f;
                }
    }
}

} // namespace

VectorField momentum_step(const SimState& state, double dt, const ForcingSpec& forcing,
                          const PoissonSolverConfig& cfg, const FluidOptions& opt,
                          ScalarField* pressure_out) {
    const Domain& d = state.u.domain();
    validate(forcing, d.dim);
    if (!(dt > 0.0)) throw ConfigError("momentum_step needs dt > 0");
    if (dt * max_norm(state.u) > d.min_spacing() * (1.0 + 1e-9))
        throw CflViolation("momentum_step: advective CFL bound exceeded");

    VectorField w = yosida_smooth(state.u, state.eps, cfg);
    VectorField adv = advect_velocity(state.u, w);
    VectorField ustar = state.u;
    for (int a = 0; a < d.dim; ++a) {
        auto uv = ustar.component(a);
        auto av = adv.component(a);
        for (std::size_t q = 0; q < uv.size(); ++q) uv[q] += dt * av[q];
    }
    VectorField uvisc = screened_solve_faces(ustar, dt, cfg);
    add_forces(uvisc, state.n, forcing, opt, dt, state.t + 0.5 * dt);

    // cold-start the pressure solve: the multiplier is not part of the
    // snapshot format, so warm starts would break bit-exact resume
    ScalarField phi;
    VectorField unew = project_divergence_free(uvisc, cfg, nullptr, &phi);
    unew.enforce_no_slip();
    if (pressure_out) {
        ScalarField P(d);
        auto pv = P.data();
        auto fv = phi.data();
        for (std::size_t q = 0; q < pv.size(); ++q) pv[q] = -fv[q] / dt;
        remove_mean(P);
        *pressure_out = std::move(P);
    }
    return unew;
}

double kinetic_energy_balance(const SimState& before, const SimState& after, double dt,
                              const ForcingSpec& forcing, const FluidOptions& opt) {
    const Domain& d = before.u.domain();
    VectorField umid(d);
    for (int a = 0; a < d.dim; ++a) {
        auto mv = umid.component(a);
        auto bv = before.u.component(a);
        auto av = after.u.component(a);
        for (std::size_t q = 0; q < mv.size(); ++q) mv[q] = 0.5 * (bv[q] + av[q]);
    }
    ScalarField nmid(d);
    {
        auto mv = nmid.data();
        auto bv = before.n.data();
        auto av = after.n.data();
        for (std::size_t q = 0; q < mv.size(); ++q) mv[q] = 0.5 * (bv[q] + av[q]);
    }
    const double tmid = 0.5 * (before.t + after.t);
    const double vol = d.cell_volume();
    const double nshift = opt.buoyancy_demeaned ? mean(nmid) : 0.0;

    double work = 0.0;
    for (int comp = 0; comp < d.dim; ++comp) {
        const double g = potential_gradient(forcing, comp);
        const auto fd = umid.face_dims(comp);
        std::size_t stride = 1;
        for (int b = comp + 1; b < 3; ++b) stride *= d.cells[b];
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    if (idx[comp] == 0 || idx[comp] == fd[comp] - 1) continue;
                    const double uval = umid.face(comp, i, j, k);
                    if (g != 0.0) {
                        const std::size_t right = d.cell_index(i, j, k);
                        const double nbar =
                            0.5 * (nmid.data()[right] + nmid.data()[right - stride]) - nshift;
                        work += nbar * g * uval * vol;
                    }
                    if (forcing.force != ForcingSpec::Force::Zero)
                        work += force_at(forcing, d, comp, i, j, k, tmid) * uval * vol;
                }
    }

    const double dke = (kinetic_energy(after.u) - kinetic_energy(before.u)) / dt;
    const double rhs = -grad_norm_sq(umid) + work;
    return std::abs(dke - rhs);
}

} // namespace chemflow
