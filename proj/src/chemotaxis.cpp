#include "chemflow/chemotaxis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemflow/errors.hpp"

namespace chemflow {

void validate(const ReactionParams& p) {
    if (!(p.mu > 0.0)) throw ConfigError("model hypotheses require mu > 0 (chi, kappa >= 0, mu > 0)");
    if (p.chi < 0.0) throw ConfigError("chi must be >= 0");
    if (p.kappa < 0.0) throw ConfigError("kappa must be >= 0");
    if (!(p.eps > 0.0)) throw ConfigError("eps must be > 0");
    if (p.pos_tol < 0.0) throw ConfigError("pos_tol must be >= 0");
}

double consumption_rate(double n_value, double eps) {
    if (n_value < 0.0) throw ConfigError("consumption_rate needs n >= 0");
    if (!(eps > 0.0)) throw ConfigError("consumption_rate needs eps > 0");
    const double x = eps * n_value;
    if (x < 1e-8) return n_value - 0.5 * eps * n_value * n_value;
    return std::log1p(x) / eps;
}

namespace {

double mobility(double n, double eps) { return n / (1.0 + eps * n); }

double pos_tol_of(const ReactionParams& p, const ScalarField& n) {
    if (p.pos_tol > 0.0) return p.pos_tol;
    return 1e-12 * std::max(1.0, max_norm(n));
}

} // namespace

VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, double chi, double eps) {
    const Domain& d = n.domain();
    VectorField flux(d);
    if (chi == 0.0) return flux;
    for (int a = 0; a < d.dim; ++a) {
        const double ih = 1.0 / d.spacing[a];
        const auto fd = flux.face_dims(a);
        std::size_t stride = 1;
        {
            auto cs = d.cells;
            for (int b = a + 1; b < 3; ++b) stride *= cs[b];
        }
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    if (idx[a] == 0 || idx[a] == fd[a] - 1) continue; // no-flux wall
                    const std::size_t right = d.cell_index(i, j, k);
                    const std::size_t left = right - stride;
                    const double g = (c.data()[right] - c.data()[left]) * ih;
                    const double donor = g >= 0.0 ? n.data()[left] : n.data()[right];
                    flux.face(a, i, j, k) = chi * mobility(std::max(donor, 0.0), eps) * g;
                }
    }
    return flux;
}

double max_chemotactic_speed(const ScalarField& n, const ScalarField& c, double eps) {
    VectorField flux = chemotactic_flux(n, c, 1.0, eps);
    return max_norm(flux);
}

double logistic_update(double n, double dt, double kappa, double mu) {
    if (kappa > 0.0) {
        const double em1 = std::expm1(kappa * dt);
        return kappa * n * (em1 + 1.0) / (kappa + mu * n * em1);
    }
    return n / (1.0 + mu * dt * n);
}

double explicit_stability_dt(const SimState& state, const ReactionParams& p,
                             bool implicit_diffusion) {
    const Domain& d = state.n.domain();
    const double h = d.min_spacing();
    const double speed = max_norm(state.u) +
                         (p.chi > 0.0 ? p.chi * max_chemotactic_speed(state.n, state.c, p.eps) : 0.0);
    double dt = h / (speed + 1e-30);
    if (!implicit_diffusion) dt = std::min(dt, h * h / (2.0 * d.dim));
    return dt;
}

ScalarField step_n(const SimState& state, double dt, const ReactionParams& p,
                   const ChemoStepOptions& opt, double* mass_residual) {
    validate(p);
    if (!(dt > 0.0)) throw ConfigError("step_n needs dt > 0");
    const double bound = explicit_stability_dt(state, p, opt.implicit_diffusion);
    if (dt > bound * (1.0 + 1e-9))
        throw CflViolation("step_n: dt " + std::to_string(dt) + " exceeds stability bound " +
                           std::to_string(bound));

    const Domain& d = state.n.domain();
    ScalarField rhs(d);
    {
        ScalarField adv = advect_scalar_upwind(state.n, state.u);
        ScalarField chem = divergence_faces_to_cells(
            chemotactic_flux(state.n, state.c, p.chi, p.eps));
        auto rv = rhs.data();
        auto nv = state.n.data();
        auto av = adv.data();
        auto cv = chem.data();
        for (std::size_t q = 0; q < rv.size(); ++q) rv[q] = nv[q] + dt * (av[q] - cv[q]);
    }
    ScalarField mid = [&] {
        if (opt.implicit_diffusion) return diffuse_implicit_neumann(rhs, dt);
        ScalarField lap = laplacian_neumann(state.n);
        auto rv = rhs.data();
        auto lv = lap.data();
        for (std::size_t q = 0; q < rv.size(); ++q) rv[q] += dt * lv[q];
        return rhs;
    }();

    double reaction_increment = 0.0;
    ScalarField out = mid;
    if (!opt.disable_reaction) {
        auto ov = out.data();
        for (std::size_t q = 0; q < ov.size(); ++q) {
            const double before = ov[q];
            const double after = logistic_update(std::max(before, 0.0), dt, p.kappa, p.mu);
            // keep roundoff-level negatives as they are; the logistic flow is
            // only defined for nonnegative densities
            ov[q] = before <= 0.0 ? before : after;
            reaction_increment += ov[q] - before;
        }
        reaction_increment *= d.cell_volume();
    }

    const double tol = pos_tol_of(p, state.n);
    const double mn = field_min(out);
    if (mn < -tol)
        throw PositivityLoss("step_n: min(n) = " + std::to_string(mn) +
                             " below -pos_tol; dt too large");
    if (!all_finite(out)) throw InvariantError("step_n produced non-finite values");

    if (mass_residual)
        *mass_residual = std::abs(integral(out) - integral(state.n) - reaction_increment);
    return out;
}

ScalarField step_c(const SimState& state, double dt, const ReactionParams& p,
                   const ChemoStepOptions& opt) {
    validate(p);
    if (!(dt > 0.0)) throw ConfigError("step_c needs dt > 0");
    const double bound = explicit_stability_dt(state, p, opt.implicit_diffusion);
    if (dt > bound * (1.0 + 1e-9))
        throw CflViolation("step_c: dt " + std::to_string(dt) + " exceeds stability bound " +
                           std::to_string(bound));

    const double max_before = field_max(state.c);

    // transport in the max-principle form plus diffusion, then consumption;
    // the transport-diffusion update is a convex combination under the CFL
    // bound and the consumption factor is a contraction
    ScalarField work = state.c;
    {
        ScalarField adv = advect_scalar_upwind_monotone(state.c, state.u);
        auto wv = work.data();
        auto av = adv.data();
        for (std::size_t q = 0; q < wv.size(); ++q) wv[q] += dt * av[q];
    }
    if (opt.implicit_diffusion) {
        work = diffuse_implicit_neumann(work, dt);
    } else {
        ScalarField lap = laplacian_neumann(state.c);
        auto wv = work.data();
        auto lv = lap.data();
        for (std::size_t q = 0; q < wv.size(); ++q) wv[q] += dt * lv[q];
    }
    {
        auto wv = work.data();
        auto nv = state.n.data();
        for (std::size_t q = 0; q < wv.size(); ++q)
            wv[q] *= std::exp(-dt * consumption_rate(std::max(nv[q], 0.0), p.eps));
    }

    const double max_after = field_max(work);
    if (max_after > max_before * (1.0 + 1e-12))
        throw MonotonicityLoss("step_c: sup(c) grew from " + std::to_string(max_before) + " to " +
                               std::to_string(max_after));
    if (!all_finite(work)) throw InvariantError("step_c produced non-finite values");
    return work;
}

} // namespace chemflow
