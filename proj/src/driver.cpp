#include "chemflow/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

/// Uniform draw in [-1, 1) built from the raw 64-bit stream so that results
/// do not depend on the standard library's distribution implementation.
double uniform_pm1(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
}

ScalarField make_scalar(const Domain& d, const InitSpec& spec, std::mt19937_64& gen) {
    ScalarField f(d, spec.value);
    switch (spec.kind) {
    case InitSpec::Kind::Constant:
        break;
    case InitSpec::Kind::Bump:
        for (int i = 0; i < d.cells[0]; ++i)
            for (int j = 0; j < d.cells[1]; ++j)
                for (int k = 0; k < d.cells[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    double shape = 1.0;
                    for (int a = 0; a < d.dim; ++a) {
                        const double s =
                            std::sin(std::numbers::pi * d.cell_center(a, idx[a]) / d.length[a]);
                        shape *= s * s;
                    }
                    f(i, j, k) += spec.amplitude * shape;
                }
        break;
    case InitSpec::Kind::Perturbed:
        for (double& v : f.data()) v += spec.amplitude * uniform_pm1(gen);
        break;
    }
    return f;
}

constexpr double kBurnIn = 1.0;

struct RunContext {
    DiagnosticsConfig diag;
    double sup_c0 = 0.0;
    double mass_upper = 0.0;
    double mass_lower = 0.0; ///< Jensen bound; 0 when kappa = 0
};

RunContext make_context(const SimParams& p, const SimState& init) {
    RunContext ctx;
    const double volume = p.domain.volume();
    ctx.diag.yp = select_y_params(p.y_exponent, p.reaction.chi, p.reaction.kappa, p.reaction.mu,
                                  volume);
    ctx.diag.K = p.diag_K;
    ctx.diag.chi = p.reaction.chi;
    ctx.diag.kappa = p.reaction.kappa;
    ctx.diag.mu = p.reaction.mu;
    ctx.diag.n_floor = 1e-14 * std::max(1.0, max_norm(init.n));
    ctx.diag.c_floor = 1e-14 * std::max(1.0, max_norm(init.c));
    ctx.diag.p_norms = p.p_norms;
    ctx.sup_c0 = max_norm(init.c);

    const double kappa = p.reaction.kappa;
    const double mu = p.reaction.mu;
    const double mass0 = integral(init.n);
    ctx.mass_upper = std::max(mass0, 1.1 * kappa * volume / mu);
    if (kappa > 0.0) {
        double log_int = 0.0;
        for (double v : init.n.data()) log_int += std::log(mu * v / kappa);
        log_int *= init.n.domain().cell_volume();
        double c0sq = 0.0;
        for (double v : init.c.data()) c0sq += v * v;
        c0sq *= init.c.domain().cell_volume();
        const double k1 = (mu / (volume * kappa)) *
                          (-mass0 - 0.5 * ctx.diag.yp.B * c0sq + (kappa / mu) * log_int);
        ctx.mass_lower = (kappa / mu) * volume * std::exp(k1);
    }
    return ctx;
}

void check_sample(const SimParams& p, const RunContext& ctx, const SimState& state,
                  const DiagnosticsRecord& prev, const DiagnosticsRecord& rec,
                  std::vector<Violation>& out) {
    auto flag = [&](const std::string& msg) { out.push_back({rec.t, msg}); };

    auto finite = [](double v) { return std::isfinite(v); };
    bool ok = finite(rec.mass_n) && finite(rec.sup_c) && finite(rec.int_c) &&
              finite(rec.grad_c_sq) && finite(rec.kinetic) && finite(rec.enstrophy_like) &&
              finite(rec.F) && finite(rec.G) && finite(rec.y_p) && finite(rec.z_p);
    for (double v : rec.lp_n) ok = ok && finite(v);
    for (double v : rec.lp_u) ok = ok && finite(v);
    if (!ok) flag("non-finite diagnostics entry");

    if (rec.sup_c > prev.sup_c + 1e-12 * ctx.sup_c0)
        flag("sup_c increased: " + std::to_string(prev.sup_c) + " -> " +
             std::to_string(rec.sup_c));
    if (rec.int_c > prev.int_c) flag("int_c increased");

    const double kappa = p.reaction.kappa;
    const double mu = p.reaction.mu;
    const double floor_G = kappa / mu * p.domain.volume();
    if (rec.G >= 0.0 && rec.G < floor_G - 1e-13 * std::max(1.0, std::abs(rec.G)))
        flag("G below the convexity floor");
    if (kappa > 0.0 && rec.G < 0.0) flag("G undefined (nonpositive density)");

    if (prev.t >= kBurnIn && rec.G >= 0.0 && prev.G >= 0.0) {
        const double g_tol = 1e-8 * std::abs(prev.G) +
                             1e-3 * (rec.t - prev.t) * g_dissipation(state, kappa, mu);
        if (rec.G > prev.G + g_tol)
            flag("G increased beyond tolerance: " + std::to_string(prev.G) + " -> " +
                 std::to_string(rec.G));
    }

    if (rec.mass_n > ctx.mass_upper) flag("mass above the comparison cap");
    if (ctx.mass_lower > 0.0 && rec.mass_n < p.mass_slack * ctx.mass_lower)
        flag("mass below the Jensen lower bound");

    if (rec.y_p >= 0.0 && rec.z_p > 0.0 && rec.y_p > p.y_slack * rec.z_p)
        flag("y exceeded the comparison bound z");
}

struct LoopState {
    SimState state;
    std::vector<DiagnosticsRecord> records;
    std::optional<Onset> onset;
};

void emit_record(const SimParams& p, const RunContext& ctx, LoopState& ls, RunResult& res,
                 const SampleHook& hook) {
    DiagnosticsRecord rec = record(ls.state, ctx.diag, ls.onset);
    if (!ls.onset && rec.sup_c <= 0.5 * ctx.diag.yp.eta && rec.y_p > 0.0) {
        ls.onset = Onset{ls.state.t, rec.y_p};
        rec.z_p = rec.y_p; // z(T*) = y(T*)
    }
    if (!ls.records.empty())
        check_sample(p, ctx, ls.state, ls.records.back(), rec, res.violations);
    ls.records.push_back(std::move(rec));
    if (hook) hook(ls.state, ls.records);
}

RunResult run_loop(const SimParams& p, const RunContext& ctx, LoopState ls,
                   const SampleHook& hook) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResult res;
    res.diag = ctx.diag;

    if (ls.records.empty()) emit_record(p, ctx, ls, res, hook);

    const double t_end = p.t_end;
    const double t_eps = 1e-12 * std::max(1.0, t_end);
    long long sample_k = static_cast<long long>(std::llround(ls.state.t / p.sample_every));

    while (t_end - ls.state.t > t_eps) {
        const double next_sample = (sample_k + 1) * p.sample_every;
        const double target = std::min(next_sample, t_end);

        StepInfo info;
        bool fatal = false;
        try {
            ls.state = advance(ls.state, p, &info, target - ls.state.t);
        } catch (const PositivityLoss& e) {
            res.violations.push_back({ls.state.t, e.what()});
            fatal = true;
        } catch (const MonotonicityLoss& e) {
            res.violations.push_back({ls.state.t, e.what()});
            fatal = true;
        }
        if (fatal) {
            res.aborted = true;
            break;
        }

        if (info.min_c < 0.0)
            res.violations.push_back({ls.state.t, "min(c) negative: " + std::to_string(info.min_c)});
        if (info.mass_residual > 1e-10 * integral(ls.state.n))
            res.violations.push_back(
                {ls.state.t, "mass balance residual " + std::to_string(info.mass_residual)});
        {
            const double tol = divergence_tolerance(ls.state.u);
            if (info.div_inf > tol)
                res.violations.push_back(
                    {ls.state.t, "divergence " + std::to_string(info.div_inf) + " above budget"});
        }

        if (target - ls.state.t <= 1e-12 * std::max(1.0, target)) {
            emit_record(p, ctx, ls, res, hook);
            if (next_sample <= t_end) ++sample_k;
        }
    }

    res.final_state = std::move(ls.state);
    res.records = std::move(ls.records);
    res.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

} // namespace

void validate(const SimParams& p) {
    if (p.domain.dim != 2 && p.domain.dim != 3) throw ConfigError("domain dim must be 2 or 3");
    for (int a = 0; a < p.domain.dim; ++a) {
        if (!(p.domain.length[a] > 0.0)) throw ConfigError("domain length must be positive");
        if (p.domain.cells[a] < 4) throw ConfigError("domain needs at least 4 cells per axis");
    }
    validate(p.reaction);
    validate(p.forcing, p.domain.dim);
    validate(p.solver);
    if (p.t_end < 0.0) throw ConfigError("t_end must be >= 0");
    if (!(p.sample_every > 0.0)) throw ConfigError("sample_every must be > 0");
    if (!(p.dt_max > 0.0)) throw ConfigError("dt_max must be > 0");
    if (!(p.cfl_safety > 0.0) || p.cfl_safety > 1.0)
        throw ConfigError("cfl_safety must lie in (0, 1]");
    if (!(p.y_exponent > 1.0)) throw ConfigError("y_exponent must be > 1");
    for (double q : p.p_norms)
        if (!(q >= 1.0)) throw ConfigError("p_norms entries must be >= 1");
    if (p.n0.kind != InitSpec::Kind::Constant && p.n0.amplitude < 0.0)
        throw ConfigError("n0 amplitude must be >= 0");
    if (p.u0.kind == VelocityInitSpec::Kind::Perturbed && p.u0.max_norm < 0.0)
        throw ConfigError("u0 max_norm must be >= 0");
}

SimState init_state(const Domain& domain, const SimParams& params, const InitSpec& n0_spec,
                    const InitSpec& c0_spec, const VelocityInitSpec& u0_spec) {
    SimState st;
    st.t = 0.0;
    st.eps = params.reaction.eps;

    std::mt19937_64 gen_n(params.seed ^ 0x9E3779B97F4A7C15ULL);
    std::mt19937_64 gen_c(params.seed ^ 0xC2B2AE3D27D4EB4FULL);
    std::mt19937_64 gen_u(params.seed ^ 0x165667B19E3779F9ULL);

    st.n = make_scalar(domain, n0_spec, gen_n);
    if (field_min(st.n) <= 0.0)
        throw ConfigError("initial bacterial density must be strictly positive");
    st.c = make_scalar(domain, c0_spec, gen_c);
    if (field_min(st.c) <= 0.0)
        throw ConfigError("initial oxygen concentration must be strictly positive");

    st.u = VectorField(domain);
    if (u0_spec.kind == VelocityInitSpec::Kind::Perturbed && u0_spec.max_norm > 0.0) {
        for (int a = 0; a < domain.dim; ++a)
            for (double& v : st.u.component(a)) v = uniform_pm1(gen_u);
        st.u.enforce_no_slip();
        st.u = project_divergence_free(st.u, params.solver);
        const double amp = max_norm(st.u);
        if (amp > 0.0) {
            const double scale = u0_spec.max_norm / amp;
            for (int a = 0; a < domain.dim; ++a)
                for (double& v : st.u.component(a)) v *= scale;
        }
        st.u.enforce_no_slip();
        const double div = max_norm(divergence_faces_to_cells(st.u));
        if (div > divergence_tolerance(st.u))
            throw SolverError("initial velocity projection missed the divergence budget");
    }

    st.P = ScalarField(domain, 0.0);
    return st;
}

SimState init_state(const SimParams& params) {
    return init_state(params.domain, params, params.n0, params.c0, params.u0);
}

double cfl_dt(const SimState& state, const SimParams& params) {
    const Domain& d = params.domain;
    const double h = d.min_spacing();
    double speed = max_norm(state.u) + 1e-30;
    if (params.reaction.chi > 0.0)
        speed += params.reaction.chi *
                 max_chemotactic_speed(state.n, state.c, params.reaction.eps);
    double dt = h / speed;
    if (!params.flags.implicit_diffusion) dt = std::min(dt, h * h / (2.0 * d.dim));
    dt = std::min(dt, params.dt_max);
    return params.cfl_safety * dt;
}

SimState advance(const SimState& state, const SimParams& params, StepInfo* info, double dt_cap) {
    const double dt = std::min(cfl_dt(state, params), dt_cap);
    if (!(dt > 0.0)) throw ConfigError("advance: nonpositive time step");

    SimState next = state;
    FluidOptions fopt{params.flags.buoyancy_demeaned};
    ScalarField P;
    next.u = momentum_step(state, dt, params.forcing, params.solver, fopt, &P);
    next.P = std::move(P);

    ChemoStepOptions copt{params.flags.implicit_diffusion, params.flags.disable_reaction};
    SimState stage = state;
    stage.u = next.u; // oxygen and bacteria ride the fresh velocity
    next.c = step_c(stage, dt, params.reaction, copt);
    stage.c = next.c; // bacteria see the fresh oxygen gradient
    double mass_residual = 0.0;
    next.n = step_n(stage, dt, params.reaction, copt, &mass_residual);
    next.t = state.t + dt;

    if (info) {
        info->dt = dt;
        info->mass_residual = mass_residual;
        info->div_inf = max_norm(divergence_faces_to_cells(next.u));
        info->min_n = field_min(next.n);
        info->min_c = field_min(next.c);
    }
    return next;
}

std::pair<double, double> homogeneous_oracle(double n0, double c0, double eps, double t,
                                             double kappa, double mu) {
    if (!(n0 > 0.0) || !(c0 > 0.0)) throw ConfigError("oracle needs n0 > 0 and c0 > 0");
    if (!(eps > 0.0)) throw ConfigError("oracle needs eps > 0");
    if (!(mu > 0.0)) throw ConfigError("oracle needs mu > 0");
    if (kappa < 0.0) throw ConfigError("oracle needs kappa >= 0");
    if (t < 0.0) throw ConfigError("oracle needs t >= 0");

    auto n_of = [&](double s) { return logistic_update(n0, s, kappa, mu); };
    const double nt = t == 0.0 ? n0 : n_of(t);
    double integral_rate = 0.0;
    if (t > 0.0) {
        integral_rate = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            [&](double s) { return consumption_rate(n_of(s), eps); }, 0.0, t, 15, 1e-12);
    }
    return {nt, c0 * std::exp(-integral_rate)};
}

RunResult run(const SimParams& params, const SampleHook& on_sample) {
    validate(params);
    LoopState ls;
    ls.state = init_state(params);
    const RunContext ctx = make_context(params, ls.state);
    return run_loop(params, ctx, std::move(ls), on_sample);
}

RunResult resume_run(const SimParams& params, SimState start,
                     std::vector<DiagnosticsRecord> prior, const SampleHook& on_sample) {
    validate(params);
    if (prior.empty()) throw ConfigError("resume needs the records written so far");
    // the context constants derive from the (deterministic) initial data
    const RunContext ctx = make_context(params, init_state(params));

    LoopState ls;
    ls.state = std::move(start);
    // drop any records from beyond the checkpoint
    while (!prior.empty() && prior.back().t > ls.state.t + 1e-12 * std::max(1.0, ls.state.t))
        prior.pop_back();
    for (const auto& r : prior) {
        if (r.sup_c <= 0.5 * ctx.diag.yp.eta && r.y_p > 0.0) {
            ls.onset = Onset{r.t, r.y_p};
            break;
        }
    }
    ls.records = std::move(prior);
    return run_loop(params, ctx, std::move(ls), on_sample);
}

EpsStudyResult epsilon_study(const SimParams& params, const std::vector<double>& eps_list) {
    if (eps_list.size() < 2) throw ConfigError("eps study needs at least two eps values");
    for (double e : eps_list)
        if (!(e > 0.0)) throw ConfigError("eps study needs positive eps values");

    std::vector<std::future<RunResult>> jobs;
    jobs.reserve(eps_list.size());
    for (double e : eps_list) {
        SimParams p = params;
        p.reaction.eps = e;
        jobs.push_back(std::async(std::launch::async, [p] { return run(p); }));
    }

    EpsStudyResult out;
    out.eps = eps_list;
    for (auto& j : jobs) {
        RunResult r = j.get();
        out.finals.push_back(std::move(r.final_state));
        out.per_run_violations.push_back(std::move(r.violations));
    }
    for (std::size_t i = 0; i + 1 < out.finals.size(); ++i) {
        out.distances.push_back({l2_distance(out.finals[i].n, out.finals[i + 1].n),
                                 l2_distance(out.finals[i].c, out.finals[i + 1].c),
                                 l2_distance(out.finals[i].u, out.finals[i + 1].u)});
    }
    for (int f = 0; f < 3; ++f) {
        bool strict = true;
        for (std::size_t j = 0; j + 1 < out.distances.size(); ++j)
            strict = strict && out.distances[j + 1][f] < out.distances[j][f];
        out.strictly_decreasing[f] = strict;
    }
    return out;
}

} // namespace chemflow
