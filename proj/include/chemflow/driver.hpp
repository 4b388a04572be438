#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chemflow/chemotaxis.hpp"
#include "chemflow/diagnostics.hpp"
#include "chemflow/fields.hpp"
#include "chemflow/fluid.hpp"
#include "chemflow/operators.hpp"

namespace chemflow {

/**
 * @file driver.hpp
 * @brief Time loop orchestration: CFL control, the u -> c -> n substep
 * ordering, diagnostics sampling, the homogeneous oracle and the
 * eps-family convergence study.
 */

/// Builtin scalar initial profiles. Bump adds amplitude * prod sin^2(pi x/L)
/// (Neumann-compatible, vanishing at walls); Perturbed adds amplitude * xi
/// with xi drawn uniformly from [-1, 1] by a seeded generator.
struct InitSpec {
    enum class Kind { Constant, Bump, Perturbed };
    Kind kind = Kind::Constant;
    double value = 1.0;
    double amplitude = 0.0;
};

/// Builtin velocity initial data: zero, or a seeded random field projected
/// to the divergence-free subspace and rescaled to the requested max-norm.
struct VelocityInitSpec {
    enum class Kind { Zero, Perturbed };
    Kind kind = Kind::Zero;
    double max_norm = 0.0;
};

struct SimFlags {
    bool implicit_diffusion = false;
    bool buoyancy_demeaned = false;
    bool disable_reaction = false; ///< diagnostic switch for order tests only
};

struct SimParams {
    Domain domain;
    ReactionParams reaction;
    ForcingSpec forcing;
    InitSpec n0{InitSpec::Kind::Constant, 1.0, 0.0};
    InitSpec c0{InitSpec::Kind::Constant, 1.0, 0.0};
    VelocityInitSpec u0;
    double dt_max = 0.1;
    double cfl_safety = 0.4;
    double t_end = 1.0;
    double sample_every = 0.1;
    std::uint64_t seed = 1;
    PoissonSolverConfig solver;
    double y_exponent = 2.0;         ///< p for the weighted L^p functional
    std::vector<double> p_norms{2.0, 4.0};
    double diag_K = 1.0;             ///< K coefficient in the quasi-energy
    double y_slack = 1.05;           ///< allowed factor in the y <= z comparison
    double mass_slack = 0.5;         ///< allowed factor on the mass lower bound
    SimFlags flags;
};

void validate(const SimParams& p);

/// Strictly positive initial state at t = 0 with the velocity projected
/// divergence-free. Deterministic for a fixed seed. Rejects specs with
/// nonpositive minima and projections that miss the divergence budget.
SimState init_state(const Domain& domain, const SimParams& params, const InitSpec& n0_spec,
                    const InitSpec& c0_spec, const VelocityInitSpec& u0_spec);
SimState init_state(const SimParams& params);

/// dt = cfl_safety * min(h/(|u| + chi |m grad c| + tiny),
///                       h^2/(2 dim) when diffusion is explicit, dt_max).
double cfl_dt(const SimState& state, const SimParams& params);

struct StepInfo {
    double dt = 0.0;
    double mass_residual = 0.0;
    double div_inf = 0.0;
    double min_n = 0.0;
    double min_c = 0.0;
};

/// One full step: momentum with the current density, oxygen with the fresh
/// velocity, bacteria with the fresh oxygen and velocity. dt is the CFL
/// value capped by dt_cap (used to land exactly on sample times).
SimState advance(const SimState& state, const SimParams& params, StepInfo* info = nullptr,
                 double dt_cap = 1e300);

/// Exact solution of the space-homogeneous system: closed-form logistic n(t)
/// and c(t) = c0 exp(-int_0^t ln(1 + eps n)/eps), the integral evaluated by
/// adaptive quadrature to 1e-12 relative tolerance.
std::pair<double, double> homogeneous_oracle(double n0, double c0, double eps, double t,
                                             double kappa, double mu);

struct Violation {
    double t = 0.0;
    std::string what;
};

struct RunResult {
    SimState final_state;
    std::vector<DiagnosticsRecord> records;
    std::vector<Violation> violations;
    double wall_time = 0.0;
    bool aborted = false; ///< a positivity/monotonicity loss stopped the run
    DiagnosticsConfig diag; ///< the configuration used for the records
};

/// Observer invoked at every sample time (checkpointing, CSV flushing).
using SampleHook = std::function<void(const SimState&, const std::vector<DiagnosticsRecord>&)>;

/// Full orchestration: init, burn-in marker at t = 1, CFL-stepped loop with
/// diagnostics at the sample cadence, online invariant checks collected into
/// the violations list. Deterministic for fixed params.
RunResult run(const SimParams& params, const SampleHook& on_sample = {});

/// Continue a run from a checkpointed state; prior records (read back from
/// the records file) restore the onset anchor and monotonicity context so
/// the combined record sequence is bit-identical to an uninterrupted run.
RunResult resume_run(const SimParams& params, SimState start,
                     std::vector<DiagnosticsRecord> prior, const SampleHook& on_sample = {});

struct EpsStudyResult {
    std::vector<double> eps;
    std::vector<SimState> finals;
    /// adjacent-pair L2 distances at t_end, one triple {d_n, d_c, d_u} per pair
    std::vector<std::array<double, 3>> distances;
    std::array<bool, 3> strictly_decreasing{false, false, false};
    std::vector<std::vector<Violation>> per_run_violations;
};

/// Identical scenario re-run at every eps of the (descending) list; reports
/// the pairwise distances and whether they decrease strictly per field.
/// Runs execute concurrently (they share nothing).
EpsStudyResult epsilon_study(const SimParams& params, const std::vector<double>& eps_list);

} // namespace chemflow
