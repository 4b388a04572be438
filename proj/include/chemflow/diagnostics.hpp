#pragma once

#include <optional>
#include <vector>

#include "chemflow/fields.hpp"

namespace chemflow {

/**
 * @file diagnostics.hpp
 * @brief The monitored functionals: quasi-energy F, mass-log functional G,
 * the weighted L^p functional y with its ODE comparison bound z, and the
 * per-sample record assembling every tracked norm.
 *
 * Quadrature is the midpoint (cell-average) rule throughout; gradient norms
 * use face-centered differences averaged to cells.
 */

/// One time-stamped row of every monitored quantity. y_p and z_p carry the
/// sentinel -1 while out of regime (sup c > eta/2, resp. before the onset
/// sample); both quantities are positive whenever defined.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_n = 0.0;
    double min_n = 0.0;
    double max_n = 0.0;
    double sup_c = 0.0;
    double int_c = 0.0;
    double grad_c_sq = 0.0;
    double kinetic = 0.0;
    double enstrophy_like = 0.0;
    double F = 0.0;
    double G = 0.0;
    double y_p = -1.0;
    double z_p = -1.0;
    int clamp_flags = 0; ///< bit 0: n-floor fired in F, bit 1: c-floor fired
    std::vector<double> lp_n; ///< ||n||_p for the configured p list
    std::vector<double> lp_u; ///< ||u||_p for the configured p list
};

/// Parameters of the weighted L^p functional y = integral n^p/(eta - c)^theta
/// and of its comparison ODE, selected so the feasibility inequality
/// (2p theta + chi p (p-1) eta)^2 < 4 p (p-1) theta (1 + theta - chi p eta)
/// holds strictly.
struct YParams {
    double p = 2.0;
    double theta = 0.0;
    double eta = 0.0;
    double B = 1.0;  ///< coefficient of the c^2 term in G (2*B0 + 1)
    double K = 1.0;  ///< coefficient of the velocity term in F
    double k1 = 0.0; ///< absorption constant of the y-inequality
};

/// Deterministic parameter search: theta is the largest power 2^{-k}
/// satisfying 4p^2 th + 4p^2 th chi (p-1) + chi^2 p^2 (p-1)^2 th < 2p(p-1),
/// eta = min{1, theta, 1/(2 p chi)}/2 (1/2 when chi = 0), then
/// k1 = p mu (eta^theta / (2^theta volume))^{1/p} and B = kappa chi^2/mu + 1.
/// Throws InfeasibleParams when no grid value works or the feasibility
/// inequality fails for the selected pair.
YParams select_y_params(double p, double chi, double kappa, double mu, double volume);

struct FunctionalValue {
    double value = 0.0;
    bool n_clamped = false;
    bool c_clamped = false;
};

/// Quasi-energy integral n ln n + (chi/2) integral |grad c|^2/c
/// + K chi integral |u|^2. Floors guard the logarithm and the division;
/// the state itself is never modified and clamp activity is reported.
FunctionalValue functional_F(const SimState& state, double K, double chi, double n_floor,
                             double c_floor);

/// integral n - (kappa/mu) integral ln(mu n / kappa) + (B/2) integral c^2;
/// the log term is dropped for kappa = 0. Throws NonpositiveDensity when
/// min(n) <= 0 with kappa > 0.
double functional_G(const SimState& state, double B, double kappa, double mu);

/// integral n^p/(eta - c)^theta, defined while sup c <= eta/2; returns
/// nullopt (the "not in regime" marker) otherwise.
std::optional<double> functional_y(const SimState& state, const YParams& yp);

/// Closed-form comparison bound z(t) with z(T) = yT:
/// for kappa > 0, z = [(yT^{-1/p} - k1/(kappa p)) e^{-kappa (t-T)}
/// + k1/(kappa p)]^{-p}; for kappa = 0, z = (yT^{-1/p} + k1 (t-T)/p)^{-p}.
double comparison_z(double t, double T, double yT, const YParams& yp, double kappa);

/// integral |grad c|^2 with the face-average-to-cell quadrature.
double grad_c_squared(const ScalarField& c);

/// Dissipation scale of the G inequality,
/// mu integral (n - kappa/mu)^2 + (kappa/(2 mu)) integral |grad n|^2/n^2,
/// used to size the sample-to-sample monotonicity tolerance.
double g_dissipation(const SimState& state, double kappa, double mu);

struct DiagnosticsConfig {
    YParams yp;
    double K = 1.0;
    double chi = 0.0;
    double kappa = 0.0;
    double mu = 1.0;
    double n_floor = 1e-14;
    double c_floor = 1e-14;
    std::vector<double> p_norms{2.0, 4.0};
};

/// First sample time with sup c <= eta/2 together with y at that sample;
/// anchors the comparison bound z.
struct Onset {
    double T = 0.0;
    double yT = 0.0;
};

/// Assemble one record. Pure read; functional failures surface as the -1
/// sentinel (G when min(n) <= 0), never as exceptions.
DiagnosticsRecord record(const SimState& state, const DiagnosticsConfig& cfg,
                         const std::optional<Onset>& onset);

} // namespace chemflow
