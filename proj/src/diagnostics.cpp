#include "chemflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemflow/errors.hpp"
#include "chemflow/fluid.hpp"
#include "chemflow/operators.hpp"

namespace chemflow {

YParams select_y_params(double p, double chi, double kappa, double mu, double volume) {
    if (!(p > 1.0)) throw ConfigError("select_y_params needs p > 1");
    if (!(mu > 0.0)) throw ConfigError("select_y_params needs mu > 0");
    if (chi < 0.0 || kappa < 0.0) throw ConfigError("select_y_params needs chi, kappa >= 0");
    if (!(volume > 0.0)) throw ConfigError("select_y_params needs volume > 0");

    const double rhs = 2.0 * p * (p - 1.0);
    const double slope = 4.0 * p * p + 4.0 * p * p * chi * (p - 1.0) +
                         chi * chi * p * p * (p - 1.0) * (p - 1.0);
    double theta = 0.0;
    for (int k = 0; k <= 128; ++k) {
        const double cand = std::ldexp(1.0, -k);
        if (slope * cand < rhs) {
            theta = cand;
            break;
        }
    }
    if (theta == 0.0)
        throw InfeasibleParams("no theta on the 2^-k grid satisfies the smallness condition");

    double eta;
    if (chi > 0.0)
        eta = 0.5 * std::min({1.0, theta, 1.0 / (2.0 * p * chi)});
    else
        eta = 0.5;

    // strict feasibility of the selected pair
    const double lhs46 = std::pow(2.0 * p * theta + chi * p * (p - 1.0) * eta, 2);
    const double rhs46 = 4.0 * p * (p - 1.0) * theta * (1.0 + theta - chi * p * eta);
    if (!(lhs46 < rhs46))
        throw InfeasibleParams("selected (theta, eta) fails the feasibility inequality");

    YParams yp;
    yp.p = p;
    yp.theta = theta;
    yp.eta = eta;
    yp.k1 = p * mu * std::pow(std::pow(eta, theta) / (std::pow(2.0, theta) * volume), 1.0 / p);
    yp.B = kappa * chi * chi / mu + 1.0;
    yp.K = 1.0;
    return yp;
}

FunctionalValue functional_F(const SimState& state, double K, double chi, double n_floor,
                             double c_floor) {
    const Domain& d = state.n.domain();
    const double vol = d.cell_volume();
    FunctionalValue out;

    double ent = 0.0;
    for (double v : state.n.data()) {
        if (v < n_floor) out.n_clamped = true;
        const double s = std::max(v, n_floor);
        ent += s * std::log(s);
    }
    ent *= vol;

    double dirichlet = 0.0;
    if (chi != 0.0) {
        VectorField g = gradient_cells_to_faces(state.c);
        for (int i = 0; i < d.cells[0]; ++i)
            for (int j = 0; j < d.cells[1]; ++j)
                for (int k = 0; k < d.cells[2]; ++k) {
                    double gsq = 0.0;
                    for (int a = 0; a < d.dim; ++a) {
                        const int ii = a == 0 ? i + 1 : i;
                        const int jj = a == 1 ? j + 1 : j;
                        const int kk = a == 2 ? k + 1 : k;
                        const double gl = g.face(a, i, j, k);
                        const double gr = g.face(a, ii, jj, kk);
                        gsq += 0.5 * (gl * gl + gr * gr);
                    }
                    const double cv = state.c(i, j, k);
                    if (cv < c_floor) out.c_clamped = true;
                    dirichlet += gsq / std::max(cv, c_floor);
                }
        dirichlet *= vol;
    }

    double kin2 = 0.0;
    if (chi != 0.0 && K != 0.0) kin2 = 2.0 * kinetic_energy(state.u);

    out.value = ent + 0.5 * chi * dirichlet + K * chi * kin2;
    return out;
}

double functional_G(const SimState& state, double B, double kappa, double mu) {
    const Domain& d = state.n.domain();
    const double vol = d.cell_volume();
    double acc = 0.0;
    if (kappa > 0.0) {
        if (field_min(state.n) <= 0.0)
            throw NonpositiveDensity("functional_G needs min(n) > 0 when kappa > 0");
        const double ratio = kappa / mu;
        for (double v : state.n.data()) acc += v - ratio * std::log(mu * v / kappa);
    } else {
        for (double v : state.n.data()) acc += v;
    }
    double c2 = 0.0;
    for (double v : state.c.data()) c2 += v * v;
    return acc * vol + 0.5 * B * c2 * vol;
}

std::optional<double> functional_y(const SimState& state, const YParams& yp) {
    if (max_norm(state.c) > 0.5 * yp.eta) return std::nullopt;
    const double vol = state.n.domain().cell_volume();
    double acc = 0.0;
    auto nv = state.n.data();
    auto cv = state.c.data();
    for (std::size_t q = 0; q < nv.size(); ++q)
        acc += std::pow(std::max(nv[q], 0.0), yp.p) / std::pow(yp.eta - cv[q], yp.theta);
    return acc * vol;
}

double comparison_z(double t, double T, double yT, const YParams& yp, double kappa) {
    if (t < T) throw ConfigError("comparison_z needs t >= T");
    if (!(yT > 0.0)) throw ConfigError("comparison_z needs yT > 0");
    const double p = yp.p;
    if (kappa > 0.0) {
        const double eq = yp.k1 / (kappa * p);
        const double base = (std::pow(yT, -1.0 / p) - eq) * std::exp(-kappa * (t - T)) + eq;
        return std::pow(base, -p);
    }
    return std::pow(std::pow(yT, -1.0 / p) + yp.k1 * (t - T) / p, -p);
}

double grad_c_squared(const ScalarField& c) {
    const Domain& d = c.domain();
    VectorField g = gradient_cells_to_faces(c);
    double acc = 0.0;
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k)
                for (int a = 0; a < d.dim; ++a) {
                    const int ii = a == 0 ? i + 1 : i;
                    const int jj = a == 1 ? j + 1 : j;
                    const int kk = a == 2 ? k + 1 : k;
                    const double gl = g.face(a, i, j, k);
                    const double gr = g.face(a, ii, jj, kk);
                    acc += 0.5 * (gl * gl + gr * gr);
                }
    return acc * d.cell_volume();
}

double g_dissipation(const SimState& state, double kappa, double mu) {
    const Domain& d = state.n.domain();
    const double ratio = kappa / mu;
    double quad = 0.0;
    for (double v : state.n.data()) quad += (v - ratio) * (v - ratio);
    quad *= mu * d.cell_volume();
    if (kappa <= 0.0) return quad;

    VectorField g = gradient_cells_to_faces(state.n);
    double fisher = 0.0;
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k) {
                double gsq = 0.0;
                for (int a = 0; a < d.dim; ++a) {
                    const int ii = a == 0 ? i + 1 : i;
                    const int jj = a == 1 ? j + 1 : j;
                    const int kk = a == 2 ? k + 1 : k;
                    const double gl = g.face(a, i, j, k);
                    const double gr = g.face(a, ii, jj, kk);
                    gsq += 0.5 * (gl * gl + gr * gr);
                }
                const double nv = state.n(i, j, k);
                if (nv > 0.0) fisher += gsq / (nv * nv);
            }
    return quad + 0.5 * (kappa / mu) * fisher * d.cell_volume();
}

DiagnosticsRecord record(const SimState& state, const DiagnosticsConfig& cfg,
                         const std::optional<Onset>& onset) {
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass_n = integral(state.n);
    r.min_n = field_min(state.n);
    r.max_n = field_max(state.n);
    r.sup_c = max_norm(state.c);
    r.int_c = integral(state.c);
    r.grad_c_sq = grad_c_squared(state.c);
    r.kinetic = kinetic_energy(state.u);
    r.enstrophy_like = grad_norm_sq(state.u);

    const FunctionalValue F = functional_F(state, cfg.K, cfg.chi, cfg.n_floor, cfg.c_floor);
    r.F = F.value;
    r.clamp_flags = (F.n_clamped ? 1 : 0) | (F.c_clamped ? 2 : 0);

    if (cfg.kappa > 0.0 && r.min_n <= 0.0)
        r.G = -1.0; // flagged: G undefined for nonpositive density
    else
        r.G = functional_G(state, cfg.yp.B, cfg.kappa, cfg.mu);

    if (auto y = functional_y(state, cfg.yp)) r.y_p = *y;
    if (onset && state.t >= onset->T)
        r.z_p = comparison_z(state.t, onset->T, onset->yT, cfg.yp, cfg.kappa);

    r.lp_n.reserve(cfg.p_norms.size());
    r.lp_u.reserve(cfg.p_norms.size());
    for (double p : cfg.p_norms) {
        r.lp_n.push_back(lp_norm(state.n, p));
        r.lp_u.push_back(lp_norm_centered(state.u, p));
    }
    return r;
}

} // namespace chemflow
