#include "chemflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

std::array<std::size_t, 3> strides_of(const std::array<int, 3>& n) {
    return {static_cast<std::size_t>(n[1]) * n[2], static_cast<std::size_t>(n[2]), 1};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void subtract_mean(std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v;
    s /= static_cast<double>(a.size());
    for (double& v : a) v -= s;
}

/// y = (-laplacian) x on cells with zero boundary flux.
void apply_neg_laplacian_cells(const Domain& d, const std::vector<double>& x,
                               std::vector<double>& y) {
    const auto s = strides_of(d.cells);
    std::array<double, 3> ih2{};
    for (int a = 0; a < d.dim; ++a) ih2[a] = 1.0 / (d.spacing[a] * d.spacing[a]);
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k) {
                const std::size_t c = d.cell_index(i, j, k);
                const int idx[3] = {i, j, k};
                double acc = 0.0;
                for (int a = 0; a < d.dim; ++a) {
                    if (idx[a] > 0) acc += (x[c] - x[c - s[a]]) * ih2[a];
                    if (idx[a] < d.cells[a] - 1) acc += (x[c] - x[c + s[a]]) * ih2[a];
                }
                y[c] = acc;
            }
}

/// y = x - coef * laplacian(x) for velocity component `comp` with no-slip
/// walls: Dirichlet zero at boundary-normal faces, antisymmetric tangential
/// ghosts (which add one extra diagonal unit at wall-adjacent entries).
void apply_face_helmholtz(const Domain& d, int comp, double coef, const std::vector<double>& x,
                          std::vector<double>& y) {
    std::array<int, 3> n = d.cells;
    n[comp] += 1;
    const auto s = strides_of(n);
    std::array<double, 3> ih2{};
    for (int a = 0; a < d.dim; ++a) ih2[a] = 1.0 / (d.spacing[a] * d.spacing[a]);
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                const std::size_t c = (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
                const int idx[3] = {i, j, k};
                if (idx[comp] == 0 || idx[comp] == n[comp] - 1) {
                    y[c] = x[c]; // pinned no-slip entry (kept at zero)
                    continue;
                }
                double acc = 0.0;
                for (int a = 0; a < d.dim; ++a) {
                    if (a == comp) {
                        acc += (2.0 * x[c] - x[c - s[a]] - x[c + s[a]]) * ih2[a];
                    } else if (idx[a] == 0) {
                        acc += (3.0 * x[c] - x[c + s[a]]) * ih2[a];
                    } else if (idx[a] == n[a] - 1) {
                        acc += (3.0 * x[c] - x[c - s[a]]) * ih2[a];
                    } else {
                        acc += (2.0 * x[c] - x[c - s[a]] - x[c + s[a]]) * ih2[a];
                    }
                }
                y[c] = x[c] + coef * acc;
            }
}

/// Plain CG for SPD (or mean-deflated SPSD) systems. `deflate` projects out
/// the operator kernel; pass a no-op for definite systems. On top of the
/// relative L2 criterion an absolute max-norm target can be requested; the
/// recursive residual is always confirmed against the true residual before
/// accepting convergence.
template <class Apply, class Deflate>
void run_cg(const std::vector<double>& b, std::vector<double>& x, Apply apply, Deflate deflate,
            double rel_tol, double abs_inf_target, int max_iter, const char* what) {
    const std::size_t n = b.size();
    const double b2 = dot(b, b);
    if (b2 == 0.0) {
        x.assign(n, 0.0);
        return;
    }
    std::vector<double> r(n), p(n), Ap(n);
    apply(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    deflate(r);
    p = r;
    double rz = dot(r, r);
    const double target2 = rel_tol * rel_tol * b2;

    auto converged = [&](double r2, const std::vector<double>& res) {
        if (r2 > target2) return false;
        return abs_inf_target <= 0.0 || inf_norm(res) <= abs_inf_target;
    };

    for (int it = 0; it < max_iter; ++it) {
        if (converged(rz, r)) {
            apply(x, Ap);
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
            deflate(r);
            const double r2 = dot(r, r);
            if (converged(r2, r)) return;
            p = r; // recursive residual had drifted; restart
            rz = r2;
        }
        apply(p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) throw NoConvergence(std::string(what) + ": CG curvature breakdown");
        const double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        deflate(r);
        const double rz_new = dot(r, r);
        const double beta = rz_new / rz;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rz = rz_new;
    }
    throw NoConvergence(std::string(what) + ": iteration cap reached");
}

} // namespace

void validate(const PoissonSolverConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || cfg.rel_tol > 1e-4)
        throw ConfigError("solver rel_tol must lie in (0, 1e-4]");
    if (cfg.max_iter < 1) throw ConfigError("solver max_iter must be >= 1");
}

VectorField gradient_cells_to_faces(const ScalarField& f) {
    const Domain& d = f.domain();
    VectorField g(d);
    for (int a = 0; a < d.dim; ++a) {
        const auto fd = g.face_dims(a);
        const double ih = 1.0 / d.spacing[a];
        const auto cs = strides_of(d.cells);
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    if (idx[a] == 0 || idx[a] == fd[a] - 1) continue; // boundary face: 0
                    int ci = i, cj = j, ck = k;
                    const std::size_t right = d.cell_index(ci, cj, ck);
                    const std::size_t left = right - cs[a];
                    g.face(a, i, j, k) = (f.data()[right] - f.data()[left]) * ih;
                }
    }
    return g;
}

ScalarField divergence_faces_to_cells(const VectorField& F) {
    const Domain& d = F.domain();
    ScalarField out(d);
    for (int a = 0; a < d.dim; ++a) {
        const double ih = 1.0 / d.spacing[a];
        const auto fs = strides_of(F.face_dims(a));
        for (int i = 0; i < d.cells[0]; ++i)
            for (int j = 0; j < d.cells[1]; ++j)
                for (int k = 0; k < d.cells[2]; ++k) {
                    const std::size_t left = F.face_index(a, i, j, k);
                    out(i, j, k) += (F.component(a)[left + fs[a]] - F.component(a)[left]) * ih;
                }
    }
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    return divergence_faces_to_cells(gradient_cells_to_faces(f));
}

ScalarField advect_scalar_upwind(const ScalarField& f, const VectorField& u) {
    const Domain& d = f.domain();
    ScalarField out(d);
    for (int a = 0; a < d.dim; ++a) {
        const double ih = 1.0 / d.spacing[a];
        const auto fd = u.face_dims(a);
        const auto cs = strides_of(d.cells);
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    if (idx[a] == 0 || idx[a] == fd[a] - 1) continue; // no-flux wall
                    const double vel = u.face(a, i, j, k);
                    const std::size_t right = d.cell_index(i, j, k);
                    const std::size_t left = right - cs[a];
                    const double flux = vel * (vel >= 0.0 ? f.data()[left] : f.data()[right]);
                    out.data()[left] -= flux * ih;
                    out.data()[right] += flux * ih;
                }
    }
    return out;
}

ScalarField advect_scalar_upwind_monotone(const ScalarField& f, const VectorField& u) {
    const Domain& d = f.domain();
    ScalarField out(d);
    const auto cs = strides_of(d.cells);
    for (int a = 0; a < d.dim; ++a) {
        const double ih = 1.0 / d.spacing[a];
        for (int i = 0; i < d.cells[0]; ++i)
            for (int j = 0; j < d.cells[1]; ++j)
                for (int k = 0; k < d.cells[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    const std::size_t c = d.cell_index(i, j, k);
                    int fi = i, fj = j, fk = k;
                    const double ul = u.face(a, fi, fj, fk);
                    if (a == 0) ++fi;
                    else if (a == 1) ++fj;
                    else ++fk;
                    const double ur = u.face(a, fi, fj, fk);
                    double acc = 0.0;
                    if (ur < 0.0 && idx[a] < d.cells[a] - 1)
                        acc -= ur * (f.data()[c + cs[a]] - f.data()[c]);
                    if (ul > 0.0 && idx[a] > 0)
                        acc += ul * (f.data()[c - cs[a]] - f.data()[c]);
                    out.data()[c] += acc * ih;
                }
    }
    return out;
}

namespace {

/// Shared CG driver for the Neumann Poisson problem; the roundoff-level mean
/// of the right-hand side is always removed so the deflated system is
/// compatible. Compatibility *checking* lives in the public entry point.
ScalarField poisson_neumann_cg(const ScalarField& rhs, const PoissonSolverConfig& cfg,
                               const ScalarField* initial_guess, double abs_inf_target) {
    validate(cfg);
    const Domain& d = rhs.domain();
    const double m = mean(rhs);
    std::vector<double> b(rhs.data().begin(), rhs.data().end());
    for (double& v : b) v = -(v - m);
    ScalarField out = initial_guess ? *initial_guess : ScalarField(d);
    std::vector<double> x(out.data().begin(), out.data().end());
    subtract_mean(x);
    run_cg(
        b, x, [&](const std::vector<double>& in, std::vector<double>& y) {
            apply_neg_laplacian_cells(d, in, y);
        },
        [](std::vector<double>& v) { subtract_mean(v); }, cfg.rel_tol, abs_inf_target,
        cfg.max_iter, "poisson_solve_neumann");
    subtract_mean(x);
    std::copy(x.begin(), x.end(), out.data().begin());
    return out;
}

} // namespace

ScalarField poisson_solve_neumann(const ScalarField& rhs, const PoissonSolverConfig& cfg) {
    return poisson_solve_neumann(rhs, cfg, nullptr, 0.0);
}

ScalarField poisson_solve_neumann(const ScalarField& rhs, const PoissonSolverConfig& cfg,
                                  const ScalarField* initial_guess, double abs_inf_target) {
    const double m = mean(rhs);
    if (std::abs(m) > 1e-10 * max_norm(rhs))
        throw IncompatibleRhs("Neumann Poisson right-hand side has nonzero mean " +
                              std::to_string(m));
    return poisson_neumann_cg(rhs, cfg, initial_guess, abs_inf_target);
}

double divergence_tolerance(const VectorField& u) {
    return 1e-9 * max_norm(u) / u.domain().min_spacing();
}

VectorField project_divergence_free(const VectorField& u, const PoissonSolverConfig& cfg) {
    return project_divergence_free(u, cfg, nullptr, nullptr);
}

VectorField project_divergence_free(const VectorField& u, const PoissonSolverConfig& cfg,
                                    const ScalarField* potential_guess,
                                    ScalarField* potential_out) {
    const Domain& d = u.domain();
    ScalarField div = divergence_faces_to_cells(u);
    // mean(div u) vanishes structurally for no-slip face data, so the
    // roundoff-level mean is removed rather than diagnosed
    const double inf_target = 0.5 * divergence_tolerance(u);
    ScalarField phi = poisson_neumann_cg(div, cfg, potential_guess, inf_target);
    VectorField grad = gradient_cells_to_faces(phi);
    VectorField out(d);
    for (int a = 0; a < d.dim; ++a) {
        auto uo = out.component(a);
        auto ui = u.component(a);
        auto gi = grad.component(a);
        for (std::size_t c = 0; c < uo.size(); ++c) uo[c] = ui[c] - gi[c];
    }
    if (potential_out) *potential_out = std::move(phi);
    return out;
}

VectorField screened_solve_faces(const VectorField& u, double coef, const PoissonSolverConfig& cfg) {
    validate(cfg);
    if (!(coef > 0.0)) throw ConfigError("screened_solve_faces needs coef > 0");
    const Domain& d = u.domain();
    VectorField out(d);
    for (int a = 0; a < d.dim; ++a) {
        std::vector<double> b(u.component(a).begin(), u.component(a).end());
        // pin the no-slip entries of the right-hand side
        const auto fd = u.face_dims(a);
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    const int idx[3] = {i, j, k};
                    if (idx[a] == 0 || idx[a] == fd[a] - 1) b[u.face_index(a, i, j, k)] = 0.0;
                }
        std::vector<double> x(b.size(), 0.0);
        run_cg(
            b, x, [&](const std::vector<double>& in, std::vector<double>& y) {
                apply_face_helmholtz(d, a, coef, in, y);
            },
            [](std::vector<double>&) {}, cfg.rel_tol, 0.0, cfg.max_iter, "screened_solve_faces");
        std::copy(x.begin(), x.end(), out.component(a).begin());
    }
    return out;
}

VectorField yosida_smooth(const VectorField& u, double eps, const PoissonSolverConfig& cfg) {
    if (!(eps > 0.0)) throw ConfigError("yosida_smooth needs eps > 0");
    return project_divergence_free(screened_solve_faces(u, eps, cfg), cfg);
}

VectorField advect_velocity(const VectorField& u, const VectorField& w) {
    const Domain& d = u.domain();
    VectorField out(d);
    for (int comp = 0; comp < d.dim; ++comp) {
        const auto fd = u.face_dims(comp);
        for (int i = 0; i < fd[0]; ++i)
            for (int j = 0; j < fd[1]; ++j)
                for (int k = 0; k < fd[2]; ++k) {
                    int idx[3] = {i, j, k};
                    const int fi = idx[comp];
                    if (fi == 0 || fi == fd[comp] - 1) continue; // pinned wall face
                    double acc = 0.0;
                    // flux of u_comp by w_comp between the two neighbor cells
                    {
                        auto cell_flux = [&](int cell) {
                            int lo[3] = {i, j, k};
                            lo[comp] = cell;
                            int hi[3] = {i, j, k};
                            hi[comp] = cell + 1;
                            const double wbar = 0.5 * (w.face(comp, lo[0], lo[1], lo[2]) +
                                                       w.face(comp, hi[0], hi[1], hi[2]));
                            const double ubar = 0.5 * (u.face(comp, lo[0], lo[1], lo[2]) +
                                                       u.face(comp, hi[0], hi[1], hi[2]));
                            return wbar * ubar;
                        };
                        acc += (cell_flux(fi) - cell_flux(fi - 1)) / d.spacing[comp];
                    }
                    // transverse fluxes through the edges of the control volume
                    for (int a = 0; a < d.dim; ++a) {
                        if (a == comp) continue;
                        auto edge_flux = [&](int je) {
                            if (je == 0 || je == d.cells[a]) return 0.0; // wall edge
                            int pa[3] = {i, j, k}; // w_a face in the cell left of this u-face
                            pa[comp] = fi - 1;
                            pa[a] = je;
                            int pb[3] = {i, j, k};
                            pb[comp] = fi;
                            pb[a] = je;
                            const double wt = 0.5 * (w.face(a, pa[0], pa[1], pa[2]) +
                                                     w.face(a, pb[0], pb[1], pb[2]));
                            int qa[3] = {i, j, k};
                            qa[a] = je - 1;
                            int qb[3] = {i, j, k};
                            qb[a] = je;
                            const double ut = 0.5 * (u.face(comp, qa[0], qa[1], qa[2]) +
                                                     u.face(comp, qb[0], qb[1], qb[2]));
                            return wt * ut;
                        };
                        const int j0 = idx[a];
                        acc += (edge_flux(j0 + 1) - edge_flux(j0)) / d.spacing[a];
                    }
                    out.face(comp, i, j, k) = -acc;
                }
    }
    return out;
}

double grad_norm_sq(const VectorField& u) {
    const Domain& d = u.domain();
    const double vol = d.cell_volume();
    double total = 0.0;
    for (int comp = 0; comp < d.dim; ++comp) {
        const auto fd = u.face_dims(comp);
        const auto fs = strides_of(fd);
        auto v = u.component(comp);
        for (int a = 0; a < d.dim; ++a) {
            const double ih = 1.0 / d.spacing[a];
            for (int i = 0; i < fd[0]; ++i)
                for (int j = 0; j < fd[1]; ++j)
                    for (int k = 0; k < fd[2]; ++k) {
                        const int idx[3] = {i, j, k};
                        const std::size_t c = (static_cast<std::size_t>(i) * fd[1] + j) * fd[2] + k;
                        if (idx[a] < fd[a] - 1) {
                            const double g = (v[c + fs[a]] - v[c]) * ih;
                            total += g * g * vol;
                        }
                        if (a != comp) {
                            // antisymmetric ghosts: wall shear counted on half cells
                            if (idx[a] == 0) {
                                const double g = 2.0 * v[c] * ih;
                                total += 0.5 * g * g * vol;
                            }
                            if (idx[a] == fd[a] - 1) {
                                const double g = 2.0 * v[c] * ih;
                                total += 0.5 * g * g * vol;
                            }
                        }
                    }
        }
    }
    return total;
}

ScalarField diffuse_implicit_neumann(const ScalarField& f, double coef) {
    if (coef == 0.0) return f;
    if (coef < 0.0) throw ConfigError("diffuse_implicit_neumann needs coef >= 0");
    const Domain& d = f.domain();
    ScalarField out = f;
    const auto cs = strides_of(d.cells);
    for (int a = 0; a < d.dim; ++a) {
        const int n = d.cells[a];
        const double r = coef / (d.spacing[a] * d.spacing[a]);
        // Neumann rows: row sums are exactly 1, off-diagonals -r.
        std::vector<double> denom(n), cp(n);
        denom[0] = 1.0 + r;
        cp[0] = -r / denom[0];
        for (int i = 1; i < n; ++i) {
            const double b = (i == n - 1) ? 1.0 + r : 1.0 + 2.0 * r;
            denom[i] = b + r * cp[i - 1];
            cp[i] = -r / denom[i];
        }
        std::vector<double> dp(n);
        // sweep every pencil along axis a
        const int n0 = a == 0 ? 1 : d.cells[0];
        const int n1 = a == 1 ? 1 : d.cells[1];
        const int n2 = a == 2 ? 1 : d.cells[2];
        auto data = out.data();
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k) {
                    const std::size_t base = d.cell_index(i, j, k);
                    dp[0] = data[base] / denom[0];
                    for (int q = 1; q < n; ++q)
                        dp[q] = (data[base + q * cs[a]] + r * dp[q - 1]) / denom[q];
                    data[base + (n - 1) * cs[a]] = dp[n - 1];
                    for (int q = n - 2; q >= 0; --q) {
                        const double x = dp[q] - cp[q] * data[base + (q + 1) * cs[a]];
                        data[base + q * cs[a]] = x;
                    }
                }
    }
    return out;
}

} // namespace chemflow
