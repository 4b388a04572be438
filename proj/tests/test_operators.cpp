#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "chemflow/errors.hpp"
#include "chemflow/operators.hpp"
#include "test_helpers.hpp"

using namespace chemflow;
using namespace chemflow::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField cos_mode(const Domain& d, int kx) {
    ScalarField f(d);
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k)
                f(i, j, k) = std::cos(kx * kPi * d.cell_center(0, i) / d.length[0]);
    return f;
}

double laplacian_cos_error(int n) {
    const Domain d = make_domain(2, {1.0, 1.0}, {n, 4});
    const ScalarField f = cos_mode(d, 1);
    const ScalarField lap = laplacian_neumann(f);
    const double lambda = kPi * kPi / (d.length[0] * d.length[0]);
    double err = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q)
        err = std::max(err, std::abs(lap.data()[q] + lambda * f.data()[q]));
    return err;
}

} // namespace

TEST_CASE("laplacian of a constant vanishes exactly") {
    const Domain d = make_domain(3, {1.0, 1.0, 1.0}, {6, 5, 4});
    const ScalarField lap = laplacian_neumann(ScalarField(d, 4.2));
    for (double v : lap.data()) CHECK(v == 0.0);
}

TEST_CASE("laplacian converges at second order on the Neumann cosine mode") {
    const double e32 = laplacian_cos_error(32);
    const double e64 = laplacian_cos_error(64);
    const double order = std::log2(e32 / e64);
    CHECK(order > 1.9);
    CHECK(order < 2.1);
}

TEST_CASE("laplacian output integrates to zero (flux telescoping)") {
    const Domain d = make_domain(2, {1.0, 2.0}, {16, 12});
    const ScalarField f = random_scalar(d, -3.0, 3.0, 5);
    const ScalarField lap = laplacian_neumann(f);
    CHECK(std::abs(integral(lap)) <= 1e-12 * max_norm(f) * d.volume() / d.cell_volume() *
                                         d.cell_volume() * 10);
}

TEST_CASE("divergence(gradient(f)) reproduces the laplacian bit-for-bit") {
    const Domain d = make_domain(3, {1.0, 1.5, 0.5}, {8, 6, 4});
    const ScalarField f = random_scalar(d, -1.0, 1.0, 9);
    const ScalarField a = laplacian_neumann(f);
    const ScalarField b = divergence_faces_to_cells(gradient_cells_to_faces(f));
    CHECK(std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("gradient: constant, linear and mirror-symmetric profiles") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 8});

    const VectorField gz = gradient_cells_to_faces(ScalarField(d, 2.5));
    CHECK(max_norm(gz) == 0.0);

    ScalarField lin(d);
    const double slope = 1.7;
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j) lin(i, j, 0) = slope * d.cell_center(0, i);
    const VectorField gl = gradient_cells_to_faces(lin);
    for (int i = 1; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            CHECK(gl.face(0, i, j, 0) == doctest::Approx(slope).epsilon(1e-12));
    for (int j = 0; j < d.cells[1]; ++j) {
        CHECK(gl.face(0, 0, j, 0) == 0.0);
        CHECK(gl.face(0, 16, j, 0) == 0.0);
    }

    ScalarField sym(d);
    for (int i = 0; i < d.cells[0] / 2; ++i)
        for (int j = 0; j < d.cells[1]; ++j) {
            const double x = d.cell_center(0, i);
            const double v = std::cos(2.0 * kPi * x / d.length[0]);
            sym(i, j, 0) = v; // mirrored data so f(x) = f(L - x) holds bitwise
            sym(d.cells[0] - 1 - i, j, 0) = v;
        }
    const VectorField gs = gradient_cells_to_faces(sym);
    for (int i = 0; i <= d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            CHECK(gs.face(0, i, j, 0) == -gs.face(0, d.cells[0] - i, j, 0));
}

TEST_CASE("divergence: zero input, solenoidal input, cell-sum telescoping") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 16});
    CHECK(max_norm(divergence_faces_to_cells(VectorField(d))) == 0.0);

    const VectorField u = random_solenoidal(d, 1.0, 17);
    CHECK(max_norm(divergence_faces_to_cells(u)) <= 1e-13 * max_norm(u) / d.min_spacing());

    VectorField f(d);
    std::mt19937_64 gen(23);
    for (int a = 0; a < 2; ++a)
        for (double& v : f.component(a)) v = uniform(gen, -1.0, 1.0);
    f.enforce_no_slip();
    const ScalarField div = divergence_faces_to_cells(f);
    CHECK(std::abs(integral(div)) <= 1e-12 * max_norm(f) / d.min_spacing());
}

TEST_CASE("upwind advection: zero velocity, constant profile, conservation") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 16});
    const ScalarField f = random_scalar(d, 0.0, 2.0, 31);

    CHECK(max_norm(advect_scalar_upwind(f, VectorField(d))) == 0.0);

    const VectorField u = random_solenoidal(d, 1.0, 32);
    const ScalarField tend_const = advect_scalar_upwind(ScalarField(d, 3.0), u);
    CHECK(max_norm(tend_const) <= 1e-12 * max_norm(u) / d.min_spacing());

    const ScalarField tend = advect_scalar_upwind(f, u);
    CHECK(std::abs(integral(tend)) <= 1e-12 * max_norm(u) * max_norm(f) / d.min_spacing());
}

TEST_CASE("monotone upwind form is a convex combination under the CFL bound") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 16});
    const ScalarField f = random_scalar(d, 0.0, 2.0, 41);
    const VectorField u = random_solenoidal(d, 1.0, 42);
    const double dt = 0.4 * d.min_spacing() / (max_norm(u) + 1e-30);
    const ScalarField tend = advect_scalar_upwind_monotone(f, u);
    ScalarField out = f;
    for (std::size_t q = 0; q < out.size(); ++q) out.data()[q] += dt * tend.data()[q];
    CHECK(field_max(out) <= field_max(f) + 1e-14);
    CHECK(field_min(out) >= field_min(f) - 1e-14);
}

TEST_CASE("advected bump follows the local characteristic speed") {
    // transport a small bump with a broad vortex and compare the mass-center
    // drift against an RK4 characteristic trace of the same face velocity
    const Domain d = make_domain(2, {1.0, 1.0}, {64, 64});
    const VectorField u = vortex_velocity(d, 0.05);
    ScalarField f(d);
    const double x0 = 0.3, y0 = 0.5, rad = 0.08;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            const double dx = d.cell_center(0, i) - x0;
            const double dy = d.cell_center(1, j) - y0;
            f(i, j, 0) = std::exp(-(dx * dx + dy * dy) / (rad * rad));
        }

    auto velocity_at = [&](double x, double y) {
        // bilinear sample of each staggered component
        auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };
        const double h = d.spacing[0];
        double fx = clamp(x / h, 0.0, 64.0), fy = clamp(y / h - 0.5, 0.0, 63.0);
        int i0 = std::min(static_cast<int>(fx), 63), j0 = std::min(static_cast<int>(fy), 62);
        double ax = fx - i0, ay = fy - j0;
        const double ux = (1 - ax) * ((1 - ay) * u.face(0, i0, j0, 0) + ay * u.face(0, i0, j0 + 1, 0)) +
                          ax * ((1 - ay) * u.face(0, i0 + 1, j0, 0) + ay * u.face(0, i0 + 1, j0 + 1, 0));
        fx = clamp(x / h - 0.5, 0.0, 63.0), fy = clamp(y / h, 0.0, 64.0);
        i0 = std::min(static_cast<int>(fx), 62), j0 = std::min(static_cast<int>(fy), 63);
        ax = fx - i0, ay = fy - j0;
        const double uy = (1 - ax) * ((1 - ay) * u.face(1, i0, j0, 0) + ay * u.face(1, i0, j0 + 1, 0)) +
                          ax * ((1 - ay) * u.face(1, i0 + 1, j0, 0) + ay * u.face(1, i0 + 1, j0 + 1, 0));
        return std::pair{ux, uy};
    };

    const double t_end = 1.0;
    const double dt = 0.2 * d.min_spacing() / max_norm(u);
    ScalarField g = f;
    double t = 0.0;
    while (t < t_end - 1e-12) {
        const double step = std::min(dt, t_end - t);
        const ScalarField tend = advect_scalar_upwind(g, u);
        for (std::size_t q = 0; q < g.size(); ++q) g.data()[q] += step * tend.data()[q];
        t += step;
    }

    // RK4 trace of the characteristic through the initial mass center
    double cx = x0, cy = y0;
    const int steps = 400;
    const double ddt = t_end / steps;
    for (int s = 0; s < steps; ++s) {
        auto [k1x, k1y] = velocity_at(cx, cy);
        auto [k2x, k2y] = velocity_at(cx + 0.5 * ddt * k1x, cy + 0.5 * ddt * k1y);
        auto [k3x, k3y] = velocity_at(cx + 0.5 * ddt * k2x, cy + 0.5 * ddt * k2y);
        auto [k4x, k4y] = velocity_at(cx + ddt * k3x, cy + ddt * k3y);
        cx += ddt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        cy += ddt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    }

    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            mass += g(i, j, 0);
            mx += g(i, j, 0) * d.cell_center(0, i);
            my += g(i, j, 0) * d.cell_center(1, j);
        }
    mx /= mass;
    my /= mass;

    const double drift = std::hypot(cx - x0, cy - y0);
    CHECK(drift > 3.0 * d.min_spacing()); // the scenario actually moves the bump
    CHECK(std::abs(mx - cx) < 0.25 * drift);
    CHECK(std::abs(my - cy) < 0.25 * drift);
    CHECK(field_min(g) >= -1e-14); // upwind keeps the profile nonnegative
}

TEST_CASE("poisson: zero rhs, inverse identity, incompatible rhs") {
    const Domain d = make_domain(2, {1.0, 1.0}, {32, 32});
    PoissonSolverConfig cfg;

    const ScalarField zero = poisson_solve_neumann(ScalarField(d), cfg);
    CHECK(max_norm(zero) == 0.0);

    ScalarField f = random_scalar(d, -1.0, 1.0, 51);
    remove_mean(f);
    const ScalarField rhs = laplacian_neumann(f);
    const ScalarField sol = poisson_solve_neumann(rhs, cfg);
    double err = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q)
        err = std::max(err, std::abs(sol.data()[q] - f.data()[q]));
    CHECK(err <= 1e-5 * max_norm(f));

    CHECK_THROWS_AS(poisson_solve_neumann(ScalarField(d, 1.0), cfg), IncompatibleRhs);
}

TEST_CASE("projection: fixed point, gradient annihilation, nonexpansive, idempotent") {
    const Domain d = make_domain(2, {1.0, 1.0}, {32, 32});
    PoissonSolverConfig cfg;

    const VectorField sol = random_solenoidal(d, 1.0, 61);
    const VectorField psol = project_divergence_free(sol, cfg);
    CHECK(l2_distance(psol, sol) <= 1e-7 * l2_norm(sol));

    ScalarField phi(d);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double sx = std::sin(kPi * d.cell_center(0, i));
            const double sy = std::sin(kPi * d.cell_center(1, j));
            phi(i, j, 0) = sx * sx * sy * sy;
        }
    const VectorField grad = gradient_cells_to_faces(phi);
    const VectorField pgrad = project_divergence_free(grad, cfg);
    CHECK(l2_norm(pgrad) <= 1e-6 * l2_norm(grad));

    VectorField mix(d);
    std::mt19937_64 gen(62);
    for (int a = 0; a < 2; ++a)
        for (double& v : mix.component(a)) v = uniform(gen, -1.0, 1.0);
    mix.enforce_no_slip();
    const VectorField pmix = project_divergence_free(mix, cfg);
    CHECK(l2_norm(pmix) <= l2_norm(mix) * (1.0 + 10.0 * cfg.rel_tol));
    CHECK(max_norm(divergence_faces_to_cells(pmix)) <= divergence_tolerance(mix));
    const VectorField ppmix = project_divergence_free(pmix, cfg);
    CHECK(l2_distance(ppmix, pmix) <= 2e-7 * l2_norm(mix));
}

TEST_CASE("screened face solve matches the resolvent factor mode by mode") {
    const Domain d = make_domain(2, {1.0, 1.0}, {32, 32});
    PoissonSolverConfig cfg;
    cfg.rel_tol = 1e-12;
    const double h0 = d.spacing[0], h1 = d.spacing[1];
    const double eps = 0.1;

    for (int kx = 1; kx <= 3; ++kx)
        for (int ky = 1; ky <= 3; ky += 2) {
            VectorField u(d);
            for (int i = 0; i <= 32; ++i)
                for (int j = 0; j < 32; ++j)
                    u.face(0, i, j, 0) = std::sin(kx * kPi * i * h0 / d.length[0]) *
                                         std::sin(ky * kPi * (j + 0.5) * h1 / d.length[1]);
            const double lam = (2.0 - 2.0 * std::cos(kx * kPi * h0 / d.length[0])) / (h0 * h0) +
                               (2.0 - 2.0 * std::cos(ky * kPi * h1 / d.length[1])) / (h1 * h1);
            const VectorField w = screened_solve_faces(u, eps, cfg);
            const double factor = 1.0 / (1.0 + eps * lam);
            double worst = 0.0;
            for (int i = 1; i < 32; ++i)
                for (int j = 0; j < 32; ++j) {
                    const double expect = factor * u.face(0, i, j, 0);
                    if (std::abs(expect) > 1e-3)
                        worst = std::max(worst,
                                         std::abs(w.face(0, i, j, 0) / expect - 1.0));
                }
            CHECK(worst <= 1e-6);
        }
}

TEST_CASE("velocity smoother: identity limit, zero input, vortex contraction") {
    const Domain d = make_domain(2, {1.0, 1.0}, {32, 32});
    PoissonSolverConfig cfg;
    cfg.rel_tol = 1e-12;

    const VectorField u = vortex_velocity(d, 1.0);
    const VectorField near_id = yosida_smooth(u, 1e-12, cfg);
    CHECK(l2_distance(near_id, u) <= 1e-8 * l2_norm(u));

    CHECK(l2_norm(yosida_smooth(VectorField(d), 1.0, cfg)) == 0.0);

    const VectorField sm = yosida_smooth(u, 0.1, cfg);
    CHECK(l2_norm(sm) < l2_norm(u));
    CHECK(l2_norm(sm) <= l2_norm(u) * (1.0 + 10.0 * cfg.rel_tol));

    // the smoother damps fine scales harder: compare mode-1 vs mode-4 vortices
    const VectorField fine = [&] {
        auto psi = [&](int i, int j) {
            return std::sin(4 * kPi * i * d.spacing[0]) * std::sin(4 * kPi * j * d.spacing[1]);
        };
        return stream_velocity(d, psi);
    }();
    const double coarse_keep = l2_norm(yosida_smooth(u, 0.1, cfg)) / l2_norm(u);
    const double fine_keep = l2_norm(yosida_smooth(fine, 0.1, cfg)) / l2_norm(fine);
    CHECK(fine_keep < coarse_keep);

    CHECK_THROWS_AS(yosida_smooth(u, 0.0, cfg), ConfigError);
}

TEST_CASE("grad_norm_sq is the quadratic form of the face laplacian") {
    // on a separable Dirichlet eigenmode, integral |grad u|^2 = lambda ||u||^2
    const Domain d = make_domain(2, {1.0, 1.0}, {24, 24});
    const double h = d.spacing[0];
    VectorField u(d);
    const int kx = 2, ky = 3;
    for (int i = 0; i <= 24; ++i)
        for (int j = 0; j < 24; ++j)
            u.face(0, i, j, 0) =
                std::sin(kx * kPi * i * h) * std::sin(ky * kPi * (j + 0.5) * h);
    const double lam = (2.0 - 2.0 * std::cos(kx * kPi * h)) / (h * h) +
                       (2.0 - 2.0 * std::cos(ky * kPi * h)) / (h * h);
    const double q = grad_norm_sq(u);
    const double n2 = l2_norm(u) * l2_norm(u);
    CHECK(q == doctest::Approx(lam * n2).epsilon(1e-12));
}

TEST_CASE("split implicit diffusion: conservation, max principle, mode decay") {
    const Domain d = make_domain(2, {1.0, 1.0}, {32, 32});
    const ScalarField f = random_scalar(d, 0.0, 2.0, 71);
    const double coef = 0.37;
    const ScalarField g = diffuse_implicit_neumann(f, coef);

    CHECK(integral(g) == doctest::Approx(integral(f)).epsilon(1e-13));
    CHECK(field_max(g) <= field_max(f));
    CHECK(field_min(g) >= field_min(f));
    CHECK(field_min(g) >= 0.0);

    // separable Neumann mode: the split solve damps it by the product of
    // the 1-D resolvent factors
    ScalarField mode(d);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            mode(i, j, 0) = std::cos(kPi * d.cell_center(0, i)) *
                            std::cos(2.0 * kPi * d.cell_center(1, j));
    const double h = d.spacing[0];
    const double lx = (2.0 - 2.0 * std::cos(kPi * h)) / (h * h);
    const double ly = (2.0 - 2.0 * std::cos(2.0 * kPi * h)) / (h * h);
    const double factor = 1.0 / ((1.0 + coef * lx) * (1.0 + coef * ly));
    const ScalarField dm = diffuse_implicit_neumann(mode, coef);
    for (std::size_t q = 0; q < dm.size(); ++q)
        CHECK(dm.data()[q] == doctest::Approx(factor * mode.data()[q]).epsilon(1e-10));
}

TEST_CASE("solver config validation") {
    PoissonSolverConfig bad;
    bad.rel_tol = 1e-3;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad.rel_tol = 1e-10;
    bad.max_iter = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}
