#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "chemflow/driver.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/fields.hpp"
#include "chemflow/operators.hpp"
#include "test_helpers.hpp"

using namespace chemflow;
using namespace chemflow::testing;

TEST_CASE("make_domain computes spacings and rejects bad input") {
    const Domain d2 = make_domain(2, {1.0, 1.0}, {8, 8});
    CHECK(d2.spacing[0] == 0.125);
    CHECK(d2.spacing[1] == 0.125);
    CHECK(d2.cells[2] == 1);
    CHECK(d2.volume() == 1.0);

    const Domain d3 = make_domain(3, {2.0, 1.0, 1.0}, {16, 8, 8});
    CHECK(d3.spacing[0] == 0.125);
    CHECK(d3.spacing[1] == 0.125);
    CHECK(d3.spacing[2] == 0.125);

    CHECK_THROWS_AS(make_domain(2, {1.0, 1.0}, {2, 8}), ConfigError);
    CHECK_THROWS_AS(make_domain(4, {1.0, 1.0, 1.0, 1.0}, {8, 8, 8, 8}), ConfigError);
    CHECK_THROWS_AS(make_domain(2, {-1.0, 1.0}, {8, 8}), ConfigError);
    CHECK_THROWS_AS(make_domain(2, {1.0}, {8, 8}), ConfigError);
}

TEST_CASE("field containers have the expected extents") {
    const Domain d = make_domain(2, {1.0, 2.0}, {8, 16});
    ScalarField f(d, 3.0);
    CHECK(f.size() == 8 * 16);
    CHECK(integral(f) == doctest::Approx(3.0 * 2.0).epsilon(1e-14));

    VectorField u(d);
    CHECK(u.component(0).size() == 9 * 16);
    CHECK(u.component(1).size() == 8 * 17);

    const Domain d3 = make_domain(3, {1.0, 1.0, 1.0}, {4, 5, 6});
    VectorField w(d3);
    CHECK(w.component(0).size() == 5 * 5 * 6);
    CHECK(w.component(1).size() == 4 * 6 * 6);
    CHECK(w.component(2).size() == 4 * 5 * 7);
}

TEST_CASE("enforce_no_slip zeroes exactly the boundary-normal faces") {
    const Domain d = make_domain(2, {1.0, 1.0}, {4, 4});
    VectorField u(d);
    for (int a = 0; a < 2; ++a)
        for (double& v : u.component(a)) v = 1.0;
    u.enforce_no_slip();
    for (int j = 0; j < 4; ++j) {
        CHECK(u.face(0, 0, j, 0) == 0.0);
        CHECK(u.face(0, 4, j, 0) == 0.0);
        CHECK(u.face(0, 2, j, 0) == 1.0);
    }
    for (int i = 0; i < 4; ++i) {
        CHECK(u.face(1, i, 0, 0) == 0.0);
        CHECK(u.face(1, i, 4, 0) == 0.0);
        CHECK(u.face(1, i, 2, 0) == 1.0);
    }
}

namespace {

SimParams base_params(const Domain& d) {
    SimParams p;
    p.domain = d;
    p.reaction.mu = 1.0;
    p.reaction.eps = 1e-3;
    return p;
}

} // namespace

TEST_CASE("init_state: constants give exact mass and zero velocity") {
    const Domain d = make_domain(2, {1.0, 1.0}, {8, 8});
    SimParams p = base_params(d);
    const SimState st = init_state(d, p, {InitSpec::Kind::Constant, 1.0, 0.0},
                                   {InitSpec::Kind::Constant, 1.0, 0.0}, {});
    CHECK(integral(st.n) == doctest::Approx(d.volume()).epsilon(1e-14));
    CHECK(max_norm(st.u) == 0.0);
    CHECK(max_norm(divergence_faces_to_cells(st.u)) == 0.0);
    CHECK(st.t == 0.0);
}

TEST_CASE("init_state: seeded perturbation is bounded and deterministic") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 16});
    SimParams p = base_params(d);
    p.seed = 7;
    const InitSpec pert{InitSpec::Kind::Perturbed, 1.0, 0.1};
    const InitSpec unit{InitSpec::Kind::Constant, 1.0, 0.0};
    const SimState a = init_state(d, p, pert, unit, {});
    CHECK(field_min(a.n) > 0.9);
    CHECK(field_max(a.n) < 1.1);

    const SimState b = init_state(d, p, pert, unit, {});
    CHECK(std::memcmp(a.n.data().data(), b.n.data().data(), a.n.size() * sizeof(double)) == 0);
}

TEST_CASE("init_state rejects nonpositive initial data") {
    const Domain d = make_domain(2, {1.0, 1.0}, {8, 8});
    SimParams p = base_params(d);
    CHECK_THROWS_AS(init_state(d, p, {InitSpec::Kind::Constant, 1.0, 0.0},
                               {InitSpec::Kind::Bump, 0.0, 0.0}, {}),
                    ConfigError);
    CHECK_THROWS_AS(init_state(d, p, {InitSpec::Kind::Perturbed, 1.0, 2.0},
                               {InitSpec::Kind::Constant, 1.0, 0.0}, {}),
                    ConfigError);
}

TEST_CASE("init_state: random velocity is solenoidal with the requested amplitude") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 16});
    SimParams p = base_params(d);
    p.seed = 3;
    VelocityInitSpec u0{VelocityInitSpec::Kind::Perturbed, 0.1};
    const SimState st = init_state(d, p, {InitSpec::Kind::Constant, 1.0, 0.0},
                                   {InitSpec::Kind::Constant, 1.0, 0.0}, u0);
    CHECK(max_norm(st.u) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(max_norm(divergence_faces_to_cells(st.u)) <= divergence_tolerance(st.u));
}

TEST_CASE("bump profile is strictly positive and Neumann-compatible") {
    const Domain d = make_domain(2, {1.0, 1.0}, {16, 16});
    SimParams p = base_params(d);
    const SimState st = init_state(d, p, {InitSpec::Kind::Bump, 0.5, 1.0},
                                   {InitSpec::Kind::Constant, 1.0, 0.0}, {});
    CHECK(field_min(st.n) > 0.5 - 1e-15);
    CHECK(field_max(st.n) > 1.0);
}

TEST_CASE("reductions agree with hand quadrature") {
    const Domain d = make_domain(2, {2.0, 1.0}, {8, 4});
    ScalarField f = random_scalar(d, -1.0, 3.0, 21);
    double s = 0.0, mx = -1e300, mn = 1e300;
    for (double v : f.data()) {
        s += v;
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    CHECK(integral(f) == doctest::Approx(s * d.cell_volume()).epsilon(1e-14));
    CHECK(field_max(f) == mx);
    CHECK(field_min(f) == mn);
    CHECK(lp_norm(f, 2.0) == doctest::Approx(l2_norm(f)).epsilon(1e-13));
}
