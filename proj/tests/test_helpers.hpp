#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chemflow/fields.hpp"

namespace chemflow::testing {

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    const double x = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * x;
}

inline ScalarField random_scalar(const Domain& d, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    ScalarField f(d);
    for (double& v : f.data()) v = uniform(gen, lo, hi);
    return f;
}

/// Exactly divergence-free velocity from a vertex stream function that
/// vanishes on the boundary: u = (d psi/dy, -d psi/dx) column-extruded
/// along z in 3-D. Discrete cell divergence telescopes to roundoff.
template <class Psi>
VectorField stream_velocity(const Domain& d, Psi psi) {
    VectorField u(d);
    const double ih1 = 1.0 / d.spacing[1];
    const double ih0 = 1.0 / d.spacing[0];
    for (int i = 0; i <= d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k)
                u.face(0, i, j, k) = (psi(i, j + 1) - psi(i, j)) * ih1;
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j <= d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k)
                u.face(1, i, j, k) = -(psi(i + 1, j) - psi(i, j)) * ih0;
    return u;
}

/// Single-mode vortex, amplitude-scaled.
inline VectorField vortex_velocity(const Domain& d, double amplitude) {
    const double pi = std::numbers::pi;
    auto psi = [&](int i, int j) {
        return amplitude * std::sin(pi * i * d.spacing[0] / d.length[0]) *
               std::sin(pi * j * d.spacing[1] / d.length[1]);
    };
    return stream_velocity(d, psi);
}

/// Random divergence-free field: seeded vertex stream function, zero on the
/// boundary.
inline VectorField random_solenoidal(const Domain& d, double scale, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> psi((d.cells[0] + 1) * (d.cells[1] + 1));
    const int n1 = d.cells[1] + 1;
    for (int i = 1; i < d.cells[0]; ++i)
        for (int j = 1; j < d.cells[1]; ++j)
            psi[i * n1 + j] = scale * d.min_spacing() * uniform(gen, -1.0, 1.0);
    return stream_velocity(d, [&](int i, int j) { return psi[i * n1 + j]; });
}

} // namespace chemflow::testing
