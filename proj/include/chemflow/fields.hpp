#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace chemflow {

/**
 * @file fields.hpp
 * @brief Rectangular box domain and the MAC-staggered field containers.
 *
 * Scalars (n, c, P) live at cell centers, velocity components on the faces
 * normal to their axis. Axes beyond `dim` are collapsed to a single cell of
 * unit extent so the same index arithmetic serves 2-D and 3-D runs.
 *
 * Boundary semantics are carried by convention, not by stored ghosts:
 * scalars use the mirrored-ghost (homogeneous Neumann) convention, velocity
 * is no-slip (boundary-normal faces identically zero, tangential ghosts
 * antisymmetric). The stencils in operators.cpp implement these conventions.
 */

struct Domain {
    int dim = 2;
    std::array<double, 3> length{1.0, 1.0, 1.0};
    std::array<int, 3> cells{1, 1, 1};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    std::size_t cell_count() const {
        return static_cast<std::size_t>(cells[0]) * cells[1] * cells[2];
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= length[a];
        return v;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[a];
        return v;
    }
    double min_spacing() const {
        double h = spacing[0];
        for (int a = 1; a < dim; ++a) h = h < spacing[a] ? h : spacing[a];
        return h;
    }
    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * cells[1] + j) * cells[2] + k;
    }
    /// Coordinate of the center of cell index i along axis a.
    double cell_center(int a, int i) const { return (i + 0.5) * spacing[a]; }

    bool same_grid(const Domain& o) const {
        return dim == o.dim && length == o.length && cells == o.cells;
    }
};

/// Validated construction. Rejects dim outside {2,3}, nonpositive lengths,
/// cell counts below 4.
Domain make_domain(int dim, const std::vector<double>& lengths, const std::vector<int>& cells);

/// Cell-centered scalar with homogeneous-Neumann boundary convention.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Domain& d, double init = 0.0)
        : domain_(d), values_(d.cell_count(), init) {}

    const Domain& domain() const { return domain_; }

    double& operator()(int i, int j, int k) { return values_[domain_.cell_index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return values_[domain_.cell_index(i, j, k)]; }

    std::span<double> data() { return values_; }
    std::span<const double> data() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    Domain domain_;
    std::vector<double> values_;
};

/// Face-staggered vector field with no-slip boundary convention.
/// Component a lives on faces normal to axis a: its grid has cells[a] + 1
/// entries along axis a and cells[b] along every other axis b.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Domain& d) : domain_(d) {
        for (int a = 0; a < d.dim; ++a) comp_[a].assign(face_count(a), 0.0);
    }

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim; }

    std::array<int, 3> face_dims(int axis) const {
        std::array<int, 3> f = domain_.cells;
        f[axis] += 1;
        return f;
    }
    std::size_t face_count(int axis) const {
        auto f = face_dims(axis);
        return static_cast<std::size_t>(f[0]) * f[1] * f[2];
    }
    std::size_t face_index(int axis, int i, int j, int k) const {
        auto f = face_dims(axis);
        return (static_cast<std::size_t>(i) * f[1] + j) * f[2] + k;
    }

    double& face(int axis, int i, int j, int k) { return comp_[axis][face_index(axis, i, j, k)]; }
    double face(int axis, int i, int j, int k) const { return comp_[axis][face_index(axis, i, j, k)]; }

    std::span<double> component(int axis) { return comp_[axis]; }
    std::span<const double> component(int axis) const { return comp_[axis]; }

    /// Zero every boundary-normal face (the no-slip invariant).
    void enforce_no_slip();

private:
    Domain domain_;
    std::array<std::vector<double>, 3> comp_;
};

/// One snapshot of the coupled system.
struct SimState {
    ScalarField n; ///< bacterial density, cells/volume
    ScalarField c; ///< oxygen concentration
    VectorField u; ///< fluid velocity, length/time
    ScalarField P; ///< pressure, mean-zero convention
    double t = 0.0;
    double eps = 1e-3; ///< regularization level of the approximate system
};

// --- reductions --------------------------------------------------------

double field_min(const ScalarField& f);
double field_max(const ScalarField& f);
double max_norm(const ScalarField& f);
double max_norm(const VectorField& u);
/// Midpoint-rule integral: sum of cell values times the cell volume.
double integral(const ScalarField& f);
double mean(const ScalarField& f);
/// Discrete L^p norm (midpoint rule), p >= 1.
double lp_norm(const ScalarField& f, double p);
double l2_norm(const ScalarField& f);
/// Face-weighted discrete L^2 norm of a staggered field.
double l2_norm(const VectorField& u);
/// L^p norm of the pointwise Euclidean magnitude, components averaged to centers.
double lp_norm_centered(const VectorField& u, double p);
double l2_distance(const ScalarField& a, const ScalarField& b);
double l2_distance(const VectorField& a, const VectorField& b);

bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& u);

/// Subtract the discrete mean in place (pressure normalization).
void remove_mean(ScalarField& f);

} // namespace chemflow
