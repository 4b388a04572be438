#include "chemflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemflow/errors.hpp"

namespace chemflow {

Domain make_domain(int dim, const std::vector<double>& lengths, const std::vector<int>& cells) {
    if (dim != 2 && dim != 3)
        throw ConfigError("domain dim must be 2 or 3, got " + std::to_string(dim));
    if (lengths.size() != static_cast<std::size_t>(dim) ||
        cells.size() != static_cast<std::size_t>(dim))
        throw ConfigError("domain lengths/cells must each have dim entries");
    Domain d;
    d.dim = dim;
    for (int a = 0; a < dim; ++a) {
        if (!(lengths[a] > 0.0))
            throw ConfigError("domain length must be positive on axis " + std::to_string(a));
        if (cells[a] < 4)
            throw ConfigError("domain needs at least 4 cells per axis, got " +
                              std::to_string(cells[a]) + " on axis " + std::to_string(a));
        d.length[a] = lengths[a];
        d.cells[a] = cells[a];
        d.spacing[a] = lengths[a] / cells[a];
    }
    for (int a = dim; a < 3; ++a) {
        d.length[a] = 1.0;
        d.cells[a] = 1;
        d.spacing[a] = 1.0;
    }
    return d;
}

void VectorField::enforce_no_slip() {
    for (int a = 0; a < domain_.dim; ++a) {
        auto f = face_dims(a);
        for (int i = 0; i < f[0]; ++i)
            for (int j = 0; j < f[1]; ++j)
                for (int k = 0; k < f[2]; ++k) {
                    const int idx = a == 0 ? i : (a == 1 ? j : k);
                    if (idx == 0 || idx == f[a] - 1) comp_[a][face_index(a, i, j, k)] = 0.0;
                }
    }
}

double field_min(const ScalarField& f) {
    double m = f.data()[0];
    for (double v : f.data()) m = std::min(m, v);
    return m;
}

double field_max(const ScalarField& f) {
    double m = f.data()[0];
    for (double v : f.data()) m = std::max(m, v);
    return m;
}

double max_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.data()) m = std::max(m, std::abs(v));
    return m;
}

double max_norm(const VectorField& u) {
    double m = 0.0;
    for (int a = 0; a < u.dim(); ++a)
        for (double v : u.component(a)) m = std::max(m, std::abs(v));
    return m;
}

double integral(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.data()) s += v;
    return s * f.domain().cell_volume();
}

double mean(const ScalarField& f) { return integral(f) / f.domain().volume(); }

double lp_norm(const ScalarField& f, double p) {
    double s = 0.0;
    for (double v : f.data()) s += std::pow(std::abs(v), p);
    return std::pow(s * f.domain().cell_volume(), 1.0 / p);
}

double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.data()) s += v * v;
    return std::sqrt(s * f.domain().cell_volume());
}

double l2_norm(const VectorField& u) {
    double s = 0.0;
    for (int a = 0; a < u.dim(); ++a)
        for (double v : u.component(a)) s += v * v;
    return std::sqrt(s * u.domain().cell_volume());
}

double lp_norm_centered(const VectorField& u, double p) {
    const Domain& d = u.domain();
    double s = 0.0;
    for (int i = 0; i < d.cells[0]; ++i)
        for (int j = 0; j < d.cells[1]; ++j)
            for (int k = 0; k < d.cells[2]; ++k) {
                double mag2 = 0.0;
                for (int a = 0; a < d.dim; ++a) {
                    const int ii = a == 0 ? i + 1 : i;
                    const int jj = a == 1 ? j + 1 : j;
                    const int kk = a == 2 ? k + 1 : k;
                    const double v = 0.5 * (u.face(a, i, j, k) + u.face(a, ii, jj, kk));
                    mag2 += v * v;
                }
                s += std::pow(mag2, 0.5 * p);
            }
    return std::pow(s * d.cell_volume(), 1.0 / p);
}

double l2_distance(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double e = da[i] - db[i];
        s += e * e;
    }
    return std::sqrt(s * a.domain().cell_volume());
}

double l2_distance(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int ax = 0; ax < a.dim(); ++ax) {
        auto da = a.component(ax);
        auto db = b.component(ax);
        for (std::size_t i = 0; i < da.size(); ++i) {
            const double e = da[i] - db[i];
            s += e * e;
        }
    }
    return std::sqrt(s * a.domain().cell_volume());
}

bool all_finite(const ScalarField& f) {
    for (double v : f.data())
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const VectorField& u) {
    for (int a = 0; a < u.dim(); ++a)
        for (double v : u.component(a))
            if (!std::isfinite(v)) return false;
    return true;
}

void remove_mean(ScalarField& f) {
    const double m = mean(f);
    for (double& v : f.data()) v -= m;
}

} // namespace chemflow
