#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spse/errors.hpp"

namespace spse {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Symmetric 3x3 matrix stored dense; small enough that plain arrays beat
/// pulling in a linear algebra library.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline double det3(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Solve m x = b by Cramer's rule. Throws on (numerically) singular m.
inline Vec3 solve3(const Mat3& m, const Vec3& b) {
    const double d = det3(m);
    if (std::abs(d) < 1e-300) throw InvalidInput("solve3: singular matrix");
    Mat3 t = m;
    Vec3 x{};
    for (int c = 0; c < 3; ++c) {
        t = m;
        for (int r = 0; r < 3; ++r) t[r][c] = b[r];
        x[c] = det3(t) / d;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Radial grid: uniform nodes on [0, r_max], node 0 at the origin.
// ---------------------------------------------------------------------------

struct RadialGrid {
    double r_max = 0.0;
    std::size_t n_nodes = 0;

    RadialGrid() = default;
    RadialGrid(double rmax, std::size_t n) : r_max(rmax), n_nodes(n) {
        if (!(rmax > 0.0)) throw InvalidInput("RadialGrid: r_max must be positive");
        if (n < 64) throw InvalidInput("RadialGrid: need at least 64 nodes");
    }

    double spacing() const { return r_max / double(n_nodes - 1); }
    double r(std::size_t i) const { return double(i) * spacing(); }
};

struct RadialField {
    RadialGrid grid;
    std::vector<double> values;

    RadialField() = default;
    explicit RadialField(RadialGrid g) : grid(g), values(g.n_nodes, 0.0) {}
    RadialField(RadialGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.n_nodes) throw InvalidInput("RadialField: value count does not match grid");
    }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Cubic (4-point Lagrange) interpolation; beyond r_max returns the last value.
    double interp(double r) const {
        const double h = grid.spacing();
        if (r <= 0.0) return values[0];
        if (r >= grid.r_max) return values.back();
        const double s = r / h;
        std::ptrdiff_t i = std::ptrdiff_t(s);
        const std::ptrdiff_t n = std::ptrdiff_t(grid.n_nodes);
        std::ptrdiff_t i0 = i - 1;
        if (i0 < 0) i0 = 0;
        if (i0 > n - 4) i0 = n - 4;
        const double t = s - double(i0);
        double out = 0.0;
        for (int k = 0; k < 4; ++k) {
            double lk = 1.0;
            for (int m = 0; m < 4; ++m)
                if (m != k) lk *= (t - double(m)) / double(k - m);
            out += lk * values[std::size_t(i0 + k)];
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Cubic box grid, [-L, L]^3, n nodes per axis (odd so the origin is a node).
// Values are stored x-fastest: idx = (k*n + j)*n + i.
// ---------------------------------------------------------------------------

struct Grid3D {
    double L = 0.0;
    std::size_t n = 0;

    Grid3D() = default;
    Grid3D(double half_width, std::size_t n_per_axis) : L(half_width), n(n_per_axis) {
        if (!(L > 0.0)) throw InvalidInput("Grid3D: half width must be positive");
        if (n < 33) throw InvalidInput("Grid3D: need at least 33 nodes per axis");
        if (n % 2 == 0) throw InvalidInput("Grid3D: node count must be odd");
    }

    double h() const { return 2.0 * L / double(n - 1); }
    double coord(std::size_t i) const { return -L + double(i) * h(); }
    std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const { return (k * n + j) * n + i; }
    std::size_t size() const { return n * n * n; }
    Vec3 point(std::size_t i, std::size_t j, std::size_t k) const { return {coord(i), coord(j), coord(k)}; }
};

struct ScalarField3D {
    Grid3D grid;
    std::vector<double> values;

    ScalarField3D() = default;
    explicit ScalarField3D(Grid3D g) : grid(g), values(g.size(), 0.0) {}
    ScalarField3D(Grid3D g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw InvalidInput("ScalarField3D: value count does not match grid");
    }

    double& at(std::size_t i, std::size_t j, std::size_t k) { return values[grid.idx(i, j, k)]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const { return values[grid.idx(i, j, k)]; }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Trilinear interpolation at an arbitrary point of the box.
    double interp(const Vec3& x) const {
        const double h = grid.h();
        const std::size_t n = grid.n;
        double f[3], c[3];
        std::size_t i0[3];
        for (int d = 0; d < 3; ++d) {
            double s = (x[d] + grid.L) / h;
            if (s < 0.0) s = 0.0;
            if (s > double(n - 1)) s = double(n - 1);
            std::size_t i = std::size_t(s);
            if (i > n - 2) i = n - 2;
            i0[d] = i;
            f[d] = s - double(i);
            c[d] = 1.0 - f[d];
        }
        double out = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int g = 0; g < 2; ++g) {
                    const double w = (a ? f[0] : c[0]) * (b ? f[1] : c[1]) * (g ? f[2] : c[2]);
                    out += w * values[grid.idx(i0[0] + a, i0[1] + b, i0[2] + g)];
                }
        return out;
    }
};

/// Sample a radial profile onto a 3D box around `center`.
ScalarField3D sample_radial(const RadialField& f, const Grid3D& g, const Vec3& center);

}  // namespace spse
