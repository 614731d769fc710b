#include "spse/quadrature.hpp"

#include <cmath>

#include "spse/detsum.hpp"

namespace spse {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Composite Simpson weights on a uniform grid. For an odd number of segments
// the last three are handled by the 3/8 rule, preserving cubic exactness.
std::vector<double> simpson_weights(std::size_t n, double h) {
    std::vector<double> w(n, 0.0);
    const std::size_t segments = n - 1;
    std::size_t simpson_end = segments;   // node index where the Simpson block stops
    bool tail38 = false;
    if (segments % 2 != 0) {
        if (segments < 3) {  // single segment: trapezoid is all we can do
            w[0] = w[1] = h / 2.0;
            return w;
        }
        simpson_end = segments - 3;
        tail38 = true;
    }
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (tail38) {
        const std::size_t i = simpson_end;
        w[i] += 3.0 * h / 8.0;
        w[i + 1] += 9.0 * h / 8.0;
        w[i + 2] += 9.0 * h / 8.0;
        w[i + 3] += 3.0 * h / 8.0;
    }
    return w;
}

}  // namespace

double integrate_radial_raw(const RadialGrid& grid, const std::vector<double>& g) {
    if (g.size() != grid.n_nodes) throw InvalidInput("integrate_radial_raw: size mismatch");
    const auto w = simpson_weights(grid.n_nodes, grid.spacing());
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) terms[i] = w[i] * g[i];
    return pairwise_sum(terms);
}

double integrate_radial(const RadialField& f) {
    if (!f.finite()) throw InvalidInput("integrate_radial: invalid field");
    std::vector<double> g(f.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = f.grid.r(i);
        g[i] = 4.0 * kPi * r * r * f.values[i];
    }
    return integrate_radial_raw(f.grid, g);
}

std::vector<double> cumulative_integral(const RadialGrid& grid, const std::vector<double>& g) {
    if (g.size() != grid.n_nodes) throw InvalidInput("cumulative_integral: size mismatch");
    const std::size_t n = grid.n_nodes;
    const double h = grid.spacing();
    std::vector<double> c(n, 0.0);
    // Per-cell increments from the cubic through four surrounding nodes:
    // int_{r_i}^{r_{i+1}} g = h/24 (-g_{i-1} + 13 g_i + 13 g_{i+1} - g_{i+2}).
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double inc;
        if (i == 0)
            inc = h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
        else if (i + 2 >= n)
            inc = h / 24.0 * (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]);
        else
            inc = h / 24.0 * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
        c[i + 1] = c[i] + inc;
    }
    return c;
}

double integrate_3d(const ScalarField3D& f) {
    if (!f.finite()) throw InvalidInput("integrate_3d: invalid field");
    const std::size_t n = f.grid.n;
    const double h = f.grid.h();
    std::vector<double> axis(n, h);
    axis.front() = axis.back() = h / 2.0;

    // Collapse x first with deterministic pairwise sums, then y, then z.
    std::vector<double> line(n), plane(n * n), col(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            const double* row = &f.values[f.grid.idx(0, j, k)];
            for (std::size_t i = 0; i < n; ++i) line[i] = axis[i] * row[i];
            plane[k * n + j] = pairwise_sum(line);
        }
    std::vector<double> zsum(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) col[j] = axis[j] * plane[k * n + j];
        zsum[k] = pairwise_sum(col);
    }
    for (std::size_t k = 0; k < n; ++k) zsum[k] *= axis[k];
    return pairwise_sum(zsum);
}

double inner_3d(const ScalarField3D& a, const ScalarField3D& b) {
    if (a.grid.n != b.grid.n || a.grid.L != b.grid.L)
        throw InvalidInput("inner_3d: grids differ");
    ScalarField3D prod(a.grid);
    for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = a.values[i] * b.values[i];
    return integrate_3d(prod);
}

ScalarField3D sample_radial(const RadialField& f, const Grid3D& g, const Vec3& center) {
    ScalarField3D out(g);
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t j = 0; j < g.n; ++j)
            for (std::size_t i = 0; i < g.n; ++i) {
                const Vec3 x = g.point(i, j, k);
                out.at(i, j, k) = f.interp(norm(x - center));
            }
    return out;
}

}  // namespace spse
