#include "spse/operators.hpp"

#include <algorithm>
#include <cmath>

#include "spse/quadrature.hpp"

namespace spse {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ScalarField3D laplacian(const ScalarField3D& u) {
    const std::size_t n = u.grid.n;
    if (n < 5) throw InvalidInput("laplacian: grid too small");
    if (!u.finite()) throw InvalidInput("laplacian: invalid field");
    const double ih2 = 1.0 / (u.grid.h() * u.grid.h());
    ScalarField3D out(u.grid);
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double c = u.at(i, j, k);
                out.at(i, j, k) = ih2 * (u.at(i - 1, j, k) + u.at(i + 1, j, k) +
                                         u.at(i, j - 1, k) + u.at(i, j + 1, k) +
                                         u.at(i, j, k - 1) + u.at(i, j, k + 1) - 6.0 * c);
            }
    return out;
}

RadialField laplacian_radial(const RadialField& u) {
    const std::size_t n = u.grid.n_nodes;
    if (!u.finite()) throw InvalidInput("laplacian_radial: invalid field");
    const double h = u.grid.spacing();
    const double ih2 = 1.0 / (h * h);
    RadialField out(u.grid);
    // r = 0: Delta u = 3 u''(0) with u'(0) = 0, so u''(0) = 2(u1 - u0)/h^2.
    out.values[0] = 6.0 * (u.values[1] - u.values[0]) * ih2;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double upp = (u.values[i - 1] - 2.0 * u.values[i] + u.values[i + 1]) * ih2;
        const double up = (u.values[i + 1] - u.values[i - 1]) / (2.0 * h);
        out.values[i] = upp + 2.0 / u.grid.r(i) * up;
    }
    // One-sided at r_max (rarely used: fields decay there).
    {
        const std::size_t i = n - 1;
        const double upp = (u.values[i - 2] - 2.0 * u.values[i - 1] + u.values[i]) * ih2;
        const double up = (3.0 * u.values[i] - 4.0 * u.values[i - 1] + u.values[i - 2]) / (2.0 * h);
        out.values[i] = upp + 2.0 / u.grid.r(i) * up;
    }
    return out;
}

ScalarField3D gradient_component(const ScalarField3D& u, int axis) {
    const std::size_t n = u.grid.n;
    const double h = u.grid.h();
    ScalarField3D out(u.grid);
    const std::size_t stride = (axis == 0) ? 1 : (axis == 1) ? n : n * n;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t id = u.grid.idx(i, j, k);
                const std::size_t a = (axis == 0) ? i : (axis == 1) ? j : k;
                if (a == 0)
                    out.values[id] = (-3.0 * u.values[id] + 4.0 * u.values[id + stride] -
                                      u.values[id + 2 * stride]) / (2.0 * h);
                else if (a == n - 1)
                    out.values[id] = (3.0 * u.values[id] - 4.0 * u.values[id - stride] +
                                      u.values[id - 2 * stride]) / (2.0 * h);
                else
                    out.values[id] = (u.values[id + stride] - u.values[id - stride]) / (2.0 * h);
            }
    return out;
}

NormPack norms(const ScalarField3D& u, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInput("norms: nonpositive multiplier");
    if (!u.finite()) throw InvalidInput("norms: invalid field");
    ScalarField3D sq(u.grid);
    for (std::size_t i = 0; i < sq.values.size(); ++i) sq.values[i] = u.values[i] * u.values[i];
    const double l2sq = integrate_3d(sq);
    double gradsq = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        ScalarField3D g = gradient_component(u, axis);
        for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] *= g.values[i];
        gradsq += integrate_3d(g);
    }
    NormPack p;
    p.l2 = std::sqrt(l2sq);
    p.h1 = std::sqrt(gradsq + l2sq);
    p.lambda_norm = std::sqrt(gradsq + lambda * l2sq);
    p.sup = 0.0;
    for (double v : u.values) p.sup = std::max(p.sup, std::abs(v));
    return p;
}

NormPack norms(const RadialField& u, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInput("norms: nonpositive multiplier");
    if (!u.finite()) throw InvalidInput("norms: invalid field");
    const std::size_t n = u.grid.n_nodes;
    const double h = u.grid.spacing();
    std::vector<double> up(n, 0.0);
    up[0] = 0.0;  // symmetric profile
    for (std::size_t i = 1; i + 1 < n; ++i) up[i] = (u.values[i + 1] - u.values[i - 1]) / (2.0 * h);
    up[n - 1] = (3.0 * u.values[n - 1] - 4.0 * u.values[n - 2] + u.values[n - 3]) / (2.0 * h);

    std::vector<double> g2(n), gu(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r2 = u.grid.r(i) * u.grid.r(i);
        g2[i] = 4.0 * kPi * r2 * u.values[i] * u.values[i];
        gu[i] = 4.0 * kPi * r2 * up[i] * up[i];
    }
    const double l2sq = integrate_radial_raw(u.grid, g2);
    const double gradsq = integrate_radial_raw(u.grid, gu);
    NormPack p;
    p.l2 = std::sqrt(l2sq);
    p.h1 = std::sqrt(gradsq + l2sq);
    p.lambda_norm = std::sqrt(gradsq + lambda * l2sq);
    for (double v : u.values) p.sup = std::max(p.sup, std::abs(v));
    return p;
}

}  // namespace spse
