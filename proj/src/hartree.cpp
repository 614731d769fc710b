#include "spse/hartree.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "spse/detsum.hpp"
#include "spse/errors.hpp"
#include "spse/operators.hpp"
#include "spse/quadrature.hpp"

namespace spse {

namespace {

constexpr double kPi = 3.14159265358979323846;

// --- Mehrstellen (compact fourth-order) discretization -----------------------
//
//   A phi = (1/(6h^2)) [ -24 phi_c + 2 sum_faces phi + sum_edges phi ]
//   approximates Delta phi + (h^2/12) Delta^2 phi, so  -A phi = B (4 pi rho)
//   with B = I + (h^2/12) Delta_7 is a fourth-order Poisson solve.

// Apply -A to the interior of a field whose boundary entries hold the
// Dirichlet data. The output is interior-only (boundary slots zero).
void apply_neg_A(const ScalarField3D& u, ScalarField3D& out) {
    const std::size_t n = u.grid.n;
    const double c = 1.0 / (6.0 * u.grid.h() * u.grid.h());
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double faces = u.at(i - 1, j, k) + u.at(i + 1, j, k) + u.at(i, j - 1, k) +
                                     u.at(i, j + 1, k) + u.at(i, j, k - 1) + u.at(i, j, k + 1);
                const double edges =
                    u.at(i - 1, j - 1, k) + u.at(i + 1, j - 1, k) + u.at(i - 1, j + 1, k) +
                    u.at(i + 1, j + 1, k) + u.at(i - 1, j, k - 1) + u.at(i + 1, j, k - 1) +
                    u.at(i - 1, j, k + 1) + u.at(i + 1, j, k + 1) + u.at(i, j - 1, k - 1) +
                    u.at(i, j + 1, k - 1) + u.at(i, j - 1, k + 1) + u.at(i, j + 1, k + 1);
                out.at(i, j, k) = -c * (-24.0 * u.at(i, j, k) + 2.0 * faces + edges);
            }
}

// B g = g + (h^2/12) Delta_7 g on the interior, treating g as zero outside
// only where it genuinely decays; boundary values of g participate.
void apply_B(const ScalarField3D& g, ScalarField3D& out) {
    const std::size_t n = g.grid.n;
    const double c = 1.0 / 12.0;
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double lap = g.at(i - 1, j, k) + g.at(i + 1, j, k) + g.at(i, j - 1, k) +
                                   g.at(i, j + 1, k) + g.at(i, j, k - 1) + g.at(i, j, k + 1) -
                                   6.0 * g.at(i, j, k);
                out.at(i, j, k) = g.at(i, j, k) + c * lap;
            }
}

// Interior inner product (boundary rows excluded), deterministic.
double inner_interior(const ScalarField3D& a, const ScalarField3D& b) {
    const std::size_t n = a.grid.n;
    std::vector<double> plane((n - 2) * (n - 2));
    std::vector<double> line(n - 2), zsum(n - 2);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double* ra = &a.values[a.grid.idx(1, j, k)];
            const double* rb = &b.values[b.grid.idx(1, j, k)];
            for (std::size_t i = 0; i + 2 < n; ++i) line[i] = ra[i] * rb[i];
            plane[(k - 1) * (n - 2) + (j - 1)] = pairwise_sum(line);
        }
    }
    for (std::size_t k = 0; k + 2 < n; ++k) {
        std::vector<double> row(plane.begin() + k * (n - 2), plane.begin() + (k + 1) * (n - 2));
        zsum[k] = pairwise_sum(row);
    }
    return pairwise_sum(zsum);
}

// ---------------------------------------------------------------------------
// Direct solve: the Mehrstellen operator is diagonal in the tensor sine basis.
// Per-axis transforms are dense n x n products; n is small.
// ---------------------------------------------------------------------------

struct SinePlan {
    std::size_t m;                 // interior points per axis
    std::vector<double> S;         // m x m sine matrix
    std::vector<double> eig1d;     // 2 - 2 cos(theta_a), per mode
    double h;
};

const SinePlan& sine_plan(const Grid3D& g) {
    static std::map<std::pair<std::size_t, long long>, SinePlan> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(g.n, (long long)std::llround(g.L * 1e12));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SinePlan plan;
    plan.m = g.n - 2;
    plan.h = g.h();
    plan.S.assign(plan.m * plan.m, 0.0);
    plan.eig1d.assign(plan.m, 0.0);
    const double nn = double(g.n - 1);
    for (std::size_t a = 0; a < plan.m; ++a) {
        plan.eig1d[a] = 2.0 - 2.0 * std::cos(kPi * double(a + 1) / nn);
        for (std::size_t b = 0; b < plan.m; ++b)
            plan.S[a * plan.m + b] = std::sin(kPi * double(a + 1) * double(b + 1) / nn);
    }
    return cache.emplace(key, std::move(plan)).first->second;
}

// Multiply every line along `axis` of an m^3 cube by the sine matrix.
void sine_pass(const SinePlan& plan, std::vector<double>& v, int axis) {
    const std::size_t m = plan.m;
    std::vector<double> tmp(m);
    const std::size_t sx = 1, sy = m, sz = m * m;
    const std::size_t stride = axis == 0 ? sx : axis == 1 ? sy : sz;
    const std::size_t s1 = axis == 0 ? sy : sx;
    const std::size_t s2 = axis == 2 ? sy : sz;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            double* base = v.data() + a * s1 + b * s2;
            for (std::size_t t = 0; t < m; ++t) {
                double acc = 0.0;
                const double* row = plan.S.data() + t * m;
                for (std::size_t s = 0; s < m; ++s) acc += row[s] * base[s * stride];
                tmp[t] = acc;
            }
            for (std::size_t t = 0; t < m; ++t) base[t * stride] = tmp[t];
        }
}

void direct_solve(const Grid3D& g, std::vector<double>& rhs_interior) {
    const SinePlan& plan = sine_plan(g);
    const std::size_t m = plan.m;
    for (int axis = 0; axis < 3; ++axis) sine_pass(plan, rhs_interior, axis);
    const double ih2 = 1.0 / (6.0 * plan.h * plan.h);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t a = 0; a < m; ++a) {
                const double ca = 1.0 - 0.5 * plan.eig1d[a];
                const double cb = 1.0 - 0.5 * plan.eig1d[b];
                const double cc = 1.0 - 0.5 * plan.eig1d[c];
                // -A eigenvalue: (24 - 4(ca+cb+cc) - 4(ca cb + cb cc + cc ca))/(6h^2)
                const double mu =
                    ih2 * (24.0 - 4.0 * (ca + cb + cc) - 4.0 * (ca * cb + cb * cc + cc * ca));
                rhs_interior[(c * m + b) * m + a] /= mu;
            }
    const double scale = 8.0 / double((g.n - 1) * (g.n - 1) * (g.n - 1));
    for (int axis = 0; axis < 3; ++axis) sine_pass(plan, rhs_interior, axis);
    for (double& v : rhs_interior) v *= scale;
}

}  // namespace

ScalarField3D poisson_core(const ScalarField3D& rho, double boundary_coeff, PoissonMethod method,
                           double cg_rel_tol) {
    const Grid3D& g = rho.grid;
    const std::size_t n = g.n;

    // Dirichlet data: the monopole boundary_coeff/|x| on the faces.
    ScalarField3D phi(g);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                if (i != 0 && i != n - 1 && j != 0 && j != n - 1 && k != 0 && k != n - 1) continue;
                phi.at(i, j, k) = boundary_coeff / norm(g.point(i, j, k));
            }

    // Right-hand side B(4 pi rho) minus the boundary contribution of -A.
    ScalarField3D rho4(g);
    for (std::size_t t = 0; t < rho4.values.size(); ++t) rho4.values[t] = 4.0 * kPi * rho.values[t];
    ScalarField3D rhs(g);
    apply_B(rho4, rhs);
    ScalarField3D bc_apply(g);
    apply_neg_A(phi, bc_apply);  // phi currently holds only boundary data
    for (std::size_t t = 0; t < rhs.values.size(); ++t) rhs.values[t] -= bc_apply.values[t];

    if (method == PoissonMethod::Direct) {
        const std::size_t m = n - 2;
        std::vector<double> interior(m * m * m);
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < m; ++i)
                    interior[(k * m + j) * m + i] = rhs.at(i + 1, j + 1, k + 1);
        direct_solve(g, interior);
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < m; ++i)
                    phi.at(i + 1, j + 1, k + 1) = interior[(k * m + j) * m + i];
        return phi;
    }

    // Jacobi-preconditioned CG on the interior unknowns (x = 0 start, so the
    // initial residual is the boundary-adjusted right-hand side).
    const double diag = 24.0 / (6.0 * g.h() * g.h());
    ScalarField3D x(g), r(g), z(g), p(g), ap(g);
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) r.at(i, j, k) = rhs.at(i, j, k);
    double rz = 0.0;
    for (std::size_t t = 0; t < z.values.size(); ++t) z.values[t] = r.values[t] / diag;
    rz = inner_interior(r, z);
    p = z;
    const double rhs_norm = std::sqrt(inner_interior(rhs, rhs));
    if (rhs_norm == 0.0) return phi;
    const std::size_t max_iter = 20 * n;
    bool converged = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
        apply_neg_A(p, ap);
        const double pap = inner_interior(p, ap);
        const double alpha = rz / pap;
        for (std::size_t t = 0; t < x.values.size(); ++t) x.values[t] += alpha * p.values[t];
        for (std::size_t t = 0; t < r.values.size(); ++t) r.values[t] -= alpha * ap.values[t];
        const double rnorm = std::sqrt(inner_interior(r, r));
        if (rnorm <= cg_rel_tol * rhs_norm) {
            converged = true;
            break;
        }
        for (std::size_t t = 0; t < z.values.size(); ++t) z.values[t] = r.values[t] / diag;
        const double rz_new = inner_interior(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t t = 0; t < p.values.size(); ++t) p.values[t] = z.values[t] + beta * p.values[t];
    }
    if (!converged) throw SolverError("poisson solve stalled");
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) phi.at(i, j, k) = x.at(i, j, k);
    return phi;
}

HartreePotential poisson_solve_3d(const ScalarField3D& rho, PoissonMethod method, double cg_rel_tol) {
    if (!rho.finite()) throw InvalidInput("poisson_solve_3d: invalid field");
    for (double v : rho.values)
        if (v < 0.0) throw InvalidInput("negative charge density");
    HartreePotential H;
    H.total_charge = integrate_3d(rho);
    H.box = poisson_core(rho, H.total_charge, method, cg_rel_tol);
    // r Phi(r) along the +x axis at the last interior node.
    const Grid3D& g = rho.grid;
    const std::size_t last = g.n - 2;
    const std::size_t mid = (g.n - 1) / 2;
    H.far_field_coeff = g.coord(last) * H.box->at(last, mid, mid);
    return H;
}

HartreePotential radial_newton_potential(const RadialField& rho) {
    if (!rho.finite()) throw InvalidInput("radial_newton_potential: invalid field");
    for (double v : rho.values)
        if (v < 0.0) throw InvalidInput("negative charge density");
    const std::size_t n = rho.grid.n_nodes;
    std::vector<double> g2(n), g1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rho.grid.r(i);
        g2[i] = r * r * rho.values[i];
        g1[i] = r * rho.values[i];
    }
    const auto inner = cumulative_integral(rho.grid, g2);   // int_0^r s^2 rho
    const auto outer_c = cumulative_integral(rho.grid, g1); // int_0^r s rho
    const double outer_total = outer_c.back();

    HartreePotential H;
    H.radial = RadialField(rho.grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rho.grid.r(i);
        const double tail = outer_total - outer_c[i];
        if (i == 0)
            H.radial->values[0] = 4.0 * kPi * outer_total;
        else
            H.radial->values[i] = 4.0 * kPi * (inner[i] / r + tail);
    }
    H.total_charge = 4.0 * kPi * inner.back();
    H.far_field_coeff = rho.grid.r_max * H.radial->values.back();
    return H;
}

double coulomb_symmetry_integral(const ScalarField3D& U, int axis) {
    ScalarField3D u2(U.grid);
    for (std::size_t t = 0; t < u2.values.size(); ++t) u2.values[t] = U.values[t] * U.values[t];
    const double M = integrate_3d(u2);
    ScalarField3D phi = poisson_core(u2, M, PoissonMethod::Direct, 0.0);
    ScalarField3D dU = gradient_component(U, axis);
    ScalarField3D integrand(U.grid);
    for (std::size_t t = 0; t < integrand.values.size(); ++t)
        integrand.values[t] = phi.values[t] * U.values[t] * dU.values[t];
    return integrate_3d(integrand);
}

double coulomb_symmetry_integral(const RadialField& U, const Grid3D& box, const Vec3& x0, int axis) {
    return coulomb_symmetry_integral(sample_radial(U, box, x0), axis);
}

double coulomb_energy(const RadialField& u) {
    if (!u.finite()) throw InvalidInput("coulomb_energy: invalid field");
    RadialField rho(u.grid);
    for (std::size_t i = 0; i < rho.values.size(); ++i) rho.values[i] = u.values[i] * u.values[i];
    const HartreePotential H = radial_newton_potential(rho);
    RadialField integrand(u.grid);
    for (std::size_t i = 0; i < integrand.values.size(); ++i)
        integrand.values[i] = H.radial->values[i] * rho.values[i];
    return integrate_radial(integrand);
}

double coulomb_energy(const ScalarField3D& u, PoissonMethod method) {
    ScalarField3D rho(u.grid);
    for (std::size_t t = 0; t < rho.values.size(); ++t) rho.values[t] = u.values[t] * u.values[t];
    const HartreePotential H = poisson_solve_3d(rho, method);
    return inner_3d(*H.box, rho);
}

}  // namespace spse
