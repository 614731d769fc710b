#include "spse/pohozaev.hpp"

#include <cmath>

#include "spse/detsum.hpp"
#include "spse/errors.hpp"
#include "spse/hartree.hpp"
#include "spse/operators.hpp"
#include "spse/quadrature.hpp"

namespace spse {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * double(k) + 1.0) * t * p1 - double(k) * p2) / (double(k) + 1.0);
            }
            pp = double(n) * (t * p0 - p1) / (t * t - 1.0);
            const double dt = -p0 / pp;
            t += dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct FrameScales {
    double amp;        // (lambda/V0)^{1/(p-2)}
    double sqrt_lam;
    double phi_scale;  // (lambda/V0)^{2/(p-2)} / lambda
};

FrameScales scales(const RescaledProblem& prob) {
    FrameScales s;
    s.amp = std::pow(prob.lambda / prob.V.V0, 1.0 / (prob.p - 2.0));
    s.sqrt_lam = std::sqrt(prob.lambda);
    s.phi_scale = std::pow(prob.lambda / prob.V.V0, 2.0 / (prob.p - 2.0)) / prob.lambda;
    return s;
}

void require_ball_inside(const SolutionRecord& rec, double d) {
    const RescaledProblem& prob = rec.problem;
    const double half_width = prob.box.L / std::sqrt(prob.lambda);
    const double margin = 2.0 * prob.box.h() / std::sqrt(prob.lambda);
    for (int axis = 0; axis < 3; ++axis)
        if (std::abs(rec.x_peak[axis] - prob.x0[axis]) + d + margin > half_width)
            throw InvalidInput("pohozaev: ball outside the computational box");
}

}  // namespace

double nonlocal_bulk_term(const SolutionRecord& rec, double d, int axis, bool full_space) {
    const RescaledProblem& prob = rec.problem;
    if (!prob.poisson_on) return 0.0;
    const Grid3D& g = prob.box;
    const FrameScales sc = scales(prob);
    const std::size_t n = g.n;

    // Rescaled ball radius and center.
    const double rad = d * sc.sqrt_lam;
    const Vec3 yc = sc.sqrt_lam * (rec.x_peak - prob.x0);

    std::vector<std::size_t> ball;
    ball.reserve(full_space ? g.size() : g.size() / 8);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                if (!full_space && norm(g.point(i, j, k) - yc) > rad) continue;
                ball.push_back(g.idx(i, j, k));
            }

    std::vector<double> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = g.coord(i);
    const std::vector<double>& v = rec.v.values;

    // Kernel in original coordinates collapses to lambda * dy_j/|dy|^3 on the
    // rescaled lattice; self-pairs are excluded (odd kernel, higher order).
    std::vector<double> outer_terms(ball.size());
    std::vector<double> inner(n * n * n);
    for (std::size_t a = 0; a < ball.size(); ++a) {
        const std::size_t ia = ball[a];
        const std::size_t ax = ia % n, ay = (ia / n) % n, az = ia / (n * n);
        const double xa = coords[ax], ya = coords[ay], za = coords[az];
        const double va2 = v[ia] * v[ia];
        if (va2 == 0.0) {
            outer_terms[a] = 0.0;
            continue;
        }
        std::size_t m = 0;
        for (std::size_t kz = 0; kz < n; ++kz) {
            const double dz = coords[kz] - za;
            for (std::size_t ky = 0; ky < n; ++ky) {
                const double dy = coords[ky] - ya;
                const double dzy = dz * dz + dy * dy;
                const std::size_t row = (kz * n + ky) * n;
                for (std::size_t kx = 0; kx < n; ++kx) {
                    const double dx = coords[kx] - xa;
                    const double r2 = dzy + dx * dx;
                    if (r2 == 0.0) continue;
                    const double comp = axis == 0 ? -dx : axis == 1 ? -dy : -dz;
                    const double vb = v[row + kx];
                    inner[m++] = comp / (r2 * std::sqrt(r2)) * vb * vb;
                }
            }
        }
        outer_terms[a] = va2 * pairwise_sum(std::span<const double>(inner.data(), m));
    }
    const double sum = pairwise_sum(outer_terms);
    const double h6 = std::pow(g.h(), 6.0);
    const double amp4 = std::pow(sc.amp, 4.0);
    // 1/2 * amp^4 * lambda * h^6 / lambda^3
    return 0.5 * amp4 * sum * h6 / (prob.lambda * prob.lambda);
}

PohozaevReport evaluate_identity(const SolutionRecord& rec, double d, int axis,
                                 const PohozaevOptions& opt) {
    const RescaledProblem& prob = rec.problem;
    if (axis < 0 || axis > 2) throw InvalidInput("pohozaev: axis must be 0, 1 or 2");
    if (opt.n_theta * opt.n_phi < 500) throw InvalidInput("pohozaev: surface sampling under-resolved");
    if (opt.n_phi % 2 != 0) throw InvalidInput("pohozaev: azimuthal count must be even");
    require_ball_inside(rec, d);

    const Grid3D& g = prob.box;
    const FrameScales sc = scales(prob);
    const double inv_sqrt_lam = 1.0 / sc.sqrt_lam;

    // Gradient of v and the rescaled Hartree potential, sampled on the sphere.
    ScalarField3D gx = gradient_component(rec.v, 0);
    ScalarField3D gy = gradient_component(rec.v, 1);
    ScalarField3D gz = gradient_component(rec.v, 2);
    ScalarField3D phi_v;
    if (prob.poisson_on) {
        ScalarField3D rho(g);
        for (std::size_t t = 0; t < rho.values.size(); ++t)
            rho.values[t] = rec.v.values[t] * rec.v.values[t];
        const double m = integrate_3d(rho);
        phi_v = poisson_core(rho, m, PoissonMethod::Direct, 0.0);
    }

    std::vector<double> nodes, weights;
    gauss_legendre(opt.n_theta, nodes, weights);
    const double pi = 3.14159265358979323846;
    const double dphi = 2.0 * pi / double(opt.n_phi);

    std::vector<double> s1, s2, s3, s4, s5;
    s1.reserve(opt.n_theta * opt.n_phi);
    s2.reserve(opt.n_theta * opt.n_phi);
    s3.reserve(opt.n_theta * opt.n_phi);
    s4.reserve(opt.n_theta * opt.n_phi);
    s5.reserve(opt.n_theta * opt.n_phi);
    for (std::size_t it = 0; it < opt.n_theta; ++it) {
        const double ct = nodes[it];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (std::size_t ip = 0; ip < opt.n_phi; ++ip) {
            const double phi_ang = dphi * double(ip);
            const Vec3 nu{st * std::cos(phi_ang), st * std::sin(phi_ang), ct};
            const Vec3 x = rec.x_peak + d * nu;
            const Vec3 y = sc.sqrt_lam * (x - prob.x0);
            const double w = weights[it] * dphi * d * d;

            const double u = sc.amp * rec.v.interp(y);
            const Vec3 grad_u{sc.amp * sc.sqrt_lam * gx.interp(y),
                              sc.amp * sc.sqrt_lam * gy.interp(y),
                              sc.amp * sc.sqrt_lam * gz.interp(y)};
            const double du_nu = dot(grad_u, nu);
            const double du_j = grad_u[axis];
            const double Vx = prob.V.eval(x);
            const double upe = u > 0.0 ? std::pow(u, prob.p) : 0.0;

            s1.push_back(w * du_nu * du_j);
            s2.push_back(w * dot(grad_u, grad_u) * nu[axis]);
            s3.push_back(w * u * u * nu[axis]);
            s4.push_back(w * Vx * upe * nu[axis]);
            if (prob.poisson_on) {
                const double phi_u = sc.phi_scale * phi_v.interp(y);
                s5.push_back(w * phi_u * u * u * nu[axis]);
            }
        }
    }

    PohozaevReport rep;
    rep.d = d;
    rep.axis = axis;
    rep.boundary_terms["normal-derivative"] = pairwise_sum(s1);
    rep.boundary_terms["gradient-square"] = -0.5 * pairwise_sum(s2);
    rep.boundary_terms["lambda-u2"] = -0.5 * prob.lambda * pairwise_sum(s3);
    rep.boundary_terms["V-upe"] = pairwise_sum(s4) / prob.p;
    rep.boundary_terms["nonlocal-boundary"] =
        prob.poisson_on ? -0.5 * pairwise_sum(s5) : 0.0;
    rep.nonlocal_bulk = nonlocal_bulk_term(rec, d, axis, false);

    // Bulk left-hand side over the ball, node-indicator quadrature.
    {
        const double rad = d * sc.sqrt_lam;
        const Vec3 yc = sc.sqrt_lam * (rec.x_peak - prob.x0);
        const double cell = std::pow(g.h() * inv_sqrt_lam, 3.0);
        std::vector<double> terms;
        terms.reserve(g.size() / 8);
        for (std::size_t k = 0; k < g.n; ++k)
            for (std::size_t j = 0; j < g.n; ++j)
                for (std::size_t i = 0; i < g.n; ++i) {
                    const Vec3 y = g.point(i, j, k);
                    if (norm(y - yc) > rad) continue;
                    const Vec3 x = prob.x0 + inv_sqrt_lam * y;
                    const double u = sc.amp * rec.v.at(i, j, k);
                    if (u <= 0.0) continue;
                    terms.push_back(prob.V.grad(x)[axis] * std::pow(u, prob.p) * cell);
                }
        rep.lhs = pairwise_sum(terms) / prob.p;
    }

    rep.rhs_total = rep.boundary_terms["normal-derivative"] + rep.boundary_terms["gradient-square"] +
                    rep.boundary_terms["lambda-u2"] + rep.boundary_terms["V-upe"] +
                    rep.boundary_terms["nonlocal-boundary"] + rep.nonlocal_bulk;
    rep.residual = rep.lhs - rep.rhs_total;
    return rep;
}

PeakEstimate peak_location_estimate(const SolutionRecord& rec, double d) {
    const RescaledProblem& prob = rec.problem;
    require_ball_inside(rec, d);
    PeakEstimate est;
    if (prob.V.kind == PotentialKind::Constant) return est;  // gradient identically zero

    const Mat3 H = prob.V.hess(prob.V.b0);
    if (std::abs(det3(H)) < 1e-12)
        throw InvalidInput("peak_location_estimate: singular Hessian (hypothesis V violated)");

    const Grid3D& g = prob.box;
    const FrameScales sc = scales(prob);
    const double rad = d * sc.sqrt_lam;
    const Vec3 yc = sc.sqrt_lam * (rec.x_peak - prob.x0);
    Vec3 moment{0, 0, 0};
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t j = 0; j < g.n; ++j)
            for (std::size_t i = 0; i < g.n; ++i) {
                const Vec3 y = g.point(i, j, k);
                if (norm(y - yc) > rad) continue;
                const double u = sc.amp * rec.v.at(i, j, k);
                if (u <= 0.0) continue;
                const double w = std::pow(u, prob.p);
                const Vec3 x = prob.x0 + (1.0 / sc.sqrt_lam) * y;
                const Vec3 gv = prob.V.grad(x);
                moment = moment + w * gv;
                weight_sum += w;
            }
    if (weight_sum == 0.0) throw InvalidInput("peak_location_estimate: empty ball");
    moment = (1.0 / weight_sum) * moment;
    est.defined = true;
    est.x_hat = prob.V.b0 + solve3(H, moment);
    est.discrepancy = norm(est.x_hat - rec.x_peak);
    return est;
}

}  // namespace spse
