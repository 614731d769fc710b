#include "spse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "spse/detsum.hpp"
#include "spse/errors.hpp"
#include "spse/hartree.hpp"
#include "spse/operators.hpp"
#include "spse/quadrature.hpp"

namespace spse {

namespace {

inline double pow_pos(double v, double e) { return v > 0.0 ? std::pow(v, e) : 0.0; }

// All solver linear algebra lives on interior nodes; boundary values stay 0.
struct Work {
    const Grid3D& g;
    explicit Work(const Grid3D& grid) : g(grid) {}

    std::size_t n() const { return g.n; }

    double inner(const std::vector<double>& a, const std::vector<double>& b) const {
        return pairwise_dot(a, b);
    }
};

// 7-point -Delta + identity-free part: out = -Delta_h v on the interior.
void apply_neg_lap(const Grid3D& g, const std::vector<double>& v, std::vector<double>& out) {
    const std::size_t n = g.n;
    const double ih2 = 1.0 / (g.h() * g.h());
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const std::size_t base = (k * n + j) * n;
            const std::size_t up = base + n, dn = base - n;
            const std::size_t fw = base + n * n, bw = base - n * n;
            for (std::size_t i = 1; i + 1 < n; ++i)
                out[base + i] = ih2 * (6.0 * v[base + i] - v[base + i - 1] - v[base + i + 1] -
                                       v[dn + i] - v[up + i] - v[bw + i] - v[fw + i]);
        }
}

ScalarField3D wrap(const Grid3D& g, std::vector<double> vals) {
    return ScalarField3D(g, std::move(vals));
}

// Hartree potential of the (signed) density rho in the rescaled frame,
// monopole Dirichlet boundary.
std::vector<double> hartree_of(const Grid3D& g, const std::vector<double>& rho) {
    ScalarField3D f(g);
    f.values = rho;
    const double m = integrate_3d(f);
    return poisson_core(f, m, PoissonMethod::Direct, 0.0).values;
}

struct Operator {
    const RescaledProblem& prob;
    // frozen at the current Newton iterate:
    std::vector<double> phi;       // |y|^{-1} * v^2 (empty when gamma = 0)
    std::vector<double> diag_nl;   // (p-1) W v^{p-2}
    std::vector<double> vref;      // the iterate itself

    void refresh(const std::vector<double>& v) {
        vref = v;
        const std::size_t N = v.size();
        diag_nl.assign(N, 0.0);
        for (std::size_t t = 0; t < N; ++t)
            diag_nl[t] = (prob.p - 1.0) * prob.W.values[t] * pow_pos(v[t], prob.p - 2.0);
        if (prob.gamma != 0.0) {
            std::vector<double> rho(N);
            for (std::size_t t = 0; t < N; ++t) rho[t] = v[t] * v[t];
            phi = hartree_of(prob.box, rho);
        }
    }

    // J w = -Delta w + w + gamma (phi w + 2 (|y|^{-1} * (v w)) v) - (p-1) W v^{p-2} w
    void apply(const std::vector<double>& w, std::vector<double>& out) const {
        apply_neg_lap(prob.box, w, out);
        const std::size_t n = prob.box.n;
        std::vector<double> psi;
        if (prob.gamma != 0.0) {
            std::vector<double> vw(w.size());
            for (std::size_t t = 0; t < w.size(); ++t) vw[t] = vref[t] * w[t];
            psi = hartree_of(prob.box, vw);
        }
        for (std::size_t k = 1; k + 1 < n; ++k)
            for (std::size_t j = 1; j + 1 < n; ++j)
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    const std::size_t t = prob.box.idx(i, j, k);
                    double acc = out[t] + w[t] - diag_nl[t] * w[t];
                    if (prob.gamma != 0.0)
                        acc += prob.gamma * (phi[t] * w[t] + 2.0 * psi[t] * vref[t]);
                    out[t] = acc;
                }
        // keep boundary slots zero
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    if (i == 0 || i == n - 1 || j == 0 || j == n - 1 || k == 0 || k == n - 1)
                        out[prob.box.idx(i, j, k)] = 0.0;
    }
};

// Nonlinear residual; phi is recomputed for the trial point.
void eval_F(const RescaledProblem& prob, const std::vector<double>& v, std::vector<double>& out) {
    apply_neg_lap(prob.box, v, out);
    const std::size_t n = prob.box.n;
    std::vector<double> phi;
    if (prob.gamma != 0.0) {
        std::vector<double> rho(v.size());
        for (std::size_t t = 0; t < v.size(); ++t) rho[t] = v[t] * v[t];
        phi = hartree_of(prob.box, rho);
    }
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const std::size_t t = prob.box.idx(i, j, k);
                double acc = out[t] + v[t] - prob.W.values[t] * pow_pos(v[t], prob.p - 1.0);
                if (prob.gamma != 0.0) acc += prob.gamma * phi[t] * v[t];
                out[t] = acc;
            }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (i == 0 || i == n - 1 || j == 0 || j == n - 1 || k == 0 || k == n - 1)
                    out[prob.box.idx(i, j, k)] = 0.0;
}

double weighted_l2(const Grid3D& g, const std::vector<double>& f) {
    const double w = g.h() * g.h() * g.h();
    return std::sqrt(w * pairwise_dot(f, f));
}

// Textbook MINRES for the symmetric (possibly indefinite) Newton system.
// Returns the achieved relative residual.
double minres(const Operator& op, const std::vector<double>& b, std::vector<double>& x,
              double rel_tol, int max_iters) {
    const std::size_t N = b.size();
    x.assign(N, 0.0);
    std::vector<double> r = b;
    const double beta1 = std::sqrt(pairwise_dot(r, r));
    if (beta1 == 0.0) return 0.0;

    std::vector<double> v_prev(N, 0.0), v = r, v_next(N), w0(N, 0.0), w1(N, 0.0), tmp(N);
    for (std::size_t t = 0; t < N; ++t) v[t] /= beta1;
    double beta = beta1;
    double eta = beta1;
    double c_old = 1.0, c = 1.0, s_old = 0.0, s = 0.0;
    double rnorm = beta1;

    for (int it = 0; it < max_iters; ++it) {
        op.apply(v, v_next);
        const double alpha = pairwise_dot(v, v_next);
        for (std::size_t t = 0; t < N; ++t) v_next[t] -= alpha * v[t] + beta * v_prev[t];
        const double beta_next = std::sqrt(pairwise_dot(v_next, v_next));

        // two Givens rotations fold the new column of the tridiagonal
        const double delta = c * alpha - c_old * s * beta;
        const double rho2 = s * alpha + c_old * c * beta;
        const double rho3 = s_old * beta;
        const double rho1 = std::hypot(delta, beta_next);
        const double c_next = delta / rho1;
        const double s_next = beta_next / rho1;

        for (std::size_t t = 0; t < N; ++t) tmp[t] = (v[t] - rho3 * w0[t] - rho2 * w1[t]) / rho1;
        for (std::size_t t = 0; t < N; ++t) x[t] += c_next * eta * tmp[t];
        rnorm *= std::abs(s_next);
        eta = -s_next * eta;

        w0 = w1;
        w1 = tmp;
        v_prev = v;
        if (beta_next < 1e-300) break;
        for (std::size_t t = 0; t < N; ++t) v[t] = v_next[t] / beta_next;
        beta = beta_next;
        c_old = c;
        c = c_next;
        s_old = s;
        s = s_next;
        if (rnorm <= rel_tol * beta1) break;
    }
    return rnorm / beta1;
}

Vec3 quadratic_peak_fit(const ScalarField3D& v) {
    const Grid3D& g = v.grid;
    const std::size_t n = g.n;
    std::size_t bi = 1, bj = 1, bk = 1;
    double best = -1e300;
    for (std::size_t k = 1; k + 1 < n; ++k)
        for (std::size_t j = 1; j + 1 < n; ++j)
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (v.at(i, j, k) > best) {
                    best = v.at(i, j, k);
                    bi = i;
                    bj = j;
                    bk = k;
                }
    // Least-squares quadratic on the 3^3 neighborhood, then its critical point.
    // Basis: 1, x, y, z, x^2, y^2, z^2, xy, xz, yz in units of h.
    double ATA[10][10] = {};
    double ATb[10] = {};
    for (int dk = -1; dk <= 1; ++dk)
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const double val = v.at(bi + di, bj + dj, bk + dk);
                const double b[10] = {1.0,
                                      double(di),
                                      double(dj),
                                      double(dk),
                                      double(di * di),
                                      double(dj * dj),
                                      double(dk * dk),
                                      double(di * dj),
                                      double(di * dk),
                                      double(dj * dk)};
                for (int a = 0; a < 10; ++a) {
                    ATb[a] += b[a] * val;
                    for (int bcol = 0; bcol < 10; ++bcol) ATA[a][bcol] += b[a] * b[bcol];
                }
            }
    // Gaussian elimination with partial pivoting.
    double M[10][11];
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 10; ++c) M[r][c] = ATA[r][c];
        M[r][10] = ATb[r];
    }
    for (int col = 0; col < 10; ++col) {
        int piv = col;
        for (int r = col + 1; r < 10; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        for (int c = 0; c <= 10; ++c) std::swap(M[col][c], M[piv][c]);
        for (int r = col + 1; r < 10; ++r) {
            const double f = M[r][col] / M[col][col];
            for (int c = col; c <= 10; ++c) M[r][c] -= f * M[col][c];
        }
    }
    double coef[10];
    for (int r = 9; r >= 0; --r) {
        double acc = M[r][10];
        for (int c = r + 1; c < 10; ++c) acc -= M[r][c] * coef[c];
        coef[r] = acc / M[r][r];
    }
    const Vec3 grad{coef[1], coef[2], coef[3]};
    Mat3 hess{{{2.0 * coef[4], coef[7], coef[8]},
               {coef[7], 2.0 * coef[5], coef[9]},
               {coef[8], coef[9], 2.0 * coef[6]}}};
    Vec3 delta{0.0, 0.0, 0.0};
    try {
        delta = solve3(hess, {-grad[0], -grad[1], -grad[2]});
    } catch (const InvalidInput&) {
        // flat top: keep the node itself
    }
    for (int d = 0; d < 3; ++d) delta[d] = std::clamp(delta[d], -1.0, 1.0);
    const double h = g.h();
    return {g.coord(bi) + h * delta[0], g.coord(bj) + h * delta[1], g.coord(bk) + h * delta[2]};
}

}  // namespace

double coupling_gamma(double lambda, double p, double V0) {
    return std::pow(V0, -2.0 / (p - 2.0)) * std::pow(lambda, 2.0 / (p - 2.0) - 2.0);
}

RescaledProblem build_rescaled(double lambda, double p, const Potential& V, const Vec3& x0,
                               const Grid3D& box, bool poisson_on) {
    if (!(lambda > 0.0)) throw InvalidInput("build_rescaled: lambda must be positive");
    if (!(p > 2.0 && p < 6.0)) throw InvalidInput("build_rescaled: p outside (2,6)");
    if (box.h() > 0.4) throw InvalidInput("grid too coarse for lambda");
    RescaledProblem prob;
    prob.lambda = lambda;
    prob.p = p;
    prob.V = V;
    prob.x0 = x0;
    prob.box = box;
    prob.poisson_on = poisson_on;
    prob.gamma = poisson_on ? coupling_gamma(lambda, p, V.V0) : 0.0;
    prob.W = ScalarField3D(box);
    const double isq = 1.0 / std::sqrt(lambda);
    for (std::size_t k = 0; k < box.n; ++k)
        for (std::size_t j = 0; j < box.n; ++j)
            for (std::size_t i = 0; i < box.n; ++i) {
                const Vec3 x = x0 + isq * box.point(i, j, k);
                prob.W.at(i, j, k) = V.eval(x) / V.V0;
            }
    return prob;
}

ScalarField3D residual_field(const RescaledProblem& prob, const ScalarField3D& v) {
    std::vector<double> F(v.values.size());
    eval_F(prob, v.values, F);
    return wrap(prob.box, std::move(F));
}

double residual_l2(const RescaledProblem& prob, const ScalarField3D& v) {
    std::vector<double> F(v.values.size());
    eval_F(prob, v.values, F);
    return weighted_l2(prob.box, F);
}

SolutionRecord newton_solve(const RescaledProblem& prob, const GroundState& qp,
                            const NewtonOptions& opt, const ScalarField3D* start) {
    if (std::abs(qp.p - prob.p) > 1e-12)
        throw InvalidInput("newton_solve: ground state exponent does not match problem");
    const Grid3D& g = prob.box;
    const std::size_t N = g.size();

    std::vector<double> v;
    if (start) {
        if (start->grid.n != g.n) throw InvalidInput("newton_solve: start field grid mismatch");
        v = start->values;
    } else {
        // Center the ansatz at the declared critical point of V; that is
        // where the reduced equation wants the peak.
        Vec3 yc = std::sqrt(prob.lambda) * (prob.V.b0 - prob.x0);
        for (int d = 0; d < 3; ++d) yc[d] = std::clamp(yc[d], -0.25 * g.L, 0.25 * g.L);
        v = sample_radial(qp.profile, g, yc).values;
    }
    // Dirichlet boundary
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t j = 0; j < g.n; ++j)
            for (std::size_t i = 0; i < g.n; ++i)
                if (i == 0 || i == g.n - 1 || j == 0 || j == g.n - 1 || k == 0 || k == g.n - 1)
                    v[g.idx(i, j, k)] = 0.0;

    std::vector<double> F(N), Fnew(N), delta(N), trial(N);
    eval_F(prob, v, F);
    double rnorm = weighted_l2(g, F);
    Operator op{prob, {}, {}, {}};

    int iters = 0;
    while (rnorm >= opt.tol) {
        if (iters >= opt.max_iters) {
            std::ostringstream msg;
            msg << "newton stalled: residual " << rnorm << " after " << iters << " iterations";
            throw SolverError(msg.str());
        }
        op.refresh(v);
        std::vector<double> rhs(N);
        for (std::size_t t = 0; t < N; ++t) rhs[t] = -F[t];
        const double lin_rel = minres(op, rhs, delta, opt.krylov_rel_tol, opt.krylov_max_iters);
        if (std::getenv("SPSE_TRACE")) {
            std::vector<double> check(N);
            op.apply(delta, check);
            double num = 0.0, den = 0.0;
            for (std::size_t t = 0; t < N; ++t) {
                num += (check[t] - rhs[t]) * (check[t] - rhs[t]);
                den += rhs[t] * rhs[t];
            }
            std::fprintf(stderr, "  [newton] minres reported %.3e, true linear rel %.3e\n",
                         lin_rel, std::sqrt(num / den));
        }

        double t_step = 1.0;
        bool accepted = false;
        bool positivity_blocked = false;
        double vsup = 0.0;
        for (double val : v) vsup = std::max(vsup, std::abs(val));
        // Negative excursions below this are transient tail noise (the
        // amplitude scale is vsup ~ Q(0)) and get clamped; anything deeper
        // counts as leaving the cone.
        const double floor = 1e-5 * std::max(1.0, vsup);
        static const bool trace = std::getenv("SPSE_TRACE") != nullptr;
        for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
            for (std::size_t t = 0; t < N; ++t) trial[t] = v[t] + t_step * delta[t];
            double vmin = 0.0;
            for (double& val : trial) {
                if (val < 0.0 && val > -floor) val = 0.0;
                vmin = std::min(vmin, val);
            }
            if (vmin < -floor) {
                if (trace)
                    std::fprintf(stderr, "  [newton %d] t=%.3g rejected: vmin=%.3e floor=%.3e\n",
                                 iters, t_step, vmin, floor);
                positivity_blocked = true;
                t_step *= 0.5;
                continue;
            }
            eval_F(prob, trial, Fnew);
            const double rnew = weighted_l2(g, Fnew);
            if (trace)
                std::fprintf(stderr, "  [newton %d] t=%.3g residual %.6e -> %.6e\n", iters, t_step,
                             rnorm, rnew);
            if (rnew < rnorm) {
                v.swap(trial);
                F.swap(Fnew);
                rnorm = rnew;
                accepted = true;
                positivity_blocked = false;
                break;
            }
            t_step *= 0.5;
        }
        ++iters;
        if (!accepted) {
            if (positivity_blocked) throw SolverError("left positive cone");
            std::ostringstream msg;
            msg << "newton stalled: best residual " << rnorm << " after " << iters << " iterations";
            throw SolverError(msg.str());
        }
    }

    // The zero field also solves the discrete equation; a converged iterate
    // that lost its peak is not a point of the single-peak branch.
    double vsup_final = 0.0;
    for (double val : v) vsup_final = std::max(vsup_final, val);
    if (vsup_final < 0.02 * qp.center_value)
        throw SolverError("converged to the trivial branch");

    SolutionRecord rec;
    rec.problem = prob;
    rec.v = wrap(g, std::move(v));
    rec.residual_l2 = rnorm;
    rec.newton_iters = iters;

    const Vec3 y_peak = quadratic_peak_fit(rec.v);
    if (norm(y_peak) >= 0.5 * g.L) throw SolverError("newton_solve: peak left the box core");
    rec.x_peak = prob.x0 + (1.0 / std::sqrt(prob.lambda)) * y_peak;
    rec.u_mass = mass_in_original_frame(rec);

    // || u - U_{x_peak,p} ||_lambda via the rescaled H1 norm of v - Q(|y - y_peak|).
    ScalarField3D w(g);
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t j = 0; j < g.n; ++j)
            for (std::size_t i = 0; i < g.n; ++i) {
                const Vec3 y = g.point(i, j, k);
                w.at(i, j, k) = rec.v.at(i, j, k) - qp.profile.interp(norm(y - y_peak));
            }
    const double h1 = norms(w, 1.0).h1;
    rec.correction_norm = std::pow(prob.lambda / prob.V.V0, 1.0 / (prob.p - 2.0)) *
                          std::pow(prob.lambda, -0.25) * h1;
    return rec;
}

double mass_in_original_frame(const SolutionRecord& rec) {
    ScalarField3D sq(rec.problem.box);
    for (std::size_t t = 0; t < sq.values.size(); ++t)
        sq.values[t] = rec.v.values[t] * rec.v.values[t];
    const double m_resc = integrate_3d(sq);
    const double lam = rec.problem.lambda;
    return std::pow(lam / rec.problem.V.V0, 2.0 / (rec.problem.p - 2.0)) * std::pow(lam, -1.5) *
           m_resc;
}

Vec3 reduced_gradient(const SolutionRecord& rec) { return rec.problem.V.grad(rec.x_peak); }

double refined_residual(const SolutionRecord& rec) {
    const Grid3D& g = rec.problem.box;
    const Grid3D fine(g.L, 2 * g.n - 1);
    ScalarField3D vf(fine);
    // Separable cubic (Catmull-Rom style via 4-point Lagrange on the coarse grid).
    const std::size_t n = g.n;
    auto interp1 = [&](const std::vector<double>& line, double s) {
        std::ptrdiff_t i0 = std::ptrdiff_t(s) - 1;
        i0 = std::clamp<std::ptrdiff_t>(i0, 0, std::ptrdiff_t(n) - 4);
        const double t = s - double(i0);
        double out = 0.0;
        for (int kk = 0; kk < 4; ++kk) {
            double lk = 1.0;
            for (int m = 0; m < 4; ++m)
                if (m != kk) lk *= (t - double(m)) / double(kk - m);
            out += lk * line[std::size_t(i0 + kk)];
        }
        return out;
    };
    // interpolate axis by axis
    const std::size_t nf = fine.n;
    std::vector<double> pass1(nf * n * n), pass2(nf * nf * n);
    std::vector<double> line(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) line[i] = rec.v.at(i, j, k);
            for (std::size_t i = 0; i < nf; ++i)
                pass1[(k * n + j) * nf + i] = interp1(line, double(i) * 0.5);
        }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < nf; ++i) {
            for (std::size_t j = 0; j < n; ++j) line[j] = pass1[(k * n + j) * nf + i];
            for (std::size_t j = 0; j < nf; ++j)
                pass2[(k * nf + j) * nf + i] = interp1(line, double(j) * 0.5);
        }
    for (std::size_t j = 0; j < nf; ++j)
        for (std::size_t i = 0; i < nf; ++i) {
            for (std::size_t k = 0; k < n; ++k) line[k] = pass2[(k * nf + j) * nf + i];
            for (std::size_t k = 0; k < nf; ++k)
                vf.values[(k * nf + j) * nf + i] = interp1(line, double(k) * 0.5);
        }
    RescaledProblem pf = build_rescaled(rec.problem.lambda, rec.problem.p, rec.problem.V,
                                        rec.problem.x0, fine, rec.problem.poisson_on);
    return residual_l2(pf, vf);
}

MultistartReport multistart_uniqueness_probe(const RescaledProblem& prob, const GroundState& qp,
                                             int k, double noise, std::uint64_t seed,
                                             const NewtonOptions& opt) {
    if (k < 3) throw InvalidInput("multistart_uniqueness_probe: need k >= 3");
    MultistartReport rep;
    rep.requested = k;
    Vec3 yc = std::sqrt(prob.lambda) * (prob.V.b0 - prob.x0);
    for (int d = 0; d < 3; ++d) yc[d] = std::clamp(yc[d], -0.25 * prob.box.L, 0.25 * prob.box.L);
    const ScalarField3D base = sample_radial(qp.profile, prob.box, yc);
    std::vector<ScalarField3D> sols;
    for (int s = 0; s < k; ++s) {
        ScalarField3D start = base;
        SplitMix64 rng(seed + std::uint64_t(s) * 0x9e3779b97f4a7c15ull);
        for (double& val : start.values) val *= 1.0 + noise * rng.sym();
        try {
            SolutionRecord rec = newton_solve(prob, qp, opt, &start);
            sols.push_back(rec.v);
            ++rep.converged;
        } catch (const SolverError&) {
            rep.failed_starts.push_back(s);
        }
    }
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = a + 1; b < sols.size(); ++b) {
            double d = 0.0;
            for (std::size_t t = 0; t < sols[a].values.size(); ++t)
                d = std::max(d, std::abs(sols[a].values[t] - sols[b].values[t]));
            rep.pairwise_sup.push_back(d);
            rep.max_pairwise_sup = std::max(rep.max_pairwise_sup, d);
        }
    return rep;
}

}  // namespace spse
