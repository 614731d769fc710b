#include "spse/groundstate.hpp"

#include <algorithm>
#include <cmath>

#include "spse/errors.hpp"
#include "spse/quadrature.hpp"

namespace spse {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct State {
    double q;
    double qp;
};

// Right-hand side of the first-order system for Q'' + (2/r)Q' - Q + Q^{p-1} = 0.
inline State rhs(double p, double r, const State& s) {
    const double nl = s.q > 0.0 ? std::pow(s.q, p - 1.0) : -std::pow(-s.q, p - 1.0);
    double qpp;
    if (r < 1e-12)
        qpp = (s.q - nl) / 3.0;  // symmetric limit at the origin
    else
        qpp = s.q - nl - 2.0 / r * s.qp;
    return {s.qp, qpp};
}

inline State rk4_step(double p, double r, const State& s, double h) {
    const State k1 = rhs(p, r, s);
    const State s2{s.q + 0.5 * h * k1.q, s.qp + 0.5 * h * k1.qp};
    const State k2 = rhs(p, r + 0.5 * h, s2);
    const State s3{s.q + 0.5 * h * k2.q, s.qp + 0.5 * h * k2.qp};
    const State k3 = rhs(p, r + 0.5 * h, s3);
    const State s4{s.q + h * k3.q, s.qp + h * k3.qp};
    const State k4 = rhs(p, r + h, s4);
    return {s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
            s.qp + h / 6.0 * (k1.qp + 2.0 * k2.qp + 2.0 * k3.qp + k4.qp)};
}

struct Trajectory {
    ShotOutcome outcome;
    std::vector<double> q;    // values at multiples of `step`, valid until cut
    std::vector<double> qp;
    std::size_t cut;          // first index past which the trajectory is unreliable
};

Trajectory integrate(double p, double q0, const ShootingOptions& opt, bool record) {
    const std::size_t n = std::size_t(std::llround(opt.r_max / opt.step)) + 1;
    Trajectory t;
    t.outcome = ShotOutcome::Decayed;
    if (record) {
        t.q.assign(n, 0.0);
        t.qp.assign(n, 0.0);
    }
    State s{q0, 0.0};
    t.cut = n - 1;
    if (record) {
        t.q[0] = s.q;
        t.qp[0] = s.qp;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double r = double(i) * opt.step;
        s = rk4_step(p, r, s, opt.step);
        if (record) {
            t.q[i + 1] = s.q;
            t.qp[i + 1] = s.qp;
        }
        if (s.q <= 0.0) {
            t.outcome = ShotOutcome::Crossed;
            t.cut = i;
            return t;
        }
        if (s.qp > 0.0) {
            // Turning back up above the tail floor is a genuine blow-back;
            // below it the trajectory is separatrix-grade and counts as decayed.
            t.outcome = s.q > opt.tail_threshold ? ShotOutcome::BlewBack : ShotOutcome::Decayed;
            t.cut = i;
            return t;
        }
    }
    return t;
}

double bisect_center(double p, const ShootingOptions& opt) {
    // Scan upward for the first crossing; the last blow-back bounds from below.
    double lo = opt.bracket_lo * 1.05, hi = 0.0, probe = lo;
    bool have_lo = false, have_hi = false;
    while (probe < opt.bracket_hi) {
        const auto out = integrate(p, probe, opt, false).outcome;
        if (out == ShotOutcome::Crossed) {
            hi = probe;
            have_hi = true;
            break;
        }
        lo = probe;
        have_lo = true;
        probe *= 1.25;
    }
    if (!have_lo || !have_hi) throw SolverError("no ground state bracket");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto out = integrate(p, mid, opt, false).outcome;
        if (out == ShotOutcome::Crossed)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Build the full-profile field: integrated trajectory up to the graft point,
// A e^{-r}/r beyond it. The Yukawa tail solves the linearized equation
// exactly, so the grafted region carries no extra ODE residual.
void build_profile(double p, double q0, const ShootingOptions& opt, RadialField& prof,
                   RadialField& deriv) {
    const Trajectory t = integrate(p, q0, opt, true);
    const std::size_t n = prof.grid.n_nodes;
    std::size_t graft = t.cut;
    for (std::size_t i = 1; i <= t.cut; ++i) {
        if (t.q[i] < opt.graft_value) {
            graft = i;
            break;
        }
    }
    const double rg = double(graft) * opt.step;
    const double A = t.q[graft] * rg * std::exp(rg);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = prof.grid.r(i);
        if (i <= graft) {
            prof.values[i] = t.q[i];
            deriv.values[i] = t.qp[i];
        } else {
            prof.values[i] = A * std::exp(-r) / r;
            deriv.values[i] = -A * std::exp(-r) * (1.0 / r + 1.0 / (r * r));
        }
    }
}

}  // namespace

ShotOutcome classify_shot(double p, double q0, const ShootingOptions& opt) {
    return integrate(p, q0, opt, false).outcome;
}

GroundState solve_ground_state(double p, double tol, const ShootingOptions& opt) {
    if (!(p > 2.0 && p < 6.0)) throw InvalidInput("solve_ground_state: p outside (2,6)");
    if (!(tol > 1e-12 && tol < 1e-4)) throw InvalidInput("solve_ground_state: tol outside (1e-12, 1e-4)");

    const double q0 = bisect_center(p, opt);

    GroundState gs;
    gs.p = p;
    gs.center_value = q0;
    const std::size_t n = std::size_t(std::llround(opt.r_max / opt.step)) + 1;
    gs.profile = RadialField(RadialGrid(opt.r_max, n));
    gs.derivative = RadialField(RadialGrid(opt.r_max, n));
    build_profile(p, q0, opt, gs.profile, gs.derivative);

    // Residual estimate by step halving: redo the whole solve (bisection
    // included) at h/2 and take the sup difference of the profiles.
    ShootingOptions fine = opt;
    fine.step = opt.step / 2.0;
    const double q0f = bisect_center(p, fine);
    const std::size_t nf = std::size_t(std::llround(fine.r_max / fine.step)) + 1;
    RadialField pf(RadialGrid(fine.r_max, nf)), df(RadialGrid(fine.r_max, nf));
    build_profile(p, q0f, fine, pf, df);
    double err = std::abs(q0 - q0f);
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(gs.profile.values[i] - pf.values[2 * i]));
    gs.residual_sup = err;
    if (!(gs.residual_sup < tol))
        throw SolverError("solve_ground_state: residual estimate above tolerance");

    {
        RadialField sq(gs.profile.grid);
        for (std::size_t i = 0; i < n; ++i) sq.values[i] = gs.profile.values[i] * gs.profile.values[i];
        gs.mass = integrate_radial(sq);
    }
    gs.decay_rate = decay_fit(gs, 0.5 * opt.r_max, 25.0 / 30.0 * opt.r_max);
    return gs;
}

GroundState solve_ground_state(double p, double r_max, double tol) {
    ShootingOptions opt;
    opt.r_max = r_max;
    return solve_ground_state(p, tol, opt);
}

double mass_of_scaled(const GroundState& gs, double lambda, double V0) {
    if (!(lambda > 0.0)) throw InvalidInput("mass_of_scaled: lambda must be positive");
    if (!(V0 > 0.0)) throw InvalidInput("mass_of_scaled: V0 must be positive");
    return std::pow(lambda / V0, 2.0 / (gs.p - 2.0)) * std::pow(lambda, -1.5) * gs.mass;
}

double h1_distance(const GroundState& a, const GroundState& b) {
    const RadialField& fine = (a.profile.grid.spacing() <= b.profile.grid.spacing()) ? a.profile : b.profile;
    const RadialField& other = (&fine == &a.profile) ? b.profile : a.profile;
    if (fine.grid.r_max > other.grid.r_max + 1e-9)
        throw InvalidInput("h1_distance: grids do not overlap");
    const std::size_t n = fine.grid.n_nodes;
    const double h = fine.grid.spacing();

    // Linear interpolation of the coarser profile onto the finer grid.
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = fine.grid.r(i);
        const double s = r / other.grid.spacing();
        const std::size_t j = std::min(std::size_t(s), other.grid.n_nodes - 2);
        const double t = s - double(j);
        const double ov = (1.0 - t) * other.values[j] + t * other.values[j + 1];
        diff[i] = fine.values[i] - ov;
    }
    std::vector<double> dsq(n), gsq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r2 = fine.grid.r(i) * fine.grid.r(i);
        dsq[i] = 4.0 * kPi * r2 * diff[i] * diff[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d = (diff[i + 1] - diff[i - 1]) / (2.0 * h);
        gsq[i] = 4.0 * kPi * fine.grid.r(i) * fine.grid.r(i) * d * d;
    }
    return std::sqrt(integrate_radial_raw(fine.grid, dsq) + integrate_radial_raw(fine.grid, gsq));
}

double decay_fit(const RadialField& f, double r_lo, double r_hi) {
    const double rmax = f.grid.r_max;
    if (!(r_lo > 0.5 * rmax - 1e-12 && r_hi < 0.95 * rmax + 1e-12 && r_lo < r_hi))
        throw InvalidInput("decay_fit: window must lie inside (0.5 r_max, 0.95 r_max)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < f.grid.n_nodes; ++i) {
        const double r = f.grid.r(i);
        if (r < r_lo || r > r_hi) continue;
        if (!(f.values[i] > 0.0)) throw InvalidInput("decay_fit: non-positive values in window");
        const double y = -std::log(f.values[i]) - std::log(r);
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
        ++m;
    }
    if (m < 3) throw InvalidInput("decay_fit: window too narrow");
    const double denom = double(m) * sxx - sx * sx;
    return (double(m) * sxy - sx * sy) / denom;
}

double decay_fit(const GroundState& gs, double r_lo, double r_hi) {
    return decay_fit(gs.profile, r_lo, r_hi);
}

}  // namespace spse
