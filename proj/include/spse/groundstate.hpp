#pragma once

#include "spse/grid.hpp"

namespace spse {

/// Radial positive ground state of -Delta Q + Q = Q^{p-1} on R^3.
struct GroundState {
    double p = 0.0;
    RadialField profile;           // Q(r) on a uniform grid
    RadialField derivative;        // Q'(r), kept for accurate H1 quadrature
    double center_value = 0.0;     // Q(0), the shooting parameter
    double mass = 0.0;             // int_{R^3} Q^2
    double decay_rate = 0.0;       // fitted exponential rate of the tail
    double residual_sup = 0.0;     // step-halving error estimate of the solve
};

struct ShootingOptions {
    double r_max = 30.0;
    double step = 0.003;
    double tail_threshold = 1e-10;  // |Q| below this counts as decayed
    double graft_value = 1e-6;      // switch to the |x|^{-1} e^{-|x|} tail here
    double bracket_lo = 1.0;
    double bracket_hi = 50.0;
};

/// Shooting solve with bisection on Q(0). Throws SolverError when no bracket
/// exists in (1, 50) and InvalidInput for out-of-range p or tol.
GroundState solve_ground_state(double p, double r_max, double tol);
GroundState solve_ground_state(double p, double tol, const ShootingOptions& opt);

/// Outcome of one outward integration at a trial center value.
enum class ShotOutcome { Crossed, BlewBack, Decayed };

/// Classify the dichotomy for a trial Q(0); exposed for the monotonicity test.
ShotOutcome classify_shot(double p, double q0, const ShootingOptions& opt);

/// L2 mass of the scaled profile (lambda/V0)^{1/(p-2)} Q_p(sqrt(lambda) x):
/// (lambda/V0)^{2/(p-2)} lambda^{-3/2} mass(Q_p).
double mass_of_scaled(const GroundState& gs, double lambda, double V0);

/// H1 distance of two ground-state profiles, linear interpolation onto the
/// finer grid.
double h1_distance(const GroundState& a, const GroundState& b);

/// Least-squares slope of -log Q(r) - log r over [r_lo, r_hi]; rate 1 for the
/// exact e^{-r}/r tail.
double decay_fit(const GroundState& gs, double r_lo, double r_hi);
double decay_fit(const RadialField& f, double r_lo, double r_hi);

}  // namespace spse
