#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spse/groundstate.hpp"
#include "spse/potentials.hpp"
#include "spse/solver.hpp"

namespace spse {

/// How f(lambda) = ||u_lambda||_{L2}^2 / a is evaluated: through the full
/// Newton pipeline, or by the exact scaling closed form (valid when gamma = 0
/// and V is constant; used as the algebraic oracle).
enum class MassEval { Solver, ClosedForm };

struct MassCurvePoint {
    double lambda = 0.0;
    double f_value = 0.0;
    bool solved = false;
    std::string error;  // set when the solver failed at this lambda
    // summary of the underlying record
    double mass = 0.0;
    double residual = 0.0;
    double correction_norm = 0.0;
    int newton_iters = 0;
    Vec3 x_peak{0, 0, 0};
};

struct MatchResult {
    double lambda_eps = 0.0;
    double f_at_root = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    std::string case_tag;  // "i" or "ii"
};

struct MassProblem {
    double eps = 0.0;
    int sign = +1;          // p = 10/3 + sign*eps
    double a = 0.0;         // target mass
    Potential V;
    Grid3D box;
    bool poisson_on = true;
    MassEval eval = MassEval::Solver;
    NewtonOptions newton;

    double p() const { return 10.0 / 3.0 + double(sign) * eps; }
};

/// Evaluate f over the lambda ladder. Per-point solver failures are recorded
/// and skipped, not fatal. Points come back sorted by lambda. Warm-starts
/// each solve from the previous converged profile.
std::vector<MassCurvePoint> mass_curve(const MassProblem& prob, const GroundState& qp,
                                       std::vector<double> lambdas);

/// Continuity heuristic: true when adjacent curve points jump by more than 25%.
bool discontinuity_flag(const std::vector<MassCurvePoint>& curve);

struct MatchOptions {
    double f_tol = 1e-6;        // stop when |f - 1| drops below this...
    double lambda_rel_tol = 1e-9;  // ...and the bracket is this tight
    int max_bisections = 200;
};

/// Bisection for f(lambda_eps) = 1 inside [lo, hi]; requires a sign change.
MatchResult match_mass(const MassProblem& prob, const GroundState& qp, double lambda_lo,
                       double lambda_hi, const MatchOptions& opt = {});

/// Scan powers of two around lambda_guess for a sign change of f - 1.
std::pair<double, double> scan_bracket(const MassProblem& prob, const GroundState& qp,
                                       double lambda_guess, int max_doublings = 8);

/// The theorem's multiplier window (exp((4/9eps) ln r), exp((16/9eps) ln r))
/// with r = V0^{-3/2} a_*/a for case i and r = V0^{3/2} a/a_* for case ii.
std::pair<double, double> theorem_bracket(double eps, double a, double V0, double a_star,
                                          const std::string& case_tag);

/// Generic bisection on a scalar function (used by the toy closed-form tests).
double bisect_scalar(const std::function<double(double)>& f, double lo, double hi, double tol,
                     int max_iter = 200);

}  // namespace spse
