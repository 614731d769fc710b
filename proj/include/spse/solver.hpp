#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "spse/grid.hpp"
#include "spse/groundstate.hpp"
#include "spse/potentials.hpp"

namespace spse {

/// The full equation at fixed (lambda, p) in the rescaled peak frame
/// y = sqrt(lambda)(x - x0):
///   -Delta v + v + gamma(lambda) (|y|^{-1} * v^2) v = (V(x0+y/sqrt(lambda))/V0) v^{p-1},
/// with gamma(lambda) = V0^{-2/(p-2)} lambda^{2/(p-2)-2}.
struct RescaledProblem {
    double lambda = 0.0;
    double p = 0.0;
    Potential V;
    Vec3 x0{0.0, 0.0, 0.0};
    double gamma = 0.0;
    Grid3D box;
    bool poisson_on = true;
    ScalarField3D W;  // V(x0 + y/sqrt(lambda))/V0 on the box
};

RescaledProblem build_rescaled(double lambda, double p, const Potential& V, const Vec3& x0,
                               const Grid3D& box, bool poisson_on);

/// Closed form of the rescaled Coulomb coupling.
double coupling_gamma(double lambda, double p, double V0);

struct SolutionRecord {
    RescaledProblem problem;
    ScalarField3D v;            // rescaled profile
    double u_mass = 0.0;        // int u^2 in the original frame
    Vec3 x_peak{0, 0, 0};       // arg max of u, sub-grid quadratic fit
    double correction_norm = 0.0;  // || u - U_{x_peak,p} ||_lambda
    double residual_l2 = 0.0;
    int newton_iters = 0;
};

struct NewtonOptions {
    double tol = 1e-8;          // on the h^3-weighted l2 residual
    int max_iters = 60;
    int max_backtracks = 8;
    double krylov_rel_tol = 1e-3;
    int krylov_max_iters = 600;
};

/// Damped Newton with matrix-free MINRES inner solves, started from the
/// scaled ground state (or `start` when given). Throws SolverError on
/// stagnation ("newton stalled") or loss of positivity ("left positive cone").
SolutionRecord newton_solve(const RescaledProblem& prob, const GroundState& qp,
                            const NewtonOptions& opt = {},
                            const ScalarField3D* start = nullptr);

/// Nonlinear residual of the rescaled equation for an arbitrary field.
ScalarField3D residual_field(const RescaledProblem& prob, const ScalarField3D& v);
double residual_l2(const RescaledProblem& prob, const ScalarField3D& v);

/// Residual of the record's profile re-evaluated on a once-refined grid
/// (cubic interpolation); discretization, not the solver, dominates it.
double refined_residual(const SolutionRecord& rec);

/// grad V at the located peak; the reduced finite-dimensional equation.
Vec3 reduced_gradient(const SolutionRecord& rec);

/// int u^2 in the original frame from the rescaled profile.
double mass_in_original_frame(const SolutionRecord& rec);

struct MultistartReport {
    int requested = 0;
    int converged = 0;
    std::vector<int> failed_starts;
    double max_pairwise_sup = 0.0;
    std::vector<double> pairwise_sup;  // row-major upper triangle
};

/// Runs newton_solve from k perturbed copies of the ground-state guess
/// (relative noise, deterministic stream from `seed`).
MultistartReport multistart_uniqueness_probe(const RescaledProblem& prob, const GroundState& qp,
                                             int k, double noise, std::uint64_t seed,
                                             const NewtonOptions& opt = {});

/// splitmix64; the project's only random stream.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// uniform in [-1, 1]
    double sym() { return double(next() >> 11) * (2.0 / 9007199254740992.0) - 1.0; }
};

}  // namespace spse
