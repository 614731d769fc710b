#pragma once

#include <map>
#include <string>

#include "spse/solver.hpp"

namespace spse {

/// Term-by-term evaluation of the local Pohozaev identity on B_d(x_peak),
/// original-frame coordinates. `residual` is lhs minus the sum of the
/// right-hand terms; `boundary_terms` holds the five surface integrals.
struct PohozaevReport {
    double d = 0.0;
    int axis = 0;
    double lhs = 0.0;
    std::map<std::string, double> boundary_terms;
    double nonlocal_bulk = 0.0;
    // Sum of the five surface terms plus the nonlocal bulk term; for a true
    // solution both this and lhs decay like exp(-tau sqrt(lambda)).
    double rhs_total = 0.0;
    double residual = 0.0;  // lhs - rhs_total
};

struct PohozaevOptions {
    std::size_t n_theta = 24;  // Gauss-Legendre nodes in cos(theta)
    std::size_t n_phi = 48;    // uniform azimuthal nodes (must stay even)
};

PohozaevReport evaluate_identity(const SolutionRecord& rec, double d, int axis,
                                 const PohozaevOptions& opt = {});

/// The antisymmetric-kernel bulk term restricted to B_d x box, or integrated
/// over box x box when full_space is set (where it cancels to rounding).
double nonlocal_bulk_term(const SolutionRecord& rec, double d, int axis, bool full_space = false);

struct PeakEstimate {
    bool defined = false;  // false when grad V vanishes identically
    Vec3 x_hat{0, 0, 0};
    double discrepancy = 0.0;  // | x_hat - x_peak |
};

/// Pohozaev-refined peak location: the u^p-weighted mean of grad V inside the
/// ball, pushed through the inverse Hessian at b0.
PeakEstimate peak_location_estimate(const SolutionRecord& rec, double d);

}  // namespace spse
