#pragma once

#include <optional>

#include "spse/grid.hpp"

namespace spse {

/// Coulomb potential Phi = |x|^{-1} * rho of a nonnegative charge density.
struct HartreePotential {
    std::optional<RadialField> radial;
    std::optional<ScalarField3D> box;
    double total_charge = 0.0;
    double far_field_coeff = 0.0;  // r * Phi(r) at the outer boundary
};

/// Closed-form Newton potential of a radial charge:
/// Phi(r) = 4 pi [ (1/r) int_0^r s^2 rho ds + int_r^inf s rho ds ].
HartreePotential radial_newton_potential(const RadialField& rho);

enum class PoissonMethod {
    CG,      // Jacobi-preconditioned conjugate gradients
    Direct,  // tensor sine-transform diagonalization (same operator, exact)
};

/// Solves -Delta Phi = 4 pi rho on the box with the monopole Dirichlet value
/// M/|x| on the faces, using a fourth-order compact (Mehrstellen) operator.
HartreePotential poisson_solve_3d(const ScalarField3D& rho,
                                  PoissonMethod method = PoissonMethod::CG,
                                  double cg_rel_tol = 1e-8);

/// Low-level entry: solve the Mehrstellen system for arbitrary right-hand
/// side 4 pi rho with boundary values boundary_coeff/|x| (no positivity
/// checks; rho may be signed). Used by the Newton solver's Jacobian.
ScalarField3D poisson_core(const ScalarField3D& rho, double boundary_coeff,
                           PoissonMethod method, double cg_rel_tol);

/// int (|x|^{-1} * U^2) U dU/dx_j over the box; vanishes for U radial about
/// a grid-node center.
double coulomb_symmetry_integral(const RadialField& U, const Grid3D& box, const Vec3& x0, int axis);
double coulomb_symmetry_integral(const ScalarField3D& U, int axis);

/// Coulomb self-energy D(u) = int Phi_{u^2} u^2.
double coulomb_energy(const RadialField& u);
double coulomb_energy(const ScalarField3D& u, PoissonMethod method = PoissonMethod::CG);

}  // namespace spse
