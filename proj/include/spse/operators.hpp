#pragma once

#include "spse/grid.hpp"

namespace spse {

/// L2, H1, lambda-weighted and sup norms of a field; the lambda norm is
/// (int |grad u|^2 + lambda u^2)^{1/2}.
struct NormPack {
    double l2 = 0.0;
    double h1 = 0.0;
    double lambda_norm = 0.0;
    double sup = 0.0;
};

/// Seven-point discrete Laplacian, second order. Boundary nodes of the output
/// are set to zero; callers that care about the boundary must handle it.
ScalarField3D laplacian(const ScalarField3D& u);

/// Radial Laplacian u'' + (2/r) u', with the symmetric limit 3 u''(0) at the
/// origin. One-sided second-order stencil at r_max.
RadialField laplacian_radial(const RadialField& u);

/// Centered-difference gradient component along axis `axis` (0,1,2);
/// one-sided second order at the faces.
ScalarField3D gradient_component(const ScalarField3D& u, int axis);

NormPack norms(const ScalarField3D& u, double lambda);
NormPack norms(const RadialField& u, double lambda);

}  // namespace spse
