#pragma once

#include "spse/grid.hpp"

namespace spse {

/// Integral over R^3 of a radial field: 4 pi * int r^2 f(r) dr, composite
/// Simpson (3/8 tail when the segment count is odd). Exact to rounding when
/// r^2 f(r) is a cubic in r.
double integrate_radial(const RadialField& f);

/// Same weights applied to an externally supplied integrand g(r) (already
/// including any r^2 factors); plain 1D integral on the radial grid.
double integrate_radial_raw(const RadialGrid& grid, const std::vector<double>& g);

/// Cumulative integral C[i] = int_0^{r_i} g dr, fourth order (local cubic).
std::vector<double> cumulative_integral(const RadialGrid& grid, const std::vector<double>& g);

/// Trapezoid-rule integral of a box field over the box.
double integrate_3d(const ScalarField3D& f);

/// Trapezoid-weighted inner product of two fields on the same grid.
double inner_3d(const ScalarField3D& a, const ScalarField3D& b);

}  // namespace spse
