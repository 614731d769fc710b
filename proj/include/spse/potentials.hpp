#pragma once

#include <string>

#include "spse/grid.hpp"

namespace spse {

enum class PotentialKind { Constant, QuadraticWell, GaussianBump };

/// External potential with an analytic gradient and Hessian and a declared
/// critical point b0. Kinds:
///   constant        V = V0
///   quadratic_well  V = V0 + well * |x-b0|^2
///   gaussian_bump   V = base + amp * exp(-|x-b0|^2/sigma^2), amp>0 puts a
///                   nondegenerate maximum at b0, amp<0 a minimum
struct Potential {
    PotentialKind kind = PotentialKind::Constant;
    Vec3 b0{0.0, 0.0, 0.0};
    double V0 = 1.0;
    double well = 1.0;    // quadratic_well coefficient
    double base = 1.0;    // gaussian_bump offset
    double amp = 1.0;     // gaussian_bump amplitude (signed)
    double sigma = 1.0;   // gaussian_bump width

    static Potential constant(double v0);
    static Potential quadratic_well(const Vec3& b0, double v0, double well = 1.0);
    static Potential gaussian_bump(const Vec3& b0, double base, double amp, double sigma = 1.0);

    double eval(const Vec3& x) const;
    Vec3 grad(const Vec3& x) const;
    Mat3 hess(const Vec3& x) const;
};

Potential potential_from_kind(const std::string& kind_name, const Vec3& b0, double v0,
                              double well, double amp, double sigma);

/// Numeric verdict on hypothesis (V): positive critical value, vanishing
/// gradient, nonsingular Hessian at b0.
struct HypothesisReport {
    bool pass = false;
    double V0 = 0.0;
    double grad_norm = 0.0;
    double hess_det = 0.0;
    std::string detail;
};

HypothesisReport check_hypothesis_v(double V0, const Vec3& grad_b0, const Mat3& hess_b0);
HypothesisReport check_hypothesis_v(const Potential& V);

}  // namespace spse
