#include "spse/potentials.hpp"

#include <cmath>
#include <sstream>

#include "spse/errors.hpp"

namespace spse {

Potential Potential::constant(double v0) {
    Potential p;
    p.kind = PotentialKind::Constant;
    p.V0 = v0;
    return p;
}

Potential Potential::quadratic_well(const Vec3& b0, double v0, double well) {
    Potential p;
    p.kind = PotentialKind::QuadraticWell;
    p.b0 = b0;
    p.V0 = v0;
    p.well = well;
    return p;
}

Potential Potential::gaussian_bump(const Vec3& b0, double base, double amp, double sigma) {
    Potential p;
    p.kind = PotentialKind::GaussianBump;
    p.b0 = b0;
    p.base = base;
    p.amp = amp;
    p.sigma = sigma;
    p.V0 = base + amp;
    return p;
}

double Potential::eval(const Vec3& x) const {
    const Vec3 d = x - b0;
    switch (kind) {
        case PotentialKind::Constant:
            return V0;
        case PotentialKind::QuadraticWell:
            return V0 + well * dot(d, d);
        case PotentialKind::GaussianBump:
            return base + amp * std::exp(-dot(d, d) / (sigma * sigma));
    }
    throw InvalidInput("unknown potential kind");
}

Vec3 Potential::grad(const Vec3& x) const {
    const Vec3 d = x - b0;
    switch (kind) {
        case PotentialKind::Constant:
            return {0.0, 0.0, 0.0};
        case PotentialKind::QuadraticWell:
            return 2.0 * well * d;
        case PotentialKind::GaussianBump: {
            const double s2 = sigma * sigma;
            const double e = amp * std::exp(-dot(d, d) / s2);
            return (-2.0 / s2 * e) * d;
        }
    }
    throw InvalidInput("unknown potential kind");
}

Mat3 Potential::hess(const Vec3& x) const {
    Mat3 H{};
    const Vec3 d = x - b0;
    switch (kind) {
        case PotentialKind::Constant:
            return H;
        case PotentialKind::QuadraticWell:
            for (int i = 0; i < 3; ++i) H[i][i] = 2.0 * well;
            return H;
        case PotentialKind::GaussianBump: {
            const double s2 = sigma * sigma;
            const double e = amp * std::exp(-dot(d, d) / s2);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    H[i][j] = e * (4.0 * d[i] * d[j] / (s2 * s2) - (i == j ? 2.0 / s2 : 0.0));
            return H;
        }
    }
    throw InvalidInput("unknown potential kind");
}

Potential potential_from_kind(const std::string& kind_name, const Vec3& b0, double v0,
                              double well, double amp, double sigma) {
    if (kind_name == "constant") return Potential::constant(v0);
    if (kind_name == "quadratic_well") return Potential::quadratic_well(b0, v0, well);
    if (kind_name == "gaussian_bump") return Potential::gaussian_bump(b0, v0 - amp, amp, sigma);
    throw ConfigError("unknown potential kind '" + kind_name + "'");
}

HypothesisReport check_hypothesis_v(double V0, const Vec3& grad_b0, const Mat3& hess_b0) {
    HypothesisReport rep;
    rep.V0 = V0;
    rep.grad_norm = norm(grad_b0);
    rep.hess_det = det3(hess_b0);
    std::ostringstream detail;
    bool ok = true;
    if (!(V0 > 0.0)) {
        ok = false;
        detail << "V(b0) not positive; ";
    }
    if (!(rep.grad_norm < 1e-12)) {
        ok = false;
        detail << "gradient at b0 not zero; ";
    }
    if (std::abs(rep.hess_det) < 1e-12) {
        ok = false;
        detail << "degenerate Hessian; ";
    }
    rep.pass = ok;
    rep.detail = ok ? "pass" : detail.str();
    return rep;
}

HypothesisReport check_hypothesis_v(const Potential& V) {
    return check_hypothesis_v(V.eval(V.b0), V.grad(V.b0), V.hess(V.b0));
}

}  // namespace spse
