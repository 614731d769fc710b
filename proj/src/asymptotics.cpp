#include "spse/asymptotics.hpp"

#include <cmath>

#include "spse/errors.hpp"

namespace spse {

double Lambda_eps(double eps, int sign, double a, double V0, double a_star_eps) {
    if (!(eps > 0.0)) throw InvalidInput("Lambda_eps: eps must be positive");
    if (!(a > 0.0 && V0 > 0.0 && a_star_eps > 0.0))
        throw InvalidInput("Lambda_eps: a, V0, a_* must be positive");
    const double p = 10.0 / 3.0 + double(sign) * eps;
    if (std::abs(10.0 - 3.0 * p) < 1e-14) throw InvalidInput("mass-critical: Lambda undefined");
    const double base = std::pow(V0, 2.0 / (p - 2.0)) * a / a_star_eps;
    const double expo = 2.0 * (p - 2.0) / (10.0 - 3.0 * p);
    return std::pow(base, expo);
}

double fit_rate(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3) throw InvalidInput("fit_rate: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [scale, value] : samples) {
        if (!(scale > 0.0 && value > 0.0)) throw InvalidInput("fit_rate: nonpositive sample");
        const double x = std::log(scale), y = std::log(value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = double(samples.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace spse
