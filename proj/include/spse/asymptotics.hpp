#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spse {

/// Leading-order Lagrange multiplier
///   Lambda_eps = (V0^{2/(p-2)} a / a_{*,eps})^{2(p-2)/(10-3p)},  p = 10/3 + sign*eps.
double Lambda_eps(double eps, int sign, double a, double V0, double a_star_eps);

/// Log-log least-squares slope through (scale, value) samples.
double fit_rate(const std::vector<std::pair<double, double>>& samples);

struct AsymptoticsReport {
    double eps = 0.0;
    double p_eps = 0.0;
    double Lambda = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double lambda_measured = 0.0;
    double ratio = 0.0;  // lambda_measured / Lambda
    std::map<std::string, double> rate_fits;
};

}  // namespace spse
