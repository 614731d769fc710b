#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "spse/asymptotics.hpp"
#include "spse/groundstate.hpp"
#include "spse/mass_match.hpp"

using namespace spse;

namespace {
constexpr double kPBar = 10.0 / 3.0;

MassProblem closed_form_problem(const GroundState& qp, double a_ratio) {
    MassProblem mp;
    mp.eps = kPBar - qp.p;
    mp.sign = qp.p > kPBar ? +1 : -1;
    mp.eps = std::abs(qp.p - kPBar);
    mp.a = a_ratio * qp.mass;
    mp.V = Potential::constant(1.0);
    mp.box = Grid3D(12.0, 65);
    mp.poisson_on = false;
    mp.eval = MassEval::ClosedForm;
    return mp;
}
}  // namespace

TEST_CASE("bisect_scalar: toy closed-form root") {
    auto f = [](double lam) { return 10.0 * std::pow(lam, -0.5) - 1.0; };
    const double root = bisect_scalar(f, 10.0, 1000.0, 1e-10);
    CHECK(root == doctest::Approx(100.0).epsilon(1e-9));
    auto g = [](double) { return 1.0; };
    CHECK_THROWS_WITH_AS(bisect_scalar(g, 1.0, 2.0, 1e-10),
                         doctest::Contains("bracket invalid"), SolverError);
}

TEST_CASE("theorem_bracket: multiplier window endpoints") {
    auto [lo, hi] = theorem_bracket(0.1, 1.0, 1.0, 2.0, "i");
    CHECK(lo == doctest::Approx(std::exp(4.0 / 0.9 * std::log(2.0))).epsilon(1e-12));
    CHECK(hi == doctest::Approx(std::exp(16.0 / 0.9 * std::log(2.0))).epsilon(1e-12));
    CHECK(lo == doctest::Approx(21.8).epsilon(2e-3));
    CHECK(hi == doctest::Approx(2.24e5).epsilon(5e-3));

    // boundary of the hypotheses: a = a_* V0^{-3/2} makes the bracket collapse
    CHECK_THROWS_AS(theorem_bracket(0.1, 2.0, 1.0, 2.0, "i"), InvalidInput);
    // case ii mirrors with the reciprocal log argument
    auto [lo2, hi2] = theorem_bracket(0.1, 2.0, 1.0, 1.0, "ii");
    CHECK(lo2 == doctest::Approx(std::exp(4.0 / 0.9 * std::log(2.0))).epsilon(1e-12));
    CHECK(hi2 > lo2);
    CHECK_THROWS_AS(theorem_bracket(0.1, 1.0, 1.0, 2.0, "ii"), InvalidInput);
}

TEST_CASE("closed-form match returns Lambda_eps to 1e-8") {
    const GroundState qp = solve_ground_state(3.2, 30.0, 1e-8);
    MassProblem mp = closed_form_problem(qp, 1.2);
    const double Lam = Lambda_eps(mp.eps, mp.sign, mp.a, 1.0, qp.mass);
    MatchOptions opt;
    opt.lambda_rel_tol = 1e-12;
    const MatchResult res = match_mass(mp, qp, 0.3 * Lam, 3.0 * Lam, opt);
    CHECK(std::abs(res.lambda_eps / Lam - 1.0) < 1e-8);
    CHECK(std::abs(res.f_at_root - 1.0) < 1e-6);
    CHECK(res.case_tag == "ii");  // p = 3.2 < 10/3

    // root stability: halving the tolerance moves the root by less than the
    // previous tolerance
    MatchOptions strict = opt;
    strict.f_tol = 5e-7;
    const MatchResult res2 = match_mass(mp, qp, 0.3 * Lam, 3.0 * Lam, strict);
    CHECK(std::abs(res2.lambda_eps - res.lambda_eps) < 1e-6 * res.lambda_eps);
}

TEST_CASE("closed-form mass curve: exact power law and case-i monotonicity") {
    const GroundState qp = solve_ground_state(kPBar + 0.2, 30.0, 1e-8);
    MassProblem mp;
    mp.eps = 0.2;
    mp.sign = +1;
    mp.a = 0.8 * qp.mass;
    mp.V = Potential::constant(1.0);
    mp.box = Grid3D(12.0, 65);
    mp.poisson_on = false;
    mp.eval = MassEval::ClosedForm;
    auto curve = mass_curve(mp, qp, {16.0, 8.0, 4.0, 2.0});
    REQUIRE(curve.size() == 4);
    const double expo = 2.0 / (mp.p() - 2.0) - 1.5;
    CHECK(expo < 0.0);  // f decreasing for p > 10/3
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].solved);
        const double expect = qp.mass / mp.a * std::pow(curve[i].lambda, expo);
        CHECK(curve[i].f_value == doctest::Approx(expect).epsilon(1e-12));
        if (i > 0) CHECK(curve[i].f_value < curve[i - 1].f_value);
    }
    CHECK_FALSE(discontinuity_flag(curve));
}

TEST_CASE("solver-path curve at gamma=0 follows the scaling exponent exactly") {
    const GroundState qp = solve_ground_state(3.2, 30.0, 1e-8);
    MassProblem mp;
    mp.eps = kPBar - 3.2;
    mp.sign = -1;
    mp.a = qp.mass;
    mp.V = Potential::constant(1.0);
    mp.box = Grid3D(12.0, 65);
    mp.poisson_on = false;
    mp.eval = MassEval::Solver;
    auto curve = mass_curve(mp, qp, {25.0, 50.0, 100.0});
    REQUIRE(curve.size() == 3);
    for (const auto& pt : curve) CHECK(pt.solved);
    const double expo = 2.0 / 1.2 - 1.5;
    CHECK(curve[1].f_value / curve[0].f_value == doctest::Approx(std::pow(2.0, expo)).epsilon(1e-10));
    CHECK(curve[2].f_value / curve[1].f_value == doctest::Approx(std::pow(2.0, expo)).epsilon(1e-10));
}

TEST_CASE("discontinuity flag trips on a synthetic jump") {
    std::vector<MassCurvePoint> curve(3);
    curve[0].lambda = 1.0;
    curve[0].f_value = 1.0;
    curve[0].solved = true;
    curve[1].lambda = 2.0;
    curve[1].f_value = 1.1;
    curve[1].solved = true;
    curve[2].lambda = 3.0;
    curve[2].f_value = 2.0;
    curve[2].solved = true;
    CHECK(discontinuity_flag(curve));
}

TEST_CASE("match_mass rejects a sign-consistent bracket") {
    const GroundState qp = solve_ground_state(3.2, 30.0, 1e-8);
    MassProblem mp = closed_form_problem(qp, 1.2);
    const double Lam = Lambda_eps(mp.eps, mp.sign, mp.a, 1.0, qp.mass);
    CHECK_THROWS_WITH_AS(match_mass(mp, qp, 2.0 * Lam, 4.0 * Lam, MatchOptions{}),
                         doctest::Contains("bracket invalid"), SolverError);
}

TEST_CASE("scan_bracket finds the closed-form sign change") {
    const GroundState qp = solve_ground_state(3.2, 30.0, 1e-8);
    MassProblem mp = closed_form_problem(qp, 1.2);
    const double Lam = Lambda_eps(mp.eps, mp.sign, mp.a, 1.0, qp.mass);
    auto [lo, hi] = scan_bracket(mp, qp, 0.3 * Lam);
    CHECK(lo < Lam);
    CHECK(hi > Lam);
}
