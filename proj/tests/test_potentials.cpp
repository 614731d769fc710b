#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "spse/potentials.hpp"
#include "spse/solver.hpp"

using namespace spse;

namespace {

// Central finite differences, the oracle for the analytic derivatives.
Vec3 fd_grad(const Potential& V, const Vec3& x, double h = 1e-5) {
    Vec3 g{};
    for (int d = 0; d < 3; ++d) {
        Vec3 a = x, b = x;
        a[d] += h;
        b[d] -= h;
        g[d] = (V.eval(a) - V.eval(b)) / (2.0 * h);
    }
    return g;
}

Mat3 fd_hess(const Potential& V, const Vec3& x, double h = 1e-4) {
    Mat3 H{};
    for (int d = 0; d < 3; ++d) {
        Vec3 a = x, b = x;
        a[d] += h;
        b[d] -= h;
        const Vec3 ga = V.grad(a), gb = V.grad(b);
        for (int e = 0; e < 3; ++e) H[e][d] = (ga[e] - gb[e]) / (2.0 * h);
    }
    return H;
}

}  // namespace

TEST_CASE("constant potential: flat derivatives") {
    const Potential V = Potential::constant(2.0);
    const Vec3 x{0.3, -1.2, 0.7};
    CHECK(V.eval(x) == 2.0);
    CHECK(norm(V.grad(x)) == 0.0);
    CHECK(det3(V.hess(x)) == 0.0);
}

TEST_CASE("quadratic well: gradient at b0 vanishes, hessian 2wI everywhere") {
    const Vec3 b0{0.5, -0.25, 1.0};
    const Potential V = Potential::quadratic_well(b0, 1.0, 1.0);
    CHECK(norm(V.grad(b0)) == 0.0);
    SplitMix64 rng(7);
    for (int t = 0; t < 5; ++t) {
        const Vec3 x{2.0 * rng.sym(), 2.0 * rng.sym(), 2.0 * rng.sym()};
        const Mat3 H = V.hess(x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(H[i][j] == (i == j ? 2.0 : 0.0));
    }
    CHECK(V.eval({1.5, -0.25, 1.0}) == doctest::Approx(2.0));
}

TEST_CASE("gaussian bump: analytic derivatives match central differences") {
    const Vec3 b0{0.1, 0.2, -0.3};
    const Potential V = Potential::gaussian_bump(b0, 1.0, 1.0, 1.0);
    SplitMix64 rng(11);
    for (int t = 0; t < 10; ++t) {
        const Vec3 x{b0[0] + rng.sym(), b0[1] + rng.sym(), b0[2] + rng.sym()};
        const Vec3 g = V.grad(x), gf = fd_grad(V, x);
        for (int d = 0; d < 3; ++d) {
            if (std::abs(gf[d]) > 1e-8)
                CHECK(g[d] == doctest::Approx(gf[d]).epsilon(1e-6));
        }
        const Mat3 H = V.hess(x), Hf = fd_hess(V, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(H[i][j] == doctest::Approx(Hf[i][j]).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("hypothesis (V) verdicts") {
    CHECK(check_hypothesis_v(Potential::quadratic_well({0, 0, 0}, 1.0)).pass);

    // bump with positive amplitude: nondegenerate maximum, still passes
    const Potential bump = Potential::gaussian_bump({1, 0, 0}, 1.0, 1.0, 1.0);
    const HypothesisReport rep = check_hypothesis_v(bump);
    CHECK(rep.pass);
    CHECK(bump.hess(bump.b0)[0][0] < 0.0);

    // V = 1 + x1^3 declared at b0 = 0: gradient vanishes, Hessian degenerate
    const HypothesisReport cubic = check_hypothesis_v(1.0, {0, 0, 0}, Mat3{});
    CHECK_FALSE(cubic.pass);

    // negative critical value fails
    const HypothesisReport negv = check_hypothesis_v(-1.0, {0, 0, 0},
                                                     Potential::quadratic_well({0, 0, 0}, 1.0).hess({0, 0, 0}));
    CHECK_FALSE(negv.pass);
}

TEST_CASE("bump sign switch selects minimum vs maximum") {
    const Potential mx = Potential::gaussian_bump({0, 0, 0}, 1.0, 0.5, 1.0);
    const Potential mn = Potential::gaussian_bump({0, 0, 0}, 1.0, -0.5, 1.0);
    CHECK(mx.hess({0, 0, 0})[1][1] < 0.0);
    CHECK(mn.hess({0, 0, 0})[1][1] > 0.0);
    CHECK(mx.V0 == doctest::Approx(1.5));
    CHECK(mn.V0 == doctest::Approx(0.5));
}

TEST_CASE("unknown kind rejected") {
    CHECK_THROWS_AS(potential_from_kind("lattice", {0, 0, 0}, 1.0, 1.0, 1.0, 1.0), ConfigError);
}
