// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spse/asymptotics.hpp"
#include "spse/config.hpp"
#include "spse/constants.hpp"
#include "spse/groundstate.hpp"
#include "spse/hartree.hpp"
#include "spse/lab.hpp"
#include "spse/mass_match.hpp"
#include "spse/operators.hpp"
#include "spse/pohozaev.hpp"
#include "spse/quadrature.hpp"
#include "spse/solver.hpp"

using namespace spse;

namespace {

constexpr double kPBar = 10.0 / 3.0;

int g_failures = 0;

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void report(int id, const std::string& what, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s criterion %2d: %s  [%s] (%.1f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1
void criterion_groundstate() {
    const double t0 = now_s();
    LabConfig cfg;
    ScenarioResult res = run_scenario("groundstate-table", cfg);
    std::ostringstream detail;
    detail.precision(10);
    detail << "a_*=" << res.metrics.at("a_star");
    for (const auto& f : res.failures) detail << "; " << f;
    report(1, "ground states at p in {3, 10/3, 3.5}", res.pass(), detail.str(), now_s() - t0);
}

// ---------------------------------------------------------------- criterion 2
void criterion_scaling_oracle() {
    const double t0 = now_s();
    LabConfig cfg;
    ScenarioResult res = run_scenario("scaling-check", cfg);

    // dual route: Petviashvili iteration on the same discrete system
    const GroundState qp = solve_ground_state(3.2, 30.0, 1e-8);
    const Grid3D box(12.0, 65);
    RescaledProblem prob = build_rescaled(25.0, 3.2, Potential::constant(1.0), {0, 0, 0}, box, false);
    SolutionRecord rec = newton_solve(prob, qp);
    oracle::PetviashviliSolver petv(box);
    const std::size_t m = box.n - 2;
    std::vector<double> v(m * m * m);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < m; ++i)
                v[(k * m + j) * m + i] = qp.profile.interp(norm(box.point(i + 1, j + 1, k + 1)));
    const int iters = petv.solve(v, 3.2);
    double diff_sq = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < m; ++i) {
                const double dd = v[(k * m + j) * m + i] - rec.v.at(i + 1, j + 1, k + 1);
                diff_sq += dd * dd;
            }
    const double l2 = std::sqrt(diff_sq * std::pow(box.h(), 3));
    const double seconds = now_s() - t0;
    const bool pass = res.pass() && iters > 0 && l2 < 1e-4 && seconds < 60.0;
    std::ostringstream detail;
    detail << "newton-vs-petviashvili L2=" << l2 << ", f rel err (extrap)="
           << res.metrics.at("rel_err_rich") << ", root err=" << res.metrics.at("root_rel_err");
    for (const auto& f : res.failures) detail << "; " << f;
    report(2, "scaling oracle (gamma=0, V=1)", pass, detail.str(), seconds);
}

// ---------------------------------------------------------------- criterion 3
void criterion_hartree() {
    const double t0 = now_s();
    bool pass = true;
    std::ostringstream detail;

    // radial gaussian, analytic erf potential, 1e-8
    {
        RadialField rho((RadialGrid(12.0, 6001)));
        for (std::size_t i = 0; i < rho.values.size(); ++i)
            rho.values[i] = std::exp(-rho.grid.r(i) * rho.grid.r(i));
        const HartreePotential H = radial_newton_potential(rho);
        double max_rel = std::abs(H.radial->values[0] / (2.0 * M_PI) - 1.0);
        for (std::size_t i = 1; i < rho.grid.n_nodes; ++i) {
            const double r = rho.grid.r(i);
            const double exact = std::pow(M_PI, 1.5) * std::erf(r) / r;
            max_rel = std::max(max_rel, std::abs(H.radial->values[i] - exact) / exact);
        }
        pass = pass && max_rel < 1e-8;
        detail << "radial err=" << max_rel;
    }
    // 3D gaussian through the default CG path, 1e-3
    {
        Grid3D g(8.0, 65);
        ScalarField3D rho(g);
        for (std::size_t k = 0; k < g.n; ++k)
            for (std::size_t j = 0; j < g.n; ++j)
                for (std::size_t i = 0; i < g.n; ++i) {
                    const Vec3 x = g.point(i, j, k);
                    rho.at(i, j, k) = std::exp(-dot(x, x));
                }
        const HartreePotential H = poisson_solve_3d(rho, PoissonMethod::CG, 1e-9);
        double max_rel = 0.0;
        for (std::size_t k = 1; k + 1 < g.n; ++k)
            for (std::size_t j = 1; j + 1 < g.n; ++j)
                for (std::size_t i = 1; i + 1 < g.n; ++i) {
                    const double r = norm(g.point(i, j, k));
                    const double exact = r < 1e-9 ? 2.0 * M_PI : std::pow(M_PI, 1.5) * std::erf(r) / r;
                    max_rel = std::max(max_rel, std::abs(H.box->at(i, j, k) - exact) / exact);
                }
        pass = pass && max_rel < 1e-3;
        detail << ", 3d err=" << max_rel;
    }
    // radial vs 3D on the mass-critical ground state, 2e-3
    const GroundState gs = solve_ground_state(kPBar, 30.0, 1e-8);
    {
        RadialField rho(gs.profile.grid);
        for (std::size_t i = 0; i < rho.values.size(); ++i)
            rho.values[i] = gs.profile.values[i] * gs.profile.values[i];
        const HartreePotential Hr = radial_newton_potential(rho);
        Grid3D g(12.0, 65);
        const HartreePotential H3 = poisson_solve_3d(sample_radial(rho, g, {0, 0, 0}),
                                                     PoissonMethod::Direct);
        double max_rel = 0.0;
        for (std::size_t k = 1; k + 1 < g.n; ++k)
            for (std::size_t j = 1; j + 1 < g.n; ++j)
                for (std::size_t i = 1; i + 1 < g.n; ++i) {
                    const double exact = Hr.radial->interp(norm(g.point(i, j, k)));
                    max_rel = std::max(max_rel, std::abs(H3.box->at(i, j, k) - exact) / exact);
                }
        pass = pass && max_rel < 2e-3;
        detail << ", cross err=" << max_rel;
    }
    // Coulomb symmetry integral, 1e-10
    {
        double worst = 0.0;
        for (int axis : {0, 1, 2})
            worst = std::max(worst, std::abs(coulomb_symmetry_integral(
                                        gs.profile, Grid3D(12.0, 49), {0, 0, 0}, axis)));
        pass = pass && worst < 1e-10;
        detail << ", symmetry=" << worst;
    }
    report(3, "hartree correctness", pass, detail.str(), now_s() - t0);
}

// ------------------------------------------------------------- criteria 4, 5
void criterion_mass_match(int id, int sign, double a_ratio) {
    const double t0 = now_s();
    std::vector<double> ratios;
    bool pass = true;
    std::ostringstream detail;
    for (double eps : {0.3, 0.2, 0.15}) {
        LabConfig cfg;
        cfg.set("experiment.eps", eps);
        cfg.set("experiment.sign", double(sign));
        cfg.set("experiment.a_ratio", a_ratio);
        cfg.set("potential.kind", std::string("quadratic_well"));
        cfg.set("potential.V0", 1.0);
        cfg.set("match.grid_n", 65.0);
        try {
            ScenarioResult res = run_scenario("mass-match", cfg);
            pass = pass && res.pass();
            ratios.push_back(res.metrics.at("ratio"));
            detail << "eps=" << eps << ": ratio=" << res.metrics.at("ratio") << "; ";
        } catch (const std::exception& e) {
            pass = false;
            detail << "eps=" << eps << ": " << e.what() << "; ";
        }
    }
    if (ratios.size() == 3) {
        const double d1 = std::abs(ratios[0] - 1.0), d2 = std::abs(ratios[1] - 1.0),
                     d3 = std::abs(ratios[2] - 1.0);
        if (!(d1 > d2 && d2 > d3)) {
            pass = false;
            detail << "|ratio-1| not strictly decreasing";
        }
    }
    report(id, id == 4 ? "mass matching, case (i)" : "mass matching, case (ii)", pass,
           detail.str(), now_s() - t0);
}

// ------------------------------------------------------ criteria 6, 7, 9, 10
void criterion_ladder_and_probe() {
    double t0 = now_s();
    LabConfig cfg;
    cfg.set("potential.well", 4.0);
    ScenarioResult res = run_scenario("concentration-rate", cfg);
    {
        std::ostringstream detail;
        detail << "slope=" << res.metrics.at("dist_slope");
        report(6, "concentration rate |x_peak - b0| ~ lambda^{-1}",
               res.metrics.at("dist_slope") > -1.3 && res.metrics.at("dist_slope") < -0.7,
               detail.str(), now_s() - t0);
    }
    {
        std::ostringstream detail;
        detail << "max/min=" << res.metrics.at("grad_ratio");
        report(7, "reduced gradient |grad V| sqrt(lambda) bounded",
               res.metrics.at("grad_ratio") < 4.0, detail.str(), 0.0);
    }
    {
        std::ostringstream detail;
        detail << "max/min=" << res.metrics.at("corr_ratio");
        report(9, "correction norm over lambda^{3/(p-2)-9/4} bounded",
               res.metrics.at("corr_ratio") < 3.0, detail.str(), 0.0);
    }

    t0 = now_s();
    LabConfig ucfg;
    ucfg.set("potential.well", 4.0);
    ucfg.set("potential.b0", std::string("0.0123,-0.0345,0.0567"));
    ScenarioResult ures = run_scenario("uniqueness-probe", ucfg);
    std::ostringstream detail;
    detail << "max pairwise sup=" << ures.metrics.at("max_pairwise_sup") << ", converged "
           << ures.metrics.at("converged") << "/5";
    report(10, "multistart uniqueness probe", ures.pass(), detail.str(), now_s() - t0);
}

// ---------------------------------------------------------------- criterion 8
void criterion_pohozaev() {
    const double t0 = now_s();
    LabConfig cfg;
    cfg.set("potential.kind", std::string("quadratic_well"));
    cfg.set("potential.well", 4.0);
    cfg.set("potential.b0", std::string("0.0123,-0.0345,0.0567"));
    try {
        ScenarioResult res = run_scenario("pohozaev-decay", cfg);
        std::ostringstream detail;
        detail << "boundary side " << res.metrics.at("residual_lo") << " -> "
               << res.metrics.at("residual_hi") << ", radial=" << res.metrics.at("radial_residual")
               << ", control=" << res.metrics.at("control_residual");
        for (const auto& f : res.failures) detail << "; " << f;
        report(8, "pohozaev identity decay, radial case, negative control", res.pass(),
               detail.str(), now_s() - t0);
    } catch (const std::exception& e) {
        report(8, "pohozaev identity decay, radial case, negative control", false, e.what(),
               now_s() - t0);
    }
}

// --------------------------------------------------------------- criterion 11
void criterion_determinism() {
    const double t0 = now_s();
    bool pass = true;
    std::ostringstream detail;
    for (const char* name : {"groundstate-table", "asymptotics-sweep"}) {
        LabConfig cfg;
        cfg.set("seed", 42.0);
        ScenarioResult r1 = run_scenario(name, cfg);
        ScenarioResult r2 = run_scenario(name, cfg);
        const std::string p1 = std::string("/tmp/spse_det1_") + name + ".csv";
        const std::string p2 = std::string("/tmp/spse_det2_") + name + ".csv";
        write_scenario_csv(r1, cfg, p1);
        write_scenario_csv(r2, cfg, p2);
        const bool same = slurp(p1) == slurp(p2) && !slurp(p1).empty();
        pass = pass && same;
        detail << name << (same ? " byte-identical; " : " DIFFERS; ");
    }
    report(11, "determinism of scenario outputs", pass, detail.str(), now_s() - t0);
}

}  // namespace

int main() {
    std::printf("spse-lab acceptance suite (version %s)\n", constants::kVersion);
    const double t0 = now_s();
    criterion_groundstate();
    criterion_scaling_oracle();
    criterion_hartree();
    criterion_mass_match(4, +1, 0.8);
    criterion_mass_match(5, -1, 1.25);
    criterion_ladder_and_probe();
    criterion_pohozaev();
    criterion_determinism();
    std::printf("%d criterion(s) failed; total %.1f s\n", g_failures, now_s() - t0);
    return g_failures == 0 ? 0 : 1;
}
