#include "spse/mass_match.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "spse/errors.hpp"
#include "spse/hartree.hpp"

namespace spse {

namespace {

// f(lambda) by the pure scaling law: mass_of_scaled / a. Exact for gamma = 0
// and constant V; the algebraic oracle everything else is compared against.
double f_closed_form(const MassProblem& prob, const GroundState& qp, double lambda) {
    return mass_of_scaled(qp, lambda, prob.V.V0) / prob.a;
}

struct FEval {
    double f;
    MassCurvePoint point;
};

// Walks the single-peak branch in lambda, warm-starting every Newton solve
// from the nearest converged profile. A cold start only happens where the
// Coulomb coupling is weak; from there the tracker ladders geometrically to
// the requested lambda. Solver failures surface as SolverError ("branch
// ended") at the offending lambda.
class BranchTracker {
  public:
    BranchTracker(const MassProblem& prob, const GroundState& qp) : prob_(prob), qp_(qp) {}

    FEval eval(double lambda) {
        FEval ev;
        ev.point.lambda = lambda;
        if (prob_.eval == MassEval::ClosedForm) {
            ev.f = f_closed_form(prob_, qp_, lambda);
            ev.point.f_value = ev.f;
            ev.point.mass = ev.f * prob_.a;
            ev.point.solved = true;
            return ev;
        }
        const SolutionRecord& rec = solve_at(lambda);
        ev.f = rec.u_mass / prob_.a;
        ev.point.f_value = ev.f;
        ev.point.mass = rec.u_mass;
        ev.point.solved = true;
        ev.point.residual = rec.residual_l2;
        ev.point.correction_norm = rec.correction_norm;
        ev.point.newton_iters = rec.newton_iters;
        ev.point.x_peak = rec.x_peak;
        return ev;
    }

  private:
    // Coulomb size of the profile: Phi_Q(0) = 4 pi int r Q^2 dr.
    double coulomb_scale() const {
        RadialField rho(qp_.profile.grid);
        for (std::size_t i = 0; i < rho.values.size(); ++i)
            rho.values[i] = qp_.profile.values[i] * qp_.profile.values[i];
        return radial_newton_potential(rho).radial->values[0];
    }

    SolutionRecord solve_step(double lambda, const ScalarField3D* warm) {
        RescaledProblem rp =
            build_rescaled(lambda, prob_.p(), prob_.V, prob_.V.b0, prob_.box, prob_.poisson_on);
        return newton_solve(rp, qp_, prob_.newton, warm);
    }

    const SolutionRecord& solve_at(double lambda) {
        auto hit = cache_.find(lambda);
        if (hit != cache_.end()) return hit->second;
        if (cache_.empty()) {
            // Enter the branch where the Coulomb term is a genuine
            // perturbation: gamma(lambda) Phi_Q(0) <= 0.8 (entry capped).
            double entry = lambda;
            if (prob_.poisson_on) {
                const double expo = 2.0 / (prob_.p() - 2.0) - 2.0;  // negative
                const double gamma_entry =
                    0.8 / (coulomb_scale() * std::pow(prob_.V.V0, -2.0 / (prob_.p() - 2.0)));
                const double lam_weak = std::min(std::pow(gamma_entry, 1.0 / expo), 1e6);
                entry = std::max(lambda, lam_weak);
            }
            // cold starts have a fuzzy robustness boundary; retry colder
            std::string entry_error;
            bool entered = false;
            for (int attempt = 0; attempt < 4 && !entered; ++attempt) {
                try {
                    cache_.emplace(entry, solve_step(entry, nullptr));
                    entered = true;
                } catch (const SolverError& e) {
                    entry_error = e.what();
                    entry *= 2.0;
                }
            }
            if (!entered)
                throw SolverError("single-peak branch entry failed near lambda=" +
                                  std::to_string(entry / 2.0) + ": " + entry_error);
        }
        while (true) {
            // nearest solved lambda in log distance
            auto best = cache_.begin();
            double best_d = 1e300;
            for (auto it = cache_.begin(); it != cache_.end(); ++it) {
                const double d = std::abs(std::log(lambda / it->first));
                if (d < best_d) {
                    best_d = d;
                    best = it;
                }
            }
            const double from = best->first;
            const double ratio = lambda / from;
            double next = lambda;
            const double max_step = 1.35;
            if (ratio > max_step)
                next = from * max_step;
            else if (ratio < 1.0 / max_step)
                next = from / max_step;
            SolutionRecord rec;
            try {
                rec = solve_step(next, &best->second.v);
            } catch (const SolverError& outer) {
                // retry at half the log step before declaring the branch dead
                const double mid = std::sqrt(from * next);
                if (std::abs(std::log(mid / from)) < 1e-3)
                    throw SolverError("single-peak branch ended near lambda=" +
                                      std::to_string(from) + ": " + outer.what());
                try {
                    SolutionRecord rmid = solve_step(mid, &best->second.v);
                    cache_.emplace(mid, std::move(rmid));
                } catch (const SolverError& inner) {
                    throw SolverError("single-peak branch ended near lambda=" +
                                      std::to_string(from) + ": " + inner.what());
                }
                continue;
            }
            auto ins = cache_.emplace(next, std::move(rec));
            if (cache_.size() > 16) {
                auto worst = cache_.end();
                double worst_d = -1.0;
                for (auto it = cache_.begin(); it != cache_.end(); ++it) {
                    if (it == ins.first) continue;
                    const double d = std::abs(std::log(lambda / it->first));
                    if (d > worst_d) {
                        worst_d = d;
                        worst = it;
                    }
                }
                if (worst != cache_.end()) cache_.erase(worst);
            }
            if (next == lambda) return ins.first->second;
        }
    }

    const MassProblem& prob_;
    const GroundState& qp_;
    std::map<double, SolutionRecord> cache_;
};

}  // namespace

std::vector<MassCurvePoint> mass_curve(const MassProblem& prob, const GroundState& qp,
                                       std::vector<double> lambdas) {
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<MassCurvePoint> out;
    BranchTracker tracker(prob, qp);
    for (auto it = lambdas.rbegin(); it != lambdas.rend(); ++it) {
        MassCurvePoint pt;
        pt.lambda = *it;
        try {
            pt = tracker.eval(*it).point;
        } catch (const std::exception& e) {
            pt.solved = false;
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    std::reverse(out.begin(), out.end());
    return out;
}

bool discontinuity_flag(const std::vector<MassCurvePoint>& curve) {
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (!curve[i].solved || !curve[i - 1].solved) continue;
        const double a = curve[i - 1].f_value, b = curve[i].f_value;
        if (a > 0.0 && std::abs(b - a) > 0.25 * a) return true;
    }
    return false;
}

std::pair<double, double> scan_bracket(const MassProblem& prob, const GroundState& qp,
                                       double lambda_guess, int max_doublings) {
    BranchTracker tracker(prob, qp);
    auto sign_at = [&](double lam) { return tracker.eval(lam).f - 1.0; };
    double g0 = sign_at(lambda_guess);
    double lo = lambda_guess, hi = lambda_guess;
    double glo = g0, ghi = g0;
    for (int k = 1; k <= max_doublings; ++k) {
        hi = lambda_guess * std::pow(2.0, k);
        ghi = sign_at(hi);
        if (glo * ghi < 0.0) return {lo, hi};
        lo = hi;
        glo = ghi;
    }
    lo = lambda_guess;
    glo = g0;
    for (int k = 1; k <= max_doublings; ++k) {
        const double lo2 = lambda_guess * std::pow(2.0, -k);
        const double glo2 = sign_at(lo2);
        if (glo2 * glo < 0.0) return {lo2, lo};
        lo = lo2;
        glo = glo2;
    }
    throw SolverError("bracket invalid - no sign change of f-1; check the case (i)/(ii) mass inequality");
}

MatchResult match_mass(const MassProblem& prob, const GroundState& qp, double lambda_lo,
                       double lambda_hi, const MatchOptions& opt) {
    if (!(lambda_lo > 0.0 && lambda_hi > lambda_lo))
        throw InvalidInput("match_mass: bad bracket");
    BranchTracker tracker(prob, qp);
    auto f_at = [&](double lam) { return tracker.eval(lam).f; };
    double flo = f_at(lambda_lo) - 1.0;
    double fhi = f_at(lambda_hi) - 1.0;
    if (flo * fhi > 0.0) throw SolverError("bracket invalid - no sign change of f-1; check the case (i)/(ii) mass inequality");

    MatchResult res;
    res.bracket_lo = lambda_lo;
    res.bracket_hi = lambda_hi;
    res.case_tag = (prob.sign > 0) ? "i" : "ii";

    double lo = lambda_lo, hi = lambda_hi;
    double fmid = 0.0, mid = 0.5 * (lo + hi);
    int it = 0;
    for (; it < opt.max_bisections; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = f_at(mid) - 1.0;
        if ((hi - lo) <= opt.lambda_rel_tol * mid) break;
        if (fmid * flo <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    (void)fhi;
    res.lambda_eps = mid;
    res.f_at_root = fmid + 1.0;
    res.iterations = it;
    if (std::abs(res.f_at_root - 1.0) >= opt.f_tol)
        throw SolverError("match_mass: |f-1| did not reach tolerance inside the bracket");
    return res;
}

std::pair<double, double> theorem_bracket(double eps, double a, double V0, double a_star,
                                          const std::string& case_tag) {
    if (!(eps > 0.0)) throw InvalidInput("theorem_bracket: eps must be positive");
    double log_ratio;
    if (case_tag == "i")
        log_ratio = std::log(std::pow(V0, -1.5) * a_star / a);
    else if (case_tag == "ii")
        log_ratio = std::log(std::pow(V0, 1.5) * a / a_star);
    else
        throw InvalidInput("theorem_bracket: case must be 'i' or 'ii'");
    if (!(log_ratio > 0.0))
        throw InvalidInput("theorem_bracket: inputs violate the stated case hypothesis");
    return {std::exp(4.0 / (9.0 * eps) * log_ratio), std::exp(16.0 / (9.0 * eps) * log_ratio)};
}

double bisect_scalar(const std::function<double(double)>& f, double lo, double hi, double tol,
                     int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0) throw SolverError("bracket invalid - no sign change of f-1; check the case (i)/(ii) mass inequality");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < tol && (hi - lo) < tol * std::max(1.0, mid)) return mid;
        if (fm * flo <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return mid;
}

}  // namespace spse
