#include "hilasso/sparsa.hpp"

#include <algorithm>
#include <cmath>

namespace hilasso {

SolverReport sparsa_minimize(const CompositeObjective& objective, Vector x0, const SolverConfig& config,
                             SparsaState* state) {
    config.validate();

    SolverReport report;
    Vector x = std::move(x0);
    Vector grad;
    double F = objective.smooth(x, grad) + objective.penalty(x);
    report.objective_trace.push_back(F);

    const auto clamp_alpha = [&](double a) { return std::clamp(a, config.alpha_min, config.alpha_max); };
    double alpha = clamp_alpha(state && state->alpha > 0.0 ? state->alpha : 1.0);

    Vector z, grad_z, u;
    for (int t = 0; t < config.max_outer_iter; ++t) {
        ++report.outer_iterations;
        double a = alpha;
        bool first_trial = true;
        bool accepted = false;
        bool stationary = false;
        double Fz = F;
        double rel = 0.0;

        for (;;) {
            u = x - grad / a;
            z = objective.prox(u, a);
            Fz = objective.smooth(z, grad_z) + objective.penalty(z);
            rel = (z - x).norm() / std::max(1.0, x.norm());
            if (Fz <= F) {
                accepted = true;
                break;
            }
            // A full-length step that barely moves yet does not decrease
            // means x is optimal up to rounding.
            if (first_trial && rel <= config.tol) {
                stationary = true;
                break;
            }
            first_trial = false;
            a *= config.eta;
            if (a > config.alpha_max) break;
        }

        if (accepted) {
            const Vector s = z - x;
            const Vector y = grad_z - grad;
            const double ss = s.squaredNorm();
            const double sy = s.dot(y);
            x.swap(z);
            grad.swap(grad_z);
            F = Fz;
            report.objective_trace.push_back(F);
            if (first_trial && rel <= config.tol) {
                report.converged = true;
                break;
            }
            // Without positive curvature along the step (only rounding can
            // cause that on a convex f) the previous parameter is kept; the
            // backtracked one can be huge and would freeze later runs that
            // start from this state.
            if (ss > 0.0 && sy > 0.0) alpha = clamp_alpha(sy / ss);
        } else {
            report.converged = stationary;
            break;
        }
    }

    if (state) {
        state->iterate = x;
        state->alpha = alpha;
        state->gradient = grad;
        state->objective = F;
    }
    report.coefficients.values = std::move(x);
    return report;
}

} // namespace hilasso
