#pragma once

#include <functional>

#include "hilasso/model.hpp"

namespace hilasso {

/// f + psi with f smooth and psi group separable, in the form consumed by
/// sparsa_minimize.
struct CompositeObjective {
    /// Returns f(x) and writes grad f(x) into `grad` (resized by the callee).
    std::function<double(const Vector& x, Vector& grad)> smooth;
    /// psi(x), including its weights.
    std::function<double(const Vector& x)> penalty;
    /// argmin_z 1/2 ||z - u||^2 + psi(z) / alpha.
    std::function<Vector(const Vector& u, double alpha)> prox;
};

/// Iterate, step parameter, gradient and objective of a SpaRSA run. Passing a
/// state with alpha > 0 to sparsa_minimize starts from that step parameter;
/// the final state is written back.
struct SparsaState {
    Vector iterate;
    double alpha = 0.0;
    Vector gradient;
    double objective = 0.0;
};

/// Proximal-gradient minimization of f + psi.
///
/// Each outer iteration forms u = x - grad f(x) / alpha and takes
/// z = prox(u, alpha). The step parameter starts from the Barzilai-Borwein
/// ratio (dg.dx / dx.dx) of the last accepted step with dg.dx > 0 (the
/// previous value is kept otherwise), clamped to
/// [alpha_min, alpha_max] (alpha = 1 on the first iteration), and is multiplied
/// by eta until the objective does not increase. Stops when a step taken
/// without backtracking moves the iterate by at most
/// tol * max(1, ||x||); running out of iterations or failing to decrease even
/// at alpha_max yields converged = false.
///
/// The report holds x as a single-column coefficient matrix; objective_trace
/// starts with the objective at x0 and gets one entry per accepted step.
SolverReport sparsa_minimize(const CompositeObjective& objective, Vector x0, const SolverConfig& config,
                             SparsaState* state = nullptr);

} // namespace hilasso
