#pragma once

#include <optional>

#include "hilasso/model.hpp"
#include "hilasso/sparsa.hpp"

namespace hilasso {

/// D^T D for a dictionary, shared across repeated solves. Only valid for the
/// dictionary it was built from; solvers fall back to D^T (D a - x) for
/// masked signals.
class GramMatrix {
public:
    explicit GramMatrix(const Dictionary& dictionary);

    const Matrix& values() const noexcept { return gram_; }
    const Dictionary* source() const noexcept { return source_; }

private:
    Matrix gram_;
    const Dictionary* source_;
};

/// 1/2 ||M_j (D a - x_j)||^2 for column j of a problem, where M_j keeps the
/// observed entries. D a is accumulated over the nonzero coefficients only;
/// the gradient goes through the Gram matrix when that is cheaper (unmasked
/// columns with fewer nonzeros than rows).
class ColumnDataTerm {
public:
    ColumnDataTerm(const CodingProblem& problem, Index j, const GramMatrix* gram = nullptr);

    /// Returns the value and writes the gradient D^T M_j (D a - x_j).
    double evaluate(const Vector& a, Vector& grad) const;

private:
    const Matrix* atoms_;
    const Matrix* gram_;
    Vector signal_;
    Vector correlation_;
    std::optional<Eigen::Array<bool, Eigen::Dynamic, 1>> mask_;
};

/// Smooth part of the collaborative A-update for one column:
///   data(a) + p.a + c/2 ||a - b||^2
double admm_column_smooth(const ColumnDataTerm& data, const Vector& p, const Vector& b, double c, const Vector& a,
                          Vector& grad);

/// Single-signal solvers. `problem` must hold exactly one signal; the
/// coefficient iterate starts at zero.
///
///   lasso        1/2 ||x - Da||^2 + lambda1 ||a||_1
///   group lasso  1/2 ||x - Da||^2 + lambda2 sum_g ||a_g||_2
///   HiLasso      1/2 ||x - Da||^2 + lambda2 sum_g ||a_g||_2 + lambda1 ||a||_1
///
/// HiLasso runs SpaRSA with the per-group l1+l2 prox computed by ADMM
/// (prox_l1_l2), skipping groups for which group_is_inactive holds. ADMM
/// states are carried across SpaRSA iterations when warm_start_prox is set.
SolverReport solve_lasso(const CodingProblem& problem, const SolverConfig& config = {},
                         const GramMatrix* gram = nullptr);
SolverReport solve_group_lasso(const CodingProblem& problem, const SolverConfig& config = {},
                               const GramMatrix* gram = nullptr);
SolverReport solve_hilasso(const CodingProblem& problem, const SolverConfig& config = {},
                           const GramMatrix* gram = nullptr);

/// Collaborative HiLasso over all signals of `problem`:
///
///   min_A 1/2 ||X - DA||_F^2 + lambda2 sum_g ||A_g||_F + lambda1 sum_j ||a_j||_1
///
/// solved by ADMM on the split A = B with multiplier P, starting from
/// A = B = P = 0:
///
///   a_j <- argmin 1/2 ||x_j - D a||^2 + p_j.a + c/2 ||a - b_j||^2 + lambda1 ||a||_1   (SpaRSA, per column)
///   B_g <- S_v(P_g + c A_g, lambda2) / c                                              (per group, Frobenius)
///   P   <- P + c (A - B)
///
/// The column subproblems start loose (10 tol) and tighten geometrically.
/// Converged when ||A - B||_F and c ||B - B_prev||_F are both at most
/// tol * max(1, ||A||_F), and then A is returned. An outer step counts as
/// accepted when the collaborative objective at A does not increase;
/// objective_trace logs the accepted values, and without convergence the last
/// accepted A is returned.
SolverReport solve_chilasso(const CodingProblem& problem, const SolverConfig& config = {},
                            const GramMatrix* gram = nullptr);

/// Solves any model over all columns. Single-signal models code each column
/// independently; their report concatenates the column solutions, sums the
/// column objective traces (each padded with its final value), reports the
/// largest outer iteration count and converged only if every column did.
SolverReport solve(const CodingProblem& problem, Model model, const SolverConfig& config = {},
                   const GramMatrix* gram = nullptr);

} // namespace hilasso
