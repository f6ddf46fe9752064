#pragma once

#include <optional>

#include "hilasso/model.hpp"

namespace hilasso {

/// Elementwise sgn(w_i) * max(0, |w_i| - lam).
Vector soft_threshold(const Eigen::Ref<const Vector>& w, double lam);

/// [1 - lam / ||b||_2]_+ * b. Returns zero when ||b||_2 <= lam, including b = 0.
Vector vector_shrink(const Eigen::Ref<const Vector>& b, double lam);

struct ProxParams {
    double lambda1_tilde = 0.0; // l1 weight divided by the step parameter
    double lambda2_tilde = 0.0; // l2 weight divided by the step parameter
    double c = 1.0;             // augmented Lagrangian penalty
    double tol = 1e-8;
    int max_iter = 200;

    void validate() const;
};

/// ADMM iterates (b, beta, multiplier). Passing the state returned by one call
/// to the next call on a nearby input warm-starts the iteration.
struct ProxState {
    Vector b;
    Vector beta;
    Vector multiplier;
};

struct ProxResult {
    Vector b;
    int inner_iterations = 0;
    bool converged = false;
    ProxState state;
};

/// Minimizes 1/2 ||b - w||^2 + lambda2_tilde ||b||_2 + lambda1_tilde ||b||_1
/// by ADMM on the split b = beta:
///
///   b    <- S(w + c beta - p, lambda1_tilde) / (c + 1)
///   beta <- S_v(p + c b, lambda2_tilde) / c
///   p    <- p + c (b - beta)
///
/// and stops once max(||b - beta||_inf, ||beta - beta_prev||_inf) <= tol.
/// Returns b, or exactly zero when the last beta update zeroed the whole
/// group. On hitting max_iter the last iterate is returned with
/// converged = false.
/// Cold start is b = beta = p = 0.
ProxResult prox_l1_l2(const Eigen::Ref<const Vector>& w, const ProxParams& params,
                      const ProxState* warm_start = nullptr);

/// True iff zero minimizes the l1 + l2 prox subproblem at w, i.e.
/// ||S(w, lambda1_tilde)||_2 <= lambda2_tilde.
bool group_is_inactive(const Eigen::Ref<const Vector>& w, double lambda1_tilde, double lambda2_tilde);

} // namespace hilasso
