#include "hilasso/prox.hpp"

#include <algorithm>
#include <cmath>

namespace hilasso {

Vector soft_threshold(const Eigen::Ref<const Vector>& w, double lam) {
    Vector out(w.size());
    for (Index i = 0; i < w.size(); ++i) {
        const double mag = std::abs(w(i)) - lam;
        out(i) = mag > 0.0 ? std::copysign(mag, w(i)) : 0.0;
    }
    return out;
}

Vector vector_shrink(const Eigen::Ref<const Vector>& b, double lam) {
    const double norm = b.norm();
    if (norm <= lam || norm == 0.0) return Vector::Zero(b.size());
    return (1.0 - lam / norm) * b;
}

void ProxParams::validate() const {
    if (!(lambda1_tilde >= 0.0) || !(lambda2_tilde >= 0.0))
        throw InvalidArgument("prox weights must be nonnegative");
    if (!(c > 0.0)) throw InvalidArgument("ADMM constant c must be positive");
    if (!(tol > 0.0)) throw InvalidArgument("prox tolerance must be positive");
    if (max_iter < 1) throw InvalidArgument("prox max_iter must be positive");
}

ProxResult prox_l1_l2(const Eigen::Ref<const Vector>& w, const ProxParams& params, const ProxState* warm_start) {
    const Index n = w.size();
    const double c = params.c;

    ProxResult result;
    ProxState& s = result.state;
    if (warm_start && warm_start->b.size() == n && warm_start->beta.size() == n && warm_start->multiplier.size() == n) {
        s = *warm_start;
    } else {
        s.b = Vector::Zero(n);
        s.beta = Vector::Zero(n);
        s.multiplier = Vector::Zero(n);
    }

    Vector beta_prev(n);
    for (int it = 0; it < params.max_iter; ++it) {
        beta_prev = s.beta;
        s.b = soft_threshold(w + c * s.beta - s.multiplier, params.lambda1_tilde) / (c + 1.0);
        s.beta = vector_shrink(s.multiplier + c * s.b, params.lambda2_tilde) / c;
        s.multiplier += c * (s.b - s.beta);
        result.inner_iterations = it + 1;

        const double primal = n ? (s.b - s.beta).lpNorm<Eigen::Infinity>() : 0.0;
        const double dual = n ? (s.beta - beta_prev).lpNorm<Eigen::Infinity>() : 0.0;
        if (std::max(primal, dual) <= params.tol) {
            result.converged = true;
            break;
        }
    }
    // b carries the exact zeros of the l1 part and beta those of the group
    // part. A group that beta shrank away is returned as exactly zero.
    result.b = (s.beta.array() == 0.0).all() ? Vector::Zero(n) : s.b;
    return result;
}

bool group_is_inactive(const Eigen::Ref<const Vector>& w, double lambda1_tilde, double lambda2_tilde) {
    double sq = 0.0;
    for (Index i = 0; i < w.size(); ++i) {
        const double mag = std::abs(w(i)) - lambda1_tilde;
        if (mag > 0.0) sq += mag * mag;
    }
    return std::sqrt(sq) <= lambda2_tilde;
}

} // namespace hilasso
