#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hilasso/prox.hpp"
#include "oracles.hpp"

using namespace hilasso;

namespace {

ProxParams params(double l1, double l2) {
    ProxParams p;
    p.lambda1_tilde = l1;
    p.lambda2_tilde = l2;
    return p;
}

double prox_objective(double b0, double b1, const Vector& w, double l1, double l2) {
    const double d0 = b0 - w(0), d1 = b1 - w(1);
    return 0.5 * (d0 * d0 + d1 * d1) + l1 * (std::abs(b0) + std::abs(b1)) + l2 * std::hypot(b0, b1);
}

Vector random_vector(Rng& rng, Index n, double scale) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
    return v;
}

} // namespace

TEST(SoftThreshold, Examples) {
    EXPECT_EQ(soft_threshold(Vector::Zero(1), 1.0), Vector::Zero(1));
    const Vector w = (Vector(3) << 1.5, -2.0, 0.3).finished();
    EXPECT_EQ(soft_threshold(w, 0.0), w);
    const Vector out = soft_threshold(w, 0.5);
    EXPECT_DOUBLE_EQ(out(0), 1.0);
    EXPECT_DOUBLE_EQ(out(1), -1.5);
    EXPECT_EQ(out(2), 0.0);
}

TEST(SoftThreshold, NeverGrowsAMagnitude) {
    Rng rng(10);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector w = random_vector(rng, 7, 2.0);
        const Vector s = soft_threshold(w, 2.0 * rng.uniform());
        for (Index i = 0; i < w.size(); ++i) {
            EXPECT_LE(std::abs(s(i)), std::abs(w(i)));
            EXPECT_TRUE(s(i) == 0.0 || std::signbit(s(i)) == std::signbit(w(i)));
        }
    }
}

TEST(VectorShrink, Examples) {
    const Vector b = (Vector(2) << 3, 4).finished();
    const Vector out = vector_shrink(b, 2.5);
    EXPECT_DOUBLE_EQ(out(0), 1.5);
    EXPECT_DOUBLE_EQ(out(1), 2.0);
    EXPECT_EQ(vector_shrink(b, 5.0), Vector::Zero(2));
    EXPECT_EQ(vector_shrink(b, 7.0), Vector::Zero(2));
    EXPECT_EQ(vector_shrink(Vector::Zero(3), 0.0), Vector::Zero(3));
    EXPECT_EQ(vector_shrink(b, 0.0), b);
}

TEST(VectorShrink, PreservesDirection) {
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector b = random_vector(rng, 5, 1.0);
        const Vector s = vector_shrink(b, 2.0 * rng.uniform());
        if (s.isZero(0.0)) continue;
        const double scale = s.dot(b) / b.squaredNorm();
        EXPECT_GT(scale, 0.0);
        EXPECT_LE(scale, 1.0);
        EXPECT_LT((s - scale * b).norm(), 1e-12);
    }
}

TEST(ProxL1L2, ZeroInputGivesZero) {
    const ProxResult r = prox_l1_l2(Vector::Zero(4), params(0.3, 0.3));
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.b, Vector::Zero(4));
}

TEST(ProxL1L2, WithoutL1ItIsVectorShrink) {
    Rng rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector w = random_vector(rng, 6, 1.5);
        const double l2 = 2.0 * rng.uniform();
        const ProxResult r = prox_l1_l2(w, params(0.0, l2));
        EXPECT_LT((r.b - vector_shrink(w, l2)).lpNorm<Eigen::Infinity>(), 1e-6);
    }
}

TEST(ProxL1L2, ThreeFourExampleAgainstGridOracle) {
    const Vector w = (Vector(2) << 3, 4).finished();
    // Independent check first: brute-force minimization of the 2-D objective.
    const auto grid = oracle::grid_minimize_2d([&](double u, double v) { return prox_objective(u, v, w, 1, 1); }, -5, 5);
    EXPECT_NEAR(grid[0], 1.4453, 1e-4);
    EXPECT_NEAR(grid[1], 2.1680, 1e-4);

    // Frozen: S_v((2, 3), 1) = (1 - 1/sqrt(13)) (2, 3).
    const double factor = 1.0 - 1.0 / std::sqrt(13.0);
    EXPECT_NEAR(2 * factor, 1.44529980, 1e-8);
    EXPECT_NEAR(3 * factor, 2.16794970, 1e-8);

    const ProxResult r = prox_l1_l2(w, params(1, 1));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.b(0), 1.44529980, 1e-7);
    EXPECT_NEAR(r.b(1), 2.16794970, 1e-7);
    EXPECT_NEAR(r.b(0), grid[0], 1e-6);
    EXPECT_NEAR(r.b(1), grid[1], 1e-6);
}

TEST(ProxL1L2, GridOracleOnRandomTwoDimensionalInputs) {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const Vector w = random_vector(rng, 2, 2.0);
        const double l1 = rng.uniform(), l2 = rng.uniform();
        const auto grid = oracle::grid_minimize_2d(
            [&](double u, double v) { return prox_objective(u, v, w, l1, l2); }, -6, 6, 201, 10);
        const ProxResult r = prox_l1_l2(w, params(l1, l2));
        EXPECT_NEAR(r.b(0), grid[0], 1e-6);
        EXPECT_NEAR(r.b(1), grid[1], 1e-6);
    }
}

TEST(ProxL1L2, SatisfiesSubgradientOptimality) {
    Rng rng(14);
    for (int rep = 0; rep < 300; ++rep) {
        const Index n = 1 + static_cast<Index>(rng.below(20));
        const Vector w = random_vector(rng, n, 1.5);
        const double l1 = 2.0 * rng.uniform(), l2 = 2.0 * rng.uniform();
        const ProxResult r = prox_l1_l2(w, params(l1, l2));
        EXPECT_LE(oracle::prox_optimality_violation(w, r.b, l1, l2), 1e-5);
    }
}

TEST(ProxL1L2, MatchesShrinkCompositionOnRandomInputs) {
    Rng rng(15);
    for (int rep = 0; rep < 300; ++rep) {
        const Index n = 1 + static_cast<Index>(rng.below(20));
        const Vector w = random_vector(rng, n, 1.5);
        const double l1 = 2.0 * rng.uniform(), l2 = 2.0 * rng.uniform();
        const ProxResult r = prox_l1_l2(w, params(l1, l2));
        EXPECT_LE((r.b - vector_shrink(soft_threshold(w, l1), l2)).lpNorm<Eigen::Infinity>(), 1e-6);
    }
}

TEST(ProxL1L2, Nonexpansive) {
    Rng rng(16);
    const ProxParams p = params(0.4, 0.7);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector u = random_vector(rng, 8, 1.0), v = random_vector(rng, 8, 1.0);
        const double gap = (prox_l1_l2(u, p).b - prox_l1_l2(v, p).b).norm();
        EXPECT_LE(gap, (u - v).norm() + 2 * p.tol);
    }
}

TEST(ProxL1L2, WarmStartReachesTheSamePointFaster) {
    Rng rng(17);
    const Vector w = random_vector(rng, 16, 2.0);
    const ProxParams p = params(0.3, 0.5);
    const ProxResult cold = prox_l1_l2(w, p);
    const ProxResult warm = prox_l1_l2(w, p, &cold.state);
    EXPECT_TRUE(warm.converged);
    EXPECT_LT(warm.inner_iterations, cold.inner_iterations);
    EXPECT_LE((warm.b - cold.b).lpNorm<Eigen::Infinity>(), 1e-7);
}

TEST(ProxL1L2, MismatchedWarmStartFallsBackToColdStart) {
    const Vector w = (Vector(2) << 3, 4).finished();
    ProxState bad{Vector::Ones(3), Vector::Ones(3), Vector::Ones(3)};
    const ProxResult r = prox_l1_l2(w, params(1, 1), &bad);
    EXPECT_EQ(r.inner_iterations, prox_l1_l2(w, params(1, 1)).inner_iterations);
}

TEST(ProxL1L2, IterationCapReportsNonConvergence) {
    ProxParams p = params(1, 1);
    p.max_iter = 1;
    const ProxResult r = prox_l1_l2((Vector(2) << 3, 4).finished(), p);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.inner_iterations, 1);
    EXPECT_EQ(r.b.size(), 2);
}

TEST(ProxL1L2, ParamsValidation) {
    EXPECT_THROW(params(-1, 0).validate(), InvalidArgument);
    ProxParams p = params(0, 0);
    p.c = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = params(0, 0);
    p.max_iter = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(GroupInactive, Examples) {
    const Vector small = (Vector(2) << 0.1, -0.1).finished();
    EXPECT_TRUE(group_is_inactive(small, 0.0, small.norm()));
    EXPECT_FALSE(group_is_inactive((Vector(2) << 0.5, 0.0).finished(), 0.4, 0.0));

    const Vector w = (Vector(2) << 0.5, 0.5).finished();
    EXPECT_TRUE(group_is_inactive(w, 0.4, 0.2));
    // Zero is optimal: the grid minimizer lands on the origin.
    const auto grid = oracle::grid_minimize_2d([&](double u, double v) { return prox_objective(u, v, w, 0.4, 0.2); }, -1, 1);
    EXPECT_NEAR(grid[0], 0.0, 1e-6);
    EXPECT_NEAR(grid[1], 0.0, 1e-6);
    EXPECT_DOUBLE_EQ(oracle::prox_optimality_violation(w, Vector::Zero(2), 0.4, 0.2), 0.0);
    // Slightly weaker group penalty: zero stops being optimal.
    EXPECT_FALSE(group_is_inactive(w, 0.4, 0.1));
}

TEST(GroupInactive, ImpliesZeroProx) {
    Rng rng(18);
    int inactive = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const Vector w = random_vector(rng, 5, 0.6);
        const double l1 = rng.uniform(), l2 = rng.uniform();
        const bool off = group_is_inactive(w, l1, l2);
        const ProxResult r = prox_l1_l2(w, params(l1, l2));
        if (off) {
            ++inactive;
            EXPECT_LE(r.b.lpNorm<Eigen::Infinity>(), 1e-8);
        } else {
            EXPECT_GT(r.b.norm(), 0.0);
        }
    }
    EXPECT_GT(inactive, 50);
}
