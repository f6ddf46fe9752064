#include <benchmark/benchmark.h>

#include "hilasso/prox.hpp"
#include "hilasso/rng.hpp"

using namespace hilasso;

namespace {

Vector random_vector(Rng& rng, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = 2.0 * rng.normal();
    return v;
}

void BM_ProxL1L2(benchmark::State& state) {
    Rng rng(1);
    const Vector w = random_vector(rng, state.range(0));
    ProxParams params;
    params.lambda1_tilde = 0.5;
    params.lambda2_tilde = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(prox_l1_l2(w, params));
}
BENCHMARK(BM_ProxL1L2)->Arg(8)->Arg(64)->Arg(256);

void BM_ProxL1L2WarmStart(benchmark::State& state) {
    Rng rng(2);
    const Vector w = random_vector(rng, state.range(0));
    ProxParams params;
    params.lambda1_tilde = 0.5;
    params.lambda2_tilde = 1.0;
    const ProxState warm = prox_l1_l2(w, params).state;
    const Vector nearby = w + 1e-3 * random_vector(rng, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(prox_l1_l2(nearby, params, &warm));
}
BENCHMARK(BM_ProxL1L2WarmStart)->Arg(64);

void BM_ShrinkComposition(benchmark::State& state) {
    Rng rng(3);
    const Vector w = random_vector(rng, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(vector_shrink(soft_threshold(w, 0.5), 1.0));
}
BENCHMARK(BM_ShrinkComposition)->Arg(64);

} // namespace
