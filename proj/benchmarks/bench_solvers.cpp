#include <benchmark/benchmark.h>

#include <memory>

#include "hilasso/solvers.hpp"
#include "hilasso/synth.hpp"

using namespace hilasso;

namespace {

// Default synthetic setting (8 groups of 64 atoms, m = 64, k = 8) with
// `n` signals.
struct Instance {
    std::shared_ptr<const Dictionary> dictionary;
    Trial trial;
    GramMatrix gram;

    explicit Instance(Index n) : dictionary(make_dictionary()), trial(make_trial(dictionary, n)), gram(*dictionary) {}

    static SynthSpec spec(Index n) {
        SynthSpec s;
        s.n = n;
        s.sigma = 0.1;
        s.seed = 5;
        return s;
    }
    static std::shared_ptr<const Dictionary> make_dictionary() {
        return std::make_shared<const Dictionary>(gen_dictionary(spec(1)));
    }
    static Trial make_trial(const std::shared_ptr<const Dictionary>& d, Index n) { return gen_trial(spec(n), d); }
};

void run_model(benchmark::State& state, Model model, double l1, double l2) {
    const Instance inst(state.range(0));
    const CodingProblem problem = inst.trial.problem.with_lambdas(l1, l2);
    for (auto _ : state) benchmark::DoNotOptimize(solve(problem, model, {}, &inst.gram));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Lasso(benchmark::State& state) { run_model(state, Model::lasso, 0.15, 0.0); }
void BM_GroupLasso(benchmark::State& state) { run_model(state, Model::glasso, 0.0, 0.3); }
void BM_HiLasso(benchmark::State& state) { run_model(state, Model::hilasso, 0.1, 0.1); }
void BM_CHiLasso(benchmark::State& state) { run_model(state, Model::chilasso, 0.1, 1.0); }

BENCHMARK(BM_Lasso)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroupLasso)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HiLasso)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CHiLasso)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GramMatrix(benchmark::State& state) {
    const auto d = Instance::make_dictionary();
    for (auto _ : state) benchmark::DoNotOptimize(GramMatrix(*d));
}
BENCHMARK(BM_GramMatrix)->Unit(benchmark::kMillisecond);

} // namespace
