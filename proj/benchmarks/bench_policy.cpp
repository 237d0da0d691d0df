#include <benchmark/benchmark.h>

#include <vector>

#include "gazebc/policy.hpp"
#include "gazebc/rng.hpp"

namespace {

using namespace gazebc;

EbmPolicy make_policy(int obs_dim, int hidden) {
    EbmPolicy policy;
    policy.config.input_dim = obs_dim + 2;
    policy.config.hidden_dims = {hidden, hidden};
    policy.config.output_dim = 1;
    policy.config.activation = Activation::kRelu;
    policy.config.dropout_rate = 0.0;
    Rng rng(11);
    policy.params = init_params(policy.config, rng);
    policy.stats = NormalizationStats::identity(policy.config.input_dim, 1);
    policy.bounds = ActionBounds{{-0.1, -0.1}, {0.1, 0.1}};
    return policy;
}

std::vector<double> make_obs(int obs_dim) {
    Rng rng(3);
    std::vector<double> obs(obs_dim);
    for (double& v : obs) v = rng.uniform(-1.0, 1.0);
    return obs;
}

void BM_EbmEnergy(benchmark::State& state) {
    const EbmPolicy policy = make_policy(16, 64);
    const std::vector<double> obs = make_obs(16);
    EbmEvaluator evaluator(policy, obs);
    Action action{0.01, -0.02};
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluator.energy(action));
    }
}
BENCHMARK(BM_EbmEnergy);

void BM_LangevinRefine(benchmark::State& state) {
    const EbmPolicy policy = make_policy(16, 64);
    const std::vector<double> obs = make_obs(16);
    LangevinConfig config;
    config.n_mcmc = static_cast<int>(state.range(0));
    config.n_samples = static_cast<int>(state.range(1));
    Rng rng(21);
    const std::vector<Action> seeds(static_cast<std::size_t>(config.n_samples),
                                    Action{0.0, 0.0});
    for (auto _ : state) {
        auto refined =
            langevin_refine(policy, obs, seeds, config, rng, LangevinMode::kInfer);
        benchmark::DoNotOptimize(refined);
    }
}
BENCHMARK(BM_LangevinRefine)->Args({20, 16})->Args({50, 32})->Args({100, 64});

void BM_IbcInfer(benchmark::State& state) {
    const EbmPolicy policy = make_policy(16, 64);
    const std::vector<double> obs = make_obs(16);
    LangevinConfig config;
    config.n_mcmc = static_cast<int>(state.range(0));
    config.n_samples = static_cast<int>(state.range(1));
    Rng rng(17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ibc_infer(policy, obs, config, rng));
    }
}
BENCHMARK(BM_IbcInfer)->Args({25, 32})->Args({100, 64});

}  // namespace
