#include <benchmark/benchmark.h>

#include <vector>

#include "gazebc/mlp.hpp"
#include "gazebc/rng.hpp"

namespace {

using namespace gazebc;

MlpConfig make_config(int input_dim, int hidden, int output_dim) {
    MlpConfig config;
    config.input_dim = input_dim;
    config.hidden_dims = {hidden, hidden};
    config.output_dim = output_dim;
    config.activation = Activation::kRelu;
    config.dropout_rate = 0.0;
    return config;
}

void BM_MlpForward(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    const MlpConfig config = make_config(16, hidden, 2);
    Rng rng(7);
    const MlpParams params = init_params(config, rng);
    const NormalizationStats stats = NormalizationStats::identity(16, 2);
    std::vector<double> input(16);
    for (double& v : input) v = rng.uniform(-1.0, 1.0);

    for (auto _ : state) {
        auto out = mlp_forward(config, params, stats, input, PassMode::kEval);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(128)->Arg(256);

void BM_MlpBackward(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    const MlpConfig config = make_config(16, hidden, 2);
    Rng rng(7);
    const MlpParams params = init_params(config, rng);
    const NormalizationStats stats = NormalizationStats::identity(16, 2);
    std::vector<double> input(16);
    for (double& v : input) v = rng.uniform(-1.0, 1.0);
    const std::vector<double> upstream = {1.0, -0.5};

    ForwardCache cache;
    mlp_forward(config, params, stats, input, PassMode::kEval, nullptr, &cache);
    MlpParams grads = params;
    std::vector<double> input_grad;
    for (auto _ : state) {
        mlp_backward(config, params, stats, cache, upstream, grads, &input_grad);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_MlpBackward)->Arg(64)->Arg(128)->Arg(256);

}  // namespace
