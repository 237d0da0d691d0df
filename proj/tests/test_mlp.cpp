#include <cmath>
#include <vector>

#include "doctest.h"
#include "gazebc/error.hpp"
#include "gazebc/mlp.hpp"
#include "support.hpp"

using namespace gazebc;

namespace {

MlpConfig random_config(Rng& rng) {
    MlpConfig config;
    config.input_dim = rng.uniform_int(1, 6);
    const int depth = rng.uniform_int(1, 3);
    config.hidden_dims.clear();
    for (int i = 0; i < depth; ++i) config.hidden_dims.push_back(rng.uniform_int(2, 16));
    config.output_dim = rng.uniform_int(1, 3);
    config.activation = rng.uniform() < 0.5 ? Activation::kRelu : Activation::kTanh;
    config.dropout_rate = rng.uniform() < 0.5 ? 0.0 : 0.3;
    return config;
}

}  // namespace

TEST_CASE("parameter and input gradients match finite differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const MlpConfig config = random_config(rng);
        MlpParams params = init_params(config, rng);
        // Random biases keep ReLU pre-activations off the exact kink even
        // when an upstream layer happens to be fully dead.
        for (auto& layer : params.layers) {
            for (double& b : layer.biases) b = rng.uniform(-0.3, 0.3);
        }
        NormalizationStats stats = NormalizationStats::identity(config.input_dim,
                                                                config.output_dim);
        for (double& m : stats.input_mean) m = rng.uniform(-0.5, 0.5);
        for (double& s : stats.input_std) s = rng.uniform(0.5, 2.0);
        for (double& m : stats.output_mean) m = rng.uniform(-0.5, 0.5);
        for (double& s : stats.output_std) s = rng.uniform(0.5, 2.0);

        std::vector<double> input(config.input_dim);
        for (double& x : input) x = rng.uniform(-1.0, 1.0);
        std::vector<double> upstream(config.output_dim);
        for (double& u : upstream) u = rng.uniform(-1.0, 1.0);

        const PassMode mode = config.dropout_rate > 0.0 ? PassMode::kTrain : PassMode::kEval;
        Rng mask_rng = rng.split(static_cast<std::uint64_t>(trial));
        const auto result = testing::check_gradients(config, params, stats, input, upstream,
                                                     mode, mask_rng);
        CHECK(result.max_param_error < 1e-5);
        CHECK(result.max_input_error < 1e-5);
    }
}

TEST_CASE("forward is deterministic and dropout-free in eval mode") {
    MlpConfig config;
    config.input_dim = 4;
    config.hidden_dims = {8, 8};
    config.output_dim = 2;
    config.dropout_rate = 0.5;
    Rng rng(3);
    const MlpParams params = init_params(config, rng);
    const auto stats = NormalizationStats::identity(4, 2);
    const std::vector<double> input = {0.1, -0.2, 0.3, 0.4};

    const auto a = mlp_forward(config, params, stats, input, PassMode::kEval);
    const auto b = mlp_forward(config, params, stats, input, PassMode::kEval);
    CHECK(a == b);

    // With dropout disabled, train and eval modes agree.
    MlpConfig no_drop = config;
    no_drop.dropout_rate = 0.0;
    Rng mask_rng(4);
    const auto c = mlp_forward(no_drop, params, stats, input, PassMode::kTrain, &mask_rng);
    CHECK(a == c);
}

TEST_CASE("train-mode dropout uses inverted scaling") {
    MlpConfig config;
    config.input_dim = 1;
    config.hidden_dims = {64};
    config.output_dim = 1;
    config.dropout_rate = 0.5;
    Rng rng(5);
    MlpParams params = init_params(config, rng);
    const auto stats = NormalizationStats::identity(1, 1);

    Rng mask_rng(6);
    ForwardCache cache;
    mlp_forward(config, params, stats, std::vector<double>{0.7}, PassMode::kTrain, &mask_rng,
                &cache);
    int zeros = 0, scaled = 0;
    for (double m : cache.dropout_masks[0]) {
        if (m == 0.0) {
            ++zeros;
        } else {
            CHECK(m == doctest::Approx(2.0));
            ++scaled;
        }
    }
    CHECK(zeros > 10);
    CHECK(scaled > 10);
}

TEST_CASE("dimension mismatch and non-finite input are rejected") {
    MlpConfig config;
    config.input_dim = 3;
    config.hidden_dims = {4};
    config.output_dim = 1;
    config.dropout_rate = 0.0;
    Rng rng(1);
    const MlpParams params = init_params(config, rng);
    const auto stats = NormalizationStats::identity(3, 1);

    CHECK_THROWS_AS(mlp_forward(config, params, stats, std::vector<double>{1.0, 2.0},
                                PassMode::kEval),
                    ValidationError);
    const double nan = std::nan("");
    CHECK_THROWS_AS(mlp_forward(config, params, stats, std::vector<double>{1.0, nan, 0.0},
                                PassMode::kEval),
                    ValidationError);
}

TEST_CASE("config validation") {
    MlpConfig config;
    config.input_dim = 0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config.input_dim = 2;
    config.dropout_rate = 1.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config.dropout_rate = 0.1;
    config.hidden_dims = {4, 0};
    CHECK_THROWS_AS(config.validate(), ValidationError);
}

TEST_CASE("mean_std matches hand computation and floors constants") {
    std::vector<std::vector<double>> rows = {{1.0, 5.0}, {3.0, 5.0}, {5.0, 5.0}};
    std::vector<double> mean, std_dev;
    mean_std(rows, mean, std_dev);
    CHECK(mean[0] == doctest::Approx(3.0));
    // Population convention: sqrt(((1-3)^2 + 0 + (5-3)^2) / 3).
    CHECK(std_dev[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK(mean[1] == doctest::Approx(5.0));
    CHECK(std_dev[1] == doctest::Approx(1e-6));
}

TEST_CASE("normalization stats round-trip through the network edges") {
    // With identity weights the network output is
    // out_std * ((x - in_mean) / in_std) + out_mean.
    MlpConfig config;
    config.input_dim = 1;
    config.hidden_dims = {};
    config.output_dim = 1;
    config.dropout_rate = 0.0;
    MlpParams params = MlpParams::zeros(config);
    params.layers[0].weights = {1.0};
    NormalizationStats stats;
    stats.input_mean = {2.0};
    stats.input_std = {4.0};
    stats.output_mean = {10.0};
    stats.output_std = {3.0};
    const auto out = mlp_forward(config, params, stats, std::vector<double>{6.0},
                                 PassMode::kEval);
    CHECK(out[0] == doctest::Approx(3.0 * (6.0 - 2.0) / 4.0 + 10.0));
}

TEST_CASE("glorot init respects the fan bound and is seed-deterministic") {
    MlpConfig config;
    config.input_dim = 8;
    config.hidden_dims = {16};
    config.output_dim = 4;
    Rng rng1(77), rng2(77);
    const MlpParams a = init_params(config, rng1);
    const MlpParams b = init_params(config, rng2);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].weights == b.layers[l].weights);
        const double bound =
            std::sqrt(6.0 / (a.layers[l].cols + a.layers[l].rows)) + 1e-12;
        for (double w : a.layers[l].weights) CHECK(std::abs(w) <= bound);
        for (double bias : a.layers[l].biases) CHECK(bias == 0.0);
    }
}
