#pragma once

// Shared helpers for the unit and acceptance suites: finite-difference
// gradient checks against the analytic backward pass, and a hand-built
// energy network with a known closed-form minimum.

#include <cmath>
#include <vector>

#include "gazebc/mlp.hpp"
#include "gazebc/policy.hpp"
#include "gazebc/rng.hpp"

namespace gazebc::testing {

// Scalar loss used by the gradient checks: dot(output, weights).
inline double weighted_output(const MlpConfig& config, const MlpParams& params,
                              const NormalizationStats& stats, const std::vector<double>& input,
                              const std::vector<double>& weights, PassMode mode,
                              ForwardCache* cache) {
    const std::vector<double> out = mlp_forward(config, params, stats, input, mode,
                                                /*rng=*/nullptr, cache);
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) total += out[i] * weights[i];
    return total;
}

struct GradCheckResult {
    double max_param_error = 0.0;  // relative, with absolute floor
    double max_input_error = 0.0;
};

// Central finite differences (h) on every parameter and input coordinate of
// a fixed-mask forward pass, compared against mlp_backward. The default h
// balances truncation against rounding: smaller steps let cancellation noise
// (~eps*|f|/h) dominate on coordinates with small gradients.
inline GradCheckResult check_gradients(const MlpConfig& config, MlpParams params,
                                       const NormalizationStats& stats,
                                       std::vector<double> input,
                                       const std::vector<double>& upstream, PassMode mode,
                                       Rng& rng, double h = 1e-4, double abs_floor = 1e-8) {
    // One stochastic forward pass freezes the dropout masks in the cache;
    // every later call reuses them, so the function being differentiated is
    // deterministic. ReLU pre-activations near the kink make central
    // differences unreliable, so nudge the input until all units are clear
    // of it.
    ForwardCache cache;
    for (int attempt = 0; attempt < 100; ++attempt) {
        cache = ForwardCache{};
        mlp_forward(config, params, stats, input, mode, &rng, &cache);
        if (config.activation != Activation::kRelu) break;
        double min_pre = 1e300;
        for (const auto& layer : cache.pre_activations) {
            for (double pre : layer) min_pre = std::min(min_pre, std::abs(pre));
        }
        if (min_pre > 1e-3) break;
        for (double& x : input) x += rng.uniform(-0.05, 0.05);
    }

    MlpParams grads = MlpParams::zeros(config);
    std::vector<double> input_grad;
    mlp_backward(config, params, stats, cache, upstream, grads, &input_grad);

    GradCheckResult result;
    auto rel_error = [&](double analytic, double numeric) {
        const double denom = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
        return std::abs(analytic - numeric) / denom;
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        for (auto field : {&LayerParams::weights, &LayerParams::biases}) {
            std::vector<double>& values = params.layers[l].*field;
            const std::vector<double>& grad_values = grads.layers[l].*field;
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double saved = values[i];
                ForwardCache plus = cache, minus = cache;
                values[i] = saved + h;
                const double up = weighted_output(config, params, stats, input, upstream, mode,
                                                  &plus);
                values[i] = saved - h;
                const double down = weighted_output(config, params, stats, input, upstream, mode,
                                                    &minus);
                values[i] = saved;
                const double numeric = (up - down) / (2.0 * h);
                result.max_param_error =
                    std::max(result.max_param_error, rel_error(grad_values[i], numeric));
            }
        }
    }
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double saved = input[i];
        ForwardCache plus = cache, minus = cache;
        input[i] = saved + h;
        const double up = weighted_output(config, params, stats, input, upstream, mode, &plus);
        input[i] = saved - h;
        const double down = weighted_output(config, params, stats, input, upstream, mode, &minus);
        input[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        result.max_input_error =
            std::max(result.max_input_error, rel_error(input_grad[i], numeric));
    }
    return result;
}

// Energy network computing E(o, a) = |a_yaw - t_yaw| + |a_pitch - t_pitch|
// via a ReLU pair per axis; the observation columns have zero weight, so
// the unique minimum over actions sits at `target` regardless of context.
inline EbmPolicy l1_well_policy(int obs_dim, Action target) {
    EbmPolicy policy;
    policy.config.input_dim = obs_dim + 2;
    policy.config.hidden_dims = {4};
    policy.config.output_dim = 1;
    policy.config.activation = Activation::kRelu;
    policy.config.dropout_rate = 0.0;
    policy.params = MlpParams::zeros(policy.config);
    policy.stats = NormalizationStats::identity(policy.config.input_dim, 1);

    LayerParams& hidden = policy.params.layers[0];
    const int yaw_col = obs_dim;
    const int pitch_col = obs_dim + 1;
    auto set = [&](int row, int col, double w) {
        hidden.weights[static_cast<std::size_t>(row) * hidden.cols + col] = w;
    };
    set(0, yaw_col, 1.0);
    hidden.biases[0] = -target.yaw;
    set(1, yaw_col, -1.0);
    hidden.biases[1] = target.yaw;
    set(2, pitch_col, 1.0);
    hidden.biases[2] = -target.pitch;
    set(3, pitch_col, -1.0);
    hidden.biases[3] = target.pitch;
    LayerParams& out = policy.params.layers[1];
    out.weights = {1.0, 1.0, 1.0, 1.0};
    out.biases = {0.0};
    return policy;
}

// Small randomly initialized energy network for oracle comparisons.
inline EbmPolicy random_ebm(int obs_dim, const std::vector<int>& hidden, Rng& rng,
                            Activation activation = Activation::kRelu) {
    EbmPolicy policy;
    policy.config.input_dim = obs_dim + 2;
    policy.config.hidden_dims = hidden;
    policy.config.output_dim = 1;
    policy.config.activation = activation;
    policy.config.dropout_rate = 0.0;
    policy.params = init_params(policy.config, rng);
    policy.stats = NormalizationStats::identity(policy.config.input_dim, 1);
    return policy;
}

}  // namespace gazebc::testing
