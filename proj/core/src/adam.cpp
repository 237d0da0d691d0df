#include "gazebc/adam.hpp"

#include <cmath>
#include <string>

#include "gazebc/error.hpp"

namespace gazebc {

AdamState AdamState::init(const MlpConfig& mlp_config, const AdamConfig& config) {
    AdamState state;
    state.first_moment = MlpParams::zeros(mlp_config);
    state.second_moment = MlpParams::zeros(mlp_config);
    state.step = 0;
    state.config = config;
    return state;
}

namespace {

void update_span(std::vector<double>& p, const std::vector<double>& g,
                 std::vector<double>& m, std::vector<double>& v, const AdamConfig& cfg,
                 double bias1, double bias2, std::size_t layer_index) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(g[i])) {
            throw ComputeError("adam_step: non-finite gradient at layer " +
                               std::to_string(layer_index));
        }
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state) {
    if (params.layers.size() != grads.layers.size() ||
        params.layers.size() != state.first_moment.layers.size()) {
        throw ValidationError("adam_step: shape mismatch");
    }
    state.step += 1;
    const AdamConfig& cfg = state.config;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        update_span(params.layers[l].weights, grads.layers[l].weights,
                    state.first_moment.layers[l].weights, state.second_moment.layers[l].weights,
                    cfg, bias1, bias2, l);
        update_span(params.layers[l].biases, grads.layers[l].biases,
                    state.first_moment.layers[l].biases, state.second_moment.layers[l].biases,
                    cfg, bias1, bias2, l);
    }
}

}  // namespace gazebc
