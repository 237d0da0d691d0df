#pragma once

#include "gazebc/mlp.hpp"

namespace gazebc {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    MlpParams first_moment;
    MlpParams second_moment;
    long step = 0;
    AdamConfig config;

    static AdamState init(const MlpConfig& mlp_config, const AdamConfig& config);
};

// Standard Adam update with bias correction; increments the step counter.
// Throws ComputeError naming the layer on non-finite gradients.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state);

}  // namespace gazebc
