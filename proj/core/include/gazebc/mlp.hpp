#pragma once

#include <span>
#include <vector>

#include "gazebc/rng.hpp"

namespace gazebc {

enum class Activation { kRelu, kTanh };

struct MlpConfig {
    int input_dim = 1;
    std::vector<int> hidden_dims = {256, 256};
    int output_dim = 1;
    Activation activation = Activation::kRelu;
    double dropout_rate = 0.1;

    // Throws ValidationError on bad dimensions or dropout_rate >= 1.
    void validate() const;

    // [input_dim, hidden..., output_dim]
    std::vector<int> layer_dims() const;
};

// One dense layer: `weights` is row-major rows x cols (outputs x inputs).
struct LayerParams {
    int rows = 0;
    int cols = 0;
    std::vector<double> weights;
    std::vector<double> biases;
};

struct MlpParams {
    std::vector<LayerParams> layers;

    static MlpParams zeros(const MlpConfig& config);
    void fill(double value);
    // Elementwise x += scale * other, shapes must agree.
    void axpy(double scale, const MlpParams& other);
    std::size_t parameter_count() const;
};

// Fitted per-dimension statistics for the input normalization and output
// de-normalization layers. Stddevs are floored at 1e-6.
struct NormalizationStats {
    std::vector<double> input_mean;
    std::vector<double> input_std;
    std::vector<double> output_mean;
    std::vector<double> output_std;

    static NormalizationStats identity(int input_dim, int output_dim);
    void validate(const MlpConfig& config) const;
};

enum class PassMode { kTrain, kEval };

// Intermediate values from a forward pass, needed for the paired backward
// pass. Dropout masks store the multiplier applied to each activation
// (0 or 1/(1-p), inverted-dropout convention).
struct ForwardCache {
    std::vector<double> normalized_input;
    std::vector<std::vector<double>> pre_activations;  // per hidden layer
    std::vector<std::vector<double>> activations;      // post act + dropout
    std::vector<std::vector<double>> dropout_masks;    // per hidden layer
};

// Network stack: normalize input -> (dense, activation, dropout) per hidden
// layer -> dense -> de-normalize. In eval mode dropout is the identity.
// In train mode masks come from `cache->dropout_masks` when already
// populated, otherwise they are drawn from `rng` (required in that case).
std::vector<double> mlp_forward(const MlpConfig& config, const MlpParams& params,
                                const NormalizationStats& stats,
                                std::span<const double> input, PassMode mode,
                                Rng* rng = nullptr, ForwardCache* cache = nullptr);

// Exact reverse-mode gradients of output . upstream w.r.t. every parameter
// (accumulated into `param_grads`, which must be zero- or grad-initialized
// with matching shapes) and w.r.t. the raw input (written to `input_grad`
// when non-null).
void mlp_backward(const MlpConfig& config, const MlpParams& params,
                  const NormalizationStats& stats, const ForwardCache& cache,
                  std::span<const double> upstream, MlpParams& param_grads,
                  std::vector<double>* input_grad);

// Glorot-uniform weights, zero biases.
MlpParams init_params(const MlpConfig& config, Rng& rng);

// Population mean/std per dimension over the training set; std floored at
// 1e-6. Both lists must be nonempty.
NormalizationStats compute_normalization_stats(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<std::vector<double>>& outputs);

// Mean/std of one list (population convention, floor 1e-6); shared by the
// stats fitting above and by callers that normalize only the input side.
void mean_std(const std::vector<std::vector<double>>& rows,
              std::vector<double>& mean, std::vector<double>& std);

}  // namespace gazebc
