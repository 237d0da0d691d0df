#include "gazebc/mlp.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "gazebc/error.hpp"

namespace gazebc {

namespace {

constexpr double kStdFloor = 1e-6;

bool all_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double activate(Activation act, double x) {
    switch (act) {
        case Activation::kRelu: return x > 0.0 ? x : 0.0;
        case Activation::kTanh: return std::tanh(x);
    }
    return 0.0;
}

double activate_grad(Activation act, double pre) {
    switch (act) {
        case Activation::kRelu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::kTanh: {
            const double t = std::tanh(pre);
            return 1.0 - t * t;
        }
    }
    return 0.0;
}

}  // namespace

void MlpConfig::validate() const {
    if (input_dim < 1) throw ValidationError("MlpConfig: input_dim must be >= 1");
    if (output_dim < 1) throw ValidationError("MlpConfig: output_dim must be >= 1");
    for (int h : hidden_dims) {
        if (h < 1) throw ValidationError("MlpConfig: hidden dims must be >= 1");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw ValidationError("MlpConfig: dropout_rate must be in [0, 1)");
    }
}

std::vector<int> MlpConfig::layer_dims() const {
    std::vector<int> dims;
    dims.reserve(hidden_dims.size() + 2);
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(output_dim);
    return dims;
}

MlpParams MlpParams::zeros(const MlpConfig& config) {
    config.validate();
    const auto dims = config.layer_dims();
    MlpParams params;
    params.layers.resize(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        LayerParams& layer = params.layers[i];
        layer.rows = dims[i + 1];
        layer.cols = dims[i];
        layer.weights.assign(static_cast<std::size_t>(layer.rows) * layer.cols, 0.0);
        layer.biases.assign(layer.rows, 0.0);
    }
    return params;
}

void MlpParams::fill(double value) {
    for (LayerParams& layer : layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), value);
        std::fill(layer.biases.begin(), layer.biases.end(), value);
    }
}

void MlpParams::axpy(double scale, const MlpParams& other) {
    if (layers.size() != other.layers.size()) {
        throw ValidationError("MlpParams::axpy: layer count mismatch");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        LayerParams& a = layers[i];
        const LayerParams& b = other.layers[i];
        if (a.weights.size() != b.weights.size() || a.biases.size() != b.biases.size()) {
            throw ValidationError("MlpParams::axpy: shape mismatch at layer " +
                                  std::to_string(i));
        }
        for (std::size_t j = 0; j < a.weights.size(); ++j) a.weights[j] += scale * b.weights[j];
        for (std::size_t j = 0; j < a.biases.size(); ++j) a.biases[j] += scale * b.biases[j];
    }
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const LayerParams& layer : layers) n += layer.weights.size() + layer.biases.size();
    return n;
}

NormalizationStats NormalizationStats::identity(int input_dim, int output_dim) {
    NormalizationStats stats;
    stats.input_mean.assign(input_dim, 0.0);
    stats.input_std.assign(input_dim, 1.0);
    stats.output_mean.assign(output_dim, 0.0);
    stats.output_std.assign(output_dim, 1.0);
    return stats;
}

void NormalizationStats::validate(const MlpConfig& config) const {
    if (static_cast<int>(input_mean.size()) != config.input_dim ||
        static_cast<int>(input_std.size()) != config.input_dim ||
        static_cast<int>(output_mean.size()) != config.output_dim ||
        static_cast<int>(output_std.size()) != config.output_dim) {
        throw ValidationError("NormalizationStats: shape mismatch with MlpConfig");
    }
    for (double s : input_std) {
        if (!(s > 0.0)) throw ValidationError("NormalizationStats: input_std must be > 0");
    }
    for (double s : output_std) {
        if (!(s > 0.0)) throw ValidationError("NormalizationStats: output_std must be > 0");
    }
}

std::vector<double> mlp_forward(const MlpConfig& config, const MlpParams& params,
                                const NormalizationStats& stats,
                                std::span<const double> input, PassMode mode,
                                Rng* rng, ForwardCache* cache) {
    if (static_cast<int>(input.size()) != config.input_dim) {
        throw ValidationError("mlp_forward: input length " + std::to_string(input.size()) +
                              " != input_dim " + std::to_string(config.input_dim));
    }
    if (!all_finite(input)) throw ValidationError("mlp_forward: non-finite input");
    stats.validate(config);

    const std::size_t n_hidden = config.hidden_dims.size();
    if (params.layers.size() != n_hidden + 1) {
        throw ValidationError("mlp_forward: params/config layer count mismatch");
    }

    std::vector<double> x(input.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = (input[i] - stats.input_mean[i]) / stats.input_std[i];
    }

    const bool train = mode == PassMode::kTrain;
    const double keep = 1.0 - config.dropout_rate;
    if (cache) {
        cache->normalized_input = x;
        cache->pre_activations.resize(n_hidden);
        cache->activations.resize(n_hidden);
        if (cache->dropout_masks.size() != n_hidden) cache->dropout_masks.assign(n_hidden, {});
    }

    for (std::size_t l = 0; l < n_hidden; ++l) {
        const LayerParams& layer = params.layers[l];
        std::vector<double> z(layer.rows);
        for (int r = 0; r < layer.rows; ++r) {
            const double* w = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
            double acc = layer.biases[r];
            for (int c = 0; c < layer.cols; ++c) acc += w[c] * x[c];
            z[r] = acc;
        }
        std::vector<double> h(layer.rows);
        for (int r = 0; r < layer.rows; ++r) h[r] = activate(config.activation, z[r]);

        if (train && config.dropout_rate > 0.0) {
            std::vector<double>* mask = cache ? &cache->dropout_masks[l] : nullptr;
            std::vector<double> local_mask;
            if (!mask) mask = &local_mask;
            if (mask->empty()) {
                if (!rng) {
                    throw ValidationError("mlp_forward: train mode needs an Rng or a cached mask");
                }
                mask->resize(layer.rows);
                for (int r = 0; r < layer.rows; ++r) {
                    (*mask)[r] = rng->uniform() < config.dropout_rate ? 0.0 : 1.0 / keep;
                }
            } else if (static_cast<int>(mask->size()) != layer.rows) {
                throw ValidationError("mlp_forward: dropout mask shape mismatch");
            }
            for (int r = 0; r < layer.rows; ++r) h[r] *= (*mask)[r];
        }

        if (cache) {
            cache->pre_activations[l] = std::move(z);
            cache->activations[l] = h;
        }
        x = std::move(h);
    }

    const LayerParams& out = params.layers[n_hidden];
    std::vector<double> y(out.rows);
    for (int r = 0; r < out.rows; ++r) {
        const double* w = out.weights.data() + static_cast<std::size_t>(r) * out.cols;
        double acc = out.biases[r];
        for (int c = 0; c < out.cols; ++c) acc += w[c] * x[c];
        y[r] = acc * stats.output_std[r] + stats.output_mean[r];
    }
    return y;
}

void mlp_backward(const MlpConfig& config, const MlpParams& params,
                  const NormalizationStats& stats, const ForwardCache& cache,
                  std::span<const double> upstream, MlpParams& param_grads,
                  std::vector<double>* input_grad) {
    if (static_cast<int>(upstream.size()) != config.output_dim) {
        throw ValidationError("mlp_backward: upstream length != output_dim");
    }
    const std::size_t n_hidden = config.hidden_dims.size();
    if (param_grads.layers.size() != params.layers.size()) {
        throw ValidationError("mlp_backward: param_grads shape mismatch");
    }
    if (cache.pre_activations.size() != n_hidden ||
        cache.normalized_input.size() != static_cast<std::size_t>(config.input_dim)) {
        throw ValidationError("mlp_backward: cache does not match config");
    }

    // Through de-normalization.
    std::vector<double> delta(upstream.size());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = upstream[i] * stats.output_std[i];

    // Output dense layer.
    const LayerParams& out = params.layers[n_hidden];
    LayerParams& out_grad = param_grads.layers[n_hidden];
    const std::vector<double>& last_act =
        n_hidden > 0 ? cache.activations[n_hidden - 1] : cache.normalized_input;
    std::vector<double> downstream(out.cols, 0.0);
    for (int r = 0; r < out.rows; ++r) {
        const double d = delta[r];
        out_grad.biases[r] += d;
        double* wg = out_grad.weights.data() + static_cast<std::size_t>(r) * out.cols;
        const double* w = out.weights.data() + static_cast<std::size_t>(r) * out.cols;
        for (int c = 0; c < out.cols; ++c) {
            wg[c] += d * last_act[c];
            downstream[c] += d * w[c];
        }
    }

    // Hidden layers, last to first.
    for (std::size_t li = n_hidden; li-- > 0;) {
        const LayerParams& layer = params.layers[li];
        LayerParams& grad = param_grads.layers[li];
        const std::vector<double>& pre = cache.pre_activations[li];
        const std::vector<double>& mask = cache.dropout_masks[li];
        std::vector<double> d(layer.rows);
        for (int r = 0; r < layer.rows; ++r) {
            double g = downstream[r];
            if (!mask.empty()) g *= mask[r];
            d[r] = g * activate_grad(config.activation, pre[r]);
        }
        const std::vector<double>& prev_act =
            li > 0 ? cache.activations[li - 1] : cache.normalized_input;
        downstream.assign(layer.cols, 0.0);
        for (int r = 0; r < layer.rows; ++r) {
            const double dr = d[r];
            grad.biases[r] += dr;
            double* wg = grad.weights.data() + static_cast<std::size_t>(r) * layer.cols;
            const double* w = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
            for (int c = 0; c < layer.cols; ++c) {
                wg[c] += dr * prev_act[c];
                downstream[c] += dr * w[c];
            }
        }
    }

    if (input_grad) {
        input_grad->resize(config.input_dim);
        for (int i = 0; i < config.input_dim; ++i) {
            (*input_grad)[i] = downstream[i] / stats.input_std[i];
        }
    }
}

MlpParams init_params(const MlpConfig& config, Rng& rng) {
    MlpParams params = MlpParams::zeros(config);
    for (LayerParams& layer : params.layers) {
        const double limit = std::sqrt(6.0 / (layer.cols + layer.rows));
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    }
    return params;
}

void mean_std(const std::vector<std::vector<double>>& rows, std::vector<double>& mean,
              std::vector<double>& std_out) {
    if (rows.empty()) throw ValidationError("mean_std: empty list");
    const std::size_t dim = rows.front().size();
    mean.assign(dim, 0.0);
    std_out.assign(dim, 0.0);
    for (const auto& row : rows) {
        if (row.size() != dim) throw ValidationError("mean_std: inconsistent row lengths");
        for (std::size_t i = 0; i < dim; ++i) mean[i] += row[i];
    }
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < dim; ++i) mean[i] *= inv_n;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = row[i] - mean[i];
            std_out[i] += d * d;
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        std_out[i] = std::sqrt(std_out[i] * inv_n);
        if (std_out[i] < kStdFloor) std_out[i] = kStdFloor;
    }
}

NormalizationStats compute_normalization_stats(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<std::vector<double>>& outputs) {
    NormalizationStats stats;
    mean_std(inputs, stats.input_mean, stats.input_std);
    mean_std(outputs, stats.output_mean, stats.output_std);
    return stats;
}

}  // namespace gazebc
