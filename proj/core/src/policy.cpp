#include "gazebc/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gazebc/error.hpp"

namespace gazebc {

void EbmPolicy::validate() const {
    config.validate();
    if (config.output_dim != 1) throw ValidationError("EbmPolicy: output_dim must be 1");
    if (config.input_dim < 3) throw ValidationError("EbmPolicy: input_dim must be obs_dim + 2");
    stats.validate(config);
    bounds.validate();
}

void MsePolicy::validate() const {
    config.validate();
    if (config.output_dim != 2) throw ValidationError("MsePolicy: output_dim must be 2");
    stats.validate(config);
    bounds.validate();
}

void LangevinConfig::validate() const {
    if (n_mcmc < 1) throw ValidationError("LangevinConfig: n_mcmc must be >= 1");
    if (n_samples < 1) throw ValidationError("LangevinConfig: n_samples must be >= 1");
    if (!(eta_final > 0.0) || !(eta_init >= eta_final)) {
        throw ValidationError("LangevinConfig: need eta_init >= eta_final > 0");
    }
    if (noise_scale < 0.0) throw ValidationError("LangevinConfig: noise_scale must be >= 0");
    if (!(grad_clip > 0.0)) throw ValidationError("LangevinConfig: grad_clip must be > 0");
}

double LangevinConfig::eta(int k) const {
    if (n_mcmc <= 1) return eta_init;
    const double frac = 1.0 - static_cast<double>(k) / (n_mcmc - 1);
    return eta_final + (eta_init - eta_final) * std::pow(frac, decay);
}

std::vector<Action> sample_uniform_actions(const ActionBounds& bounds, int n, Rng& rng) {
    if (n < 1) throw ValidationError("sample_uniform_actions: n must be >= 1");
    bounds.validate();
    std::vector<Action> actions;
    actions.reserve(n);
    for (int i = 0; i < n; ++i) {
        actions.push_back({rng.uniform(bounds.min.yaw, bounds.max.yaw),
                           rng.uniform(bounds.min.pitch, bounds.max.pitch)});
    }
    return actions;
}

double ebm_energy(const EbmPolicy& policy, std::span<const double> obs, Action action) {
    if (static_cast<int>(obs.size()) != policy.obs_dim()) {
        throw ValidationError("ebm_energy: observation dimension mismatch");
    }
    std::vector<double> input(obs.begin(), obs.end());
    input.push_back(action.yaw);
    input.push_back(action.pitch);
    return mlp_forward(policy.config, policy.params, policy.stats, input, PassMode::kEval)[0];
}

EbmEvaluator::EbmEvaluator(const EbmPolicy& policy, std::span<const double> obs)
    : policy_(policy) {
    policy.validate();
    const int obs_dim = policy.obs_dim();
    if (static_cast<int>(obs.size()) != obs_dim) {
        throw ValidationError("EbmEvaluator: observation dimension mismatch");
    }
    const LayerParams& first = policy.params.layers.front();
    first_layer_base_.assign(first.rows, 0.0);
    for (int r = 0; r < first.rows; ++r) {
        const double* w = first.weights.data() + static_cast<std::size_t>(r) * first.cols;
        double acc = first.biases[r];
        for (int c = 0; c < obs_dim; ++c) {
            acc += w[c] * (obs[c] - policy.stats.input_mean[c]) / policy.stats.input_std[c];
        }
        first_layer_base_[r] = acc;
    }
    const std::size_t n_hidden = policy.config.hidden_dims.size();
    pre_.resize(n_hidden);
    act_.resize(n_hidden);
    for (std::size_t l = 0; l < n_hidden; ++l) {
        pre_[l].resize(policy.config.hidden_dims[l]);
        act_[l].resize(policy.config.hidden_dims[l]);
    }
}

std::array<double, 2> EbmEvaluator::normalize(Action action) const {
    const int obs_dim = policy_.obs_dim();
    return {(action.yaw - policy_.stats.input_mean[obs_dim]) / policy_.stats.input_std[obs_dim],
            (action.pitch - policy_.stats.input_mean[obs_dim + 1]) /
                policy_.stats.input_std[obs_dim + 1]};
}

Action EbmEvaluator::denormalize(const std::array<double, 2>& normalized) const {
    const int obs_dim = policy_.obs_dim();
    return {normalized[0] * policy_.stats.input_std[obs_dim] + policy_.stats.input_mean[obs_dim],
            normalized[1] * policy_.stats.input_std[obs_dim + 1] +
                policy_.stats.input_mean[obs_dim + 1]};
}

double EbmEvaluator::energy(Action action) {
    return energy_and_grad(normalize(action), nullptr);
}

double EbmEvaluator::energy_and_grad(const std::array<double, 2>& normalized_action,
                                     std::array<double, 2>* grad_out) {
    const MlpConfig& cfg = policy_.config;
    const int obs_dim = policy_.obs_dim();
    const std::size_t n_hidden = cfg.hidden_dims.size();
    const bool relu = cfg.activation == Activation::kRelu;

    // First dense layer: fold in the two action columns.
    const LayerParams& first = policy_.params.layers.front();
    const bool first_is_output = n_hidden == 0;
    {
        std::vector<double>& z = first_is_output ? first_layer_base_ : pre_[0];
        const std::vector<double>* dummy = nullptr;
        (void)dummy;
        for (int r = 0; r < first.rows; ++r) {
            const double* w = first.weights.data() + static_cast<std::size_t>(r) * first.cols;
            const double value = first_layer_base_[r] + w[obs_dim] * normalized_action[0] +
                                 w[obs_dim + 1] * normalized_action[1];
            if (first_is_output) {
                // Single dense layer network: energy directly.
                const double energy = value * policy_.stats.output_std[0] + policy_.stats.output_mean[0];
                if (grad_out) {
                    (*grad_out)[0] = w[obs_dim] * policy_.stats.output_std[0];
                    (*grad_out)[1] = w[obs_dim + 1] * policy_.stats.output_std[0];
                }
                return energy;
            }
            z[r] = value;
        }
    }
    for (int r = 0; r < first.rows; ++r) {
        const double p = pre_[0][r];
        act_[0][r] = relu ? (p > 0.0 ? p : 0.0) : std::tanh(p);
    }

    for (std::size_t l = 1; l < n_hidden; ++l) {
        const LayerParams& layer = policy_.params.layers[l];
        for (int r = 0; r < layer.rows; ++r) {
            const double* w = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
            double acc = layer.biases[r];
            const double* in = act_[l - 1].data();
            for (int c = 0; c < layer.cols; ++c) acc += w[c] * in[c];
            pre_[l][r] = acc;
            act_[l][r] = relu ? (acc > 0.0 ? acc : 0.0) : std::tanh(acc);
        }
    }

    const LayerParams& out = policy_.params.layers.back();
    double y = out.biases[0];
    {
        const double* w = out.weights.data();
        const double* in = act_[n_hidden - 1].data();
        for (int c = 0; c < out.cols; ++c) y += w[c] * in[c];
    }
    const double energy = y * policy_.stats.output_std[0] + policy_.stats.output_mean[0];

    if (grad_out) {
        // Backprop to the two action columns of the first layer.
        std::vector<double> delta(out.cols);
        const double upstream = policy_.stats.output_std[0];
        for (int c = 0; c < out.cols; ++c) delta[c] = upstream * out.weights[c];
        for (std::size_t l = n_hidden; l-- > 0;) {
            const LayerParams& layer = policy_.params.layers[l];
            for (int r = 0; r < layer.rows; ++r) {
                const double p = pre_[l][r];
                const double g = relu ? (p > 0.0 ? 1.0 : 0.0) : 1.0 - std::tanh(p) * std::tanh(p);
                delta[r] *= g;
            }
            if (l == 0) break;
            std::vector<double> down(layer.cols, 0.0);
            for (int r = 0; r < layer.rows; ++r) {
                const double* w = layer.weights.data() + static_cast<std::size_t>(r) * layer.cols;
                const double dr = delta[r];
                for (int c = 0; c < layer.cols; ++c) down[c] += dr * w[c];
            }
            delta = std::move(down);
        }
        double gy = 0.0;
        double gp = 0.0;
        const LayerParams& f = policy_.params.layers.front();
        for (int r = 0; r < f.rows; ++r) {
            const double* w = f.weights.data() + static_cast<std::size_t>(r) * f.cols;
            gy += delta[r] * w[obs_dim];
            gp += delta[r] * w[obs_dim + 1];
        }
        (*grad_out)[0] = gy;
        (*grad_out)[1] = gp;
    }
    return energy;
}

namespace {

double clip_to(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

}  // namespace

std::vector<Action> langevin_refine(const EbmPolicy& policy, std::span<const double> obs,
                                    std::vector<Action> actions, const LangevinConfig& config,
                                    Rng& rng, LangevinMode mode, LangevinStats* stats) {
    config.validate();
    policy.validate();
    for (const Action& a : actions) {
        if (!policy.bounds.contains(a)) {
            throw ValidationError("langevin_refine: initial action outside bounds");
        }
    }

    EbmEvaluator evaluator(policy, obs);
    const std::array<double, 2> lo = evaluator.normalize(policy.bounds.min);
    const std::array<double, 2> hi = evaluator.normalize(policy.bounds.max);

    for (std::size_t chain = 0; chain < actions.size(); ++chain) {
        Rng chain_rng = rng.split(chain);
        std::array<double, 2> a = evaluator.normalize(actions[chain]);
        for (int k = 0; k < config.n_mcmc; ++k) {
            std::array<double, 2> grad{};
            evaluator.energy_and_grad(a, &grad);
            if (!std::isfinite(grad[0]) || !std::isfinite(grad[1])) {
                // Restart from a fresh uniform sample.
                if (stats) ++stats->chain_restarts;
                a[0] = chain_rng.uniform(lo[0], hi[0]);
                a[1] = chain_rng.uniform(lo[1], hi[1]);
                continue;
            }
            grad[0] = clip_to(grad[0], -config.grad_clip, config.grad_clip);
            grad[1] = clip_to(grad[1], -config.grad_clip, config.grad_clip);
            const double eta_k = config.eta(k);
            const bool last = k == config.n_mcmc - 1;
            const double sigma = (mode == LangevinMode::kInfer && last)
                                     ? 0.0
                                     : config.noise_scale * std::sqrt(eta_k);
            for (int d = 0; d < 2; ++d) {
                double next = a[d] - eta_k * grad[d];
                if (sigma > 0.0) next += chain_rng.normal(0.0, sigma);
                a[d] = clip_to(next, lo[d], hi[d]);
            }
        }
        actions[chain] = policy.bounds.clip(evaluator.denormalize(a));
    }
    return actions;
}

Action ibc_infer(const EbmPolicy& policy, std::span<const double> obs,
                 const LangevinConfig& config, Rng& rng, LangevinStats* stats) {
    Rng sample_rng = rng.split(0xA11CE);
    std::vector<Action> initial = sample_uniform_actions(policy.bounds, config.n_samples, sample_rng);
    Rng pass1_rng = rng.split(1);
    Rng pass2_rng = rng.split(2);
    std::vector<Action> refined =
        langevin_refine(policy, obs, initial, config, pass1_rng, LangevinMode::kInfer, stats);
    refined = langevin_refine(policy, obs, std::move(refined), config, pass2_rng,
                              LangevinMode::kInfer, stats);

    EbmEvaluator evaluator(policy, obs);
    double best_energy = std::numeric_limits<double>::infinity();
    const Action* best = nullptr;
    for (const Action& a : refined) {
        const double e = evaluator.energy(a);
        if (std::isfinite(e) && e < best_energy) {
            best_energy = e;
            best = &a;
        }
    }
    if (!best) {
        // Every chain ended non-finite; fall back to the best initial sample.
        if (stats) stats->fallback_to_initial = true;
        for (const Action& a : initial) {
            const double e = evaluator.energy(a);
            if (std::isfinite(e) && e < best_energy) {
                best_energy = e;
                best = &a;
            }
        }
        if (!best) throw ComputeError("ibc_infer: all candidate energies are non-finite");
    }
    return policy.bounds.clip(*best);
}

Action mse_infer(const MsePolicy& policy, std::span<const double> obs) {
    policy.validate();
    const std::vector<double> out =
        mlp_forward(policy.config, policy.params, policy.stats, obs, PassMode::kEval);
    return policy.bounds.clip({out[0], out[1]});
}

}  // namespace gazebc
