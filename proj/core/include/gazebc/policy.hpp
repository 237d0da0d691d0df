#pragma once

#include <array>
#include <span>

#include "gazebc/mlp.hpp"
#include "gazebc/rng.hpp"
#include "gazebc/types.hpp"

namespace gazebc {

// Scalar energy network over [observation || action].
struct EbmPolicy {
    MlpConfig config;  // input_dim = obs_dim + 2, output_dim = 1
    MlpParams params;
    NormalizationStats stats;
    ActionBounds bounds;

    int obs_dim() const { return config.input_dim - 2; }
    void validate() const;
};

// Direct regression network, observation -> action.
struct MsePolicy {
    MlpConfig config;  // input_dim = obs_dim, output_dim = 2
    MlpParams params;
    NormalizationStats stats;
    ActionBounds bounds;

    void validate() const;
};

struct LangevinConfig {
    int n_mcmc = 100;
    double eta_init = 0.5;
    double eta_final = 0.01;
    double decay = 2.0;        // polynomial decay power
    double noise_scale = 0.5;  // sigma multiplier, scaled by sqrt(eta_k)
    double grad_clip = 1.0;    // per-axis cap on the energy gradient
    int n_samples = 64;        // chains / negatives

    void validate() const;
    // Step size at iteration k in [0, n_mcmc).
    double eta(int k) const;
};

enum class LangevinMode { kTrain, kInfer };

struct LangevinStats {
    int chain_restarts = 0;
    bool fallback_to_initial = false;
};

// i.i.d. uniform per axis on [min, max].
std::vector<Action> sample_uniform_actions(const ActionBounds& bounds, int n, Rng& rng);

// Eval-mode forward pass on the concatenated input.
double ebm_energy(const EbmPolicy& policy, std::span<const double> obs, Action action);

// Repeated energy/gradient evaluations against one fixed observation. The
// observation's first-layer contribution is folded in once, so per-action
// cost only covers the action columns and the deeper layers. Buffers are
// reused across calls; use one evaluator per thread.
class EbmEvaluator {
  public:
    EbmEvaluator(const EbmPolicy& policy, std::span<const double> obs);

    double energy(Action action);
    std::array<double, 2> normalize(Action action) const;
    Action denormalize(const std::array<double, 2>& normalized) const;
    // Returns the energy; writes dE/d(normalized action) to grad_out.
    double energy_and_grad(const std::array<double, 2>& normalized_action,
                           std::array<double, 2>* grad_out);

  private:
    const EbmPolicy& policy_;
    std::vector<double> first_layer_base_;  // bias + observation columns
    std::vector<std::vector<double>> pre_;  // per hidden layer
    std::vector<std::vector<double>> act_;
};

// Gradient-based MCMC refinement in normalized action coordinates:
//   a <- clip(a - eta_k * clip(grad, grad_clip) + noise, bounds)
// with polynomially decaying step size. In infer mode the final iteration
// omits the noise term. A non-finite gradient restarts the chain from a
// fresh uniform sample (counted in `stats`).
std::vector<Action> langevin_refine(const EbmPolicy& policy, std::span<const double> obs,
                                    std::vector<Action> actions, const LangevinConfig& config,
                                    Rng& rng, LangevinMode mode, LangevinStats* stats = nullptr);

// Two-pass refinement over uniformly seeded chains; returns the lowest-
// energy action, clipped to the policy bounds.
Action ibc_infer(const EbmPolicy& policy, std::span<const double> obs,
                 const LangevinConfig& config, Rng& rng, LangevinStats* stats = nullptr);

// Forward pass output clipped to the policy bounds.
Action mse_infer(const MsePolicy& policy, std::span<const double> obs);

}  // namespace gazebc
