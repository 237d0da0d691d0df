#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "gazebc/adam.hpp"
#include "gazebc/env.hpp"
#include "gazebc/policy.hpp"

namespace gazebc {

struct TrainConfig {
    int batch_size = 128;
    int steps = 20000;
    AdamConfig adam;
    LangevinConfig langevin;
    int eval_every = 500;  // checkpoint + held-out probe cadence; 0 disables
    std::filesystem::path checkpoint_dir;
    std::uint64_t seed = 0;
    int heldout_probe_episodes = 8;  // 0 disables the ASM probe

    void validate() const;
};

struct Batch {
    std::vector<std::vector<double>> observations;
    std::vector<Action> expert_actions;

    void validate() const;
};

struct InfoNceResult {
    double loss = 0.0;
    double d_positive = 0.0;          // dL/dE+
    std::vector<double> d_negatives;  // dL/dEi-
};

// Softmax over the negated energies [-E+, -E1-, ...] against the one-hot
// target on the positive; returns the cross-entropy and its exact
// gradients with respect to each raw energy.
InfoNceResult infonce_loss(double positive_energy, std::span<const double> negative_energies);

// One InfoNCE step over Langevin-refined uniform negatives. Negatives are
// constants to the loss; no gradient flows through the sampler. Returns the
// batch loss; a non-finite loss skips the update (reported on stderr).
double ibc_train_step(EbmPolicy& policy, const Batch& batch, const TrainConfig& config,
                      AdamState& adam, Rng& rng);

// Plain MSE regression on unclipped predictions.
double mse_train_step(MsePolicy& policy, const Batch& batch, const TrainConfig& config,
                      AdamState& adam);

struct TrainLogEntry {
    int step = 0;
    double loss = 0.0;
    std::optional<double> heldout_asm;
};

struct TrainingData {
    std::vector<std::vector<double>> observations;
    std::vector<Action> actions;
    int obs_dim = 0;
};

// Flattens episodes into (observation, expert action) pairs.
TrainingData build_training_pairs(const std::vector<Episode>& episodes);

// Deterministic minibatch for a given step (epoch-wise shuffled indices).
Batch make_batch(const TrainingData& data, const TrainConfig& config, int step);

struct IbcTrainResult {
    EbmPolicy policy;       // parameters after the final step
    EbmPolicy best_policy;  // parameters at the best probe ASM (== policy
                            // when no probe ran)
    int best_probe_step = -1;
    std::vector<TrainLogEntry> log;
};

struct MseTrainResult {
    MsePolicy policy;
    MsePolicy best_policy;
    int best_probe_step = -1;
    std::vector<TrainLogEntry> log;
};

// Full training loops: fit stats and bounds from the train split, seeded
// init, shuffled minibatches, periodic checkpoints and held-out ASM probes.
// When probes run, the parameters with the highest probe ASM are kept as
// best_policy (ties keep the earliest) and saved as best.ckpt alongside
// final.ckpt.
IbcTrainResult train_ibc(const std::vector<Episode>& train_episodes,
                         const std::vector<Episode>& heldout_episodes, const MlpConfig& mlp,
                         const TrainConfig& config, const EnvConfig& env);
MseTrainResult train_mse(const std::vector<Episode>& train_episodes,
                         const std::vector<Episode>& heldout_episodes, const MlpConfig& mlp,
                         const TrainConfig& config, const EnvConfig& env);

// CSV: step,loss,heldout_asm (empty when no probe ran at that step).
void save_training_log(const std::filesystem::path& path, const std::vector<TrainLogEntry>& log);

}  // namespace gazebc
