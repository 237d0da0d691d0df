#include "gazebc/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "gazebc/checkpoint.hpp"
#include "gazebc/dataset.hpp"
#include "gazebc/error.hpp"

namespace gazebc {

void TrainConfig::validate() const {
    if (steps < 1) throw ValidationError("TrainConfig: steps must be >= 1");
    if (batch_size < 1) throw ValidationError("TrainConfig: batch_size must be >= 1");
    langevin.validate();
}

void Batch::validate() const {
    if (observations.size() != expert_actions.size()) {
        throw ValidationError("Batch: row count mismatch");
    }
    if (observations.empty()) throw ValidationError("Batch: empty batch");
}

InfoNceResult infonce_loss(double positive_energy, std::span<const double> negative_energies) {
    if (negative_energies.empty()) {
        throw ValidationError("infonce_loss: need at least one negative");
    }
    if (!std::isfinite(positive_energy)) throw ComputeError("infonce_loss: non-finite energy");
    for (double e : negative_energies) {
        if (!std::isfinite(e)) throw ComputeError("infonce_loss: non-finite energy");
    }

    // Stable softmax over logits [-E+, -E1-, ...].
    double max_logit = -positive_energy;
    for (double e : negative_energies) max_logit = std::max(max_logit, -e);
    const double exp_pos = std::exp(-positive_energy - max_logit);
    double total = exp_pos;
    std::vector<double> exp_neg(negative_energies.size());
    for (std::size_t i = 0; i < negative_energies.size(); ++i) {
        exp_neg[i] = std::exp(-negative_energies[i] - max_logit);
        total += exp_neg[i];
    }

    InfoNceResult result;
    const double p_pos = exp_pos / total;
    result.loss = -std::log(p_pos);
    // dL/dlogit_j = p_j - [j == positive]; logits are negated energies.
    result.d_positive = 1.0 - p_pos;
    result.d_negatives.resize(negative_energies.size());
    for (std::size_t i = 0; i < negative_energies.size(); ++i) {
        result.d_negatives[i] = -exp_neg[i] / total;
    }
    return result;
}

TrainingData build_training_pairs(const std::vector<Episode>& episodes) {
    TrainingData data;
    for (const Episode& ep : episodes) {
        for (std::size_t t = 0; t < ep.expert_actions.size(); ++t) {
            data.observations.push_back(ep.observations[t].flatten());
            data.actions.push_back(ep.expert_actions[t]);
        }
    }
    if (data.observations.empty()) throw ValidationError("build_training_pairs: no pairs");
    data.obs_dim = static_cast<int>(data.observations.front().size());
    return data;
}

namespace {

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, long epoch) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = Rng(seed).split(0xEEC0DE + static_cast<std::uint64_t>(epoch));
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace

Batch make_batch(const TrainingData& data, const TrainConfig& config, int step) {
    const std::size_t n = data.observations.size();
    Batch batch;
    long epoch = -1;
    std::vector<std::size_t> perm;
    for (int j = 0; j < config.batch_size; ++j) {
        const long global = static_cast<long>(step) * config.batch_size + j;
        const long e = global / static_cast<long>(n);
        if (e != epoch) {
            epoch = e;
            perm = epoch_permutation(n, config.seed, e);
        }
        const std::size_t idx = perm[static_cast<std::size_t>(global % static_cast<long>(n))];
        batch.observations.push_back(data.observations[idx]);
        batch.expert_actions.push_back(data.actions[idx]);
    }
    return batch;
}

double ibc_train_step(EbmPolicy& policy, const Batch& batch, const TrainConfig& config,
                      AdamState& adam, Rng& rng) {
    batch.validate();
    config.validate();
    policy.validate();

    const int obs_dim = policy.obs_dim();
    MlpParams grads = MlpParams::zeros(policy.config);
    const double inv_b = 1.0 / static_cast<double>(batch.observations.size());
    double total_loss = 0.0;

    std::vector<double> input(static_cast<std::size_t>(obs_dim) + 2);
    for (std::size_t i = 0; i < batch.observations.size(); ++i) {
        Rng item_rng = rng.split(i);
        const std::vector<double>& obs = batch.observations[i];
        if (static_cast<int>(obs.size()) != obs_dim) {
            throw ValidationError("ibc_train_step: observation dimension mismatch");
        }

        Rng neg_rng = item_rng.split(0);
        std::vector<Action> negatives =
            sample_uniform_actions(policy.bounds, config.langevin.n_samples, neg_rng);
        Rng refine_rng = item_rng.split(1);
        negatives = langevin_refine(policy, obs, std::move(negatives), config.langevin,
                                    refine_rng, LangevinMode::kTrain);

        std::copy(obs.begin(), obs.end(), input.begin());
        Rng dropout_rng = item_rng.split(2);

        // Positive energy first, then the refined negatives, each with its
        // own dropout draw.
        std::vector<ForwardCache> caches(negatives.size() + 1);
        std::vector<double> energies(negatives.size() + 1);
        for (std::size_t j = 0; j < negatives.size() + 1; ++j) {
            const Action a = j == 0 ? batch.expert_actions[i] : negatives[j - 1];
            input[obs_dim] = a.yaw;
            input[obs_dim + 1] = a.pitch;
            energies[j] = mlp_forward(policy.config, policy.params, policy.stats, input,
                                      PassMode::kTrain, &dropout_rng, &caches[j])[0];
        }

        const InfoNceResult nce =
            infonce_loss(energies[0], std::span<const double>(energies).subspan(1));
        total_loss += nce.loss;

        const double upstream_pos[1] = {nce.d_positive * inv_b};
        mlp_backward(policy.config, policy.params, policy.stats, caches[0], upstream_pos, grads,
                     nullptr);
        for (std::size_t j = 0; j < negatives.size(); ++j) {
            const double upstream[1] = {nce.d_negatives[j] * inv_b};
            mlp_backward(policy.config, policy.params, policy.stats, caches[j + 1], upstream,
                         grads, nullptr);
        }
    }

    const double loss = total_loss * inv_b;
    if (!std::isfinite(loss)) {
        std::cerr << "warning: non-finite IBC loss, skipping update\n";
        return loss;
    }
    adam_step(policy.params, grads, adam);
    return loss;
}

double mse_train_step(MsePolicy& policy, const Batch& batch, const TrainConfig& config,
                      AdamState& adam) {
    batch.validate();
    config.validate();
    policy.validate();

    MlpParams grads = MlpParams::zeros(policy.config);
    const double inv = 1.0 / (2.0 * static_cast<double>(batch.observations.size()));
    double total_loss = 0.0;
    // Deterministic dropout stream: the step counter stands in for an
    // explicit rng argument.
    Rng dropout_rng = Rng(config.seed).split(0xD80 + static_cast<std::uint64_t>(adam.step));
    for (std::size_t i = 0; i < batch.observations.size(); ++i) {
        ForwardCache cache;
        const std::vector<double> pred =
            mlp_forward(policy.config, policy.params, policy.stats, batch.observations[i],
                        PassMode::kTrain, &dropout_rng, &cache);
        const double res[2] = {pred[0] - batch.expert_actions[i].yaw,
                               pred[1] - batch.expert_actions[i].pitch};
        total_loss += res[0] * res[0] + res[1] * res[1];
        const double upstream[2] = {2.0 * res[0] * inv, 2.0 * res[1] * inv};
        mlp_backward(policy.config, policy.params, policy.stats, cache, upstream, grads, nullptr);
    }
    const double loss = total_loss * inv;
    if (!std::isfinite(loss)) {
        std::cerr << "warning: non-finite MSE loss, skipping update\n";
        return loss;
    }
    adam_step(policy.params, grads, adam);
    return loss;
}

namespace {

// ASM over the first `count` held-out episodes with the current policy.
double heldout_asm(const PolicyFn& policy_fn, const std::vector<Episode>& episodes, int count,
                   const EnvConfig& env) {
    const int n = std::min<int>(count, static_cast<int>(episodes.size()));
    if (n == 0) return 0.0;
    int successes = 0;
    for (int i = 0; i < n; ++i) {
        if (rollout(policy_fn, episodes[i], env).success) ++successes;
    }
    return static_cast<double>(successes) / n;
}

void maybe_checkpoint(const TrainConfig& config, const Checkpoint& ckpt, int step, bool final) {
    if (config.checkpoint_dir.empty()) return;
    std::filesystem::create_directories(config.checkpoint_dir);
    char name[64];
    if (final) {
        std::snprintf(name, sizeof(name), "final.ckpt");
    } else {
        std::snprintf(name, sizeof(name), "step_%06d.ckpt", step);
    }
    save_checkpoint(config.checkpoint_dir / name, ckpt);
}

}  // namespace

IbcTrainResult train_ibc(const std::vector<Episode>& train_episodes,
                         const std::vector<Episode>& heldout_episodes, const MlpConfig& mlp,
                         const TrainConfig& config, const EnvConfig& env) {
    config.validate();
    if (train_episodes.empty()) throw ValidationError("train_ibc: empty train split");

    TrainingData data = build_training_pairs(train_episodes);
    const ActionBounds bounds = action_bounds(train_episodes);

    IbcTrainResult result;
    EbmPolicy& policy = result.policy;
    policy.config = mlp;
    policy.config.input_dim = data.obs_dim + 2;
    policy.config.output_dim = 1;
    policy.bounds = bounds;

    // Input stats over [obs || expert action]; the scalar energy output is
    // left un-normalized (there is no energy target to fit).
    std::vector<std::vector<double>> joined(data.observations.size());
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
        joined[i] = data.observations[i];
        joined[i].push_back(data.actions[i].yaw);
        joined[i].push_back(data.actions[i].pitch);
    }
    policy.stats = NormalizationStats::identity(policy.config.input_dim, 1);
    mean_std(joined, policy.stats.input_mean, policy.stats.input_std);

    Rng init_rng = Rng(config.seed).split(0x1B1);
    policy.params = init_params(policy.config, init_rng);

    AdamState adam = AdamState::init(policy.config, config.adam);
    Rng base(config.seed);
    double best_asm = -1.0;
    for (int step = 0; step < config.steps; ++step) {
        Batch batch = make_batch(data, config, step);
        Rng step_rng = base.split(0x57E0000 + static_cast<std::uint64_t>(step));
        const double loss = ibc_train_step(policy, batch, config, adam, step_rng);

        TrainLogEntry entry{step, loss, std::nullopt};
        if (config.eval_every > 0 && (step + 1) % config.eval_every == 0) {
            if (config.heldout_probe_episodes > 0 && !heldout_episodes.empty()) {
                Rng probe_rng = base.split(0xA53 + static_cast<std::uint64_t>(step));
                int calls = 0;
                PolicyFn fn = [&](const Observation& obs) {
                    Rng call_rng = probe_rng.split(static_cast<std::uint64_t>(calls++));
                    return ibc_infer(policy, obs.flatten(), config.langevin, call_rng);
                };
                entry.heldout_asm =
                    heldout_asm(fn, heldout_episodes, config.heldout_probe_episodes, env);
                if (*entry.heldout_asm > best_asm) {
                    best_asm = *entry.heldout_asm;
                    result.best_policy = policy;
                    result.best_probe_step = step + 1;
                }
            }
            maybe_checkpoint(config,
                             {PolicyKind::kEbm, policy.config, policy.params, policy.stats,
                              policy.bounds},
                             step + 1, false);
        }
        result.log.push_back(entry);
    }
    if (result.best_probe_step < 0) result.best_policy = policy;
    maybe_checkpoint(config,
                     {PolicyKind::kEbm, policy.config, policy.params, policy.stats, policy.bounds},
                     config.steps, true);
    if (result.best_probe_step >= 0 && !config.checkpoint_dir.empty()) {
        save_checkpoint(config.checkpoint_dir / "best.ckpt",
                        {PolicyKind::kEbm, result.best_policy.config, result.best_policy.params,
                         result.best_policy.stats, result.best_policy.bounds});
    }
    return result;
}

MseTrainResult train_mse(const std::vector<Episode>& train_episodes,
                         const std::vector<Episode>& heldout_episodes, const MlpConfig& mlp,
                         const TrainConfig& config, const EnvConfig& env) {
    config.validate();
    if (train_episodes.empty()) throw ValidationError("train_mse: empty train split");

    TrainingData data = build_training_pairs(train_episodes);
    const ActionBounds bounds = action_bounds(train_episodes);

    MseTrainResult result;
    MsePolicy& policy = result.policy;
    policy.config = mlp;
    policy.config.input_dim = data.obs_dim;
    policy.config.output_dim = 2;
    policy.bounds = bounds;

    std::vector<std::vector<double>> outputs(data.actions.size());
    for (std::size_t i = 0; i < data.actions.size(); ++i) {
        outputs[i] = {data.actions[i].yaw, data.actions[i].pitch};
    }
    policy.stats = compute_normalization_stats(data.observations, outputs);

    Rng init_rng = Rng(config.seed).split(0x3531);
    policy.params = init_params(policy.config, init_rng);

    AdamState adam = AdamState::init(policy.config, config.adam);
    double best_asm = -1.0;
    for (int step = 0; step < config.steps; ++step) {
        Batch batch = make_batch(data, config, step);
        const double loss = mse_train_step(policy, batch, config, adam);

        TrainLogEntry entry{step, loss, std::nullopt};
        if (config.eval_every > 0 && (step + 1) % config.eval_every == 0) {
            if (config.heldout_probe_episodes > 0 && !heldout_episodes.empty()) {
                PolicyFn fn = [&](const Observation& obs) {
                    return mse_infer(policy, obs.flatten());
                };
                entry.heldout_asm =
                    heldout_asm(fn, heldout_episodes, config.heldout_probe_episodes, env);
                if (*entry.heldout_asm > best_asm) {
                    best_asm = *entry.heldout_asm;
                    result.best_policy = policy;
                    result.best_probe_step = step + 1;
                }
            }
            maybe_checkpoint(config,
                             {PolicyKind::kMse, policy.config, policy.params, policy.stats,
                              policy.bounds},
                             step + 1, false);
        }
        result.log.push_back(entry);
    }
    if (result.best_probe_step < 0) result.best_policy = policy;
    maybe_checkpoint(config,
                     {PolicyKind::kMse, policy.config, policy.params, policy.stats, policy.bounds},
                     config.steps, true);
    if (result.best_probe_step >= 0 && !config.checkpoint_dir.empty()) {
        save_checkpoint(config.checkpoint_dir / "best.ckpt",
                        {PolicyKind::kMse, result.best_policy.config, result.best_policy.params,
                         result.best_policy.stats, result.best_policy.bounds});
    }
    return result;
}

void save_training_log(const std::filesystem::path& path, const std::vector<TrainLogEntry>& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write training log: " + path.string());
    out << "step,loss,heldout_asm\n";
    char buf[48];
    for (const TrainLogEntry& entry : log) {
        std::snprintf(buf, sizeof(buf), "%.17g", entry.loss);
        out << entry.step << ',' << buf << ',';
        if (entry.heldout_asm) {
            std::snprintf(buf, sizeof(buf), "%.17g", *entry.heldout_asm);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace gazebc
