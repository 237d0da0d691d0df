#pragma once

#include <filesystem>
#include <string>

#include "gazebc/metrics.hpp"
#include "gazebc/synthetic.hpp"
#include "gazebc/train.hpp"

namespace gazebc {

// Flat INI-style run configuration: one `section.key = value` per line,
// '#' or ';' comments, unknown keys rejected. CLI flags override file
// values by calling apply_config_key again after loading.
struct RunConfig {
    struct Data {
        std::string source = "synthetic";  // synthetic | files
        int participants = 5;
        int sessions = 7;
        std::string scenario = "attend_speaker";
        int length = 3000;
        double fps = 30.0;
        double noise_std = 0.01;
        double jitter_std = 0.05;
        double jitter_revert = 0.5;
        double jitter_noise_std = 0.0;
        int episode_length = 50;
        int stride = 0;  // 0 means non-overlapping windows
        std::uint64_t seed = 0;
    } data;

    struct Train {
        std::string policy = "ibc";  // ibc | mse
        std::vector<int> hidden_dims = {256, 256};
        std::string activation = "relu";
        double dropout = 0.1;
        int batch_size = 128;
        int steps = 20000;
        double learning_rate = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        int eval_every = 500;
        int heldout_probe_episodes = 8;
        int fold = 1;
        // Langevin sampler used for training negatives.
        int n_mcmc = 100;
        double eta_init = 0.5;
        double eta_final = 0.01;
        double decay = 2.0;
        double noise_scale = 0.5;
        double grad_clip = 1.0;
        int n_samples = 64;
    } train;

    EnvConfig env;

    struct Eval {
        SparcConfig sparc;
        std::filesystem::path fold_spec;
        int fold = 1;
        int min_r2_steps = 10;
        bool keep_trajectories = false;
        // Inference-time sampler (both Langevin passes).
        int infer_n_mcmc = 100;
        int infer_n_samples = 64;
    } eval;

    struct Io {
        std::filesystem::path data_dir = "data";
        std::filesystem::path run_dir = "runs";
    } io;

    void validate() const;

    MlpConfig mlp_config(int input_dim, int output_dim) const;
    TrainConfig train_config() const;
    LangevinConfig infer_langevin() const;
    SyntheticConfig synthetic_config() const;
    EvalConfig eval_config() const;
};

// Sets one `section.key` to a textual value; throws ValidationError on
// unknown keys or unparsable values.
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

RunConfig load_run_config(const std::filesystem::path& path);

// Order-independent hex digest of the effective configuration, recorded
// in run manifests.
std::string config_hash(const RunConfig& config);

}  // namespace gazebc
