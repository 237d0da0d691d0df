#include "gazebc/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gazebc/error.hpp"

namespace gazebc {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ValidationError(key + ": not an integer: '" + value + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double out = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
        throw ValidationError(key + ": not a number: '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError(key + ": not a boolean: '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ValidationError(key + ": not an unsigned integer: '" + value + "'");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_int(key, item));
    }
    return out;
}

}  // namespace

void apply_config_key(RunConfig& c, const std::string& key, const std::string& value) {
    // data
    if (key == "data.source") {
        if (value != "synthetic" && value != "files") {
            throw ValidationError("data.source must be 'synthetic' or 'files'");
        }
        c.data.source = value;
    } else if (key == "data.participants") {
        c.data.participants = parse_int(key, value);
    } else if (key == "data.sessions") {
        c.data.sessions = parse_int(key, value);
    } else if (key == "data.scenario") {
        parse_scenario(value);  // validates
        c.data.scenario = value;
    } else if (key == "data.length") {
        c.data.length = parse_int(key, value);
    } else if (key == "data.fps") {
        c.data.fps = parse_double(key, value);
    } else if (key == "data.noise_std") {
        c.data.noise_std = parse_double(key, value);
    } else if (key == "data.jitter_std") {
        c.data.jitter_std = parse_double(key, value);
    } else if (key == "data.jitter_revert") {
        c.data.jitter_revert = parse_double(key, value);
    } else if (key == "data.jitter_noise_std") {
        c.data.jitter_noise_std = parse_double(key, value);
    } else if (key == "data.episode_length") {
        c.data.episode_length = parse_int(key, value);
    } else if (key == "data.stride") {
        c.data.stride = parse_int(key, value);
    } else if (key == "data.seed") {
        c.data.seed = parse_u64(key, value);
        // train
    } else if (key == "train.policy") {
        if (value != "ibc" && value != "mse") {
            throw ValidationError("train.policy must be 'ibc' or 'mse'");
        }
        c.train.policy = value;
    } else if (key == "train.hidden_dims") {
        c.train.hidden_dims = parse_int_list(key, value);
    } else if (key == "train.activation") {
        if (value != "relu" && value != "tanh") {
            throw ValidationError("train.activation must be 'relu' or 'tanh'");
        }
        c.train.activation = value;
    } else if (key == "train.dropout") {
        c.train.dropout = parse_double(key, value);
    } else if (key == "train.batch_size") {
        c.train.batch_size = parse_int(key, value);
    } else if (key == "train.steps") {
        c.train.steps = parse_int(key, value);
    } else if (key == "train.learning_rate") {
        c.train.learning_rate = parse_double(key, value);
    } else if (key == "train.beta1") {
        c.train.beta1 = parse_double(key, value);
    } else if (key == "train.beta2") {
        c.train.beta2 = parse_double(key, value);
    } else if (key == "train.eval_every") {
        c.train.eval_every = parse_int(key, value);
    } else if (key == "train.heldout_probe_episodes") {
        c.train.heldout_probe_episodes = parse_int(key, value);
    } else if (key == "train.fold") {
        c.train.fold = parse_int(key, value);
    } else if (key == "train.n_mcmc") {
        c.train.n_mcmc = parse_int(key, value);
    } else if (key == "train.eta_init") {
        c.train.eta_init = parse_double(key, value);
    } else if (key == "train.eta_final") {
        c.train.eta_final = parse_double(key, value);
    } else if (key == "train.decay") {
        c.train.decay = parse_double(key, value);
    } else if (key == "train.noise_scale") {
        c.train.noise_scale = parse_double(key, value);
    } else if (key == "train.grad_clip") {
        c.train.grad_clip = parse_double(key, value);
    } else if (key == "train.n_samples") {
        c.train.n_samples = parse_int(key, value);
        // env
    } else if (key == "env.dt") {
        c.env.dt = parse_double(key, value);
    } else if (key == "env.kp") {
        c.env.kp = parse_double(key, value);
    } else if (key == "env.kd") {
        c.env.kd = parse_double(key, value);
    } else if (key == "env.max_steps") {
        c.env.max_steps = parse_int(key, value);
    } else if (key == "env.success_threshold") {
        c.env.success_threshold = parse_double(key, value);
        // eval
    } else if (key == "eval.sample_rate") {
        c.eval.sparc.sample_rate = parse_double(key, value);
    } else if (key == "eval.padding_factor") {
        c.eval.sparc.padding_factor = parse_int(key, value);
    } else if (key == "eval.cutoff_freq") {
        c.eval.sparc.cutoff_freq = parse_double(key, value);
    } else if (key == "eval.amplitude_threshold") {
        c.eval.sparc.amplitude_threshold = parse_double(key, value);
    } else if (key == "eval.fold_spec") {
        c.eval.fold_spec = value;
    } else if (key == "eval.fold") {
        c.eval.fold = parse_int(key, value);
    } else if (key == "eval.min_r2_steps") {
        c.eval.min_r2_steps = parse_int(key, value);
    } else if (key == "eval.keep_trajectories") {
        c.eval.keep_trajectories = parse_bool(key, value);
    } else if (key == "eval.infer_n_mcmc") {
        c.eval.infer_n_mcmc = parse_int(key, value);
    } else if (key == "eval.infer_n_samples") {
        c.eval.infer_n_samples = parse_int(key, value);
        // io
    } else if (key == "io.data_dir") {
        c.io.data_dir = value;
    } else if (key == "io.run_dir") {
        c.io.run_dir = value;
    } else {
        throw ValidationError("unknown config key: '" + key + "'");
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected 'section.key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": key must be 'section.key', got '" + key + "'");
        }
        try {
            apply_config_key(config, key, value);
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " +
                                  e.what());
        }
    }
    return config;
}

void RunConfig::validate() const {
    if (data.participants < 1) throw ValidationError("data.participants must be >= 1");
    if (data.sessions < 1) throw ValidationError("data.sessions must be >= 1");
    if (data.length < 2) throw ValidationError("data.length must be >= 2");
    if (!(data.fps > 0.0)) throw ValidationError("data.fps must be > 0");
    if (data.noise_std < 0.0) throw ValidationError("data.noise_std must be >= 0");
    if (data.jitter_std < 0.0) throw ValidationError("data.jitter_std must be >= 0");
    if (data.jitter_noise_std < 0.0) {
        throw ValidationError("data.jitter_noise_std must be >= 0");
    }
    if (data.jitter_revert <= 0.0 || data.jitter_revert > 1.0) {
        throw ValidationError("data.jitter_revert must be in (0, 1]");
    }
    if (data.episode_length < 2) throw ValidationError("data.episode_length must be >= 2");
    if (data.stride < 0) throw ValidationError("data.stride must be >= 0");
    mlp_config(8, train.policy == "ibc" ? 1 : 2).validate();
    train_config().validate();
    infer_langevin().validate();
    env.validate();
    eval.sparc.validate();
    if (eval.min_r2_steps < 2) throw ValidationError("eval.min_r2_steps must be >= 2");
    if (eval.fold < 1) throw ValidationError("eval.fold must be >= 1");
    if (train.fold < 1) throw ValidationError("train.fold must be >= 1");
}

MlpConfig RunConfig::mlp_config(int input_dim, int output_dim) const {
    MlpConfig mlp;
    mlp.input_dim = input_dim;
    mlp.hidden_dims = train.hidden_dims;
    mlp.output_dim = output_dim;
    mlp.activation = train.activation == "relu" ? Activation::kRelu : Activation::kTanh;
    mlp.dropout_rate = train.dropout;
    return mlp;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig tc;
    tc.batch_size = train.batch_size;
    tc.steps = train.steps;
    tc.adam.learning_rate = train.learning_rate;
    tc.adam.beta1 = train.beta1;
    tc.adam.beta2 = train.beta2;
    tc.langevin.n_mcmc = train.n_mcmc;
    tc.langevin.eta_init = train.eta_init;
    tc.langevin.eta_final = train.eta_final;
    tc.langevin.decay = train.decay;
    tc.langevin.noise_scale = train.noise_scale;
    tc.langevin.grad_clip = train.grad_clip;
    tc.langevin.n_samples = train.n_samples;
    tc.eval_every = train.eval_every;
    tc.seed = data.seed;
    tc.heldout_probe_episodes = train.heldout_probe_episodes;
    return tc;
}

LangevinConfig RunConfig::infer_langevin() const {
    LangevinConfig lc = train_config().langevin;
    lc.n_mcmc = eval.infer_n_mcmc;
    lc.n_samples = eval.infer_n_samples;
    return lc;
}

SyntheticConfig RunConfig::synthetic_config() const {
    SyntheticConfig sc;
    sc.participant_count = data.participants;
    sc.length = data.length;
    sc.fps = data.fps;
    sc.scenario = parse_scenario(data.scenario);
    sc.noise_std = data.noise_std;
    sc.jitter_std = data.jitter_std;
    sc.jitter_revert = data.jitter_revert;
    sc.jitter_noise_std = data.jitter_noise_std;
    return sc;
}

EvalConfig RunConfig::eval_config() const {
    EvalConfig ec;
    ec.env = env;
    ec.sparc = eval.sparc;
    ec.seed = data.seed;
    ec.min_r2_steps = eval.min_r2_steps;
    ec.keep_trajectories = eval.keep_trajectories;
    return ec;
}

std::string config_hash(const RunConfig& c) {
    std::ostringstream text;
    char buf[48];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    text << c.data.source << '|' << c.data.participants << '|' << c.data.sessions << '|'
         << c.data.scenario << '|' << c.data.length << '|' << num(c.data.fps) << '|'
         << num(c.data.noise_std) << '|' << num(c.data.jitter_std) << '|'
         << num(c.data.jitter_revert) << '|' << num(c.data.jitter_noise_std) << '|'
         << c.data.episode_length << '|' << c.data.stride
         << '|'
         << c.data.seed << '|' << c.train.policy << '|';
    for (int h : c.train.hidden_dims) text << h << ',';
    text << '|' << c.train.activation << '|' << num(c.train.dropout) << '|'
         << c.train.batch_size << '|' << c.train.steps << '|' << num(c.train.learning_rate)
         << '|' << num(c.train.beta1) << '|' << num(c.train.beta2) << '|' << c.train.eval_every
         << '|' << c.train.heldout_probe_episodes << '|' << c.train.fold << '|'
         << c.train.n_mcmc << '|' << num(c.train.eta_init) << '|' << num(c.train.eta_final)
         << '|' << num(c.train.decay) << '|' << num(c.train.noise_scale) << '|'
         << num(c.train.grad_clip) << '|' << c.train.n_samples << '|' << num(c.env.dt) << '|'
         << num(c.env.kp) << '|' << num(c.env.kd) << '|' << c.env.max_steps << '|'
         << num(c.env.success_threshold) << '|' << num(c.eval.sparc.sample_rate) << '|'
         << c.eval.sparc.padding_factor << '|' << num(c.eval.sparc.cutoff_freq) << '|'
         << num(c.eval.sparc.amplitude_threshold) << '|' << c.eval.fold_spec.string() << '|'
         << c.eval.fold << '|' << c.eval.min_r2_steps << '|' << c.eval.keep_trajectories << '|'
         << c.eval.infer_n_mcmc << '|' << c.eval.infer_n_samples << '|'
         << c.io.data_dir.string() << '|' << c.io.run_dir.string();

    // FNV-1a over the canonical serialization.
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char ch : text.str()) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace gazebc
