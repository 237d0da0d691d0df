#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gazebc/checkpoint.hpp"
#include "gazebc/config.hpp"
#include "gazebc/dataset.hpp"
#include "gazebc/error.hpp"
#include "gazebc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gazebc;

namespace {

constexpr int kDataManifestVersion = 1;
constexpr int kReportFormatVersion = 1;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // section.key=value
    std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig config;
    if (!opts.config_path.empty()) config = load_run_config(opts.config_path);
    for (const std::string& item : opts.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("--set expects section.key=value, got '" + item + "'");
        }
        apply_config_key(config, item.substr(0, eq), item.substr(eq + 1));
    }
    if (opts.seed) config.data.seed = *opts.seed;
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file");
    cmd->add_option("--set", opts.overrides, "override one section.key=value");
    cmd->add_option("--seed", opts.seed, "master seed (overrides data.seed)");
}

std::string session_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "session_%02d", index + 1);
    return buf;
}

void write_data_manifest(const fs::path& dir, const RunConfig& config,
                         const std::vector<std::string>& ids) {
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + (dir / "manifest.txt").string());
    out << "gazebc-data-manifest " << kDataManifestVersion << "\n";
    out << "seed " << config.data.seed << "\n";
    out << "config " << config_hash(config) << "\n";
    out << "scenario " << config.data.scenario << "\n";
    out << "participants " << config.data.participants << "\n";
    out << "fps " << config.data.fps << "\n";
    out << "sessions " << ids.size() << "\n";
    for (const std::string& id : ids) {
        out << "session " << id << " " << id << ".csv synthetic\n";
    }
    if (!out) throw IoError("manifest write failed");
}

struct LoadedData {
    std::vector<SessionRecording> sessions;
    std::vector<std::string> ids;
};

LoadedData load_data(const RunConfig& config) {
    const fs::path dir = config.io.data_dir;
    LoadedData data;
    const fs::path manifest = dir / "manifest.txt";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        if (!in) throw IoError("cannot open manifest: " + manifest.string());
        std::string keyword;
        int participants = config.data.participants;
        while (in >> keyword) {
            if (keyword == "participants") {
                in >> participants;
            } else if (keyword == "session") {
                std::string id, file, type;
                in >> id >> file >> type;
                SessionRecording session = load_session(dir / file, participants);
                session.id = id;
                session.facilitator_type = parse_facilitator_type(type);
                session = compute_velocities(std::move(session));
                data.sessions.push_back(std::move(session));
                data.ids.push_back(id);
            } else {
                std::string rest;
                std::getline(in, rest);
            }
        }
    } else {
        std::vector<fs::path> files;
        if (!fs::is_directory(dir)) throw IoError("data directory not found: " + dir.string());
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ValidationError("no session CSVs in " + dir.string());
        for (const fs::path& file : files) {
            SessionRecording session = load_session(file, config.data.participants);
            session.id = file.stem().string();
            session = compute_velocities(std::move(session));
            data.sessions.push_back(std::move(session));
            data.ids.push_back(session.id);
        }
    }
    return data;
}

std::vector<Episode> episodes_for(const LoadedData& data, const RunConfig& config,
                                  const std::vector<std::string>& session_ids) {
    std::vector<Episode> episodes;
    for (const std::string& id : session_ids) {
        const auto it = std::find(data.ids.begin(), data.ids.end(), id);
        if (it == data.ids.end()) throw ValidationError("unknown session id: " + id);
        const SessionRecording& session = data.sessions[it - data.ids.begin()];
        auto eps = extract_episodes(session, config.data.episode_length, config.data.stride);
        episodes.insert(episodes.end(), eps.begin(), eps.end());
    }
    if (episodes.empty()) throw ValidationError("selected sessions yield no episodes");
    return episodes;
}

FoldSplit resolve_fold(const RunConfig& config, const LoadedData& data, int fold) {
    fs::path spec_path = config.eval.fold_spec;
    if (spec_path.empty()) spec_path = config.io.data_dir / "folds.csv";
    const FoldSpec spec = load_fold_spec(spec_path);
    auto splits = split_folds(data.ids, spec);
    const auto it = splits.find(fold);
    if (it == splits.end()) throw ValidationError("fold " + std::to_string(fold) + " not in spec");
    return it->second;
}

void write_run_manifest(const fs::path& dir, const RunConfig& config,
                        const std::string& command) {
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + (dir / "manifest.txt").string());
    out << "gazebc-run-manifest 1\n";
    out << "command " << command << "\n";
    out << "seed " << config.data.seed << "\n";
    out << "config " << config_hash(config) << "\n";
    out << "checkpoint_format " << kCheckpointFormatVersion << "\n";
    out << "report_format " << kReportFormatVersion << "\n";
    if (!out) throw IoError("manifest write failed");
}

int cmd_gen_data(const CommonOpts& opts, bool force) {
    const RunConfig config = resolve_config(opts);
    if (config.data.source != "synthetic") {
        throw ValidationError("gen-data requires data.source = synthetic");
    }
    const fs::path dir = config.io.data_dir;
    fs::create_directories(dir);
    std::vector<std::string> ids;
    for (int i = 0; i < config.data.sessions; ++i) ids.push_back(session_name(i));
    if (!force) {
        for (const std::string& id : ids) {
            if (fs::exists(dir / (id + ".csv"))) {
                throw ValidationError(
                    (dir / (id + ".csv")).string() + " exists; pass --force to overwrite");
            }
        }
        if (fs::exists(dir / "manifest.txt")) {
            throw ValidationError((dir / "manifest.txt").string() +
                                  " exists; pass --force to overwrite");
        }
    }

    Rng master(config.data.seed);
    for (int i = 0; i < config.data.sessions; ++i) {
        Rng session_rng = master.split(static_cast<std::uint64_t>(i));
        SessionRecording session =
            generate_synthetic_session(config.synthetic_config(), session_rng);
        session.id = ids[i];
        save_session(dir / (ids[i] + ".csv"), session);
    }
    write_data_manifest(dir, config, ids);

    // Default two-fold session split: fold 1 holds out the last ~3/7 of the
    // sessions, fold 2 the last ~2/7, at least one test session each.
    const int n = config.data.sessions;
    FoldSpec spec;
    auto add_fold = [&](int fold, int test_count) {
        test_count = std::clamp(test_count, 1, n - 1);
        for (int i = 0; i < n; ++i) {
            spec.entries.push_back({fold, i < n - test_count ? "train" : "test", ids[i]});
        }
    };
    if (n >= 2) {
        add_fold(1, (n * 3 + 3) / 7);
        add_fold(2, (n * 2 + 3) / 7);
    }
    save_fold_spec(dir / "folds.csv", spec);
    std::cout << "wrote " << n << " sessions to " << dir.string() << "\n";
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    const RunConfig config = resolve_config(opts);
    const LoadedData data = load_data(config);
    const FoldSplit split = resolve_fold(config, data, config.train.fold);
    const std::vector<Episode> train_eps = episodes_for(data, config, split.train);
    // Probe set for best-checkpoint selection: a strided subsample of the
    // training episodes. Closed-loop success is measured in the environment,
    // so probing on training episodes is informative without touching the
    // test fold.
    std::vector<Episode> probe_eps;
    if (config.train.heldout_probe_episodes > 0 && !train_eps.empty()) {
        const std::size_t want = static_cast<std::size_t>(config.train.heldout_probe_episodes);
        const std::size_t stride = std::max<std::size_t>(1, train_eps.size() / want);
        for (std::size_t i = 0; i < train_eps.size() && probe_eps.size() < want; i += stride) {
            probe_eps.push_back(train_eps[i]);
        }
    }

    const fs::path run_dir = config.io.run_dir;
    fs::create_directories(run_dir);
    TrainConfig tc = config.train_config();
    tc.checkpoint_dir = run_dir;

    const int obs_dim = static_cast<int>(train_eps.front().observations.front().flatten().size());
    std::cout << "training " << config.train.policy << " on " << split.train.size()
              << " sessions (" << train_eps.size() << " episodes, fold " << config.train.fold
              << ")\n";

    std::vector<TrainLogEntry> log;
    if (config.train.policy == "ibc") {
        const MlpConfig mlp = config.mlp_config(obs_dim + 2, 1);
        IbcTrainResult result = train_ibc(train_eps, probe_eps, mlp, tc, config.env);
        log = std::move(result.log);
    } else {
        const MlpConfig mlp = config.mlp_config(obs_dim, 2);
        MseTrainResult result = train_mse(train_eps, probe_eps, mlp, tc, config.env);
        log = std::move(result.log);
    }
    save_training_log(run_dir / "train_log.csv", log);
    write_run_manifest(run_dir, config, "train");
    if (!log.empty()) {
        std::cout << "final loss " << log.back().loss << "; checkpoint "
                  << (run_dir / "final.ckpt").string() << "\n";
    }
    return 0;
}

MetricSelection parse_metrics(const std::string& list) {
    if (list.empty()) return {};
    MetricSelection selection{false, false, false};
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "asm") {
            selection.asm_metric = true;
        } else if (item == "r2") {
            selection.r2 = true;
        } else if (item == "sparc") {
            selection.sparc = true;
        } else {
            throw ValidationError("--metrics accepts asm, r2, sparc; got '" + item + "'");
        }
    }
    return selection;
}

NamedPolicy make_named_policy(const fs::path& checkpoint_path, const std::string& expected_kind,
                              const LangevinConfig& langevin) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const PolicyKind expected = parse_policy_kind(expected_kind);
    if (ckpt.kind != expected) {
        throw ValidationError(checkpoint_path.string() + ": checkpoint is " +
                              policy_kind_name(ckpt.kind) + ", expected " + expected_kind);
    }
    if (ckpt.kind == PolicyKind::kEbm) {
        auto policy = std::make_shared<EbmPolicy>();
        policy->config = ckpt.config;
        policy->params = ckpt.params;
        policy->stats = ckpt.stats;
        policy->bounds = ckpt.bounds;
        policy->validate();
        return {"ibc", [policy, langevin](const Observation& obs, Rng& rng) {
                    return ibc_infer(*policy, obs.flatten(), langevin, rng);
                }};
    }
    auto policy = std::make_shared<MsePolicy>();
    policy->config = ckpt.config;
    policy->params = ckpt.params;
    policy->stats = ckpt.stats;
    policy->bounds = ckpt.bounds;
    policy->validate();
    return {"mse", [policy](const Observation& obs, Rng&) {
                return mse_infer(*policy, obs.flatten());
            }};
}

int cmd_eval(const CommonOpts& opts, const std::string& ibc_ckpt, const std::string& mse_ckpt,
             const std::string& metrics, int jobs, bool keep_trajectories) {
    const RunConfig config = resolve_config(opts);
    if (ibc_ckpt.empty() && mse_ckpt.empty()) {
        throw ValidationError("eval needs at least one of --ibc / --mse");
    }
    const LoadedData data = load_data(config);
    const FoldSplit split = resolve_fold(config, data, config.eval.fold);
    const std::vector<Episode> test_eps = episodes_for(data, config, split.test);

    std::vector<NamedPolicy> policies;
    if (!ibc_ckpt.empty()) {
        policies.push_back(make_named_policy(ibc_ckpt, "ibc", config.infer_langevin()));
    }
    if (!mse_ckpt.empty()) {
        policies.push_back(make_named_policy(mse_ckpt, "mse", config.infer_langevin()));
    }

    EvalConfig ec = config.eval_config();
    ec.jobs = jobs;
    ec.keep_trajectories = keep_trajectories || config.eval.keep_trajectories;
    std::cout << "evaluating " << policies.size() << " policies on " << test_eps.size()
              << " episodes (fold " << config.eval.fold << ")\n";
    const MetricsReport report = evaluate(policies, test_eps, ec);

    const fs::path run_dir = config.io.run_dir;
    fs::create_directories(run_dir);
    const MetricSelection selection = parse_metrics(metrics);
    emit_report(report, ReportFormat::kTextTable, run_dir / "report.txt", selection);
    emit_report(report, ReportFormat::kCsv, run_dir / "report.csv", selection);
    if (ec.keep_trajectories) {
        emit_report(report, ReportFormat::kPlotData, run_dir / "trajectories", selection);
    }
    write_run_manifest(run_dir, config, "eval");
    std::cout << render_text_table(report, selection);
    if (report.aborted_rollouts > 0) {
        std::cerr << report.aborted_rollouts << " rollout(s) aborted\n";
        return 2;
    }
    return 0;
}

int cmd_rollout(const CommonOpts& opts, const std::string& ckpt_path,
                const std::string& kind, int episode_index, const std::string& out_path) {
    const RunConfig config = resolve_config(opts);
    const LoadedData data = load_data(config);
    const FoldSplit split = resolve_fold(config, data, config.eval.fold);
    const std::vector<Episode> test_eps = episodes_for(data, config, split.test);
    if (episode_index < 0 || episode_index >= static_cast<int>(test_eps.size())) {
        throw ValidationError("episode index out of range (test set has " +
                              std::to_string(test_eps.size()) + " episodes)");
    }
    const NamedPolicy policy = make_named_policy(ckpt_path, kind, config.infer_langevin());
    Rng episode_rng = Rng(config.data.seed).split(static_cast<std::uint64_t>(episode_index));
    int calls = 0;
    PolicyFn fn = [&](const Observation& obs) {
        Rng call_rng = episode_rng.split(static_cast<std::uint64_t>(calls++));
        return policy.act(obs, call_rng);
    };
    const Trajectory traj = rollout(fn, test_eps[episode_index], config.env);
    write_trajectory_csv(out_path, traj);
    std::cout << "episode " << episode_index << ": " << (traj.success ? "success" : "failure")
              << ", final distance " << traj.final_distance << ", " << traj.actions.size()
              << " steps\n";
    if (!traj.error.empty()) {
        std::cerr << "rollout aborted: " << traj.error << "\n";
        return 2;
    }
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_path,
               const std::string& metrics) {
    const MetricsReport report = parse_report_csv(in_path);
    const MetricSelection selection = parse_metrics(metrics);
    const std::string table = render_text_table(report, selection);
    if (out_path.empty()) {
        std::cout << table;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + out_path);
        out << table;
        if (!out) throw IoError("write failed: " + out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit vs explicit behavior cloning for multiparty gaze generation"};
    app.require_subcommand(1);

    CommonOpts gen_opts;
    bool force = false;
    CLI::App* gen = app.add_subcommand("gen-data", "generate synthetic gaze sessions");
    add_common(gen, gen_opts);
    gen->add_flag("--force", force, "overwrite existing session files");

    CommonOpts train_opts;
    CLI::App* train = app.add_subcommand("train", "train a policy on one fold");
    add_common(train, train_opts);

    CommonOpts eval_opts;
    std::string ibc_ckpt, mse_ckpt, metrics;
    int jobs = 1;
    bool keep_trajectories = false;
    CLI::App* eval = app.add_subcommand("eval", "evaluate checkpoints on the test fold");
    add_common(eval, eval_opts);
    eval->add_option("--ibc", ibc_ckpt, "energy-based policy checkpoint");
    eval->add_option("--mse", mse_ckpt, "regression policy checkpoint");
    eval->add_option("--metrics", metrics, "comma list of asm,r2,sparc (default all)");
    eval->add_option("--jobs", jobs, "evaluation worker threads")->check(CLI::PositiveNumber);
    eval->add_flag("--keep-trajectories", keep_trajectories, "dump per-episode trajectory CSVs");

    CommonOpts rollout_opts;
    std::string rollout_ckpt, rollout_kind = "ibc", rollout_out = "trajectory.csv";
    int episode_index = 0;
    CLI::App* roll = app.add_subcommand("rollout", "debug-dump a single episode rollout");
    add_common(roll, rollout_opts);
    roll->add_option("--checkpoint", rollout_ckpt, "policy checkpoint")->required();
    roll->add_option("--kind", rollout_kind, "ibc or mse");
    roll->add_option("--episode", episode_index, "test-set episode index");
    roll->add_option("--out", rollout_out, "trajectory CSV path");

    std::string report_in, report_out, report_metrics;
    CLI::App* rep = app.add_subcommand("report", "re-render a text table from a report CSV");
    rep->add_option("--in", report_in, "report CSV path")->required();
    rep->add_option("--out", report_out, "output path (default stdout)");
    rep->add_option("--metrics", report_metrics, "comma list of asm,r2,sparc (default all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_data(gen_opts, force);
        if (train->parsed()) return cmd_train(train_opts);
        if (eval->parsed()) {
            return cmd_eval(eval_opts, ibc_ckpt, mse_ckpt, metrics, jobs, keep_trajectories);
        }
        if (roll->parsed()) {
            return cmd_rollout(rollout_opts, rollout_ckpt, rollout_kind, episode_index,
                               rollout_out);
        }
        if (rep->parsed()) return cmd_report(report_in, report_out, report_metrics);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ComputeError& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
