#include "gazebc/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "gazebc/error.hpp"

namespace gazebc {

void SparcConfig::validate() const {
    if (!(sample_rate > 0.0)) throw ValidationError("SparcConfig: sample_rate must be > 0");
    if (padding_factor < 1) throw ValidationError("SparcConfig: padding_factor must be >= 1");
    if (!(cutoff_freq > 0.0) || cutoff_freq >= sample_rate / 2.0) {
        throw ValidationError("SparcConfig: cutoff must be in (0, sample_rate/2)");
    }
    if (!(amplitude_threshold > 0.0) || !(amplitude_threshold < 1.0)) {
        throw ValidationError("SparcConfig: amplitude_threshold must be in (0, 1)");
    }
}

double average_success(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) throw ValidationError("average_success: empty trajectory list");
    int successes = 0;
    for (const Trajectory& t : trajectories) {
        if (t.success) ++successes;
    }
    return static_cast<double>(successes) / static_cast<double>(trajectories.size());
}

double r_squared(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw ValidationError("r_squared: length mismatch");
    if (truth.size() < 2) throw ValidationError("r_squared: need at least 2 samples");
    double mean = 0.0;
    for (double y : truth) mean += y;
    mean /= static_cast<double>(truth.size());
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
        ss_res += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
    }
    if (ss_tot <= 0.0) throw ComputeError("r_squared: constant truth, variance undefined");
    return 1.0 - ss_res / ss_tot;
}

namespace {

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wn(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wn;
            }
        }
    }
}

}  // namespace

SparcResult sparc(std::span<const double> positions, const SparcConfig& config) {
    config.validate();
    if (positions.size() < 8) throw ValidationError("sparc: need at least 8 samples");

    std::vector<double> speed(positions.size() - 1);
    double max_speed = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        speed[i] = std::abs(positions[i + 1] - positions[i]) * config.sample_rate;
        max_speed = std::max(max_speed, speed[i]);
    }
    if (max_speed < 1e-12) return {0.0, true};

    const std::size_t nfft =
        static_cast<std::size_t>(config.padding_factor) * next_power_of_two(speed.size());
    std::vector<std::complex<double>> spectrum(nfft, {0.0, 0.0});
    for (std::size_t i = 0; i < speed.size(); ++i) spectrum[i] = {speed[i], 0.0};
    fft_radix2(spectrum);

    const std::size_t half = nfft / 2;
    std::vector<double> magnitude(half + 1);
    double max_mag = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
        magnitude[k] = std::abs(spectrum[k]);
        max_mag = std::max(max_mag, magnitude[k]);
    }
    for (double& m : magnitude) m /= max_mag;

    const double df = config.sample_rate / static_cast<double>(nfft);
    std::size_t cutoff_index = half;
    while (cutoff_index > 0 && static_cast<double>(cutoff_index) * df > config.cutoff_freq) {
        --cutoff_index;
    }
    // Truncate at the last in-band frequency whose normalized magnitude
    // clears the threshold.
    std::size_t end = 0;
    for (std::size_t k = 0; k <= cutoff_index; ++k) {
        if (magnitude[k] >= config.amplitude_threshold) end = k;
    }
    if (end == 0) return {0.0, false};

    const double f_end = static_cast<double>(end) * df;
    double arc = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        const double dfreq = df / f_end;
        const double dmag = magnitude[k + 1] - magnitude[k];
        arc += std::sqrt(dfreq * dfreq + dmag * dmag);
    }
    return {-arc, false};
}

namespace {

struct EpisodeOutcome {
    Trajectory trajectory;
    bool r2_valid = false;
    double r2_yaw = 0.0;
    double r2_pitch = 0.0;
    double sparc_yaw = 0.0;
    double sparc_pitch = 0.0;
};

EpisodeOutcome run_episode(const NamedPolicy& policy, const Episode& episode,
                           const EvalConfig& config, Rng episode_rng) {
    EpisodeOutcome outcome;
    int calls = 0;
    PolicyFn fn = [&](const Observation& obs) {
        Rng call_rng = episode_rng.split(static_cast<std::uint64_t>(calls++));
        return policy.act(obs, call_rng);
    };
    outcome.trajectory = rollout(fn, episode, config.env);
    const Trajectory& traj = outcome.trajectory;

    if (traj.error.empty()) {
        const std::size_t shared =
            std::min(traj.states.size(), episode.observations.size());
        if (shared >= static_cast<std::size_t>(std::max(2, config.min_r2_steps))) {
            std::vector<double> pred_yaw(shared), pred_pitch(shared);
            std::vector<double> true_yaw(shared), true_pitch(shared);
            for (std::size_t t = 0; t < shared; ++t) {
                pred_yaw[t] = traj.states[t].gaze.yaw;
                pred_pitch[t] = traj.states[t].gaze.pitch;
                true_yaw[t] = episode.observations[t].facilitator.yaw;
                true_pitch[t] = episode.observations[t].facilitator.pitch;
            }
            try {
                outcome.r2_yaw = r_squared(pred_yaw, true_yaw);
                outcome.r2_pitch = r_squared(pred_pitch, true_pitch);
                outcome.r2_valid = true;
            } catch (const ComputeError&) {
                outcome.r2_valid = false;
            }
        }
        if (traj.states.size() >= 8) {
            std::vector<double> yaw(traj.states.size()), pitch(traj.states.size());
            for (std::size_t t = 0; t < traj.states.size(); ++t) {
                yaw[t] = traj.states[t].gaze.yaw;
                pitch[t] = traj.states[t].gaze.pitch;
            }
            outcome.sparc_yaw = sparc(yaw, config.sparc).value;
            outcome.sparc_pitch = sparc(pitch, config.sparc).value;
        }
        // Trajectories shorter than 8 samples count as motionless (0.0).
    }
    return outcome;
}

}  // namespace

MetricsReport evaluate(const std::vector<NamedPolicy>& policies,
                       const std::vector<Episode>& episodes, const EvalConfig& config) {
    if (policies.empty()) throw ValidationError("evaluate: no policies");
    if (episodes.empty()) throw ValidationError("evaluate: empty test set");
    config.env.validate();
    config.sparc.validate();

    struct Task {
        std::size_t policy_index;
        std::size_t episode_index;
    };
    std::vector<Task> tasks;
    tasks.reserve(policies.size() * episodes.size());
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (std::size_t e = 0; e < episodes.size(); ++e) tasks.push_back({p, e});
    }

    std::vector<EpisodeOutcome> outcomes(tasks.size());
    auto worker_body = [&](std::atomic<std::size_t>& cursor) {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            Rng episode_rng =
                Rng(config.seed).split(task.policy_index * 1000003ULL + task.episode_index);
            outcomes[i] =
                run_episode(policies[task.policy_index], episodes[task.episode_index], config,
                            episode_rng);
        }
    };
    std::atomic<std::size_t> cursor{0};
    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        worker_body(cursor);
    } else {
        std::vector<std::thread> workers;
        for (int j = 0; j < jobs; ++j) workers.emplace_back([&] { worker_body(cursor); });
        for (std::thread& w : workers) w.join();
    }

    // Aggregate per policy and facilitator type, in first-appearance order.
    std::vector<FacilitatorType> type_order;
    for (const Episode& ep : episodes) {
        if (std::find(type_order.begin(), type_order.end(), ep.facilitator_type) ==
            type_order.end()) {
            type_order.push_back(ep.facilitator_type);
        }
    }

    MetricsReport report;
    for (std::size_t p = 0; p < policies.size(); ++p) {
        std::vector<PolicyMetrics> type_rows;
        for (FacilitatorType type : type_order) {
            PolicyMetrics m;
            int successes = 0;
            int r2_count = 0;
            int sparc_count = 0;
            double r2_yaw_sum = 0.0, r2_pitch_sum = 0.0;
            double sparc_yaw_sum = 0.0, sparc_pitch_sum = 0.0;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].policy_index != p) continue;
                const Episode& ep = episodes[tasks[i].episode_index];
                if (ep.facilitator_type != type) continue;
                const EpisodeOutcome& o = outcomes[i];
                ++m.episode_count;
                if (o.trajectory.success) ++successes;
                if (!o.trajectory.error.empty()) {
                    ++m.excluded_episodes;
                    ++report.aborted_rollouts;
                    continue;
                }
                if (o.r2_valid) {
                    r2_yaw_sum += o.r2_yaw;
                    r2_pitch_sum += o.r2_pitch;
                    ++r2_count;
                } else {
                    ++m.excluded_episodes;
                }
                sparc_yaw_sum += o.sparc_yaw;
                sparc_pitch_sum += o.sparc_pitch;
                ++sparc_count;
            }
            m.asm_value = m.episode_count > 0
                              ? static_cast<double>(successes) / m.episode_count
                              : 0.0;
            if (r2_count > 0) {
                m.r2_yaw = r2_yaw_sum / r2_count;
                m.r2_pitch = r2_pitch_sum / r2_count;
            }
            if (sparc_count > 0) {
                m.sparc_yaw = sparc_yaw_sum / sparc_count;
                m.sparc_pitch = sparc_pitch_sum / sparc_count;
            }
            type_rows.push_back(m);
            report.rows.push_back(
                {facilitator_display_name(type), policies[p].name, m, std::nullopt});
        }
        PolicyMetrics avg;
        for (const PolicyMetrics& m : type_rows) {
            avg.asm_value += m.asm_value;
            avg.r2_yaw += m.r2_yaw;
            avg.r2_pitch += m.r2_pitch;
            avg.sparc_yaw += m.sparc_yaw;
            avg.sparc_pitch += m.sparc_pitch;
            avg.episode_count += m.episode_count;
            avg.excluded_episodes += m.excluded_episodes;
        }
        const double n_types = static_cast<double>(type_rows.size());
        avg.asm_value /= n_types;
        avg.r2_yaw /= n_types;
        avg.r2_pitch /= n_types;
        avg.sparc_yaw /= n_types;
        avg.sparc_pitch /= n_types;
        report.rows.push_back({"Average", policies[p].name, avg, std::nullopt});
    }

    if (config.keep_trajectories) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const Episode& ep = episodes[tasks[i].episode_index];
            report.episodes.push_back({policies[tasks[i].policy_index].name, ep.session_id,
                                       static_cast<int>(tasks[i].episode_index),
                                       ep.facilitator_type, outcomes[i].trajectory});
        }
    }
    return report;
}

namespace {

std::string policy_display_name(const std::string& policy) {
    if (policy == "ibc" || policy == "ebm") return "Implicit BC";
    if (policy == "mse") return "Explicit BC";
    if (policy == "reported") return "Reported";
    return policy;
}

std::vector<std::string> ordered_policies(const MetricsReport& report) {
    std::vector<std::string> names;
    for (const ReportRow& row : report.rows) {
        if (std::find(names.begin(), names.end(), row.policy) == names.end()) {
            names.push_back(row.policy);
        }
    }
    return names;
}

std::vector<std::string> ordered_facilitators(const MetricsReport& report) {
    std::vector<std::string> labels;
    for (const ReportRow& row : report.rows) {
        if (row.facilitator == "Average") continue;
        if (std::find(labels.begin(), labels.end(), row.facilitator) == labels.end()) {
            labels.push_back(row.facilitator);
        }
    }
    labels.push_back("Average");
    return labels;
}

const ReportRow* find_row(const MetricsReport& report, const std::string& facilitator,
                          const std::string& policy) {
    for (const ReportRow& row : report.rows) {
        if (row.facilitator == facilitator && row.policy == policy) return &row;
    }
    return nullptr;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void render_section(std::ostringstream& out, const MetricsReport& report,
                    const std::string& title, bool two_axes,
                    const std::function<std::string(const ReportRow&, int axis)>& cell) {
    const auto policies = ordered_policies(report);
    const auto facilitators = ordered_facilitators(report);
    constexpr int kLabelWidth = 14;

    std::vector<std::string> headers;
    for (const std::string& policy : policies) {
        if (policy == "reported" && two_axes) continue;
        const std::string head = policy_display_name(policy);
        if (two_axes) {
            headers.push_back(head + " Pitch");
            headers.push_back(head + " Yaw");
        } else {
            headers.push_back(head);
        }
    }
    std::size_t cell_width = 13;
    for (const std::string& head : headers) cell_width = std::max(cell_width, head.size() + 2);

    out << title << "\n";
    out << std::string(kLabelWidth, ' ');
    for (const std::string& head : headers) {
        out << head << std::string(cell_width - head.size(), ' ');
    }
    out << "\n";
    for (const std::string& fac : facilitators) {
        out << fac << std::string(fac.size() < kLabelWidth ? kLabelWidth - fac.size() : 1, ' ');
        for (const std::string& policy : policies) {
            if (policy == "reported" && two_axes) continue;
            const ReportRow* row = find_row(report, fac, policy);
            const int axes = two_axes ? 2 : 1;
            for (int axis = 0; axis < axes; ++axis) {
                std::string value = row ? cell(*row, axis) : "-";
                out << value
                    << std::string(value.size() < cell_width ? cell_width - value.size() : 1,
                                   ' ');
            }
        }
        out << "\n";
    }
    out << "\n";
}

}  // namespace

std::string render_text_table(const MetricsReport& report, const MetricSelection& selection) {
    std::ostringstream out;
    if (selection.asm_metric) {
        render_section(out, report, "Average Success Metric", false,
                       [](const ReportRow& row, int) {
                           if (row.policy == "reported") {
                               return row.reported_asm ? fixed2(*row.reported_asm) : std::string("-");
                           }
                           return fixed2(row.metrics.asm_value);
                       });
    }
    if (selection.r2) {
        render_section(out, report, "R^2", true, [](const ReportRow& row, int axis) {
            return fixed2(axis == 0 ? row.metrics.r2_pitch : row.metrics.r2_yaw);
        });
    }
    if (selection.sparc) {
        render_section(out, report, "SPARC Metric", true, [](const ReportRow& row, int axis) {
            return fixed2(axis == 0 ? row.metrics.sparc_pitch : row.metrics.sparc_yaw);
        });
    }
    return out.str();
}

void emit_report(const MetricsReport& report, ReportFormat format,
                 const std::filesystem::path& path, const MetricSelection& selection) {
    switch (format) {
        case ReportFormat::kTextTable: {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write report: " + path.string());
            out << render_text_table(report, selection);
            if (!out) throw IoError("write failed: " + path.string());
            return;
        }
        case ReportFormat::kCsv: {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write report: " + path.string());
            out << "facilitator,policy,asm,r2_pitch,r2_yaw,sparc_pitch,sparc_yaw,episodes\n";
            char buf[48];
            auto put = [&](double v) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out << buf;
            };
            for (const ReportRow& row : report.rows) {
                out << row.facilitator << ',' << row.policy << ',';
                if (row.policy == "reported") {
                    if (row.reported_asm) put(*row.reported_asm);
                    out << ",,,,," << row.metrics.episode_count << "\n";
                    continue;
                }
                put(row.metrics.asm_value);
                out << ',';
                put(row.metrics.r2_pitch);
                out << ',';
                put(row.metrics.r2_yaw);
                out << ',';
                put(row.metrics.sparc_pitch);
                out << ',';
                put(row.metrics.sparc_yaw);
                out << ',' << row.metrics.episode_count << "\n";
            }
            if (!out) throw IoError("write failed: " + path.string());
            return;
        }
        case ReportFormat::kPlotData: {
            std::filesystem::create_directories(path);
            for (const EpisodeRecord& record : report.episodes) {
                const std::string name = record.policy + "_" + record.session_id + "_" +
                                         std::to_string(record.episode_index) + ".csv";
                write_trajectory_csv(path / name, record.trajectory);
            }
            return;
        }
    }
    throw ValidationError("emit_report: unknown format");
}

MetricsReport parse_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report: " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        line != "facilitator,policy,asm,r2_pitch,r2_yaw,sparc_pitch,sparc_yaw,episodes") {
        throw ValidationError(path.string() + ": bad report header");
    }
    MetricsReport report;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) fields.push_back(field);
        while (fields.size() < 8) fields.push_back("");
        if (fields.size() != 8) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected 8 columns");
        }
        ReportRow row;
        row.facilitator = fields[0];
        row.policy = fields[1];
        auto num = [&](const std::string& text) {
            return text.empty() ? 0.0 : std::strtod(text.c_str(), nullptr);
        };
        if (row.policy == "reported") {
            if (!fields[2].empty()) row.reported_asm = num(fields[2]);
        } else {
            row.metrics.asm_value = num(fields[2]);
            row.metrics.r2_pitch = num(fields[3]);
            row.metrics.r2_yaw = num(fields[4]);
            row.metrics.sparc_pitch = num(fields[5]);
            row.metrics.sparc_yaw = num(fields[6]);
        }
        if (!fields[7].empty()) row.metrics.episode_count = std::atoi(fields[7].c_str());
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace gazebc
