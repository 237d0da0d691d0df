#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "gazebc/env.hpp"
#include "gazebc/policy.hpp"

namespace gazebc {

struct SparcConfig {
    double sample_rate = 30.0;    // Hz
    int padding_factor = 4;       // multiplies the next power of two
    double cutoff_freq = 10.0;    // Hz
    double amplitude_threshold = 0.05;

    void validate() const;
};

struct SparcResult {
    double value = 0.0;  // non-positive; closer to 0 is smoother
    bool no_motion = false;
};

// Fraction of successful trajectories.
double average_success(const std::vector<Trajectory>& trajectories);

// 1 - SS_res / SS_tot for one axis; throws ComputeError on constant truth.
double r_squared(std::span<const double> predicted, std::span<const double> truth);

// Spectral arc length of the max-normalized speed-profile magnitude
// spectrum over the adaptively truncated [0, cutoff] band. A motionless
// series is defined as 0.0 with the no-motion flag set.
SparcResult sparc(std::span<const double> positions, const SparcConfig& config);

struct PolicyMetrics {
    double asm_value = 0.0;
    double r2_pitch = 0.0;
    double r2_yaw = 0.0;
    double sparc_pitch = 0.0;
    double sparc_yaw = 0.0;
    int episode_count = 0;
    int excluded_episodes = 0;  // aborted rollouts / undefined-variance R^2
};

struct ReportRow {
    std::string facilitator;  // display label ("Teacher", ..., "Average")
    std::string policy;       // "ibc" | "mse" | "reported"
    PolicyMetrics metrics;
    std::optional<double> reported_asm;  // only used by the "reported" column
};

struct EpisodeRecord {
    std::string policy;
    std::string session_id;
    int episode_index = 0;
    FacilitatorType facilitator_type = FacilitatorType::kSynthetic;
    Trajectory trajectory;
};

struct MetricsReport {
    std::vector<ReportRow> rows;
    std::vector<EpisodeRecord> episodes;  // populated when keep_trajectories
    int aborted_rollouts = 0;
};

// One policy to evaluate, by name ("ibc" or "mse").
struct NamedPolicy {
    std::string name;
    // Called once per environment step; the rng is a per-episode stream.
    std::function<Action(const Observation&, Rng&)> act;
};

struct EvalConfig {
    EnvConfig env;
    SparcConfig sparc;
    std::uint64_t seed = 0;
    int jobs = 1;
    int min_r2_steps = 10;  // shorter shared prefixes are excluded from R^2
    bool keep_trajectories = false;
};

// Rolls out every policy over every episode, then aggregates ASM, per-axis
// R^2 and SPARC per facilitator type plus an Average row per policy.
MetricsReport evaluate(const std::vector<NamedPolicy>& policies,
                       const std::vector<Episode>& episodes, const EvalConfig& config);

enum class ReportFormat { kTextTable, kCsv, kPlotData };

// Which metric sections to render.
struct MetricSelection {
    bool asm_metric = true;
    bool r2 = true;
    bool sparc = true;
};

std::string render_text_table(const MetricsReport& report,
                              const MetricSelection& selection = {});

// text_table / csv write a single file; plot_data treats `path` as a
// directory and writes one trajectory CSV per recorded episode.
void emit_report(const MetricsReport& report, ReportFormat format,
                 const std::filesystem::path& path, const MetricSelection& selection = {});

// Round-trips the CSV written by emit_report.
MetricsReport parse_report_csv(const std::filesystem::path& path);

}  // namespace gazebc
