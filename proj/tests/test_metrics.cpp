#include <unistd.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "gazebc/error.hpp"
#include "gazebc/metrics.hpp"
#include "gazebc/rng.hpp"

using namespace gazebc;
namespace fs = std::filesystem;

namespace {

// Independent brute-force reference: naive O(n^2) DFT plus direct
// arc-length accumulation, mirroring the documented SPARC definition.
double sparc_reference(const std::vector<double>& positions, const SparcConfig& config) {
    const std::size_t n = positions.size() - 1;
    std::vector<double> speed(n);
    for (std::size_t i = 0; i < n; ++i) {
        speed[i] = std::abs(positions[i + 1] - positions[i]) * config.sample_rate;
    }
    std::size_t pow2 = 1;
    while (pow2 < n) pow2 *= 2;
    const std::size_t nfft = static_cast<std::size_t>(config.padding_factor) * pow2;

    const std::size_t half = nfft / 2;
    std::vector<double> magnitude(half + 1);
    double max_mag = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * kPi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(nfft);
            sum += speed[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        magnitude[k] = std::abs(sum);
        max_mag = std::max(max_mag, magnitude[k]);
    }
    for (double& m : magnitude) m /= max_mag;

    const double df = config.sample_rate / static_cast<double>(nfft);
    std::size_t cutoff_index = half;
    while (cutoff_index > 0 && cutoff_index * df > config.cutoff_freq) --cutoff_index;
    std::size_t end = 0;
    for (std::size_t k = 0; k <= cutoff_index; ++k) {
        if (magnitude[k] >= config.amplitude_threshold) end = k;
    }
    if (end == 0) return 0.0;
    const double f_end = end * df;
    double arc = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        const double dx = df / f_end;
        const double dy = magnitude[k + 1] - magnitude[k];
        arc += std::sqrt(dx * dx + dy * dy);
    }
    return -arc;
}

std::vector<double> min_jerk_profile(int n, double amplitude) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double tau = static_cast<double>(i) / (n - 1);
        out[i] = amplitude * (10 * tau * tau * tau - 15 * tau * tau * tau * tau +
                              6 * tau * tau * tau * tau * tau);
    }
    return out;
}

}  // namespace

TEST_CASE("average_success equals the counting oracle") {
    std::vector<Trajectory> trajectories(10);
    Rng rng(3);
    int expected = 0;
    for (auto& t : trajectories) {
        t.success = rng.uniform() < 0.5;
        if (t.success) ++expected;
    }
    CHECK(average_success(trajectories) ==
          doctest::Approx(expected / 10.0).epsilon(1e-12));
    CHECK_THROWS_AS(average_success({}), ValidationError);

    std::vector<Trajectory> all_good(7);
    for (auto& t : all_good) t.success = true;
    CHECK(average_success(all_good) == 1.0);
}

TEST_CASE("r_squared identities") {
    const std::vector<double> truth = {1.0, 2.0, 4.0, 3.0, 5.0};
    CHECK(r_squared(truth, truth) == doctest::Approx(1.0));

    const double mean = 3.0;
    const std::vector<double> mean_pred(truth.size(), mean);
    CHECK(r_squared(mean_pred, truth) == doctest::Approx(0.0));

    const std::vector<double> constant(5, 2.0);
    CHECK_THROWS_AS(r_squared(truth, constant), ComputeError);
    CHECK_THROWS_AS(r_squared(truth, std::vector<double>{1.0, 2.0, 3.0}), ValidationError);
}

TEST_CASE("r_squared matches the direct formula on random data") {
    Rng rng(8);
    std::vector<double> truth(20), predicted(20);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i] = rng.uniform(-1.0, 1.0);
        predicted[i] = truth[i] + rng.uniform(-0.2, 0.2);
    }
    double mean = 0.0;
    for (double y : truth) mean += y;
    mean /= truth.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    CHECK(r_squared(predicted, truth) == doctest::Approx(1.0 - ss_res / ss_tot).epsilon(1e-12));
}

TEST_CASE("sparc matches the brute-force reference") {
    Rng rng(10);
    const SparcConfig config;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> series(40 + trial * 17);
        double value = 0.0;
        for (double& x : series) {
            value += rng.uniform(-0.05, 0.05);
            x = value;
        }
        const SparcResult result = sparc(series, config);
        CHECK(!result.no_motion);
        CHECK(result.value == doctest::Approx(sparc_reference(series, config)).epsilon(1e-9));
    }
}

TEST_CASE("sparc degenerate and invariance properties") {
    const SparcConfig config;
    SUBCASE("constant series is no-motion zero") {
        const std::vector<double> flat(32, 0.7);
        const SparcResult result = sparc(flat, config);
        CHECK(result.value == 0.0);
        CHECK(result.no_motion);
    }
    SUBCASE("too-short series rejected") {
        CHECK_THROWS_AS(sparc(std::vector<double>(7, 0.0), config), ValidationError);
    }
    SUBCASE("amplitude scaling invariance") {
        const auto base = min_jerk_profile(60, 0.5);
        std::vector<double> scaled = base;
        for (double& x : scaled) x *= 7.3;
        CHECK(sparc(base, config).value ==
              doctest::Approx(sparc(scaled, config).value).epsilon(1e-9));
    }
    SUBCASE("non-positive by construction") {
        Rng rng(4);
        std::vector<double> series(50);
        for (std::size_t i = 0; i < series.size(); ++i) {
            series[i] = std::sin(0.3 * i) + rng.uniform(-0.1, 0.1);
        }
        CHECK(sparc(series, config).value <= 0.0);
    }
}

TEST_CASE("noise makes sparc more negative") {
    const SparcConfig config;
    int ordered = 0;
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(100 + seed);
        const auto smooth = min_jerk_profile(90, 0.8);
        std::vector<double> noisy = smooth;
        for (double& x : noisy) x += rng.normal(0.0, 0.01);
        if (sparc(smooth, config).value > sparc(noisy, config).value) ++ordered;
    }
    CHECK(ordered >= 9);
}

namespace {

Episode eval_episode(FacilitatorType type, double distance, int length = 20) {
    Episode episode;
    episode.facilitator_type = type;
    episode.session_id = "synthetic";
    episode.length = length;
    episode.goal = {distance, 0.0};
    for (int t = 0; t < length; ++t) {
        Observation obs;
        obs.facilitator = {0.002 * t, 0.001 * t};  // non-constant ground truth
        obs.goal = episode.goal;
        obs.participants = {{0.3, 0.0}};
        episode.observations.push_back(obs);
    }
    episode.expert_actions.assign(length - 1, Action{0.002, 0.001});
    return episode;
}

}  // namespace

TEST_CASE("evaluate aggregates per type with an average row") {
    // Teacher: 10 episodes all reachable; Musician: 9 reachable, 1 not,
    // under a zero-action policy (success iff starting inside the threshold).
    std::vector<Episode> episodes;
    for (int i = 0; i < 10; ++i) {
        episodes.push_back(eval_episode(FacilitatorType::kTeacher, 0.01));
    }
    for (int i = 0; i < 9; ++i) {
        episodes.push_back(eval_episode(FacilitatorType::kMusician, 0.01));
    }
    episodes.push_back(eval_episode(FacilitatorType::kMusician, 0.5));

    std::vector<NamedPolicy> policies;
    policies.push_back({"ibc", [](const Observation&, Rng&) { return Action{0.0, 0.0}; }});

    EvalConfig config;
    config.seed = 1;
    config.min_r2_steps = 5;
    const MetricsReport report = evaluate(policies, episodes, config);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].facilitator == "Teacher");
    CHECK(report.rows[0].metrics.asm_value == doctest::Approx(1.0));
    CHECK(report.rows[1].facilitator == "Musician");
    CHECK(report.rows[1].metrics.asm_value == doctest::Approx(0.9));
    CHECK(report.rows[2].facilitator == "Average");
    CHECK(report.rows[2].metrics.asm_value == doctest::Approx(0.95));
    CHECK(report.rows[2].metrics.episode_count == 20);
}

TEST_CASE("evaluate is deterministic and jobs-invariant") {
    std::vector<Episode> episodes;
    for (int i = 0; i < 6; ++i) {
        episodes.push_back(eval_episode(FacilitatorType::kSynthetic, 0.05 + 0.05 * i));
    }
    std::vector<NamedPolicy> policies;
    policies.push_back({"ibc", [](const Observation& obs, Rng& rng) {
                            return Action{(obs.goal - obs.facilitator).yaw +
                                              rng.uniform(-0.01, 0.01),
                                          0.0};
                        }});
    EvalConfig config;
    config.seed = 7;
    config.min_r2_steps = 5;
    const MetricsReport a = evaluate(policies, episodes, config);
    config.jobs = 3;
    const MetricsReport b = evaluate(policies, episodes, config);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].metrics.asm_value == b.rows[i].metrics.asm_value);
        CHECK(a.rows[i].metrics.r2_yaw == b.rows[i].metrics.r2_yaw);
        CHECK(a.rows[i].metrics.sparc_yaw == b.rows[i].metrics.sparc_yaw);
    }
}

namespace {

MetricsReport table_one_fixture() {
    MetricsReport report;
    auto row = [](const char* fac, const char* policy, double asm_value) {
        ReportRow r;
        r.facilitator = fac;
        r.policy = policy;
        r.metrics.asm_value = asm_value;
        r.metrics.episode_count = 100;
        return r;
    };
    report.rows.push_back(row("Teacher", "ibc", 0.96));
    report.rows.push_back(row("Musician", "ibc", 0.97));
    report.rows.push_back(row("M. Teacher", "ibc", 0.96));
    report.rows.push_back(row("Average", "ibc", 0.96));
    report.rows.push_back(row("Teacher", "mse", 0.92));
    report.rows.push_back(row("Musician", "mse", 0.95));
    report.rows.push_back(row("M. Teacher", "mse", 0.93));
    report.rows.push_back(row("Average", "mse", 0.93));
    for (const char* fac : {"Teacher", "Musician", "M. Teacher", "Average"}) {
        ReportRow r;
        r.facilitator = fac;
        r.policy = "reported";
        r.reported_asm = 0.95;
        report.rows.push_back(r);
    }
    return report;
}

}  // namespace

TEST_CASE("text table mirrors the published layout") {
    const std::string table =
        render_text_table(table_one_fixture(), MetricSelection{true, false, false});
    CHECK(table.find("Implicit BC") != std::string::npos);
    CHECK(table.find("Explicit BC") != std::string::npos);
    CHECK(table.find("Reported") != std::string::npos);
    CHECK(table.find("Teacher") != std::string::npos);
    CHECK(table.find("Musician") != std::string::npos);
    CHECK(table.find("M. Teacher") != std::string::npos);
    CHECK(table.find("Average") != std::string::npos);
    CHECK(table.find("0.96") != std::string::npos);
    CHECK(table.find("0.93") != std::string::npos);
    CHECK(table.find("0.95") != std::string::npos);
    // Average is the last body row.
    CHECK(table.rfind("Average") > table.rfind("M. Teacher"));
}

TEST_CASE("report csv round-trip") {
    const fs::path file = fs::temp_directory_path() /
                          ("gazebc_report_" + std::to_string(::getpid()) + ".csv");
    const MetricsReport report = table_one_fixture();
    emit_report(report, ReportFormat::kCsv, file);
    const MetricsReport parsed = parse_report_csv(file);
    REQUIRE(parsed.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(parsed.rows[i].facilitator == report.rows[i].facilitator);
        CHECK(parsed.rows[i].policy == report.rows[i].policy);
        if (report.rows[i].policy == "reported") {
            CHECK(parsed.rows[i].reported_asm == report.rows[i].reported_asm);
        } else {
            CHECK(parsed.rows[i].metrics.asm_value == report.rows[i].metrics.asm_value);
            CHECK(parsed.rows[i].metrics.episode_count ==
                  report.rows[i].metrics.episode_count);
        }
    }
    fs::remove(file);
}
