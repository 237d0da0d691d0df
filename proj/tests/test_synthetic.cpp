#include <cmath>

#include "doctest.h"
#include "gazebc/dataset.hpp"
#include "gazebc/synthetic.hpp"

using namespace gazebc;

TEST_CASE("generation is bitwise reproducible per seed") {
    SyntheticConfig config;
    config.length = 300;
    for (Scenario scenario :
         {Scenario::kAttendSpeaker, Scenario::kScanSweep, Scenario::kBimodalChoice}) {
        config.scenario = scenario;
        Rng rng_a(99), rng_b(99);
        const SessionRecording a = generate_synthetic_session(config, rng_a);
        const SessionRecording b = generate_synthetic_session(config, rng_b);
        REQUIRE(a.frames.size() == b.frames.size());
        for (std::size_t t = 0; t < a.frames.size(); ++t) {
            CHECK(a.frames[t].facilitator == b.frames[t].facilitator);
            CHECK(a.frames[t].participants == b.frames[t].participants);
        }
    }
}

TEST_CASE("session shape matches the config") {
    SyntheticConfig config;
    config.participant_count = 3;
    config.length = 250;
    Rng rng(5);
    const SessionRecording session = generate_synthetic_session(config, rng);
    CHECK(session.frames.size() == 250);
    CHECK(session.participant_count == 3);
    CHECK(session.facilitator_type == FacilitatorType::kSynthetic);
    for (const Frame& frame : session.frames) {
        REQUIRE(frame.participants.size() == 3);
        CHECK(frame.facilitator.finite());
    }
}

TEST_CASE("seat directions span the yaw range") {
    const auto seats = seat_directions(5);
    REQUIRE(seats.size() == 5);
    CHECK(seats.front().yaw == doctest::Approx(-1.0));
    CHECK(seats.back().yaw == doctest::Approx(1.0));
    CHECK(seats[2].yaw == doctest::Approx(0.0));
    CHECK(seats.front().pitch == doctest::Approx(-0.3));
    CHECK(seats.back().pitch == doctest::Approx(0.3));
}

TEST_CASE("participants jitter around their seats") {
    SyntheticConfig config;
    config.length = 500;
    config.noise_std = 0.01;
    Rng rng(17);
    const SessionRecording session = generate_synthetic_session(config, rng);
    const auto seats = seat_directions(config.participant_count);
    for (int p = 0; p < config.participant_count; ++p) {
        double sum = 0.0;
        for (const Frame& frame : session.frames) sum += frame.participants[p].yaw;
        CHECK(sum / session.frames.size() == doctest::Approx(seats[p].yaw).epsilon(0.05));
    }
}

TEST_CASE("bimodal script structure") {
    SyntheticConfig config;
    config.scenario = Scenario::kBimodalChoice;
    config.length = 50 * 40;
    config.noise_std = 0.0;
    config.jitter_std = 0.0;
    Rng rng(31);
    const SessionRecording session = generate_synthetic_session(config, rng);

    int positive = 0, negative = 0;
    const int blocks = config.length / bimodal::kBlockFrames;
    for (int b = 0; b < blocks; ++b) {
        const int start = b * bimodal::kBlockFrames;
        const double start_yaw = session.frames[start].facilitator.yaw;
        const double end_yaw =
            session.frames[start + bimodal::kBlockFrames - 1].facilitator.yaw;
        // Blocks alternate sides and end at the mirrored start point.
        CHECK(std::abs(start_yaw) == doctest::Approx(bimodal::kStartYaw));
        CHECK(end_yaw == doctest::Approx(-start_yaw));

        // Every frame lies on the circle of radius kStartYaw, and the arc
        // reaches a pitch apex close to +-kStartYaw.
        double apex = 0.0;
        for (int k = 0; k < bimodal::kBlockFrames; ++k) {
            const GazeVector g = session.frames[start + k].facilitator;
            CHECK(g.norm() == doctest::Approx(bimodal::kStartYaw).epsilon(1e-9));
            if (std::abs(g.pitch) > std::abs(apex)) apex = g.pitch;
        }
        CHECK(std::abs(apex) > 0.99 * bimodal::kStartYaw);
        (apex > 0 ? positive : negative)++;
    }
    // Coin flip: both excursion directions occur with roughly equal frequency.
    CHECK(positive + negative == blocks);
    CHECK(positive > blocks / 4);
    CHECK(negative > blocks / 4);
}

TEST_CASE("bimodal episodes align with script blocks") {
    SyntheticConfig config;
    config.scenario = Scenario::kBimodalChoice;
    config.length = 50 * 10;
    config.noise_std = 0.0;
    config.jitter_std = 0.0;
    Rng rng(8);
    SessionRecording session = compute_velocities(generate_synthetic_session(config, rng));
    const auto episodes = extract_episodes(session, 50);
    REQUIRE(episodes.size() == 10);
    for (const Episode& episode : episodes) {
        // The goal mirrors the block's start yaw.
        CHECK(episode.goal.yaw ==
              doctest::Approx(-episode.observations[0].facilitator.yaw));
        CHECK(episode.goal.pitch == doctest::Approx(0.0));
    }
}

TEST_CASE("attend_speaker orients toward a seat during holds") {
    SyntheticConfig config;
    config.scenario = Scenario::kAttendSpeaker;
    config.length = 50 * 8;
    config.noise_std = 0.0;
    config.jitter_std = 0.0;
    Rng rng(13);
    const SessionRecording session = generate_synthetic_session(config, rng);
    const auto seats = seat_directions(config.participant_count);
    // Last frame of each 50-frame block is inside the hold phase.
    for (int b = 0; b < 8; ++b) {
        const GazeVector gaze = session.frames[b * 50 + 49].facilitator;
        double best = 1e9;
        for (const GazeVector& seat : seats) best = std::min(best, (gaze - seat).norm());
        CHECK(best < 1e-6);
    }
}

TEST_CASE("scenario names round-trip") {
    for (Scenario scenario :
         {Scenario::kAttendSpeaker, Scenario::kScanSweep, Scenario::kBimodalChoice}) {
        CHECK(parse_scenario(scenario_name(scenario)) == scenario);
    }
    CHECK_THROWS(parse_scenario("nope"));
}
