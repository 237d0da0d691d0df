#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gazebc/env.hpp"
#include "gazebc/error.hpp"

using namespace gazebc;
namespace fs = std::filesystem;

namespace {

Episode make_episode(GazeVector start, GazeVector goal, int length = 50) {
    Episode episode;
    episode.length = length;
    episode.goal = goal;
    for (int t = 0; t < length; ++t) {
        Observation obs;
        obs.facilitator = start;
        obs.goal = goal;
        obs.participants = {{0.3, 0.1}};
        episode.observations.push_back(obs);
    }
    episode.expert_actions.assign(length - 1, Action{});
    return episode;
}

}  // namespace

TEST_CASE("reset is deterministic and distance matches hand computation") {
    const Episode episode = make_episode({0.1, -0.2}, {0.4, 0.2});
    const EnvConfig config;
    const auto [state1, obs1] = env_reset(episode, config);
    const auto [state2, obs2] = env_reset(episode, config);
    CHECK(state1.gaze == state2.gaze);
    CHECK(state1.step == 0);
    CHECK(obs1.facilitator == episode.observations[0].facilitator);
    const double dist = std::sqrt(0.3 * 0.3 + 0.4 * 0.4);
    CHECK((state1.gaze - state1.goal).norm() == doctest::Approx(dist));
}

TEST_CASE("PD loop settles on a fixed setpoint") {
    const Episode episode = make_episode({0.0, 0.0}, {0.3, -0.2});
    const EnvConfig config;
    auto [state, obs] = env_reset(episode, config);
    for (int t = 0; t < config.max_steps; ++t) {
        // Drive the setpoint to the goal every step.
        const Action action = episode.goal - state.gaze;
        const auto result = env_step(state, episode, action, config);
        state = result.state;
        if (result.done) break;
    }
    CHECK((state.gaze - episode.goal).norm() < config.success_threshold);
}

TEST_CASE("success threshold is inclusive") {
    EnvConfig config;
    EnvState state;
    state.goal = {0.02, 0.0};
    state.gaze = {0.0, 0.0};
    CHECK(check_success(state, config));
    state.goal = {0.02 + 1e-9, 0.0};
    CHECK(!check_success(state, config));
}

TEST_CASE("semi-implicit Euler step matches hand arithmetic") {
    const Episode episode = make_episode({0.0, 0.0}, {1.0, 0.0});
    EnvConfig config;
    config.kp = 100.0;
    config.kd = 20.0;
    config.dt = 1.0 / 30.0;
    auto [state, obs] = env_reset(episode, config);
    const Action action{0.5, 0.0};
    const auto result = env_step(state, episode, action, config);
    // setpoint = 0.5; err = 0.5; accel = 100*0.5 - 20*0 = 50
    // v' = 50/30; x' = v'/30
    const double v = 50.0 / 30.0;
    CHECK(result.state.velocity.yaw == doctest::Approx(v));
    CHECK(result.state.gaze.yaw == doctest::Approx(v / 30.0));
    CHECK(result.state.step == 1);
}

TEST_CASE("actions are clipped to the configured range") {
    const Episode episode = make_episode({0.0, 0.0}, {1.0, 0.0});
    EnvConfig config;
    config.action_range.min = {-0.1, -0.1};
    config.action_range.max = {0.1, 0.1};
    auto [state, obs] = env_reset(episode, config);
    const auto result = env_step(state, episode, Action{5.0, -5.0}, config);
    CHECK(result.state.setpoint.yaw == doctest::Approx(0.1));
    CHECK(result.state.setpoint.pitch == doctest::Approx(-0.1));
}

TEST_CASE("stepping past the budget throws and bad actions are rejected") {
    const Episode episode = make_episode({0.0, 0.0}, {1.0, 0.0});
    EnvConfig config;
    config.max_steps = 2;
    auto [state, obs] = env_reset(episode, config);
    state.step = 2;
    CHECK_THROWS_AS(env_step(state, episode, Action{0.0, 0.0}, config), ValidationError);
    state.step = 0;
    CHECK_THROWS_AS(env_step(state, episode, Action{std::nan(""), 0.0}, config),
                    ComputeError);
}

TEST_CASE("rollout marks success and stops at the first goal") {
    const Episode episode = make_episode({0.0, 0.0}, {0.05, 0.0});
    const EnvConfig config;
    const Trajectory traj = rollout(
        [&](const Observation& obs) { return obs.goal - obs.facilitator; }, episode, config);
    CHECK(traj.success);
    CHECK(traj.error.empty());
    CHECK(traj.final_distance <= config.success_threshold);
    CHECK(traj.states.size() == traj.actions.size() + 1);
    CHECK(static_cast<int>(traj.actions.size()) < config.max_steps);
}

TEST_CASE("rollout failure on timeout") {
    const Episode episode = make_episode({0.0, 0.0}, {0.5, 0.0});
    const EnvConfig config;
    const Trajectory traj =
        rollout([](const Observation&) { return Action{0.0, 0.0}; }, episode, config);
    CHECK(!traj.success);
    CHECK(traj.error.empty());
    CHECK(static_cast<int>(traj.actions.size()) == config.max_steps);
}

TEST_CASE("non-finite policy action aborts with an error note") {
    const Episode episode = make_episode({0.0, 0.0}, {0.5, 0.0});
    const Trajectory traj = rollout(
        [](const Observation&) { return Action{std::nan(""), 0.0}; }, episode, EnvConfig{});
    CHECK(!traj.success);
    CHECK(!traj.error.empty());
}

TEST_CASE("trajectory CSV header") {
    const Episode episode = make_episode({0.0, 0.0}, {0.05, 0.0});
    const Trajectory traj = rollout(
        [&](const Observation& obs) { return obs.goal - obs.facilitator; }, episode,
        EnvConfig{});
    const fs::path file = fs::temp_directory_path() /
                          ("gazebc_traj_" + std::to_string(::getpid()) + ".csv");
    write_trajectory_csv(file, traj);
    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "step,gaze_yaw,gaze_pitch,vel_yaw,vel_pitch,action_yaw,action_pitch,dist_to_goal");
    in.close();
    fs::remove(file);
}
