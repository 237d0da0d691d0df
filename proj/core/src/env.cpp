#include "gazebc/env.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gazebc/error.hpp"

namespace gazebc {

namespace {

Observation build_observation(const EnvState& state, const Episode& episode) {
    Observation obs;
    obs.facilitator = state.gaze;
    obs.velocity = state.velocity;
    obs.goal = state.goal;
    const int last = static_cast<int>(episode.observations.size()) - 1;
    const int idx = state.step < last ? state.step : last;
    obs.participants = episode.observations[idx].participants;
    return obs;
}

}  // namespace

void EnvConfig::validate() const {
    if (!(dt > 0.0)) throw ValidationError("EnvConfig: dt must be > 0");
    if (!(kp > 0.0) || !(kd > 0.0)) throw ValidationError("EnvConfig: gains must be > 0");
    if (!(success_threshold > 0.0)) {
        throw ValidationError("EnvConfig: success_threshold must be > 0");
    }
    if (max_steps < 1) throw ValidationError("EnvConfig: max_steps must be >= 1");
    action_range.validate();
}

std::pair<EnvState, Observation> env_reset(const Episode& episode, const EnvConfig& config) {
    config.validate();
    if (episode.observations.empty()) throw ValidationError("env_reset: empty episode");
    EnvState state;
    state.gaze = episode.observations.front().facilitator;
    state.velocity = episode.observations.front().velocity;
    state.setpoint = state.gaze;
    state.goal = episode.goal;
    state.step = 0;
    return {state, build_observation(state, episode)};
}

StepResult env_step(const EnvState& state, const Episode& episode, Action action,
                    const EnvConfig& config) {
    if (state.step >= config.max_steps) {
        throw ValidationError("env_step: called after the step budget was exhausted");
    }
    if (!action.finite()) throw ComputeError("env_step: non-finite action");

    EnvState next = state;
    next.setpoint = state.gaze + config.action_range.clip(action);
    const GazeVector err = next.setpoint - state.gaze;
    const GazeVector accel = err * config.kp - state.velocity * config.kd;
    next.velocity = state.velocity + accel * config.dt;
    next.gaze = state.gaze + next.velocity * config.dt;
    next.step = state.step + 1;

    const bool done = check_success(next, config) || next.step >= config.max_steps;
    return {next, build_observation(next, episode), done};
}

bool check_success(const EnvState& state, const EnvConfig& config) {
    return (state.gaze - state.goal).norm() <= config.success_threshold;
}

Trajectory rollout(const PolicyFn& policy, const Episode& episode, const EnvConfig& config) {
    auto [state, obs] = env_reset(episode, config);
    Trajectory traj;
    traj.states.push_back(state);
    if (check_success(state, config)) {
        traj.success = true;
        traj.final_distance = (state.gaze - state.goal).norm();
        return traj;
    }
    while (state.step < config.max_steps) {
        const Action action = policy(obs);
        if (!action.finite()) {
            traj.success = false;
            traj.error = "policy returned a non-finite action at step " +
                         std::to_string(state.step);
            traj.final_distance = (state.gaze - state.goal).norm();
            return traj;
        }
        StepResult result = env_step(state, episode, action, config);
        traj.actions.push_back(action);
        traj.states.push_back(result.state);
        state = result.state;
        obs = result.observation;
        if (check_success(state, config)) {
            traj.success = true;
            break;
        }
        if (result.done) break;
    }
    traj.final_distance = (state.gaze - state.goal).norm();
    return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write trajectory file: " + path.string());
    out << "step,gaze_yaw,gaze_pitch,vel_yaw,vel_pitch,action_yaw,action_pitch,dist_to_goal\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << sep;
    };
    for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
        const EnvState& s = trajectory.states[i];
        const Action a = i < trajectory.actions.size() ? trajectory.actions[i] : Action{0.0, 0.0};
        out << s.step << ',';
        put(s.gaze.yaw, ',');
        put(s.gaze.pitch, ',');
        put(s.velocity.yaw, ',');
        put(s.velocity.pitch, ',');
        put(a.yaw, ',');
        put(a.pitch, ',');
        put((s.gaze - s.goal).norm(), '\n');
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace gazebc
