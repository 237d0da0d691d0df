#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "gazebc/types.hpp"

namespace gazebc {

struct EnvConfig {
    double dt = 1.0 / 30.0;
    double kp = 100.0;  // 1/s^2
    double kd = 20.0;   // 1/s
    int max_steps = 100;
    double success_threshold = 0.02;  // radians
    ActionBounds action_range;        // defaults to [-pi/2, pi/2] per axis

    void validate() const;
};

struct EnvState {
    GazeVector gaze;
    GazeVector velocity;  // rad/s
    GazeVector setpoint;
    GazeVector goal;
    int step = 0;
};

struct Trajectory {
    std::vector<EnvState> states;  // length = actions + 1
    std::vector<Action> actions;
    bool success = false;
    double final_distance = 0.0;
    std::string error;  // nonempty when the rollout aborted
};

// Gaze and velocity come from the episode's first frame; step counter 0.
std::pair<EnvState, Observation> env_reset(const Episode& episode, const EnvConfig& config);

// Setpoint = gaze + clipped action; PD acceleration; semi-implicit Euler.
// Participant context is replayed from the episode (held at the last frame
// once exhausted). `done` is success or step budget exhaustion.
struct StepResult {
    EnvState state;
    Observation observation;
    bool done = false;
};
StepResult env_step(const EnvState& state, const Episode& episode, Action action,
                    const EnvConfig& config);

// Inclusive threshold on the Euclidean distance to the goal.
bool check_success(const EnvState& state, const EnvConfig& config);

using PolicyFn = std::function<Action(const Observation&)>;

// Single-goal rollout: reset, then policy/step until success or max_steps.
// A non-finite policy action aborts the trajectory (success = false,
// error note set).
Trajectory rollout(const PolicyFn& policy, const Episode& episode, const EnvConfig& config);

// CSV: step,gaze_yaw,gaze_pitch,vel_yaw,vel_pitch,action_yaw,action_pitch,dist_to_goal
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

}  // namespace gazebc
