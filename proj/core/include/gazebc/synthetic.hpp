#pragma once

#include "gazebc/rng.hpp"
#include "gazebc/types.hpp"

namespace gazebc {

enum class Scenario { kAttendSpeaker, kScanSweep, kBimodalChoice };

std::string scenario_name(Scenario scenario);
Scenario parse_scenario(const std::string& name);

struct SyntheticConfig {
    int participant_count = 5;
    int length = 3000;
    double fps = 30.0;
    Scenario scenario = Scenario::kAttendSpeaker;
    double noise_std = 0.01;  // participant gaze jitter, radians
    // Saccade-and-settle drift on the facilitator script: occasional
    // instantaneous offset jumps, each decaying back multiplicatively.
    // This mimics human fixational corrections and leaves explicit
    // corrective structure in the recorded data: braking right after the
    // outward step, then per-frame delta = -jitter_revert * offset while
    // settling back.
    double jitter_std = 0.05;     // per-axis jump std, radians; 0 disables
    double jitter_revert = 0.5;   // per-frame decay fraction in (0, 1]
    // Optional white per-frame wander added to the drift offset; off by
    // default because it also corrupts the corrective signal.
    double jitter_noise_std = 0.0;  // radians per frame; 0 disables
};

// Per-frame probability of a drift jump when jitter_std > 0.
inline constexpr double kSaccadeProb = 0.12;

// Script constants for the bimodal scenario. Each 50-frame block travels
// from (+-kStartYaw, 0) to the mirrored point (the episode goal) along a
// coin-flip choice of semicircular arc -- the upper or lower half of the
// circle whose diameter joins the two points. Both arcs launch purely in
// pitch (tangent perpendicular to the start->goal line), so the average of
// the two modes is a standstill, not a usable path, and the straight
// corridor between the endpoints carries no recorded motion. Arcs move at
// constant angular speed with a short ramp-down at arrival followed by one
// hold frame, so each decision happens at an exact standstill and the
// launch is immediately at full mode magnitude. The block boundaries are
// the decision frames.
namespace bimodal {
inline constexpr int kBlockFrames = 50;
inline constexpr int kArcFrames = 49;         // arc transit, then 1 hold frame
inline constexpr int kArrivalRampFrames = 4;  // angular-speed ramp at arrival
inline constexpr double kStartYaw = 0.15;     // also the arc radius
}  // namespace bimodal

// Scripted facilitator gaze plus seat-direction participants with Gaussian
// jitter. Velocities are unpopulated; run compute_velocities on the result.
SessionRecording generate_synthetic_session(const SyntheticConfig& config, Rng& rng);

// Seats uniformly spaced in yaw [-1, 1] and pitch [-0.3, 0.3].
std::vector<GazeVector> seat_directions(int participant_count);

}  // namespace gazebc
