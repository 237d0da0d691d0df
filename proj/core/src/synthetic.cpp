#include "gazebc/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "gazebc/error.hpp"

namespace gazebc {

namespace {

// Minimum-jerk position fraction, s(0) = 0, s(1) = 1, zero endpoint
// velocity and acceleration.
double min_jerk(double tau) {
    const double t3 = tau * tau * tau;
    return 10.0 * t3 - 15.0 * t3 * tau + 6.0 * t3 * tau * tau;
}

void append_min_jerk(std::vector<GazeVector>& positions, GazeVector from, GazeVector to,
                     int frames) {
    for (int k = 1; k <= frames; ++k) {
        const double s = min_jerk(static_cast<double>(k) / frames);
        positions.push_back(from + (to - from) * s);
    }
}

std::vector<GazeVector> attend_speaker_script(int length, int participant_count, Rng& rng) {
    const auto seats = seat_directions(participant_count);
    std::vector<GazeVector> positions;
    positions.reserve(length);
    GazeVector current{0.0, 0.0};
    positions.push_back(current);
    constexpr int kTransit = 20;
    constexpr int kHold = 30;
    while (static_cast<int>(positions.size()) < length) {
        const GazeVector target = seats[rng.uniform_int(0, participant_count - 1)];
        append_min_jerk(positions, current, target, kTransit);
        for (int k = 0; k < kHold; ++k) positions.push_back(target);
        current = target;
    }
    positions.resize(length);
    return positions;
}

std::vector<GazeVector> scan_sweep_script(int length, Rng& rng) {
    constexpr double kPeriod = 180.0;
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    std::vector<GazeVector> positions;
    positions.reserve(length);
    for (int t = 0; t < length; ++t) {
        positions.push_back({0.9 * std::sin(2.0 * kPi * t / kPeriod),
                             0.25 * std::sin(4.0 * kPi * t / kPeriod + phase)});
    }
    return positions;
}

// Cumulative progress fractions for a constant-speed transit with a linear
// speed ramp over the last `ramp_out` frames. The first frame moves at full
// speed; the final fraction is exactly 1.
std::vector<double> profile_fractions(int frames, int ramp_out) {
    std::vector<double> fractions(static_cast<std::size_t>(frames));
    double total = 0.0;
    for (int k = 0; k < frames; ++k) {
        double w = 1.0;
        if (ramp_out > 0) w = std::min(w, static_cast<double>(frames - k) / (ramp_out + 1));
        fractions[static_cast<std::size_t>(k)] = w;
        total += w;
    }
    double cumulative = 0.0;
    for (int k = 0; k < frames; ++k) {
        cumulative += fractions[static_cast<std::size_t>(k)];
        fractions[static_cast<std::size_t>(k)] = cumulative / total;
    }
    return fractions;
}

std::vector<GazeVector> bimodal_script(int length, Rng& rng) {
    using namespace bimodal;
    static_assert(kArcFrames + 1 == kBlockFrames);
    std::vector<GazeVector> positions;
    positions.reserve(length);
    double side = 1.0;  // yaw sign of the current block's start point
    positions.push_back({side * kStartYaw, 0.0});
    const std::vector<double> fractions = profile_fractions(kArcFrames, kArrivalRampFrames);
    while (static_cast<int>(positions.size()) < length) {
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        // Semicircle from (side*R, 0) to (-side*R, 0) through pitch
        // sign*R, traced at constant angular speed with a ramped arrival.
        for (int k = 0; k < kArcFrames; ++k) {
            const double theta = kPi * fractions[static_cast<std::size_t>(k)];
            positions.push_back({side * kStartYaw * std::cos(theta),
                                 sign * kStartYaw * std::sin(theta)});
        }
        positions.push_back({-side * kStartYaw, 0.0});  // hold: next decision at rest
        side = -side;
    }
    positions.resize(length);
    return positions;
}

}  // namespace

std::string scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::kAttendSpeaker: return "attend_speaker";
        case Scenario::kScanSweep: return "scan_sweep";
        case Scenario::kBimodalChoice: return "bimodal_choice";
    }
    return "attend_speaker";
}

Scenario parse_scenario(const std::string& name) {
    if (name == "attend_speaker") return Scenario::kAttendSpeaker;
    if (name == "scan_sweep") return Scenario::kScanSweep;
    if (name == "bimodal_choice") return Scenario::kBimodalChoice;
    throw ValidationError("unknown scenario: " + name);
}

std::vector<GazeVector> seat_directions(int participant_count) {
    if (participant_count < 1) throw ValidationError("seat_directions: need at least one seat");
    std::vector<GazeVector> seats;
    if (participant_count == 1) {
        seats.push_back({0.6, 0.1});
        return seats;
    }
    for (int i = 0; i < participant_count; ++i) {
        const double frac = static_cast<double>(i) / (participant_count - 1);
        seats.push_back({-1.0 + 2.0 * frac, -0.3 + 0.6 * frac});
    }
    return seats;
}

SessionRecording generate_synthetic_session(const SyntheticConfig& config, Rng& rng) {
    if (config.length < 50) throw ValidationError("generate_synthetic_session: length must be >= 50");
    if (config.participant_count < 1) {
        throw ValidationError("generate_synthetic_session: participant_count must be >= 1");
    }

    if (config.jitter_std < 0.0 || config.jitter_noise_std < 0.0 ||
        config.jitter_revert <= 0.0 || config.jitter_revert > 1.0) {
        throw ValidationError("generate_synthetic_session: bad jitter parameters");
    }

    Rng script_rng = rng.split(1);
    Rng noise_rng = rng.split(2);
    Rng jitter_rng = rng.split(3);

    std::vector<GazeVector> facilitator;
    switch (config.scenario) {
        case Scenario::kAttendSpeaker:
            facilitator = attend_speaker_script(config.length, config.participant_count, script_rng);
            break;
        case Scenario::kScanSweep:
            facilitator = scan_sweep_script(config.length, script_rng);
            break;
        case Scenario::kBimodalChoice:
            facilitator = bimodal_script(config.length, script_rng);
            break;
    }

    if (config.jitter_std > 0.0) {
        // Saccade-and-settle drift: occasional random jumps away from the
        // scripted gaze, each followed by an exponential glide back.
        // Between jumps the offset obeys j' = (1 - revert) * j plus an
        // optional white-noise wander term (jitter_noise_std, off by
        // default), so the recorded per-frame deltas carry a corrective
        // law (delta = -revert * offset) over a wide range of offsets.
        const double keep = 1.0 - config.jitter_revert;
        GazeVector j{0.0, 0.0};
        int hold = 0;
        for (GazeVector& g : facilitator) {
            if (hold == 0 && jitter_rng.uniform() < kSaccadeProb) {
                // Random per-jump scale so the recorded corrections cover a
                // wide range of speeds, from micro-drift to full saccades.
                const double scale = jitter_rng.uniform(0.2, 1.4);
                j.yaw += jitter_rng.normal(0.0, scale * config.jitter_std);
                j.pitch += jitter_rng.normal(0.0, scale * config.jitter_std);
                // Dwell one frame at the new offset before the glide so the
                // record pairs a stationary offset with a corrective delta,
                // not only offsets moving at the glide velocity.
                hold = 1;
            }
            g = g + j;
            if (hold > 0) {
                --hold;
            } else {
                j.yaw = keep * j.yaw + jitter_rng.normal(0.0, config.jitter_noise_std);
                j.pitch = keep * j.pitch + jitter_rng.normal(0.0, config.jitter_noise_std);
            }
        }
    }

    const auto seats = seat_directions(config.participant_count);
    SessionRecording session;
    session.fps = config.fps;
    session.participant_count = config.participant_count;
    session.facilitator_type = FacilitatorType::kSynthetic;
    session.frames.reserve(config.length);
    for (int t = 0; t < config.length; ++t) {
        Frame frame;
        frame.index = t;
        frame.facilitator = canonicalize(facilitator[t]);
        frame.participants.reserve(config.participant_count);
        for (int p = 0; p < config.participant_count; ++p) {
            GazeVector g = seats[p];
            if (config.noise_std > 0.0) {
                g.yaw += noise_rng.normal(0.0, config.noise_std);
                g.pitch += noise_rng.normal(0.0, config.noise_std);
            }
            frame.participants.push_back(canonicalize(g));
        }
        session.frames.push_back(std::move(frame));
    }
    return session;
}

}  // namespace gazebc
