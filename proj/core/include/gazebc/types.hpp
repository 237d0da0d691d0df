#pragma once

#include <string>
#include <vector>

namespace gazebc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;

// 2D gaze direction (or per-frame gaze delta) in radians.
struct GazeVector {
    double yaw = 0.0;
    double pitch = 0.0;

    double norm() const;
    bool finite() const;
};

GazeVector operator+(GazeVector a, GazeVector b);
GazeVector operator-(GazeVector a, GazeVector b);
GazeVector operator*(GazeVector a, double s);
bool operator==(GazeVector a, GazeVector b);

// Wrap yaw to [-pi, pi], clamp pitch to [-pi/2, pi/2].
GazeVector canonicalize(GazeVector g);

// Per-frame change of the facilitator's yaw/pitch.
using Action = GazeVector;

struct Frame {
    int index = 0;
    GazeVector facilitator;
    GazeVector velocity;  // rad/s
    std::vector<GazeVector> participants;
};

enum class FacilitatorType { kTeacher, kMusician, kMusicTeacher, kSynthetic };

std::string facilitator_type_name(FacilitatorType type);
// Display label matching the report tables ("Teacher", "M. Teacher", ...).
std::string facilitator_display_name(FacilitatorType type);
FacilitatorType parse_facilitator_type(const std::string& name);

struct SessionRecording {
    std::string id;
    std::vector<Frame> frames;
    double fps = 30.0;
    int participant_count = 0;
    FacilitatorType facilitator_type = FacilitatorType::kSynthetic;
};

// Flattening order is fixed: facilitator, velocity, goal, then participants,
// yaw before pitch in each pair.
struct Observation {
    GazeVector facilitator;
    GazeVector velocity;
    GazeVector goal;
    std::vector<GazeVector> participants;

    static int dim(int participant_count) { return 6 + 2 * participant_count; }
    std::vector<double> flatten() const;
};

struct ActionBounds {
    GazeVector min{-kHalfPi, -kHalfPi};
    GazeVector max{kHalfPi, kHalfPi};

    Action clip(Action a) const;
    bool contains(Action a) const;
    void validate() const;
};

struct Episode {
    std::vector<Observation> observations;  // length n
    std::vector<Action> expert_actions;     // length n - 1
    GazeVector goal;
    int length = 0;
    FacilitatorType facilitator_type = FacilitatorType::kSynthetic;
    std::string session_id;
    int start_frame = 0;
};

struct FoldSpec {
    struct Entry {
        int fold = 0;
        std::string role;  // "train" | "test"
        std::string session_id;
    };
    std::vector<Entry> entries;

    std::vector<int> folds() const;
};

}  // namespace gazebc
