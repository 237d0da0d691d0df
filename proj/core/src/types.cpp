#include "gazebc/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gazebc/error.hpp"

namespace gazebc {

double GazeVector::norm() const {
    return std::sqrt(yaw * yaw + pitch * pitch);
}

bool GazeVector::finite() const {
    return std::isfinite(yaw) && std::isfinite(pitch);
}

GazeVector operator+(GazeVector a, GazeVector b) { return {a.yaw + b.yaw, a.pitch + b.pitch}; }
GazeVector operator-(GazeVector a, GazeVector b) { return {a.yaw - b.yaw, a.pitch - b.pitch}; }
GazeVector operator*(GazeVector a, double s) { return {a.yaw * s, a.pitch * s}; }
bool operator==(GazeVector a, GazeVector b) { return a.yaw == b.yaw && a.pitch == b.pitch; }

GazeVector canonicalize(GazeVector g) {
    double yaw = std::remainder(g.yaw, 2.0 * kPi);
    double pitch = std::clamp(g.pitch, -kHalfPi, kHalfPi);
    return {yaw, pitch};
}

std::string facilitator_type_name(FacilitatorType type) {
    switch (type) {
        case FacilitatorType::kTeacher: return "teacher";
        case FacilitatorType::kMusician: return "musician";
        case FacilitatorType::kMusicTeacher: return "music_teacher";
        case FacilitatorType::kSynthetic: return "synthetic";
    }
    return "synthetic";
}

std::string facilitator_display_name(FacilitatorType type) {
    switch (type) {
        case FacilitatorType::kTeacher: return "Teacher";
        case FacilitatorType::kMusician: return "Musician";
        case FacilitatorType::kMusicTeacher: return "M. Teacher";
        case FacilitatorType::kSynthetic: return "Synthetic";
    }
    return "Synthetic";
}

FacilitatorType parse_facilitator_type(const std::string& name) {
    if (name == "teacher") return FacilitatorType::kTeacher;
    if (name == "musician") return FacilitatorType::kMusician;
    if (name == "music_teacher") return FacilitatorType::kMusicTeacher;
    if (name == "synthetic") return FacilitatorType::kSynthetic;
    throw ValidationError("unknown facilitator type: " + name);
}

std::vector<double> Observation::flatten() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(dim(static_cast<int>(participants.size()))));
    out.push_back(facilitator.yaw);
    out.push_back(facilitator.pitch);
    out.push_back(velocity.yaw);
    out.push_back(velocity.pitch);
    out.push_back(goal.yaw);
    out.push_back(goal.pitch);
    for (const GazeVector& p : participants) {
        out.push_back(p.yaw);
        out.push_back(p.pitch);
    }
    return out;
}

Action ActionBounds::clip(Action a) const {
    return {std::clamp(a.yaw, min.yaw, max.yaw), std::clamp(a.pitch, min.pitch, max.pitch)};
}

bool ActionBounds::contains(Action a) const {
    return a.yaw >= min.yaw && a.yaw <= max.yaw && a.pitch >= min.pitch && a.pitch <= max.pitch;
}

void ActionBounds::validate() const {
    if (!(min.yaw <= max.yaw) || !(min.pitch <= max.pitch)) {
        throw ValidationError("ActionBounds: min must be <= max per axis");
    }
    if (min.yaw < -kHalfPi || max.yaw > kHalfPi || min.pitch < -kHalfPi || max.pitch > kHalfPi) {
        throw ValidationError("ActionBounds: bounds must lie within [-pi/2, pi/2]");
    }
}

std::vector<int> FoldSpec::folds() const {
    std::set<int> seen;
    for (const Entry& e : entries) seen.insert(e.fold);
    return {seen.begin(), seen.end()};
}

}  // namespace gazebc
