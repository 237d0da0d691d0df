#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "gazebc/types.hpp"

namespace gazebc {

// Parses the session CSV format:
//   frame,fac_yaw,fac_pitch,p1_yaw,p1_pitch,...,pP_yaw,pP_pitch
// Radians as decimal text, one row per frame, LF line endings. Velocities
// are left unpopulated; run compute_velocities afterwards.
SessionRecording load_session(const std::filesystem::path& path, int expected_participants);

void save_session(const std::filesystem::path& path, const SessionRecording& session);

// velocity[0] = 0; velocity[t] = (G_t - G_{t-1}) * fps for t >= 1.
SessionRecording compute_velocities(SessionRecording session);

// Non-overlapping by default (stride = n). Each window's goal is the
// facilitator gaze at its last frame; expert actions are consecutive
// facilitator differences. Sessions shorter than n yield an empty list.
std::vector<Episode> extract_episodes(const SessionRecording& session, int episode_length = 50,
                                      int stride = 0);

// Per-axis min/max over all expert actions, intersected with [-pi/2, pi/2].
ActionBounds action_bounds(const std::vector<Episode>& episodes);

struct FoldSplit {
    std::vector<std::string> train;
    std::vector<std::string> test;
};

// Validates disjointness and coverage per fold against `session_ids`.
std::map<int, FoldSplit> split_folds(const std::vector<std::string>& session_ids,
                                     const FoldSpec& spec);

// Fold spec text file: one `fold,role,session_id` triple per line.
FoldSpec load_fold_spec(const std::filesystem::path& path);
void save_fold_spec(const std::filesystem::path& path, const FoldSpec& spec);

}  // namespace gazebc
