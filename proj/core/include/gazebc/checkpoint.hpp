#pragma once

#include <filesystem>

#include "gazebc/mlp.hpp"
#include "gazebc/types.hpp"

namespace gazebc {

enum class PolicyKind { kEbm, kMse };

std::string policy_kind_name(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);

inline constexpr int kCheckpointFormatVersion = 1;

// Text checkpoint: format version, policy kind, MlpConfig, normalization
// stats, action bounds, then per-layer weights and biases. Floating-point
// values are written as hexfloats so save/load round-trips are exact.
struct Checkpoint {
    PolicyKind kind = PolicyKind::kMse;
    MlpConfig config;
    MlpParams params;
    NormalizationStats stats;
    ActionBounds bounds;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gazebc
