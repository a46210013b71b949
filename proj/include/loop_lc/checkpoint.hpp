#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loop_lc/mlp.hpp"
#include "loop_lc/problem_io.hpp"

namespace loop_lc {

inline constexpr const char* kCheckpointFormat = "loop-lc-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct CheckpointMetadata {
  std::string problem_hash;
  int epoch = 0;
  std::vector<double> loss_history;
  std::string training_mode;
  std::string interior_method = "lp";
};

struct Checkpoint {
  MlpModel model;
  CheckpointMetadata meta;
  /// The problem the model was trained on, so `solve` needs only the checkpoint.
  std::optional<json> problem;
  /// Non-fatal findings from loading, e.g. a problem-hash mismatch.
  std::vector<std::string> warnings;
};

/// Weights and biases are stored as base64 blobs of little-endian doubles.
json checkpoint_to_json(const Checkpoint& ckpt);
/// Throws CheckpointError on a wrong format tag, version or malformed payload.
/// A non-empty expected_hash that differs from the stored one adds a warning.
Checkpoint checkpoint_from_json(const json& j, const std::string& expected_hash = "");

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_hash = "");

}  // namespace loop_lc
