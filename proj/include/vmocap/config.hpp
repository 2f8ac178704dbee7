#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vmocap/dataset.hpp"

namespace vmocap {

// Environment variable consulted for the default worker count.
inline constexpr const char* kWorkersEnv = "VMOCAP_WORKERS";

struct RunConfig {
  std::vector<std::string> clips;  // paths or glob patterns
  RigConfig rig;
  AugmentationSpec augmentation;
  bool bake_augmentation = false;
  // "auto" pairs joints by left/right naming; otherwise explicit pairs of
  // joint names or indices.
  std::optional<std::vector<std::array<std::string, 2>>> flip_pairs;
  RenderStyle style;
  std::optional<std::filesystem::path> background_dir;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path output = "dataset";
  std::array<double, 3> split{0.8, 0.1, 0.1};
  // False while `split` holds the default; generate then puts runs with too
  // few clips for three splits entirely into train.
  bool split_explicit = false;
  int workers = 1;
  bool root_relative = false;
};

// Every key with its default value.
nlohmann::json default_config_json();

// Strict: unknown keys and wrong types are rejected with the offending path.
// Relative paths resolve against `base_dir`. Throws ValidationError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Default worker count: $VMOCAP_WORKERS when set to a positive integer, else 1.
int default_workers();

// Expands glob patterns in order, dropping duplicates. A pattern that
// matches nothing is an error.
std::vector<std::filesystem::path> resolve_clip_paths(const std::vector<std::string>& patterns);

// Loads clips, naming each by its file stem (suffixed on collision).
std::vector<NamedClip> load_clips(const std::vector<std::filesystem::path>& paths);

std::vector<FlipPair> resolve_flip_pairs(const RunConfig& config, const Skeleton& skeleton);

GenerateOptions to_generate_options(const RunConfig& config, const Skeleton& skeleton);

}  // namespace vmocap
