#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vmocap/anim_io.hpp"
#include "vmocap/augment.hpp"
#include "vmocap/camera.hpp"
#include "vmocap/projection.hpp"
#include "vmocap/render.hpp"

namespace vmocap {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20210801;

struct RigConfig {
  int count = 12;
  // Absent values are sized per clip from the subject's bounding sphere.
  std::optional<double> radius;
  std::optional<double> height;
  double radius_factor = 2.5;
  double height_factor = 0.8;
  CameraIntrinsics intrinsics;
  bool track_root = false;
};

// Static rig for one clip. With track_root the whole ring follows the root
// joint, keeping its offset from the root constant.
struct ClipRig {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double height = 0.0;
  std::vector<Camera> cameras;
};

ClipRig plan_rig(const AnimationClip& clip, const RigConfig& config);
std::vector<Camera> cameras_for_frame(const ClipRig& rig, const RigConfig& config, const WorldPose& pose);

struct SampleRecord {
  std::string clip_id;
  std::size_t frame_index = 0;
  std::string camera_id;
  std::string image_path;  // relative to the dataset root
  std::vector<Keypoint2D> keypoints2d;
  std::vector<Vec3> joints3d_view;
  // Set when joints3d_view is stored relative to the root joint.
  std::optional<Vec3> root_view;
  Camera camera;
  Mat4 view_matrix = Mat4::Identity();
  Mat4 projection_matrix = Mat4::Identity();
  std::optional<AppliedAugmentation> augmentation;

  SampleKey key() const { return {clip_id, frame_index, camera_id}; }
  // Absolute view-space joints, undoing root-relative storage.
  std::vector<Vec3> absolute_joints_view() const;

  bool operator==(const SampleRecord&) const = default;
};

nlohmann::json record_to_json(const SampleRecord& record);
SampleRecord record_from_json(const nlohmann::json& doc);
nlohmann::json camera_to_json(const Camera& camera);
Camera camera_from_json(const nlohmann::json& doc);

struct ClipEntry {
  std::string id;
  std::string source;
  std::size_t frame_count = 0;
  double frame_time = 0.0;
  std::string split;
  Vec3 rig_center = Vec3::Zero();
  double rig_radius = 0.0;
  double rig_height = 0.0;
  std::vector<Camera> cameras;
};

struct Manifest {
  int format_version = kDatasetFormatVersion;
  Skeleton skeleton;
  std::vector<ClipEntry> clips;
  std::size_t camera_count = 0;
  CameraIntrinsics intrinsics;
  bool track_root = false;
  bool root_relative = false;
  std::uint64_t seed = kDefaultSeed;
  AugmentationSpec augmentation;
  bool augmentation_baked = false;
  std::array<double, 3> split_ratios{0.8, 0.1, 0.1};
  std::size_t total_samples = 0;
  // FNV-1a 64 of each annotation file's bytes, keyed by sample_id().
  std::map<std::string, std::string> annotation_digests;
};

nlohmann::json manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& doc);

// Sum over clips of frame_count * camera_count.
std::size_t total_sample_count(std::span<const std::size_t> frame_counts, std::size_t camera_count);

std::string frame_name(std::size_t frame);
std::string sample_id(const SampleKey& key);  // "<clip>/<cam>/<frame>"
std::filesystem::path image_relpath(const SampleKey& key);
std::filesystem::path annotation_relpath(const SampleKey& key);

enum class Split { Train, Val, Test };
std::string_view split_name(Split s);

// Clip-granular split: clips are ordered by a seeded hash of their id and cut
// into contiguous runs sized by largest remainder, so every clip's samples
// land in exactly one split.
std::vector<Split> split_dataset(std::span<const std::string> clip_ids, const std::array<double, 3>& ratios,
                                 std::uint64_t seed);

struct NamedClip {
  std::string id;
  std::string source;
  AnimationClip clip;
};

struct GenerateOptions {
  RigConfig rig;
  AugmentationSpec augmentation;
  bool bake_augmentation = false;
  std::optional<std::filesystem::path> background_dir;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path output;
  std::array<double, 3> split{0.8, 0.1, 0.1};
  int workers = 1;
  RenderStyle style;
  bool root_relative = false;
  // Skip samples already recorded in an existing journal.
  bool resume = false;
  std::function<void(const std::string&)> warn;
};

// Pure per-sample result: everything written for one (clip, frame, camera).
struct GeneratedSample {
  SampleRecord record;
  Image image;
};

// Background images from a directory (PNG/JPEG, sorted by file name),
// decoded lazily and cached at the output size. Falls back to flat gray when
// the directory is missing, empty, or a file fails to decode.
class BackgroundPool {
 public:
  BackgroundPool(const std::optional<std::filesystem::path>& dir, int width, int height,
                 std::function<void(const std::string&)> warn);
  ~BackgroundPool();
  BackgroundPool(const BackgroundPool&) = delete;
  BackgroundPool& operator=(const BackgroundPool&) = delete;

  std::size_t size() const;
  // Uniform choice keyed by the sample's background RNG stream.
  const Image& pick(std::uint64_t seed, const SampleKey& key) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs the per-sample chain: forward kinematics, projection, render,
// background composite, then grayscale and the baked augmentation if enabled.
GeneratedSample make_sample(const NamedClip& clip, const ClipRig& rig, std::size_t frame, std::size_t camera_index,
                            const GenerateOptions& options, const BackgroundPool* backgrounds);

// Writes images/, ann/ and manifest.json under options.output. Each sample is
// written atomically and logged to journal.txt; the manifest is written last
// and the journal removed on success.
Manifest generate_dataset(const std::vector<NamedClip>& clips, const GenerateOptions& options);

Manifest read_manifest(const std::filesystem::path& dataset_root);

struct ReadDiagnostic {
  std::string sample;
  std::string message;
};

// Streams the records a manifest references. Missing or unreadable files
// become diagnostics and iteration continues.
class DatasetReader {
 public:
  explicit DatasetReader(std::filesystem::path root);

  const Manifest& manifest() const { return manifest_; }
  std::optional<SampleRecord> next();
  const std::vector<ReadDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::filesystem::path root_;
  Manifest manifest_;
  std::vector<SampleKey> keys_;
  std::size_t cursor_ = 0;
  std::vector<ReadDiagnostic> diagnostics_;
};

DatasetReader read_dataset(const std::filesystem::path& root);

struct Violation {
  std::string sample;
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::size_t samples_checked = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline constexpr double kReprojectionTolerancePx = 1e-3;

ValidationReport validate_dataset(const std::filesystem::path& root);

// COCO-keypoints style export of the 2D labels (visible -> v=2, else v=0).
nlohmann::json export_coco(const std::filesystem::path& root);

std::vector<SampleKey> manifest_keys(const Manifest& manifest);

}  // namespace vmocap
