#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vmocap/dataset.hpp"

namespace vmocap {

// Per-joint and pooled scores. `mean` is empty when nothing was evaluated,
// which is distinct from a score of zero.
struct PoseEvalResult {
  std::vector<std::optional<double>> per_joint;
  std::optional<double> mean;
  std::size_t joint_count = 0;
  std::size_t sample_count = 0;
  std::size_t evaluated = 0;

  bool has_data() const { return mean.has_value(); }
};

using Points2D = std::vector<Eigen::Vector2d>;
using Points3D = std::vector<Vec3>;

// Percentage of correct keypoints. A joint counts as correct when it lies
// within alpha * (diagonal of the visible ground-truth bounding box) of the
// ground truth; invisible ground-truth joints are skipped.
PoseEvalResult pck(std::span<const Points2D> predictions, std::span<const SampleRecord> ground_truth, double alpha);

// Mean per-joint position error against the stored view-space joints.
PoseEvalResult mpjpe(std::span<const Points3D> predictions, std::span<const SampleRecord> ground_truth,
                     bool root_aligned = false, std::size_t root = 0);

struct ReprojectionError {
  std::optional<double> max;
  std::optional<double> mean;
  std::size_t worst_joint = 0;
  std::size_t evaluated = 0;
  std::vector<std::optional<double>> per_joint;
};

// Reprojects the stored view-space joints through the stored camera and
// compares with the stored keypoints over visible joints.
ReprojectionError reprojection_error(const SampleRecord& record);

struct Prediction {
  SampleKey key;
  std::optional<Points2D> keypoints2d;
  std::optional<Points3D> joints3d_view;
};

// {"predictions": [{clip_id, frame_index, camera_id, keypoints2d?, joints3d_view?}]}
// keypoints2d rows may carry a trailing visibility value, which is ignored.
std::vector<Prediction> predictions_from_json(const nlohmann::json& doc);
nlohmann::json predictions_to_json(std::span<const Prediction> predictions);
// Ground truth recast as predictions; handy for sanity checks.
std::vector<Prediction> predictions_from_records(std::span<const SampleRecord> records);

struct EvalOptions {
  std::vector<double> pck_alphas{0.05, 0.1, 0.2};
  bool root_aligned = true;
};

struct EvalReport {
  std::size_t matched = 0;
  std::size_t unmatched_predictions = 0;
  std::size_t missing_predictions = 0;
  std::vector<std::pair<double, PoseEvalResult>> pck;
  std::optional<PoseEvalResult> mpjpe;
  std::optional<PoseEvalResult> mpjpe_root_aligned;
  std::vector<std::string> joint_names;
};

EvalReport evaluate(std::span<const SampleRecord> ground_truth, std::span<const Prediction> predictions,
                    const EvalOptions& options, std::vector<std::string> joint_names);
nlohmann::json report_to_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace vmocap
