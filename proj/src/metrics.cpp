#include "vmocap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "vmocap/error.hpp"
#include "vmocap/serialize.hpp"

namespace vmocap {

using nlohmann::json;

namespace {

// Sorting before summing makes the total independent of sample order.
double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void check_counts(std::size_t predictions, std::size_t ground_truth) {
  if (predictions != ground_truth) {
    throw ValidationError("got " + std::to_string(predictions) + " predictions for " + std::to_string(ground_truth) +
                          " ground-truth samples");
  }
}

}  // namespace

PoseEvalResult pck(std::span<const Points2D> predictions, std::span<const SampleRecord> ground_truth, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("PCK alpha must be positive");
  check_counts(predictions.size(), ground_truth.size());

  PoseEvalResult result;
  result.sample_count = ground_truth.size();
  result.joint_count = ground_truth.empty() ? 0 : ground_truth.front().keypoints2d.size();
  std::vector<std::size_t> correct(result.joint_count, 0), evaluated(result.joint_count, 0);

  for (std::size_t s = 0; s < ground_truth.size(); ++s) {
    const auto& gt = ground_truth[s].keypoints2d;
    const auto& pred = predictions[s];
    if (gt.size() != result.joint_count || pred.size() != gt.size()) {
      throw ValidationError("joint count mismatch in sample " + sample_id(ground_truth[s].key()));
    }
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (const auto& k : gt) {
      if (!k.visible) continue;
      x0 = std::min(x0, k.x);
      x1 = std::max(x1, k.x);
      y0 = std::min(y0, k.y);
      y1 = std::max(y1, k.y);
    }
    if (!(x0 <= x1)) continue;
    const double threshold = alpha * std::hypot(x1 - x0, y1 - y0);
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (!gt[j].visible) continue;
      ++evaluated[j];
      if (std::hypot(pred[j].x() - gt[j].x, pred[j].y() - gt[j].y) <= threshold) ++correct[j];
    }
  }

  std::size_t total_correct = 0;
  for (std::size_t j = 0; j < result.joint_count; ++j) {
    result.per_joint.push_back(evaluated[j] ? std::optional(static_cast<double>(correct[j]) / evaluated[j])
                                            : std::nullopt);
    result.evaluated += evaluated[j];
    total_correct += correct[j];
  }
  if (result.evaluated) result.mean = static_cast<double>(total_correct) / result.evaluated;
  return result;
}

PoseEvalResult mpjpe(std::span<const Points3D> predictions, std::span<const SampleRecord> ground_truth,
                     bool root_aligned, std::size_t root) {
  check_counts(predictions.size(), ground_truth.size());
  PoseEvalResult result;
  result.sample_count = ground_truth.size();
  result.joint_count = ground_truth.empty() ? 0 : ground_truth.front().joints3d_view.size();
  if (root_aligned && result.joint_count && root >= result.joint_count) {
    throw ValidationError("root joint index out of range");
  }
  std::vector<std::vector<double>> errors(result.joint_count);

  for (std::size_t s = 0; s < ground_truth.size(); ++s) {
    const auto& gt = ground_truth[s].joints3d_view;
    const auto& pred = predictions[s];
    if (gt.size() != result.joint_count || pred.size() != gt.size()) {
      throw ValidationError("joint count mismatch in sample " + sample_id(ground_truth[s].key()));
    }
    const Vec3 gt_root = root_aligned ? gt[root] : Vec3::Zero();
    const Vec3 pred_root = root_aligned ? pred[root] : Vec3::Zero();
    for (std::size_t j = 0; j < gt.size(); ++j) {
      errors[j].push_back(((pred[j] - pred_root) - (gt[j] - gt_root)).norm());
    }
  }

  std::vector<double> all;
  for (std::size_t j = 0; j < result.joint_count; ++j) {
    if (errors[j].empty()) {
      result.per_joint.push_back(std::nullopt);
      continue;
    }
    result.evaluated += errors[j].size();
    all.insert(all.end(), errors[j].begin(), errors[j].end());
    result.per_joint.push_back(ordered_sum(errors[j]) / static_cast<double>(errors[j].size()));
  }
  if (!all.empty()) result.mean = ordered_sum(all) / static_cast<double>(all.size());
  return result;
}

ReprojectionError reprojection_error(const SampleRecord& record) {
  ReprojectionError out;
  const auto view = record.absolute_joints_view();
  const std::size_t n = std::min(view.size(), record.keypoints2d.size());
  out.per_joint.assign(record.keypoints2d.size(), std::nullopt);
  std::vector<double> errs;
  for (std::size_t j = 0; j < n; ++j) {
    const Keypoint2D& stored = record.keypoints2d[j];
    if (!stored.visible) continue;
    const Keypoint2D kp = view_to_image(view[j], record.projection_matrix, record.camera.intrinsics);
    const double e = std::hypot(kp.x - stored.x, kp.y - stored.y);
    out.per_joint[j] = e;
    errs.push_back(e);
    if (!out.max || e > *out.max) {
      out.max = e;
      out.worst_joint = j;
    }
  }
  out.evaluated = errs.size();
  if (!errs.empty()) out.mean = ordered_sum(errs) / static_cast<double>(errs.size());
  return out;
}

std::vector<Prediction> predictions_from_json(const json& doc) {
  std::vector<Prediction> out;
  try {
    for (const auto& p : doc.at("predictions")) {
      Prediction pred;
      pred.key = {p.at("clip_id").get<std::string>(), p.at("frame_index").get<std::size_t>(),
                  p.at("camera_id").get<std::string>()};
      if (p.contains("keypoints2d")) {
        Points2D pts;
        for (const auto& k : p.at("keypoints2d")) {
          if (!k.is_array() || k.size() < 2) throw ParseError("keypoint rows need at least [x, y]", 0);
          pts.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
        pred.keypoints2d = std::move(pts);
      }
      if (p.contains("joints3d_view")) {
        Points3D pts;
        for (const auto& v : p.at("joints3d_view")) pts.push_back(vec3_from_json(v));
        pred.joints3d_view = std::move(pts);
      }
      out.push_back(std::move(pred));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed predictions document: ") + e.what(), 0);
  }
  return out;
}

json predictions_to_json(std::span<const Prediction> predictions) {
  json list = json::array();
  for (const auto& p : predictions) {
    json item = {{"clip_id", p.key.clip_id}, {"frame_index", p.key.frame}, {"camera_id", p.key.camera_id}};
    if (p.keypoints2d) {
      json kps = json::array();
      for (const auto& k : *p.keypoints2d) kps.push_back({k.x(), k.y()});
      item["keypoints2d"] = std::move(kps);
    }
    if (p.joints3d_view) {
      json pts = json::array();
      for (const auto& v : *p.joints3d_view) pts.push_back(to_json(v));
      item["joints3d_view"] = std::move(pts);
    }
    list.push_back(std::move(item));
  }
  return {{"predictions", std::move(list)}};
}

std::vector<Prediction> predictions_from_records(std::span<const SampleRecord> records) {
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    Prediction p;
    p.key = r.key();
    Points2D kps;
    for (const auto& k : r.keypoints2d) kps.emplace_back(k.x, k.y);
    p.keypoints2d = std::move(kps);
    p.joints3d_view = r.joints3d_view;
    out.push_back(std::move(p));
  }
  return out;
}

EvalReport evaluate(std::span<const SampleRecord> ground_truth, std::span<const Prediction> predictions,
                    const EvalOptions& options, std::vector<std::string> joint_names) {
  EvalReport report;
  report.joint_names = std::move(joint_names);
  std::map<std::string, const SampleRecord*> by_id;
  for (const auto& r : ground_truth) by_id[sample_id(r.key())] = &r;

  std::vector<SampleRecord> gt2d, gt3d;
  std::vector<Points2D> pred2d;
  std::vector<Points3D> pred3d;
  std::map<std::string, bool> seen;
  for (const auto& p : predictions) {
    const auto it = by_id.find(sample_id(p.key));
    if (it == by_id.end()) {
      ++report.unmatched_predictions;
      continue;
    }
    seen[it->first] = true;
    if (p.keypoints2d) {
      gt2d.push_back(*it->second);
      pred2d.push_back(*p.keypoints2d);
    }
    if (p.joints3d_view) {
      gt3d.push_back(*it->second);
      pred3d.push_back(*p.joints3d_view);
    }
  }
  report.matched = seen.size();
  report.missing_predictions = ground_truth.size() - report.matched;

  if (!pred2d.empty()) {
    for (double alpha : options.pck_alphas) report.pck.emplace_back(alpha, pck(pred2d, gt2d, alpha));
  }
  if (!pred3d.empty()) {
    report.mpjpe = mpjpe(pred3d, gt3d, false);
    if (options.root_aligned) report.mpjpe_root_aligned = mpjpe(pred3d, gt3d, true);
  }
  return report;
}

namespace {
json result_json(const PoseEvalResult& r, const std::vector<std::string>& names) {
  json per_joint = json::object();
  for (std::size_t j = 0; j < r.per_joint.size(); ++j) {
    const std::string name = j < names.size() ? names[j] : std::to_string(j);
    per_joint[name] = r.per_joint[j] ? json(*r.per_joint[j]) : json(nullptr);
  }
  return {{"mean", r.mean ? json(*r.mean) : json("no data")},
          {"evaluated", r.evaluated},
          {"samples", r.sample_count},
          {"joints", r.joint_count},
          {"per_joint", std::move(per_joint)}};
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "no data";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}
}  // namespace

json report_to_json(const EvalReport& report) {
  json out = {{"matched", report.matched},
              {"unmatched_predictions", report.unmatched_predictions},
              {"missing_predictions", report.missing_predictions}};
  json pcks = json::array();
  for (const auto& [alpha, r] : report.pck) {
    json item = result_json(r, report.joint_names);
    item["alpha"] = alpha;
    pcks.push_back(std::move(item));
  }
  out["pck"] = std::move(pcks);
  if (report.mpjpe) out["mpjpe"] = result_json(*report.mpjpe, report.joint_names);
  if (report.mpjpe_root_aligned) out["mpjpe_root_aligned"] = result_json(*report.mpjpe_root_aligned, report.joint_names);
  return out;
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "matched samples:        " << report.matched << '\n';
  out << "unmatched predictions:  " << report.unmatched_predictions << '\n';
  out << "missing predictions:    " << report.missing_predictions << '\n';
  out << "metric                  value        evaluated\n";
  char line[128];
  for (const auto& [alpha, r] : report.pck) {
    std::snprintf(line, sizeof line, "PCK@%-19.3f %-12s %zu\n", alpha, fmt(r.mean).c_str(), r.evaluated);
    out << line;
  }
  if (report.mpjpe) {
    std::snprintf(line, sizeof line, "%-23s %-12s %zu\n", "MPJPE", fmt(report.mpjpe->mean).c_str(),
                  report.mpjpe->evaluated);
    out << line;
  }
  if (report.mpjpe_root_aligned) {
    std::snprintf(line, sizeof line, "%-23s %-12s %zu\n", "MPJPE (root-aligned)",
                  fmt(report.mpjpe_root_aligned->mean).c_str(), report.mpjpe_root_aligned->evaluated);
    out << line;
  }
  return out.str();
}

}  // namespace vmocap
