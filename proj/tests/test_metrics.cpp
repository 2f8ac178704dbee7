#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <random>

#include "vmocap/demo.hpp"
#include "vmocap/metrics.hpp"

using namespace vmocap;

namespace {

// A handful of real records from the demo clip, un-augmented.
std::vector<SampleRecord> demo_records(std::size_t frames = 3, int cameras = 4) {
  GenerateOptions o;
  o.rig.count = cameras;
  o.rig.intrinsics.image_width = 160;
  o.rig.intrinsics.image_height = 120;
  const NamedClip clip{"walk", "demo", demo::walk_clip(frames)};
  const ClipRig rig = plan_rig(clip.clip, o.rig);
  std::vector<SampleRecord> out;
  for (std::size_t f = 0; f < frames; ++f)
    for (int c = 0; c < cameras; ++c) out.push_back(make_sample(clip, rig, f, c, o, nullptr).record);
  return out;
}

std::vector<Points2D> preds2d(const std::vector<SampleRecord>& gt) {
  std::vector<Points2D> out;
  for (const auto& r : gt) {
    Points2D p;
    for (const auto& k : r.keypoints2d) p.emplace_back(k.x, k.y);
    out.push_back(p);
  }
  return out;
}

std::vector<Points3D> preds3d(const std::vector<SampleRecord>& gt) {
  std::vector<Points3D> out;
  for (const auto& r : gt) out.push_back(r.absolute_joints_view());
  return out;
}

double bbox_diagonal(const SampleRecord& r) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& k : r.keypoints2d) {
    if (!k.visible) continue;
    x0 = std::min(x0, k.x);
    y0 = std::min(y0, k.y);
    x1 = std::max(x1, k.x);
    y1 = std::max(y1, k.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

}  // namespace

TEST(Pck, PerfectPredictionsScoreOne) {
  const auto gt = demo_records();
  const auto p = preds2d(gt);
  for (double alpha : {0.001, 0.05, 0.2, 1.0}) {
    const PoseEvalResult r = pck(p, gt, alpha);
    ASSERT_TRUE(r.has_data());
    EXPECT_EQ(*r.mean, 1.0);
  }
}

TEST(Pck, JustOutsideThresholdScoresZero) {
  const auto gt = demo_records(1, 2);
  const double alpha = 0.1;
  auto p = preds2d(gt);
  for (std::size_t s = 0; s < gt.size(); ++s) {
    const double off = alpha * bbox_diagonal(gt[s]) * (1.0 + 1e-9) + 1e-9;
    for (auto& q : p[s]) q.x() += off;
  }
  EXPECT_EQ(*pck(p, gt, alpha).mean, 0.0);
}

TEST(Pck, HalfRightHalfFar) {
  SampleRecord r;
  for (int j = 0; j < 4; ++j) r.keypoints2d.push_back({10.0 * j, 5.0 * j, true});
  r.joints3d_view.assign(4, Vec3::Zero());
  const std::vector<SampleRecord> gt{r};
  std::vector<Points2D> p(1);
  for (int j = 0; j < 4; ++j) p[0].emplace_back(10.0 * j + (j % 2 ? 1000.0 : 0.0), 5.0 * j);
  const PoseEvalResult res = pck(p, gt, 0.1);
  EXPECT_EQ(*res.mean, 0.5);
  EXPECT_EQ(*res.per_joint[0], 1.0);
  EXPECT_EQ(*res.per_joint[1], 0.0);
}

TEST(Pck, NoVisibleJointsMeansNoData) {
  SampleRecord r;
  r.keypoints2d.assign(3, {1.0, 1.0, false});
  r.joints3d_view.assign(3, Vec3::Zero());
  const std::vector<SampleRecord> gt{r};
  const std::vector<Points2D> p{Points2D(3, Eigen::Vector2d(1, 1))};
  const PoseEvalResult res = pck(p, gt, 0.1);
  EXPECT_FALSE(res.has_data());
  EXPECT_EQ(res.evaluated, 0u);
}

TEST(Pck, MonotoneInAlpha) {
  const auto gt = demo_records();
  auto p = preds2d(gt);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0.0, 4.0);
  for (auto& s : p)
    for (auto& q : s) q += Eigen::Vector2d(noise(gen), noise(gen));
  double prev = -1.0;
  for (double alpha = 0.005; alpha <= 0.5; alpha += 0.005) {
    const double v = *pck(p, gt, alpha).mean;
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, 0.9);
}

TEST(Mpjpe, ZeroFiveAndRootAligned) {
  const auto gt = demo_records();
  auto p = preds3d(gt);
  EXPECT_EQ(*mpjpe(p, gt).mean, 0.0);
  for (auto& s : p)
    for (auto& q : s) q += Vec3(3, 4, 0);
  EXPECT_NEAR(*mpjpe(p, gt).mean, 5.0, 1e-12);
  EXPECT_NEAR(*mpjpe(p, gt, true).mean, 0.0, 1e-12);
}

TEST(Mpjpe, InvariantUnderGlobalRotation) {
  auto gt = demo_records();
  auto p = preds3d(gt);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (auto& s : p)
    for (auto& q : s) q += Vec3(noise(gen), noise(gen), noise(gen));
  const double before = *mpjpe(p, gt).mean;
  const Mat3 r = (Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized())).toRotationMatrix();
  for (auto& s : p)
    for (auto& q : s) q = r * q;
  for (auto& rec : gt) {
    for (auto& q : rec.joints3d_view) q = r * q;
    if (rec.root_view) rec.root_view = r * *rec.root_view;
  }
  EXPECT_NEAR(*mpjpe(p, gt).mean, before, 1e-9);
}

TEST(Metrics, PermutationInvariantOverSamples) {
  auto gt = demo_records();
  auto p2 = preds2d(gt);
  auto p3 = preds3d(gt);
  std::mt19937_64 gen(6);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (auto& s : p2)
    for (auto& q : s) q += Eigen::Vector2d(noise(gen), noise(gen));
  for (auto& s : p3)
    for (auto& q : s) q += Vec3(noise(gen), noise(gen), noise(gen));
  const double pck_a = *pck(p2, gt, 0.05).mean;
  const double mp_a = *mpjpe(p3, gt).mean;
  std::vector<std::size_t> order(gt.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<SampleRecord> g2;
  std::vector<Points2D> q2;
  std::vector<Points3D> q3;
  for (auto i : order) {
    g2.push_back(gt[i]);
    q2.push_back(p2[i]);
    q3.push_back(p3[i]);
  }
  EXPECT_EQ(*pck(q2, g2, 0.05).mean, pck_a);
  EXPECT_EQ(*mpjpe(q3, g2).mean, mp_a);
}

TEST(Reprojection, FreshPerturbedAndEmpty) {
  auto rec = demo_records(1, 1).front();
  const ReprojectionError fresh = reprojection_error(rec);
  ASSERT_TRUE(fresh.max);
  EXPECT_LE(*fresh.max, 1e-3);

  std::size_t j = 0;
  while (!rec.keypoints2d[j].visible) ++j;
  rec.keypoints2d[j].x += 2.0;
  const ReprojectionError bad = reprojection_error(rec);
  EXPECT_NEAR(*bad.max, 2.0, 1e-3);
  EXPECT_EQ(bad.worst_joint, j);

  for (auto& k : rec.keypoints2d) k.visible = false;
  EXPECT_FALSE(reprojection_error(rec).max.has_value());
}

TEST(Evaluate, GroundTruthAsPredictions) {
  const auto gt = demo_records();
  const auto preds = predictions_from_json(predictions_to_json(predictions_from_records(gt)));
  const EvalReport r = evaluate(gt, preds, {}, demo::quadruped_rig().joint_names());
  EXPECT_EQ(r.matched, gt.size());
  EXPECT_EQ(r.missing_predictions, 0u);
  for (const auto& [alpha, res] : r.pck) EXPECT_EQ(*res.mean, 1.0);
  ASSERT_TRUE(r.mpjpe);
  EXPECT_EQ(*r.mpjpe->mean, 0.0);
  const nlohmann::json j = report_to_json(r);
  EXPECT_EQ(j["pck"][0]["mean"], 1.0);
  EXPECT_NE(report_table(r).find("MPJPE"), std::string::npos);
}

TEST(Evaluate, UnmatchedAndMissingAreCounted) {
  const auto gt = demo_records(1, 2);
  auto preds = predictions_from_records(gt);
  preds.pop_back();
  preds.push_back({{"other", 0, "cam00"}, std::nullopt, std::nullopt});
  const EvalReport r = evaluate(gt, preds, {}, {});
  EXPECT_EQ(r.matched, 1u);
  EXPECT_EQ(r.missing_predictions, 1u);
  EXPECT_EQ(r.unmatched_predictions, 1u);
}
