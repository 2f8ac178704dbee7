#include "vmocap/projection.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace vmocap {

namespace {
constexpr double kMinW = 1e-12;
}

std::vector<Vec3> world_to_view(std::span<const Vec3> points, const Mat4& view) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) {
    const Eigen::Vector4d v = view * p.homogeneous();
    out.push_back(v.head<3>() / v.w());
  }
  return out;
}

Keypoint2D view_to_image(const Vec3& p, const Mat4& proj, const CameraIntrinsics& intrinsics) {
  const Eigen::Vector4d clip = proj * p.homogeneous();
  const double w = std::max(std::abs(clip.w()), kMinW);
  const double ndc_x = clip.x() / w;
  const double ndc_y = clip.y() / w;

  Keypoint2D kp;
  kp.x = (ndc_x + 1.0) / 2.0 * (intrinsics.image_width - 1);
  kp.y = (1.0 - ndc_y) / 2.0 * (intrinsics.image_height - 1);
  const bool in_front = p.z() < -intrinsics.near;
  const bool in_bounds = kp.x >= 0.0 && kp.x <= intrinsics.image_width - 1 && kp.y >= 0.0 &&
                         kp.y <= intrinsics.image_height - 1;
  kp.visible = in_front && in_bounds;
  return kp;
}

Vec3 image_to_view(double px, double py, double view_z, const Mat4& proj, const CameraIntrinsics& intrinsics) {
  const double ndc_x = intrinsics.image_width > 1 ? px / (intrinsics.image_width - 1) * 2.0 - 1.0 : 0.0;
  const double ndc_y = intrinsics.image_height > 1 ? 1.0 - py / (intrinsics.image_height - 1) * 2.0 : 0.0;
  // For a perspective matrix, clip.x = P00 * x and w = -z.
  const double w = -view_z;
  return Vec3(ndc_x * w / proj(0, 0), ndc_y * w / proj(1, 1), view_z);
}

ProjectedJoints project_joints(std::span<const Vec3> world_points, const Mat4& view, const Mat4& proj,
                               const CameraIntrinsics& intrinsics) {
  ProjectedJoints out;
  out.joints_view = world_to_view(world_points, view);
  out.keypoints.reserve(out.joints_view.size());
  for (const Vec3& p : out.joints_view) out.keypoints.push_back(view_to_image(p, proj, intrinsics));
  return out;
}

ProjectedJoints project_joints(const WorldPose& world_pose, const Camera& camera) {
  return project_joints(world_pose.positions, view_matrix(camera.extrinsics), projection_matrix(camera.intrinsics),
                        camera.intrinsics);
}

std::vector<Vec3> to_root_relative(std::span<const Vec3> joints_view, std::size_t root) {
  std::vector<Vec3> out(joints_view.begin(), joints_view.end());
  if (root >= out.size()) return out;
  const Vec3 origin = joints_view[root];
  for (Vec3& p : out) p -= origin;
  return out;
}

}  // namespace vmocap
