#pragma once

#include <span>
#include <vector>

#include "vmocap/camera.hpp"
#include "vmocap/skeleton.hpp"

namespace vmocap {

// Pixel coordinates use the pixel-center convention: NDC -1 and +1 land on
// the centers of pixels 0 and width-1, y grows downward.
struct Keypoint2D {
  double x = 0.0;
  double y = 0.0;
  bool visible = false;

  bool operator==(const Keypoint2D&) const = default;
};

std::vector<Vec3> world_to_view(std::span<const Vec3> points, const Mat4& view);

// Points on or behind the near plane are flagged invisible; their x,y come
// from dividing by |w| so they stay finite and on the mirrored side.
Keypoint2D view_to_image(const Vec3& p, const Mat4& proj, const CameraIntrinsics& intrinsics);

// Inverse of view_to_image for a point at the given view-space depth
// (negative z in front of the camera).
Vec3 image_to_view(double px, double py, double view_z, const Mat4& proj, const CameraIntrinsics& intrinsics);

struct ProjectedJoints {
  std::vector<Keypoint2D> keypoints;
  std::vector<Vec3> joints_view;
};

ProjectedJoints project_joints(const WorldPose& world_pose, const Camera& camera);
ProjectedJoints project_joints(std::span<const Vec3> world_points, const Mat4& view, const Mat4& proj,
                               const CameraIntrinsics& intrinsics);

// Subtracts joint `root` from every joint.
std::vector<Vec3> to_root_relative(std::span<const Vec3> joints_view, std::size_t root = 0);

}  // namespace vmocap
