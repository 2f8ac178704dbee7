#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "vmocap/skeleton.hpp"

namespace vmocap {

using Mat4 = Eigen::Matrix4d;

struct CameraExtrinsics {
  Vec3 eye = Vec3(0, 0, 10);
  Vec3 focal_point = Vec3::Zero();
  Vec3 up = Vec3::UnitY();

  bool operator==(const CameraExtrinsics&) const = default;
};

struct CameraIntrinsics {
  double vertical_fov = 45.0;  // degrees
  int image_width = 640;
  int image_height = 480;
  double near = 0.1;
  double far = 10000.0;

  double aspect() const { return static_cast<double>(image_width) / image_height; }

  bool operator==(const CameraIntrinsics&) const = default;
};

struct Camera {
  std::string id;
  CameraExtrinsics extrinsics;
  CameraIntrinsics intrinsics;

  bool operator==(const Camera&) const = default;
};

void validate(const CameraExtrinsics& e);
void validate(const CameraIntrinsics& i);

// Right-handed look-at: the viewing direction maps to -Z, the eye to the
// origin.
Mat4 view_matrix(const CameraExtrinsics& extrinsics);

// OpenGL-style perspective. After the divide, in-frustum points land in
// [-1, 1] on every axis with the near plane at depth -1.
Mat4 projection_matrix(const CameraIntrinsics& intrinsics);

// Camera k sits at center + (r cos t, height, r sin t), t = 2 pi k / count,
// looking at `center` with +Y up. Ids are "cam00", "cam01", ...
std::vector<Camera> build_ring_rig(const Vec3& center, double radius, double height, int count,
                                   const CameraIntrinsics& intrinsics);

}  // namespace vmocap
