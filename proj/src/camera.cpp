#include "vmocap/camera.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vmocap/error.hpp"

namespace vmocap {

namespace {
constexpr double kParallelTolerance = 1e-6;  // radians
}

void validate(const CameraExtrinsics& e) {
  if (!e.eye.allFinite() || !e.focal_point.allFinite() || !e.up.allFinite()) {
    throw ValidationError("camera extrinsics contain non-finite values");
  }
  const Vec3 forward = e.focal_point - e.eye;
  if (forward.norm() == 0.0) throw ValidationError("camera eye coincides with its focal point");
  if (e.up.norm() == 0.0) throw ValidationError("camera up vector is zero");
  const double angle = std::acos(std::clamp(forward.normalized().dot(e.up.normalized()), -1.0, 1.0));
  if (angle < kParallelTolerance || angle > std::numbers::pi - kParallelTolerance) {
    throw ValidationError("camera up vector is parallel to the viewing direction");
  }
}

void validate(const CameraIntrinsics& i) {
  if (!(i.vertical_fov > 0.0 && i.vertical_fov < 180.0)) {
    throw ValidationError("vertical_fov must lie in (0, 180) degrees");
  }
  if (i.image_width < 1 || i.image_height < 1) throw ValidationError("image size must be at least 1x1");
  if (!(i.near > 0.0 && i.near < i.far && std::isfinite(i.far))) {
    throw ValidationError("clip planes must satisfy 0 < near < far");
  }
}

Mat4 view_matrix(const CameraExtrinsics& extrinsics) {
  validate(extrinsics);
  const Vec3 f = (extrinsics.focal_point - extrinsics.eye).normalized();
  const Vec3 s = f.cross(extrinsics.up).normalized();
  const Vec3 u = s.cross(f);

  Mat4 m = Mat4::Identity();
  m.block<1, 3>(0, 0) = s.transpose();
  m.block<1, 3>(1, 0) = u.transpose();
  m.block<1, 3>(2, 0) = -f.transpose();
  m(0, 3) = -s.dot(extrinsics.eye);
  m(1, 3) = -u.dot(extrinsics.eye);
  m(2, 3) = f.dot(extrinsics.eye);
  return m;
}

Mat4 projection_matrix(const CameraIntrinsics& intrinsics) {
  validate(intrinsics);
  const double t = std::tan(intrinsics.vertical_fov * std::numbers::pi / 360.0);
  const double n = intrinsics.near;
  const double f = intrinsics.far;

  Mat4 m = Mat4::Zero();
  m(0, 0) = 1.0 / (intrinsics.aspect() * t);
  m(1, 1) = 1.0 / t;
  m(2, 2) = -(f + n) / (f - n);
  m(2, 3) = -2.0 * f * n / (f - n);
  m(3, 2) = -1.0;
  return m;
}

std::vector<Camera> build_ring_rig(const Vec3& center, double radius, double height, int count,
                                   const CameraIntrinsics& intrinsics) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("rig radius must be positive");
  if (count < 1) throw ValidationError("rig needs at least one camera");
  validate(intrinsics);

  std::vector<Camera> rig;
  rig.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / count;
    char id[16];
    std::snprintf(id, sizeof id, "cam%02d", k);
    Camera cam;
    cam.id = id;
    cam.extrinsics.eye = center + Vec3(radius * std::cos(theta), height, radius * std::sin(theta));
    cam.extrinsics.focal_point = center;
    cam.extrinsics.up = Vec3::UnitY();
    cam.intrinsics = intrinsics;
    validate(cam.extrinsics);
    rig.push_back(std::move(cam));
  }
  return rig;
}

}  // namespace vmocap
