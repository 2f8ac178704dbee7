#include "vmocap/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vmocap/error.hpp"

namespace vmocap {

void draw_disc(Image& image, double cx, double cy, double radius, Rgba color,
               std::vector<std::pair<int, int>>* written) {
  if (!(radius >= 0.0) || !std::isfinite(cx) || !std::isfinite(cy)) return;
  const int x0 = std::max(0, static_cast<int>(std::ceil(cx - radius)));
  const int x1 = std::min(image.width - 1, static_cast<int>(std::floor(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(cy - radius)));
  const int y1 = std::min(image.height - 1, static_cast<int>(std::floor(cy + radius)));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    const double dy = y - cy;
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx;
      if (dx * dx + dy * dy <= r2) {
        image.set(x, y, color);
        if (written) written->emplace_back(x, y);
      }
    }
  }
}

void draw_thick_line(Image& image, double x0, double y0, double x1, double y1, double thickness, Rgba color) {
  if (!(thickness > 0.0)) return;
  const double half = thickness / 2.0;
  const int bx0 = std::max(0, static_cast<int>(std::ceil(std::min(x0, x1) - half)));
  const int bx1 = std::min(image.width - 1, static_cast<int>(std::floor(std::max(x0, x1) + half)));
  const int by0 = std::max(0, static_cast<int>(std::ceil(std::min(y0, y1) - half)));
  const int by1 = std::min(image.height - 1, static_cast<int>(std::floor(std::max(y0, y1) + half)));
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  const double h2 = half * half;
  for (int y = by0; y <= by1; ++y) {
    for (int x = bx0; x <= bx1; ++x) {
      double t = len2 > 0.0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double ex = x0 + t * dx - x;
      const double ey = y0 + t * dy - y;
      if (ex * ex + ey * ey <= h2) image.set(x, y, color);
    }
  }
}

Image render_projected(const Skeleton& skeleton, const ProjectedJoints& projected, const CameraIntrinsics& intrinsics,
                       const RenderStyle& style, RenderTrace* trace) {
  if (intrinsics.image_width < 1 || intrinsics.image_height < 1) {
    throw ValidationError("cannot render into a zero-size image");
  }
  if (projected.keypoints.size() != skeleton.size() || projected.joints_view.size() != skeleton.size()) {
    throw ValidationError("projected joint count does not match the skeleton");
  }
  Image image(intrinsics.image_width, intrinsics.image_height);
  const auto& kp = projected.keypoints;
  const auto& view = projected.joints_view;

  std::vector<std::size_t> bones;
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    const auto& parent = skeleton.joints[j].parent;
    if (parent && kp[j].visible && kp[*parent].visible) bones.push_back(j);
  }
  auto bone_depth = [&](std::size_t j) { return view[j].z() + view[*skeleton.joints[j].parent].z(); };
  std::stable_sort(bones.begin(), bones.end(), [&](std::size_t a, std::size_t b) { return bone_depth(a) < bone_depth(b); });
  for (std::size_t j : bones) {
    const auto& a = kp[*skeleton.joints[j].parent];
    draw_thick_line(image, a.x, a.y, kp[j].x, kp[j].y, style.bone_thickness, style.bone_color);
  }

  std::vector<std::size_t> joints;
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    if (kp[j].visible) joints.push_back(j);
  }
  std::stable_sort(joints.begin(), joints.end(), [&](std::size_t a, std::size_t b) { return view[a].z() < view[b].z(); });
  if (trace) trace->joint_pixels.assign(skeleton.size(), {});
  for (std::size_t j : joints) {
    draw_disc(image, kp[j].x, kp[j].y, style.joint_radius, style.joint_color,
              trace ? &trace->joint_pixels[j] : nullptr);
  }
  return image;
}

Image render_skeleton(const Skeleton& skeleton, const WorldPose& world_pose, const Camera& camera,
                      const RenderStyle& style, RenderTrace* trace) {
  if (camera.intrinsics.image_width < 1 || camera.intrinsics.image_height < 1) {
    throw ValidationError("cannot render into a zero-size image");
  }
  return render_projected(skeleton, project_joints(world_pose, camera), camera.intrinsics, style, trace);
}

Image scale_nearest(const Image& image, int width, int height) {
  if (image.width == width && image.height == height) return image;
  if (image.empty()) throw ValidationError("cannot scale an empty image");
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>((static_cast<long long>(y) * 2 + 1) * image.height / (2LL * height));
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>((static_cast<long long>(x) * 2 + 1) * image.width / (2LL * width));
      out.set(x, y, image.at(sx, sy));
    }
  }
  return out;
}

Image composite(const Image& foreground, const Image& background) {
  const Image bg = scale_nearest(background, foreground.width, foreground.height);
  Image out(foreground.width, foreground.height);
  const auto& f = foreground.pixels;
  const auto& b = bg.pixels;
  auto& o = out.pixels;
  for (std::size_t i = 0; i < f.size(); i += 4) {
    const unsigned a = f[i + 3];
    for (std::size_t c = 0; c < 3; ++c) {
      o[i + c] = static_cast<std::uint8_t>((a * f[i + c] + (255u - a) * b[i + c] + 127u) / 255u);
    }
    o[i + 3] = 255;
  }
  return out;
}

Image to_grayscale(const Image& image) {
  Image out = image;
  auto& p = out.pixels;
  for (std::size_t i = 0; i < p.size(); i += 4) {
    const unsigned luma = (299u * p[i] + 587u * p[i + 1] + 114u * p[i + 2] + 500u) / 1000u;
    p[i] = p[i + 1] = p[i + 2] = static_cast<std::uint8_t>(luma);
  }
  return out;
}

}  // namespace vmocap
