#pragma once

#include <utility>
#include <vector>

#include "vmocap/camera.hpp"
#include "vmocap/image.hpp"
#include "vmocap/projection.hpp"
#include "vmocap/skeleton.hpp"

namespace vmocap {

struct RenderStyle {
  double bone_thickness = 3.0;  // px
  double joint_radius = 3.0;    // px
  Rgba bone_color{220, 220, 220, 255};
  Rgba joint_color{255, 80, 40, 255};
};

// Pixels written by each joint's disc, in joint order. Empty for joints that
// were not drawn.
struct RenderTrace {
  std::vector<std::vector<std::pair<int, int>>> joint_pixels;
};

// Stick-figure render over a transparent background. Bones whose endpoints
// are both visible become thick segments, visible joints become discs; each
// set is painted back to front by view-space depth, bones first.
Image render_skeleton(const Skeleton& skeleton, const WorldPose& world_pose, const Camera& camera,
                      const RenderStyle& style, RenderTrace* trace = nullptr);
Image render_projected(const Skeleton& skeleton, const ProjectedJoints& projected, const CameraIntrinsics& intrinsics,
                       const RenderStyle& style, RenderTrace* trace = nullptr);

// Fills every pixel whose center lies within `radius` of (cx, cy).
void draw_disc(Image& image, double cx, double cy, double radius, Rgba color,
               std::vector<std::pair<int, int>>* written = nullptr);

// Fills every pixel whose center lies within thickness/2 of the segment.
void draw_thick_line(Image& image, double x0, double y0, double x1, double y1, double thickness, Rgba color);

Image scale_nearest(const Image& image, int width, int height);

// Source-over blend onto `background` scaled to the foreground size. The
// result is fully opaque.
Image composite(const Image& foreground, const Image& background);

// BT.601 luma in all three channels, alpha untouched.
Image to_grayscale(const Image& image);

}  // namespace vmocap
