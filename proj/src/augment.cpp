#include "vmocap/augment.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vmocap/error.hpp"

namespace vmocap {

namespace {

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw ValidationError(std::string("augmentation range '") + name + "' must be finite with lo <= hi");
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d == 0.0) {
    h = 0.0;
  } else if (mx == r) {
    h = 60.0 * std::fmod((g - b) / d, 6.0);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / d + 2.0);
  } else {
    h = 60.0 * ((r - g) / d + 4.0);
  }
  if (h < 0.0) h += 360.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r1 = 0, g1 = 0, b1 = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r1 = c; g1 = x; break;
    case 1: r1 = x; g1 = c; break;
    case 2: g1 = c; b1 = x; break;
    case 3: g1 = x; b1 = c; break;
    case 4: r1 = x; b1 = c; break;
    default: r1 = c; b1 = x; break;
  }
  const double m = v - c;
  r = r1 + m;
  g = g1 + m;
  b = b1 + m;
}

}  // namespace

AugmentationSpec AugmentationSpec::identity() {
  AugmentationSpec s;
  s.rotation_deg = {0.0, 0.0};
  s.scale = {1.0, 1.0};
  s.flip_probability = 0.0;
  s.noise_sigma = {0.0, 0.0};
  s.brightness = {0.0, 0.0};
  s.contrast = {1.0, 1.0};
  s.hue_shift_deg = {0.0, 0.0};
  s.saturation = {1.0, 1.0};
  return s;
}

void validate(const AugmentationSpec& spec, std::size_t joint_count) {
  check_range(spec.rotation_deg, "rotation_deg");
  check_range(spec.scale, "scale");
  check_range(spec.noise_sigma, "gaussian_noise_sigma");
  check_range(spec.brightness, "brightness_delta");
  check_range(spec.contrast, "contrast_factor");
  check_range(spec.hue_shift_deg, "hue_shift_deg");
  check_range(spec.saturation, "saturation_factor");
  if (!(spec.scale.lo > 0.0)) throw ValidationError("augmentation scale must be positive");
  if (spec.noise_sigma.lo < 0.0) throw ValidationError("noise sigma must be nonnegative");
  if (spec.contrast.lo < 0.0 || spec.saturation.lo < 0.0) {
    throw ValidationError("contrast and saturation factors must be nonnegative");
  }
  if (!(spec.flip_probability >= 0.0 && spec.flip_probability <= 1.0)) {
    throw ValidationError("flip_probability must lie in [0, 1]");
  }
  std::vector<bool> used(joint_count, false);
  for (const auto& [a, b] : spec.flip_pairs) {
    if (a >= joint_count || b >= joint_count) {
      throw ValidationError("flip pair (" + std::to_string(a) + ", " + std::to_string(b) + ") is out of range");
    }
    if (a == b || used[a] || used[b]) {
      throw ValidationError("flip pairs must be disjoint; joint index reused in (" + std::to_string(a) + ", " +
                            std::to_string(b) + ")");
    }
    used[a] = used[b] = true;
  }
}

AppliedAugmentation sample_params(const AugmentationSpec& spec, std::uint64_t seed, const SampleKey& key) {
  CounterRng rng(seed, key, RngStream::Augmentation);
  // Fixed draw order; every field consumes exactly one draw.
  AppliedAugmentation p;
  p.rotation_deg = rng.uniform(spec.rotation_deg.lo, spec.rotation_deg.hi);
  p.scale = rng.uniform(spec.scale.lo, spec.scale.hi);
  p.flip = rng.bernoulli(spec.flip_probability);
  p.noise_sigma = rng.uniform(spec.noise_sigma.lo, spec.noise_sigma.hi);
  p.brightness = rng.uniform(spec.brightness.lo, spec.brightness.hi);
  p.contrast = rng.uniform(spec.contrast.lo, spec.contrast.hi);
  p.hue_shift_deg = rng.uniform(spec.hue_shift_deg.lo, spec.hue_shift_deg.hi);
  p.saturation = rng.uniform(spec.saturation.lo, spec.saturation.hi);
  return p;
}

Affine2D Affine2D::inverse() const {
  Affine2D inv;
  inv.linear = linear.inverse();
  inv.offset = -(inv.linear * offset);
  return inv;
}

Affine2D geometric_transform(const AppliedAugmentation& params, int width, int height) {
  const Eigen::Vector2d center((width - 1) / 2.0, (height - 1) / 2.0);
  const double theta = params.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d rot;
  rot << c, s, -s, c;

  Affine2D a;
  a.linear = rot * params.scale;
  a.offset = center - a.linear * center;
  if (params.flip) {
    a.linear.row(0) = -a.linear.row(0);
    a.offset.x() = (width - 1) - a.offset.x();
  }
  return a;
}

std::vector<Keypoint2D> transform_keypoints(const std::vector<Keypoint2D>& keypoints,
                                            const AppliedAugmentation& params, int width, int height,
                                            const std::vector<FlipPair>& flip_pairs) {
  const Affine2D a = geometric_transform(params, width, height);
  std::vector<Keypoint2D> out;
  out.reserve(keypoints.size());
  for (const auto& kp : keypoints) {
    const Eigen::Vector2d q = a(Eigen::Vector2d(kp.x, kp.y));
    const bool in_bounds = q.x() >= 0.0 && q.x() <= width - 1 && q.y() >= 0.0 && q.y() <= height - 1;
    out.push_back({q.x(), q.y(), kp.visible && in_bounds});
  }
  if (params.flip) {
    for (const auto& [l, r] : flip_pairs) {
      if (l < out.size() && r < out.size()) std::swap(out[l], out[r]);
    }
  }
  return out;
}

AugmentedSample apply_geometric(const Image& image, const std::vector<Keypoint2D>& keypoints,
                                const AppliedAugmentation& params, const std::vector<FlipPair>& flip_pairs) {
  AugmentedSample out;
  out.keypoints = transform_keypoints(keypoints, params, image.width, image.height, flip_pairs);

  const Affine2D inv = geometric_transform(params, image.width, image.height).inverse();
  out.image = Image(image.width, image.height, {0, 0, 0, 255});
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Eigen::Vector2d p = inv(Eigen::Vector2d(x, y));
      const double fx = std::floor(p.x() + 0.5);
      const double fy = std::floor(p.y() + 0.5);
      if (fx < 0.0 || fy < 0.0 || fx > image.width - 1 || fy > image.height - 1) continue;
      out.image.set(x, y, image.at(static_cast<int>(fx), static_cast<int>(fy)));
    }
  }
  return out;
}

Image apply_photometric(const Image& image, const AppliedAugmentation& params, CounterRng& rng) {
  Image out = image;
  const bool jitter = params.hue_shift_deg != 0.0 || params.saturation != 1.0;
  const bool noise = params.noise_sigma > 0.0;
  auto& px = out.pixels;
  for (std::size_t i = 0; i < px.size(); i += 4) {
    double rgb[3];
    for (int c = 0; c < 3; ++c) {
      rgb[c] = std::clamp(params.contrast * (px[i + c] - 128.0) + 128.0 + params.brightness, 0.0, 255.0);
    }
    if (jitter) {
      double h, s, v;
      rgb_to_hsv(rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0, h, s, v);
      h = std::fmod(h + params.hue_shift_deg, 360.0);
      if (h < 0.0) h += 360.0;
      s = std::clamp(s * params.saturation, 0.0, 1.0);
      hsv_to_rgb(h, s, v, rgb[0], rgb[1], rgb[2]);
      for (double& c : rgb) c *= 255.0;
    }
    if (noise) {
      for (double& c : rgb) c += params.noise_sigma * rng.normal();
    }
    for (int c = 0; c < 3; ++c) px[i + c] = to_byte(rgb[c]);
  }
  return out;
}

}  // namespace vmocap
