#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "vmocap/image.hpp"
#include "vmocap/projection.hpp"
#include "vmocap/rng.hpp"

namespace vmocap {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

using FlipPair = std::pair<std::size_t, std::size_t>;

struct AugmentationSpec {
  Range rotation_deg{-30.0, 30.0};
  Range scale{0.75, 1.25};
  double flip_probability = 0.5;
  Range noise_sigma{0.0, 8.0};
  Range brightness{-32.0, 32.0};
  Range contrast{0.8, 1.2};
  Range hue_shift_deg{-18.0, 18.0};
  Range saturation{0.7, 1.3};
  bool grayscale = false;
  std::vector<FlipPair> flip_pairs;

  // Every range collapsed onto its neutral value, flips disabled.
  static AugmentationSpec identity();
};

// `joint_count` bounds the flip pair indices.
void validate(const AugmentationSpec& spec, std::size_t joint_count);

struct AppliedAugmentation {
  double rotation_deg = 0.0;
  double scale = 1.0;
  bool flip = false;
  double noise_sigma = 0.0;
  double brightness = 0.0;
  double contrast = 1.0;
  double hue_shift_deg = 0.0;
  double saturation = 1.0;

  bool operator==(const AppliedAugmentation&) const = default;
};

AppliedAugmentation sample_params(const AugmentationSpec& spec, std::uint64_t seed, const SampleKey& key);

// Row-major 2x3 affine map on pixel coordinates.
struct Affine2D {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();

  Eigen::Vector2d operator()(const Eigen::Vector2d& p) const { return linear * p + offset; }
  Affine2D inverse() const;
};

// Scale, then rotate (positive = counter-clockwise on screen), both about the
// image center, then an optional horizontal flip x -> width-1-x.
Affine2D geometric_transform(const AppliedAugmentation& params, int width, int height);

std::vector<Keypoint2D> transform_keypoints(const std::vector<Keypoint2D>& keypoints,
                                            const AppliedAugmentation& params, int width, int height,
                                            const std::vector<FlipPair>& flip_pairs);

struct AugmentedSample {
  Image image;
  std::vector<Keypoint2D> keypoints;
};

// One affine applied to both the image (inverse-mapped, nearest neighbour,
// opaque black outside the source) and the keypoints. Keypoints that leave
// the frame become invisible; a flip also swaps each left/right pair.
AugmentedSample apply_geometric(const Image& image, const std::vector<Keypoint2D>& keypoints,
                                const AppliedAugmentation& params, const std::vector<FlipPair>& flip_pairs);

// Contrast and brightness, HSV jitter, then additive Gaussian noise drawn
// from `rng`. Alpha and dimensions are preserved.
Image apply_photometric(const Image& image, const AppliedAugmentation& params, CounterRng& rng);

}  // namespace vmocap
