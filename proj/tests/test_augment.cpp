#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "vmocap/augment.hpp"
#include "vmocap/demo.hpp"
#include "vmocap/error.hpp"
#include "vmocap/render.hpp"

using namespace vmocap;

namespace {

const Rgba kMarker{0, 255, 0, 255};

AppliedAugmentation flip_only() {
  AppliedAugmentation a;
  a.flip = true;
  return a;
}

std::vector<Keypoint2D> random_keypoints(std::mt19937_64& gen, std::size_t n, int w, int h) {
  std::uniform_real_distribution<double> x(0.0, w - 1.0), y(0.0, h - 1.0);
  std::vector<Keypoint2D> k;
  for (std::size_t i = 0; i < n; ++i) k.push_back({x(gen), y(gen), true});
  return k;
}

}  // namespace

TEST(SampleParams, DegenerateRangesGiveEndpoints) {
  AugmentationSpec s;
  s.rotation_deg = {12.5, 12.5};
  s.scale = {0.9, 0.9};
  s.flip_probability = 0.0;
  s.noise_sigma = {3.0, 3.0};
  s.brightness = {-7.0, -7.0};
  s.contrast = {1.1, 1.1};
  s.hue_shift_deg = {4.0, 4.0};
  s.saturation = {0.8, 0.8};
  const AppliedAugmentation a = sample_params(s, 42, {"clip", 3, "cam01"});
  EXPECT_EQ(a.rotation_deg, 12.5);
  EXPECT_EQ(a.scale, 0.9);
  EXPECT_FALSE(a.flip);
  EXPECT_EQ(a.noise_sigma, 3.0);
  EXPECT_EQ(a.brightness, -7.0);
  EXPECT_EQ(a.contrast, 1.1);
  EXPECT_EQ(a.hue_shift_deg, 4.0);
  EXPECT_EQ(a.saturation, 0.8);
  s.flip_probability = 1.0;
  EXPECT_TRUE(sample_params(s, 42, {"clip", 3, "cam01"}).flip);
}

TEST(SampleParams, DeterministicPerKeyAndInsideRanges) {
  const AugmentationSpec s;
  const SampleKey key{"walk", 17, "cam05"};
  EXPECT_EQ(sample_params(s, 7, key), sample_params(s, 7, key));
  EXPECT_NE(sample_params(s, 7, key), sample_params(s, 8, key));
  EXPECT_NE(sample_params(s, 7, key), sample_params(s, 7, {"walk", 18, "cam05"}));
  int flips = 0;
  for (std::uint64_t f = 0; f < 400; ++f) {
    const AppliedAugmentation a = sample_params(s, 7, {"walk", f, "cam00"});
    EXPECT_GE(a.rotation_deg, s.rotation_deg.lo);
    EXPECT_LE(a.rotation_deg, s.rotation_deg.hi);
    EXPECT_GE(a.scale, s.scale.lo);
    EXPECT_LE(a.scale, s.scale.hi);
    EXPECT_GE(a.noise_sigma, s.noise_sigma.lo);
    EXPECT_LE(a.noise_sigma, s.noise_sigma.hi);
    EXPECT_GE(a.saturation, s.saturation.lo);
    EXPECT_LE(a.saturation, s.saturation.hi);
    flips += a.flip;
  }
  EXPECT_GT(flips, 140);
  EXPECT_LT(flips, 260);
}

TEST(ValidateSpec, RejectsBadRangesAndPairs) {
  AugmentationSpec s;
  EXPECT_NO_THROW(validate(s, 37));
  s.rotation_deg = {5, -5};
  EXPECT_THROW(validate(s, 37), ValidationError);
  s = {};
  s.scale = {0.0, 1.0};
  EXPECT_THROW(validate(s, 37), ValidationError);
  s = {};
  s.flip_probability = 1.5;
  EXPECT_THROW(validate(s, 37), ValidationError);
  s = {};
  s.flip_pairs = {{1, 40}};
  EXPECT_THROW(validate(s, 37), ValidationError);
  s.flip_pairs = {{1, 2}, {2, 3}};
  EXPECT_THROW(validate(s, 37), ValidationError);
  s.flip_pairs = {{4, 4}};
  EXPECT_THROW(validate(s, 37), ValidationError);
}

TEST(Geometric, IdentityLeavesEverythingUnchanged) {
  std::mt19937_64 gen(1);
  Image im(64, 48, {5, 6, 7, 255});
  draw_disc(im, 20, 20, 5, kMarker);
  const auto kps = random_keypoints(gen, 10, 64, 48);
  const AugmentedSample out = apply_geometric(im, kps, AppliedAugmentation{}, {{0, 1}});
  EXPECT_EQ(out.image, im);
  EXPECT_EQ(out.keypoints, kps);
}

TEST(Geometric, FlipMirrorsAndSwapsPairs) {
  std::vector<Keypoint2D> k{{10.0, 100.0, true}, {300.0, 50.0, true}, {5.0, 5.0, false}};
  const auto out = transform_keypoints(k, flip_only(), 640, 480, {{0, 1}});
  EXPECT_EQ(out[1].x, 629.0);
  EXPECT_EQ(out[1].y, 100.0);
  EXPECT_EQ(out[0].x, 339.0);
  EXPECT_EQ(out[2].x, 634.0);
  EXPECT_FALSE(out[2].visible);
}

TEST(Geometric, FlipIsAnInvolution) {
  std::mt19937_64 gen(2);
  const Skeleton rig = demo::quadruped_rig();
  const auto pairs = mirror_pairs_by_name(rig);
  ASSERT_FALSE(pairs.empty());
  for (int t = 0; t < 50; ++t) {
    const auto kps = random_keypoints(gen, rig.size(), 640, 480);
    auto labelled = kps;
    for (std::size_t j = 0; j < labelled.size(); ++j) labelled[j].y = static_cast<double>(j);
    const auto once = transform_keypoints(labelled, flip_only(), 640, 480, pairs);
    for (const auto& [l, r] : pairs) {
      EXPECT_EQ(once[l].y, static_cast<double>(r));
      EXPECT_EQ(once[r].y, static_cast<double>(l));
    }
    const auto twice = transform_keypoints(once, flip_only(), 640, 480, pairs);
    for (std::size_t j = 0; j < kps.size(); ++j) {
      EXPECT_NEAR(twice[j].x, labelled[j].x, 1e-9);
      EXPECT_EQ(twice[j].y, labelled[j].y);
      EXPECT_EQ(twice[j].visible, labelled[j].visible);
    }
  }
  Image im(31, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 31; ++x) im.set(x, y, {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 0, 255});
  const Image once = apply_geometric(im, {}, flip_only(), {}).image;
  EXPECT_EQ(once.at(0, 3), im.at(30, 3));
  EXPECT_EQ(apply_geometric(once, {}, flip_only(), {}).image, im);
}

TEST(Geometric, RotationThereAndBackIsExact) {
  std::mt19937_64 gen(3);
  const auto kps = random_keypoints(gen, 50, 640, 480);
  AppliedAugmentation a;
  a.rotation_deg = 90.0;
  AppliedAugmentation b;
  b.rotation_deg = -90.0;
  const auto back = transform_keypoints(transform_keypoints(kps, a, 640, 480, {}), b, 640, 480, {});
  for (std::size_t i = 0; i < kps.size(); ++i) {
    EXPECT_NEAR(back[i].x, kps[i].x, 1e-9);
    EXPECT_NEAR(back[i].y, kps[i].y, 1e-9);
  }
}

TEST(Geometric, PositiveRotationIsCounterClockwiseOnScreen) {
  AppliedAugmentation a;
  a.rotation_deg = 90.0;
  // A point right of center moves above it (smaller y).
  const auto out = transform_keypoints({{419.5, 239.5, true}}, a, 640, 480, {});
  EXPECT_NEAR(out[0].x, 319.5, 1e-9);
  EXPECT_NEAR(out[0].y, 139.5, 1e-9);
}

TEST(Geometric, MarkerCentroidTracksKeypoint) {
  const AugmentationSpec spec;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> x(200.0, 440.0), y(150.0, 330.0);
  int checked = 0;
  for (std::uint64_t draw = 0; draw < 100; ++draw) {
    const AppliedAugmentation params = sample_params(spec, 99, {"marker", draw, "cam00"});
    const Keypoint2D kp{x(gen), y(gen), true};
    Image im(640, 480, {0, 0, 0, 255});
    draw_disc(im, kp.x, kp.y, 4.0, kMarker);
    const AugmentedSample out = apply_geometric(im, {kp}, params, {});
    ASSERT_TRUE(out.keypoints[0].visible);
    double sx = 0, sy = 0, n = 0;
    for (int py = 0; py < out.image.height; ++py)
      for (int px = 0; px < out.image.width; ++px)
        if (out.image.at(px, py) == kMarker) {
          sx += px;
          sy += py;
          n += 1;
        }
    ASSERT_GT(n, 0);
    EXPECT_LE(std::hypot(sx / n - out.keypoints[0].x, sy / n - out.keypoints[0].y), 1.5) << "draw " << draw;
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(Geometric, KeypointsLeavingFrameBecomeInvisible) {
  AppliedAugmentation a;
  a.scale = 1.25;
  const auto out = transform_keypoints({{1.0, 1.0, true}, {319.5, 239.5, true}}, a, 640, 480, {});
  EXPECT_FALSE(out[0].visible);
  EXPECT_TRUE(out[1].visible);
}

TEST(Photometric, NeutralParamsLeaveImage) {
  Image im(20, 10, {100, 150, 200, 255});
  im.set(3, 3, {0, 10, 250, 128});
  CounterRng rng(1);
  EXPECT_EQ(apply_photometric(im, AppliedAugmentation{}, rng), im);
}

TEST(Photometric, BrightnessAndContrastArithmetic) {
  Image im(4, 4, {100, 100, 100, 255});
  AppliedAugmentation a;
  a.brightness = 10.0;
  CounterRng rng(1);
  EXPECT_EQ(apply_photometric(im, a, rng).at(2, 2), (Rgba{110, 110, 110, 255}));
  a.brightness = 255.0;
  const Image white = apply_photometric(Image(4, 4, {0, 30, 90, 255}), a, rng);
  for (std::size_t i = 0; i < white.pixels.size(); ++i) EXPECT_EQ(white.pixels[i], 255);
  a.brightness = 0.0;
  a.contrast = 2.0;
  EXPECT_EQ(apply_photometric(Image(1, 1, {138, 118, 0, 255}), a, rng).at(0, 0), (Rgba{148, 108, 0, 255}));
}

TEST(Photometric, NoiseIsDeterministicAndKeepsShapeAndAlpha) {
  Image im(32, 32, {128, 128, 128, 200});
  AppliedAugmentation a;
  a.noise_sigma = 6.0;
  a.hue_shift_deg = 10.0;
  a.saturation = 1.2;
  CounterRng r1(CounterRng(5, {"c", 1, "cam"}, RngStream::Photometric));
  CounterRng r2(CounterRng(5, {"c", 1, "cam"}, RngStream::Photometric));
  const Image x = apply_photometric(im, a, r1);
  const Image y = apply_photometric(im, a, r2);
  EXPECT_EQ(x, y);
  EXPECT_NE(x, im);
  EXPECT_EQ(x.width, 32);
  EXPECT_EQ(x.height, 32);
  for (std::size_t i = 3; i < x.pixels.size(); i += 4) EXPECT_EQ(x.pixels[i], 200);
}
