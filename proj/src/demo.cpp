#include "vmocap/demo.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace vmocap::demo {

namespace {

const std::vector<Channel> kRootChannels = {Channel::Xposition, Channel::Yposition, Channel::Zposition,
                                            Channel::Zrotation, Channel::Xrotation, Channel::Yrotation};
const std::vector<Channel> kJointChannels = {Channel::Zrotation, Channel::Xrotation, Channel::Yrotation};

struct RigBuilder {
  Skeleton skeleton;

  std::size_t add(const std::string& name, const std::string& parent, Vec3 offset, bool end_site = false) {
    Joint j;
    j.name = name;
    if (!parent.empty()) j.parent = skeleton.find(parent);
    j.rest_offset = offset;
    if (!end_site) j.channels = parent.empty() ? kRootChannels : kJointChannels;
    skeleton.joints.push_back(std::move(j));
    return skeleton.size() - 1;
  }

  // Front leg: scapula, shoulder, elbow, wrist, paw, paw tip.
  void front_leg(const std::string& side, double sx) {
    add(side + "Scapula", "Chest", {8 * sx, -5, 2});
    add(side + "Shoulder", side + "Scapula", {2 * sx, -15, 3});
    add(side + "Elbow", side + "Shoulder", {0, -22, -4});
    add(side + "Wrist", side + "Elbow", {0, -20, 2});
    add(side + "FrontPaw", side + "Wrist", {0, -4, 3});
    add(side + "FrontPaw_end", side + "FrontPaw", {0, -2, 6}, true);
  }

  void hind_leg(const std::string& side, double sx) {
    add(side + "Thigh", "Hips", {9 * sx, -6, -6});
    add(side + "Knee", side + "Thigh", {0, -22, 6});
    add(side + "Ankle", side + "Knee", {0, -20, -8});
    add(side + "HindPaw", side + "Ankle", {0, -12, 2});
    add(side + "HindPaw_end", side + "HindPaw", {0, -3, 7}, true);
  }
};

}  // namespace

Skeleton quadruped_rig() {
  RigBuilder b;
  b.skeleton.units = "cm";
  b.add("Hips", "", {0, 0, 0});
  b.add("Spine1", "Hips", {0, 2, 15});
  b.add("Spine2", "Spine1", {0, 1, 18});
  b.add("Chest", "Spine2", {0, 0, 17});
  b.add("Neck", "Chest", {0, 8, 14});
  b.add("Head", "Neck", {0, 8, 12});
  b.add("Head_end", "Head", {0, -3, 16}, true);
  for (const auto& [side, sx] : {std::pair{std::string("L_"), 1.0}, std::pair{std::string("R_"), -1.0}}) {
    b.add(side + "Ear", "Head", {4 * sx, 7, 2});
    b.add(side + "Ear_end", side + "Ear", {1 * sx, 5, -1}, true);
  }
  b.front_leg("L_", 1.0);
  b.front_leg("R_", -1.0);
  b.hind_leg("L_", 1.0);
  b.hind_leg("R_", -1.0);
  b.add("Tail1", "Hips", {0, 2, -14});
  b.add("Tail2", "Tail1", {0, -4, -18});
  b.add("Tail3", "Tail2", {0, -8, -18});
  b.add("Tail3_end", "Tail3", {0, -6, -16}, true);
  return b.skeleton;
}

AnimationClip walk_clip(std::size_t frames, double frame_time) {
  AnimationClip clip;
  clip.skeleton = quadruped_rig();
  clip.frame_time = frame_time;
  const Skeleton& sk = clip.skeleton;
  const auto offsets = sk.channel_offsets();
  const double w = 2.0 * std::numbers::pi * 1.2;  // gait frequency
  const double pi = std::numbers::pi;

  // Values are given as (Z, X, Y) rotations in the joint channel order.
  auto set_rot = [&](LocalPose& pose, const std::string& name, double z, double x, double y) {
    const std::size_t o = offsets[*sk.find(name)];
    pose.values[o] = z;
    pose.values[o + 1] = x;
    pose.values[o + 2] = y;
  };

  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) * frame_time;
    LocalPose pose;
    pose.values.assign(sk.channel_count(), 0.0);
    // Root: X, Y, Z position then Z, X, Y rotation.
    pose.values[0] = 12.0 * std::sin(0.5 * w * t);
    pose.values[1] = 63.0 + 1.5 * std::sin(2.0 * w * t);
    pose.values[2] = 40.0 * t;
    pose.values[3] = 3.0 * std::sin(w * t);
    pose.values[4] = 2.0 * std::sin(2.0 * w * t);
    pose.values[5] = 15.0 * std::sin(0.5 * w * t);

    set_rot(pose, "Spine1", 0, 1.5 * std::sin(2 * w * t), 4.0 * std::sin(w * t));
    set_rot(pose, "Spine2", 0, -1.0 * std::sin(2 * w * t), -3.0 * std::sin(w * t));
    set_rot(pose, "Neck", 0, -10.0 + 5.0 * std::sin(2 * w * t), 0);
    set_rot(pose, "Head", 0, 8.0, 10.0 * std::sin(0.5 * w * t));
    set_rot(pose, "L_Ear", -10.0 + 5.0 * std::sin(3 * w * t), 0, 0);
    set_rot(pose, "R_Ear", 10.0 - 5.0 * std::sin(3 * w * t), 0, 0);

    const struct {
      const char* side;
      double phase;
    } front[] = {{"L_", pi / 2}, {"R_", 3 * pi / 2}}, hind[] = {{"L_", 0.0}, {"R_", pi}};
    for (const auto& leg : front) {
      const double p = w * t + leg.phase;
      const std::string s = leg.side;
      set_rot(pose, s + "Scapula", 0, 8.0 * std::sin(p), 0);
      set_rot(pose, s + "Shoulder", 0, 25.0 * std::sin(p), 0);
      set_rot(pose, s + "Elbow", 0, -20.0 + 15.0 * std::sin(p + 1.0), 0);
      set_rot(pose, s + "Wrist", 0, 10.0 * std::sin(p + 2.0), 0);
      set_rot(pose, s + "FrontPaw", 0, 15.0 * std::sin(p + 2.5), 0);
    }
    for (const auto& leg : hind) {
      const double p = w * t + leg.phase;
      const std::string s = leg.side;
      set_rot(pose, s + "Thigh", 0, 20.0 * std::sin(p), 0);
      set_rot(pose, s + "Knee", 0, 25.0 + 15.0 * std::sin(p + 1.0), 0);
      set_rot(pose, s + "Ankle", 0, -20.0 + 10.0 * std::sin(p + 2.0), 0);
      set_rot(pose, s + "HindPaw", 0, 12.0 * std::sin(p + 2.5), 0);
    }
    for (int k = 1; k <= 3; ++k) {
      set_rot(pose, "Tail" + std::to_string(k), 0, -8.0, 15.0 * std::sin(w * t + 0.6 * k));
    }
    clip.frames.push_back(std::move(pose));
  }
  return clip;
}

}  // namespace vmocap::demo

namespace vmocap {

std::vector<FlipPair> mirror_pairs_by_name(const Skeleton& skeleton) {
  static const std::pair<std::string, std::string> kMarkers[] = {{"L_", "R_"}, {"Left", "Right"}, {"l_", "r_"}};
  std::vector<FlipPair> pairs;
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    const std::string& name = skeleton.joints[i].name;
    for (const auto& [left, right] : kMarkers) {
      const auto pos = name.find(left);
      if (pos == std::string::npos) continue;
      std::string mirrored = name;
      mirrored.replace(pos, left.size(), right);
      if (auto j = skeleton.find(mirrored)) {
        pairs.emplace_back(i, *j);
        break;
      }
    }
  }
  return pairs;
}

}  // namespace vmocap
