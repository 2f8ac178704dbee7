#pragma once

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <random>
#include <string>

#include "oracles.hpp"
#include "vmocap/anim_io.hpp"
#include "vmocap/projection.hpp"
#include "vmocap/skeleton.hpp"

namespace vmocap {
inline void PrintTo(const Keypoint2D& k, std::ostream* os) {
  *os << "(" << k.x << ", " << k.y << (k.visible ? ", visible)" : ", hidden)");
}
}  // namespace vmocap

namespace testing_support {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("vmocap_" + tag + "_" + std::to_string(rd()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

// Random tree of depth <= max_depth with random channel layouts; positional
// channels appear on any joint, not only the root.
inline vmocap::Skeleton random_skeleton(std::mt19937_64& gen, int max_joints, int max_depth, bool rotations_only) {
  using vmocap::Channel;
  std::uniform_int_distribution<int> count_dist(2, max_joints);
  std::uniform_real_distribution<double> off(-20.0, 20.0);
  std::bernoulli_distribution coin(0.5);
  vmocap::Skeleton s;
  std::vector<int> depth;
  const int n = count_dist(gen);
  for (int i = 0; i < n; ++i) {
    vmocap::Joint j;
    j.name = "j" + std::to_string(i);
    if (i > 0) {
      std::vector<std::size_t> candidates;
      for (int p = 0; p < i; ++p)
        if (depth[p] < max_depth) candidates.push_back(static_cast<std::size_t>(p));
      j.parent = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(gen)];
      depth.push_back(depth[*j.parent] + 1);
      j.rest_offset = vmocap::Vec3(off(gen), off(gen), off(gen));
    } else {
      depth.push_back(0);
    }
    std::vector<Channel> pool;
    if (!rotations_only || i == 0) {
      for (Channel c : {Channel::Xposition, Channel::Yposition, Channel::Zposition})
        if (coin(gen)) pool.push_back(c);
    }
    for (Channel c : {Channel::Xrotation, Channel::Yrotation, Channel::Zrotation})
      if (coin(gen) || i == 0) pool.push_back(c);
    std::shuffle(pool.begin(), pool.end(), gen);
    j.channels = pool;
    s.joints.push_back(j);
  }
  return s;
}

inline vmocap::LocalPose random_pose(std::mt19937_64& gen, const vmocap::Skeleton& s, bool translate_root = true) {
  std::uniform_real_distribution<double> ang(-180.0, 180.0), pos(-50.0, 50.0);
  vmocap::LocalPose p;
  for (const auto& j : s.joints) {
    for (auto c : j.channels) p.values.push_back(vmocap::is_rotation(c) ? ang(gen) : (translate_root ? pos(gen) : 0.0));
  }
  return p;
}

inline std::vector<oracle::Node> to_oracle(const vmocap::Skeleton& s) {
  std::vector<oracle::Node> out;
  for (const auto& j : s.joints) {
    oracle::Node n;
    n.parent = j.parent;
    n.offset = {j.rest_offset.x(), j.rest_offset.y(), j.rest_offset.z()};
    for (auto c : j.channels) n.channels.push_back(static_cast<int>(c));
    out.push_back(n);
  }
  return out;
}

inline vmocap::AnimationClip clip_from_frames(const vmocap::Skeleton& s, std::vector<vmocap::LocalPose> frames,
                                              double frame_time = 1.0 / 30.0) {
  vmocap::AnimationClip c;
  c.skeleton = s;
  c.frame_time = frame_time;
  c.frames = std::move(frames);
  return c;
}

}  // namespace testing_support
