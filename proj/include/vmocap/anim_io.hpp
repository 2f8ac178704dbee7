#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vmocap/skeleton.hpp"

namespace vmocap {

struct AnimationClip {
  Skeleton skeleton;
  double frame_time = 1.0 / 30.0;
  std::vector<LocalPose> frames;
};

// Throws ValidationError if the clip breaks an invariant (positive finite
// frame_time, at least one frame, per-frame channel counts, valid skeleton).
void validate_clip(const AnimationClip& clip);

// Parses Biovision Hierarchy text. End Sites become channel-less leaf joints
// named "<parent>_end". Throws ParseError carrying the offending line.
AnimationClip parse_bvh(std::string_view text);
AnimationClip load_bvh(const std::filesystem::path& path);

void write_bvh(const AnimationClip& clip, std::ostream& out);

inline constexpr int kClipFormatVersion = 1;

// JSON clip document. Doubles are written in shortest round-trip form, so
// read_clip(write_clip(c)) reproduces every value bit-exactly.
void write_clip(const AnimationClip& clip, std::ostream& out);
AnimationClip read_clip(std::istream& in);

// Dispatches on extension: ".bvh" is parsed as BVH, anything else as a clip
// document.
AnimationClip load_clip(const std::filesystem::path& path);

struct ClipStats {
  std::size_t joint_count = 0;
  std::size_t frame_count = 0;
  double duration = 0.0;
  Vec3 root_min = Vec3::Zero();
  Vec3 root_max = Vec3::Zero();
};

ClipStats clip_stats(const AnimationClip& clip);

}  // namespace vmocap
