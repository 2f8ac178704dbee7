#pragma once

#include <cstddef>
#include <vector>

#include "vmocap/anim_io.hpp"
#include "vmocap/augment.hpp"

namespace vmocap::demo {

// A 37-joint quadruped rig (big-cat proportions, centimetres, facing +Z,
// left side on +X). The joint layout is a stand-in: no published joint list
// exists for the rig this tool was first built around.
Skeleton quadruped_rig();

// Procedural walk cycle on quadruped_rig(): the root drifts forward along +Z
// while swaying, legs follow a four-beat gait.
AnimationClip walk_clip(std::size_t frames = 100, double frame_time = 1.0 / 30.0);

}  // namespace vmocap::demo

namespace vmocap {

// Pairs joints whose names differ only by a left/right marker ("L_"/"R_",
// "Left"/"Right"). Used as the default flip pairs.
std::vector<FlipPair> mirror_pairs_by_name(const Skeleton& skeleton);

}  // namespace vmocap
