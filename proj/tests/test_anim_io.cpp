#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "support.hpp"
#include "vmocap/anim_io.hpp"
#include "vmocap/demo.hpp"
#include "vmocap/error.hpp"

using namespace vmocap;

namespace {

const char* kMinimal = R"(HIERARCHY
ROOT root
{
  OFFSET 0 0 0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  JOINT child
  {
    OFFSET 0 1 0
    CHANNELS 3 Zrotation Xrotation Yrotation
    End Site
    {
      OFFSET 0 1 0
    }
  }
}
MOTION
Frames: 1
Frame Time: 0.033333
0 0 0 0 0 0 0 0 0
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
  return s;
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_bvh(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

AnimationClip round_trip_json(const AnimationClip& c) {
  std::stringstream ss;
  write_clip(c, ss);
  return read_clip(ss);
}

void expect_same_fk(const AnimationClip& a, const AnimationClip& b, double tol) {
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    const WorldPose wa = forward_kinematics(a.skeleton, a.frames[f]);
    const WorldPose wb = forward_kinematics(b.skeleton, b.frames[f]);
    for (std::size_t j = 0; j < wa.positions.size(); ++j) {
      EXPECT_LE((wa.positions[j] - wb.positions[j]).cwiseAbs().maxCoeff(), tol);
    }
  }
}

}  // namespace

TEST(ParseBvh, MinimalFile) {
  const AnimationClip c = parse_bvh(kMinimal);
  ASSERT_EQ(c.skeleton.size(), 3u);
  EXPECT_EQ(c.skeleton.joints[0].name, "root");
  EXPECT_EQ(c.skeleton.joints[1].name, "child");
  EXPECT_EQ(c.skeleton.joints[2].name, "child_end");
  EXPECT_FALSE(c.skeleton.joints[0].parent);
  EXPECT_EQ(c.skeleton.joints[1].parent, 0u);
  EXPECT_EQ(c.skeleton.joints[2].parent, 1u);
  EXPECT_TRUE(c.skeleton.joints[2].channels.empty());
  EXPECT_EQ(c.skeleton.joints[1].channels,
            (std::vector<Channel>{Channel::Zrotation, Channel::Xrotation, Channel::Yrotation}));
  ASSERT_EQ(c.frames.size(), 1u);
  EXPECT_EQ(c.frames[0].values, std::vector<double>(9, 0.0));
  EXPECT_EQ(c.frame_time, 0.033333);
}

TEST(ParseBvh, ShortMotionLineCitesItsLine) {
  const std::string bad = replace(kMinimal, "0 0 0 0 0 0 0 0 0", "0 0 0 0 0 0 0 0");
  EXPECT_EQ(parse_error_line(bad), 19u);
}

TEST(ParseBvh, ErrorsCarryLineNumbers) {
  EXPECT_GT(parse_error_line(replace(kMinimal, "Frames: 1", "Frames: 2")), 0u);
  EXPECT_EQ(parse_error_line(replace(kMinimal, "0 0 0 0 0 0 0 0 0", "0 0 0 0 x 0 0 0 0")), 19u);
  EXPECT_EQ(parse_error_line(replace(kMinimal, "0 0 0 0 0 0 0 0 0", "0 0 0 0 0 0 0 0 0\n1 1 1 1 1 1 1 1 1")), 20u);
  EXPECT_GT(parse_error_line(replace(kMinimal, "HIERARCHY", "HIERARCHX")), 0u);
  EXPECT_THROW(parse_bvh(replace(kMinimal, "MOTION", "")), ParseError);
  EXPECT_THROW(parse_bvh(replace(kMinimal, "JOINT child", "JOINT root")), ParseError);
  EXPECT_THROW(parse_bvh(replace(kMinimal, "0 0 0 0 0 0 0 0 0", "0 0 0 0 nan 0 0 0 0")), ParseError);
}

TEST(ParseBvh, WhitespaceIsPermissive) {
  std::string tabs = kMinimal;
  for (auto& ch : tabs)
    if (ch == ' ') ch = '\t';
  const AnimationClip a = parse_bvh(kMinimal);
  const AnimationClip b = parse_bvh(tabs);
  EXPECT_EQ(a.skeleton.joint_names(), b.skeleton.joint_names());
  EXPECT_EQ(a.frames[0].values, b.frames[0].values);
  std::string crlf;
  for (char ch : std::string(kMinimal)) {
    if (ch == '\n') crlf += '\r';
    crlf += ch;
  }
  EXPECT_EQ(parse_bvh(crlf).skeleton.size(), 3u);
}

TEST(ParseBvh, FuzzedInputEitherParsesOrThrowsParseError) {
  std::mt19937_64 gen(1234);
  const std::string base = kMinimal;
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 3000; ++trial) {
    std::string s = base;
    std::uniform_int_distribution<std::size_t> pos(0, s.size() - 1);
    const int edits = 1 + trial % 8;
    for (int e = 0; e < edits; ++e) {
      switch (byte(gen) % 4) {
        case 0: s[pos(gen) % s.size()] = static_cast<char>(byte(gen)); break;
        case 1: s.erase(pos(gen) % s.size(), 1 + byte(gen) % 6); break;
        case 2: s.insert(pos(gen) % s.size(), 1, static_cast<char>(byte(gen))); break;
        default: {
          const auto at = pos(gen) % s.size();
          s = s.substr(0, at);
        }
      }
      if (s.empty()) s = " ";
    }
    try {
      const AnimationClip c = parse_bvh(s);
      validate_clip(c);
    } catch (const ParseError&) {
    } catch (const ValidationError&) {
    }
  }
  for (int trial = 0; trial < 500; ++trial) {
    std::string s(static_cast<std::size_t>(byte(gen)) * 2, '\0');
    for (auto& ch : s) ch = static_cast<char>(byte(gen));
    EXPECT_THROW(parse_bvh(s), ParseError);
  }
}

TEST(ParseBvh, BvhWriteReadIsExact) {
  const AnimationClip c = demo::walk_clip(30);
  std::stringstream ss;
  write_bvh(c, ss);
  const AnimationClip back = parse_bvh(ss.str());
  EXPECT_EQ(back.skeleton.joint_names(), c.skeleton.joint_names());
  for (std::size_t f = 0; f < c.frames.size(); ++f) EXPECT_EQ(back.frames[f].values, c.frames[f].values);
  EXPECT_EQ(back.frame_time, c.frame_time);
}

TEST(ClipFormat, RoundTripIsBitExact) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Skeleton s = testing_support::random_skeleton(gen, 15, 5, false);
    std::vector<LocalPose> frames;
    for (int f = 0; f < 7; ++f) frames.push_back(testing_support::random_pose(gen, s));
    const AnimationClip c = testing_support::clip_from_frames(s, frames, 1.0 / 29.97);
    const AnimationClip back = round_trip_json(c);
    ASSERT_EQ(back.skeleton.size(), s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
      EXPECT_EQ(back.skeleton.joints[j].name, s.joints[j].name);
      EXPECT_EQ(back.skeleton.joints[j].parent, s.joints[j].parent);
      EXPECT_EQ(back.skeleton.joints[j].rest_offset, s.joints[j].rest_offset);
      EXPECT_EQ(back.skeleton.joints[j].channels, s.joints[j].channels);
    }
    EXPECT_EQ(back.frame_time, c.frame_time);
    for (std::size_t f = 0; f < frames.size(); ++f) EXPECT_EQ(back.frames[f].values, frames[f].values);
  }
}

TEST(ClipFormat, HundredFramesReadBack) {
  EXPECT_EQ(round_trip_json(demo::walk_clip(100)).frames.size(), 100u);
}

TEST(ClipFormat, EmptyFramesRejectedOnWrite) {
  AnimationClip c = demo::walk_clip(2);
  c.frames.clear();
  std::stringstream ss;
  EXPECT_THROW(write_clip(c, ss), ValidationError);
}

TEST(ClipFormat, MalformedAndVersionMismatchRejected) {
  std::stringstream bad("{ not json");
  EXPECT_THROW(read_clip(bad), ParseError);
  std::stringstream ss;
  write_clip(demo::walk_clip(2), ss);
  auto doc = nlohmann::json::parse(ss.str());
  ASSERT_EQ(doc["format_version"], kClipFormatVersion);
  doc["format_version"] = 99;
  std::stringstream wrong(doc.dump());
  EXPECT_THROW(read_clip(wrong), ParseError);
}

TEST(ClipFormat, BundledSamplesSurviveBothFormats) {
  for (const char* name : {"minimal.bvh", "quadruped_walk.bvh"}) {
    const AnimationClip direct = load_bvh(std::filesystem::path(VMOCAP_DATA_DIR) / name);
    const AnimationClip via_json = round_trip_json(direct);
    expect_same_fk(direct, via_json, 1e-12);
    std::stringstream bvh;
    write_bvh(direct, bvh);
    expect_same_fk(direct, round_trip_json(parse_bvh(bvh.str())), 1e-12);
  }
}

TEST(ClipStats, DurationAndBounds) {
  AnimationClip c = demo::walk_clip(240, 1.0 / 24.0);
  const ClipStats s = clip_stats(c);
  EXPECT_EQ(s.joint_count, 37u);
  EXPECT_EQ(s.frame_count, 240u);
  EXPECT_NEAR(s.duration, 10.0, 1e-12);

  for (auto& f : c.frames) f = c.frames.front();
  const ClipStats still = clip_stats(c);
  EXPECT_EQ(still.root_min, still.root_max);
}

TEST(LoadClip, DispatchesOnExtension) {
  testing_support::TempDir dir("clip");
  const AnimationClip c = demo::walk_clip(3);
  {
    std::ofstream f(dir / "w.json");
    write_clip(c, f);
  }
  EXPECT_EQ(load_clip(dir / "w.json").frames[2].values, c.frames[2].values);
  EXPECT_EQ(load_clip(std::filesystem::path(VMOCAP_DATA_DIR) / "minimal.bvh").frames.size(), 4u);
  EXPECT_THROW(load_clip(dir / "missing.bvh"), IoError);
}
