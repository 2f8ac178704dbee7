#include "vmocap/skeleton.hpp"

#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "vmocap/error.hpp"

namespace vmocap {

namespace {

constexpr std::array<std::string_view, 6> kChannelNames = {
    "Xposition", "Yposition", "Zposition", "Xrotation", "Yrotation", "Zrotation"};

Mat3 axis_rotation(Channel c, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  switch (c) {
    case Channel::Xrotation:
      return Eigen::AngleAxisd(rad, Vec3::UnitX()).toRotationMatrix();
    case Channel::Yrotation:
      return Eigen::AngleAxisd(rad, Vec3::UnitY()).toRotationMatrix();
    default:
      return Eigen::AngleAxisd(rad, Vec3::UnitZ()).toRotationMatrix();
  }
}

}  // namespace

std::string_view channel_name(Channel c) { return kChannelNames[static_cast<std::size_t>(c)]; }

std::optional<Channel> channel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

std::size_t Skeleton::channel_count() const {
  std::size_t n = 0;
  for (const auto& j : joints) n += j.channels.size();
  return n;
}

std::vector<std::size_t> Skeleton::channel_offsets() const {
  std::vector<std::size_t> offsets;
  offsets.reserve(joints.size());
  std::size_t n = 0;
  for (const auto& j : joints) {
    offsets.push_back(n);
    n += j.channels.size();
  }
  return offsets;
}

std::optional<std::size_t> Skeleton::find(std::string_view name) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Skeleton::joint_names() const {
  std::vector<std::string> names;
  names.reserve(joints.size());
  for (const auto& j : joints) names.push_back(j.name);
  return names;
}

Mat3 local_rotation(const Joint& joint, const double* values) {
  Mat3 r = Mat3::Identity();
  for (std::size_t c = 0; c < joint.channels.size(); ++c) {
    if (is_rotation(joint.channels[c])) r = r * axis_rotation(joint.channels[c], values[c]);
  }
  return r;
}

WorldPose forward_kinematics(const Skeleton& skeleton, const LocalPose& pose) {
  require_valid(skeleton);
  const std::size_t expected = skeleton.channel_count();
  if (pose.values.size() != expected) {
    throw ValidationError("pose has " + std::to_string(pose.values.size()) +
                          " channel values, skeleton declares " + std::to_string(expected));
  }

  WorldPose world;
  world.positions.resize(skeleton.size());
  world.orientations.resize(skeleton.size());

  std::size_t cursor = 0;
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    const Joint& joint = skeleton.joints[j];
    const double* values = pose.values.data() + cursor;
    cursor += joint.channels.size();

    Vec3 translation = joint.rest_offset;
    for (std::size_t c = 0; c < joint.channels.size(); ++c) {
      switch (joint.channels[c]) {
        case Channel::Xposition: translation.x() += values[c]; break;
        case Channel::Yposition: translation.y() += values[c]; break;
        case Channel::Zposition: translation.z() += values[c]; break;
        default: break;
      }
    }
    const Mat3 rotation = local_rotation(joint, values);

    if (joint.parent) {
      const std::size_t p = *joint.parent;
      world.positions[j] = world.positions[p] + world.orientations[p] * translation;
      world.orientations[j] = world.orientations[p] * rotation;
    } else {
      world.positions[j] = translation;
      world.orientations[j] = rotation;
    }
  }
  return world;
}

std::vector<std::pair<std::string, double>> bone_lengths(const Skeleton& skeleton) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& j : skeleton.joints) {
    if (j.parent) out.emplace_back(j.name, j.rest_offset.norm());
  }
  return out;
}

std::vector<Diagnostic> validate_skeleton(const Skeleton& skeleton) {
  using Severity = Diagnostic::Severity;
  std::vector<Diagnostic> out;
  auto report = [&](Severity s, const std::string& joint, const char* rule, std::string msg) {
    out.push_back({s, joint, rule, std::move(msg)});
  };

  if (skeleton.joints.empty()) {
    report(Severity::Error, "", "nonempty", "skeleton has no joints");
    return out;
  }

  std::size_t roots = 0;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    const Joint& j = skeleton.joints[i];
    if (j.name.empty()) report(Severity::Error, j.name, "name", "joint " + std::to_string(i) + " has an empty name");
    if (!seen.insert(j.name).second) {
      report(Severity::Error, j.name, "unique_name", "duplicate joint name '" + j.name + "'");
    }
    if (!j.parent) {
      ++roots;
      if (roots > 1) report(Severity::Error, j.name, "single_root", "second root joint '" + j.name + "'");
    } else if (*j.parent >= i) {
      report(Severity::Error, j.name, "topological_order",
             "joint '" + j.name + "' references parent index " + std::to_string(*j.parent) +
                 " which does not precede it");
    }
    if (!j.rest_offset.allFinite()) {
      report(Severity::Error, j.name, "finite_offset", "joint '" + j.name + "' has a non-finite rest offset");
    } else if (j.parent && j.rest_offset.norm() == 0.0) {
      report(Severity::Warning, j.name, "degenerate_bone", "joint '" + j.name + "' has a zero-length bone");
    }
  }
  if (roots == 0) report(Severity::Error, "", "single_root", "skeleton has no root joint");
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::Error) return true;
  }
  return false;
}

void require_valid(const Skeleton& skeleton) {
  const auto diagnostics = validate_skeleton(skeleton);
  if (!has_errors(diagnostics)) return;
  std::ostringstream msg;
  msg << "invalid skeleton:";
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::Error) msg << "\n  [" << d.rule << "] " << d.message;
  }
  throw ValidationError(msg.str());
}

}  // namespace vmocap
