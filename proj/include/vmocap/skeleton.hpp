#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vmocap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Channel { Xposition, Yposition, Zposition, Xrotation, Yrotation, Zrotation };

std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);
inline bool is_rotation(Channel c) { return c >= Channel::Xrotation; }

struct Joint {
  std::string name;
  std::optional<std::size_t> parent;
  Vec3 rest_offset = Vec3::Zero();
  std::vector<Channel> channels;
};

// Joints are stored in topological order: a parent always precedes its
// children. Nothing is enforced on construction; see validate_skeleton().
struct Skeleton {
  std::vector<Joint> joints;
  std::string units = "cm";

  std::size_t size() const { return joints.size(); }
  std::size_t channel_count() const;
  // Index of the first channel of joint `j` inside a LocalPose.
  std::vector<std::size_t> channel_offsets() const;
  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::string> joint_names() const;
};

// Channel values for one frame, concatenated in joint order. Rotations in
// degrees, translations in skeleton units.
struct LocalPose {
  std::vector<double> values;
};

struct WorldPose {
  std::vector<Vec3> positions;
  std::vector<Mat3> orientations;
};

// Rotations are intrinsic Euler rotations applied in declared channel order,
// so channels "Zrotation Xrotation Yrotation" give R = Rz * Rx * Ry.
Mat3 local_rotation(const Joint& joint, const double* values);

WorldPose forward_kinematics(const Skeleton& skeleton, const LocalPose& pose);

std::vector<std::pair<std::string, double>> bone_lengths(const Skeleton& skeleton);

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  std::string joint;
  std::string rule;
  std::string message;
};

// Empty iff every skeleton invariant holds. Zero-length bones are reported
// as warnings and do not block forward kinematics.
std::vector<Diagnostic> validate_skeleton(const Skeleton& skeleton);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Throws ValidationError listing every error-severity diagnostic.
void require_valid(const Skeleton& skeleton);

}  // namespace vmocap
