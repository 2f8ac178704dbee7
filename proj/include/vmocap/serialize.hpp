#pragma once

#include "json.hpp"
#include "vmocap/augment.hpp"
#include "vmocap/camera.hpp"
#include "vmocap/skeleton.hpp"

// JSON mappings shared by the clip format, dataset annotations and manifest.
// Doubles go through nlohmann's shortest round-trip formatting, so every
// value reads back bit-exactly. Readers throw nlohmann::json::exception or
// ParseError on malformed input.
namespace vmocap {

nlohmann::json to_json(const Vec3& v);
Vec3 vec3_from_json(const nlohmann::json& j);

// 16 numbers, row-major.
nlohmann::json to_json(const Mat4& m);
Mat4 mat4_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CameraIntrinsics& intrinsics);
CameraIntrinsics intrinsics_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AugmentationSpec& spec);
AugmentationSpec augmentation_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AppliedAugmentation& applied);
AppliedAugmentation applied_augmentation_from_json(const nlohmann::json& j);

}  // namespace vmocap
