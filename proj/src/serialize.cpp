#include "vmocap/serialize.hpp"

#include "vmocap/error.hpp"

namespace vmocap {

using nlohmann::json;

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector", 0);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const Mat4& m) {
  json out = json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out.push_back(m(r, c));
  }
  return out;
}

Mat4 mat4_from_json(const json& j) {
  if (!j.is_array() || j.size() != 16) throw ParseError("expected 16 matrix entries", 0);
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = j[static_cast<std::size_t>(r * 4 + c)].get<double>();
  }
  return m;
}

json to_json(const Skeleton& skeleton) {
  json joints = json::array();
  for (const auto& j : skeleton.joints) {
    json channels = json::array();
    for (Channel c : j.channels) channels.push_back(std::string(channel_name(c)));
    joints.push_back({{"name", j.name},
                      {"parent", j.parent ? json(*j.parent) : json(nullptr)},
                      {"offset", to_json(j.rest_offset)},
                      {"channels", std::move(channels)}});
  }
  return {{"units", skeleton.units}, {"joints", std::move(joints)}};
}

Skeleton skeleton_from_json(const json& j) {
  Skeleton s;
  if (j.contains("units")) s.units = j.at("units").get<std::string>();
  for (const auto& jj : j.at("joints")) {
    Joint joint;
    joint.name = jj.at("name").get<std::string>();
    if (!jj.at("parent").is_null()) joint.parent = jj.at("parent").get<std::size_t>();
    joint.rest_offset = vec3_from_json(jj.at("offset"));
    for (const auto& c : jj.at("channels")) {
      const auto name = c.get<std::string>();
      const auto ch = channel_from_name(name);
      if (!ch) throw ParseError("unknown channel '" + name + "'", 0);
      joint.channels.push_back(*ch);
    }
    s.joints.push_back(std::move(joint));
  }
  return s;
}

json to_json(const CameraIntrinsics& i) {
  return {{"fov_deg", i.vertical_fov}, {"width", i.image_width}, {"height", i.image_height},
          {"near", i.near},           {"far", i.far}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics i;
  i.vertical_fov = j.at("fov_deg").get<double>();
  i.image_width = j.at("width").get<int>();
  i.image_height = j.at("height").get<int>();
  i.near = j.at("near").get<double>();
  i.far = j.at("far").get<double>();
  return i;
}

namespace {
json range_json(const Range& r) { return json::array({r.lo, r.hi}); }
Range range_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a [lo, hi] range", 0);
  return {j[0].get<double>(), j[1].get<double>()};
}
}  // namespace

json to_json(const AugmentationSpec& s) {
  json pairs = json::array();
  for (const auto& [a, b] : s.flip_pairs) pairs.push_back({a, b});
  return {{"rotation_deg", range_json(s.rotation_deg)},
          {"scale", range_json(s.scale)},
          {"flip_probability", s.flip_probability},
          {"gaussian_noise_sigma", range_json(s.noise_sigma)},
          {"brightness_delta", range_json(s.brightness)},
          {"contrast_factor", range_json(s.contrast)},
          {"hue_shift_deg", range_json(s.hue_shift_deg)},
          {"saturation_factor", range_json(s.saturation)},
          {"grayscale", s.grayscale},
          {"flip_pairs", std::move(pairs)}};
}

AugmentationSpec augmentation_spec_from_json(const json& j) {
  AugmentationSpec s;
  s.rotation_deg = range_from(j.at("rotation_deg"));
  s.scale = range_from(j.at("scale"));
  s.flip_probability = j.at("flip_probability").get<double>();
  s.noise_sigma = range_from(j.at("gaussian_noise_sigma"));
  s.brightness = range_from(j.at("brightness_delta"));
  s.contrast = range_from(j.at("contrast_factor"));
  s.hue_shift_deg = range_from(j.at("hue_shift_deg"));
  s.saturation = range_from(j.at("saturation_factor"));
  s.grayscale = j.at("grayscale").get<bool>();
  for (const auto& p : j.at("flip_pairs")) s.flip_pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
  return s;
}

json to_json(const AppliedAugmentation& a) {
  return {{"rotation_deg", a.rotation_deg}, {"scale", a.scale},           {"flip", a.flip},
          {"noise_sigma", a.noise_sigma},   {"brightness", a.brightness}, {"contrast", a.contrast},
          {"hue_shift_deg", a.hue_shift_deg}, {"saturation", a.saturation}};
}

AppliedAugmentation applied_augmentation_from_json(const json& j) {
  AppliedAugmentation a;
  a.rotation_deg = j.at("rotation_deg").get<double>();
  a.scale = j.at("scale").get<double>();
  a.flip = j.at("flip").get<bool>();
  a.noise_sigma = j.at("noise_sigma").get<double>();
  a.brightness = j.at("brightness").get<double>();
  a.contrast = j.at("contrast").get<double>();
  a.hue_shift_deg = j.at("hue_shift_deg").get<double>();
  a.saturation = j.at("saturation").get<double>();
  return a;
}

}  // namespace vmocap
