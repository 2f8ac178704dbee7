#include "vmocap/config.hpp"

#include <glob.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <set>

#include "vmocap/demo.hpp"
#include "vmocap/error.hpp"

namespace vmocap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json color_json(Rgba c) { return json::array({c.r, c.g, c.b, c.a}); }

// Tracks the JSON path for error messages.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  void allow(std::initializer_list<const char*> keys) const {
    if (!node_.is_object()) fail("must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : node_.items()) {
      if (!allowed.count(k)) throw ValidationError("config: unknown key '" + child_path(k) + "'");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }
  Reader child(const char* key) const { return Reader(node_.at(key), child_path(key)); }
  const json& node() const { return node_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("config: '" + (path_.empty() ? std::string("<root>") : path_) + "' " + what);
  }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) child(key).fail("must be a number");
    return v.get<double>();
  }
  std::optional<double> optional_number(const char* key, std::optional<double> fallback) const {
    if (!has(key)) return fallback;
    if (node_.at(key).is_null()) return std::nullopt;
    return number(key, 0.0);
  }
  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) child(key).fail("must be an integer");
    return v.get<int>();
  }
  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) child(key).fail("must be true or false");
    return v.get<bool>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) child(key).fail("must be a string");
    return v.get<std::string>();
  }
  Range range(const char* key, Range fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      child(key).fail("must be a [lo, hi] pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }
  Rgba color(const char* key, Rgba fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array() || (v.size() != 3 && v.size() != 4)) child(key).fail("must be [r, g, b] or [r, g, b, a]");
    std::array<std::uint8_t, 4> c{0, 0, 0, 255};
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer() || v[i].get<int>() < 0 || v[i].get<int>() > 255) {
        child(key).fail("components must be integers in [0, 255]");
      }
      c[i] = static_cast<std::uint8_t>(v[i].get<int>());
    }
    return {c[0], c[1], c[2], c[3]};
  }

 private:
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

json default_config_json() {
  const RunConfig c;
  const AugmentationSpec& a = c.augmentation;
  const auto& i = c.rig.intrinsics;
  return {
      {"clips", json::array()},
      {"rig",
       {{"count", c.rig.count},
        {"radius", nullptr},
        {"height", nullptr},
        {"radius_factor", c.rig.radius_factor},
        {"height_factor", c.rig.height_factor},
        {"fov_deg", i.vertical_fov},
        {"width", i.image_width},
        {"height_px", i.image_height},
        {"near", i.near},
        {"far", i.far},
        {"track_root", c.rig.track_root}}},
      {"augmentation",
       {{"bake", c.bake_augmentation},
        {"rotation_deg", {a.rotation_deg.lo, a.rotation_deg.hi}},
        {"scale", {a.scale.lo, a.scale.hi}},
        {"flip_probability", a.flip_probability},
        {"gaussian_noise_sigma", {a.noise_sigma.lo, a.noise_sigma.hi}},
        {"brightness_delta", {a.brightness.lo, a.brightness.hi}},
        {"contrast_factor", {a.contrast.lo, a.contrast.hi}},
        {"hue_shift_deg", {a.hue_shift_deg.lo, a.hue_shift_deg.hi}},
        {"saturation_factor", {a.saturation.lo, a.saturation.hi}},
        {"grayscale", a.grayscale},
        {"flip_pairs", "auto"}}},
      {"render",
       {{"bone_thickness", c.style.bone_thickness},
        {"joint_radius", c.style.joint_radius},
        {"bone_color", color_json(c.style.bone_color)},
        {"joint_color", color_json(c.style.joint_color)}}},
      {"background_dir", nullptr},
      {"seed", c.seed},
      {"output", c.output.string()},
      {"split", c.split},
      {"workers", c.workers},
      {"root_relative", c.root_relative},
  };
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  RunConfig c;
  c.workers = default_workers();
  const Reader root(doc, "");
  root.allow({"clips", "rig", "augmentation", "render", "background_dir", "seed", "output", "split", "workers",
              "root_relative"});

  if (root.has("clips")) {
    const Reader clips = root.child("clips");
    if (!clips.node().is_array()) clips.fail("must be an array of paths or globs");
    for (const auto& p : clips.node()) {
      if (!p.is_string()) clips.fail("entries must be strings");
      c.clips.push_back(resolve(base_dir, p.get<std::string>()).string());
    }
  }

  if (root.has("rig")) {
    const Reader rig = root.child("rig");
    rig.allow({"count", "radius", "height", "radius_factor", "height_factor", "fov_deg", "width", "height_px", "near",
               "far", "track_root"});
    c.rig.count = rig.integer("count", c.rig.count);
    c.rig.radius = rig.optional_number("radius", c.rig.radius);
    c.rig.height = rig.optional_number("height", c.rig.height);
    c.rig.radius_factor = rig.number("radius_factor", c.rig.radius_factor);
    c.rig.height_factor = rig.number("height_factor", c.rig.height_factor);
    c.rig.intrinsics.vertical_fov = rig.number("fov_deg", c.rig.intrinsics.vertical_fov);
    c.rig.intrinsics.image_width = rig.integer("width", c.rig.intrinsics.image_width);
    c.rig.intrinsics.image_height = rig.integer("height_px", c.rig.intrinsics.image_height);
    c.rig.intrinsics.near = rig.number("near", c.rig.intrinsics.near);
    c.rig.intrinsics.far = rig.number("far", c.rig.intrinsics.far);
    c.rig.track_root = rig.boolean("track_root", c.rig.track_root);
    if (c.rig.count < 1) rig.child("count").fail("must be at least 1");
    if (c.rig.radius && !(*c.rig.radius > 0.0)) rig.child("radius").fail("must be positive");
    if (!(c.rig.radius_factor > 0.0)) rig.child("radius_factor").fail("must be positive");
  }
  validate(c.rig.intrinsics);

  if (root.has("augmentation")) {
    const Reader aug = root.child("augmentation");
    aug.allow({"bake", "rotation_deg", "scale", "flip_probability", "gaussian_noise_sigma", "brightness_delta",
               "contrast_factor", "hue_shift_deg", "saturation_factor", "grayscale", "flip_pairs"});
    AugmentationSpec& a = c.augmentation;
    c.bake_augmentation = aug.boolean("bake", c.bake_augmentation);
    a.rotation_deg = aug.range("rotation_deg", a.rotation_deg);
    a.scale = aug.range("scale", a.scale);
    a.flip_probability = aug.number("flip_probability", a.flip_probability);
    a.noise_sigma = aug.range("gaussian_noise_sigma", a.noise_sigma);
    a.brightness = aug.range("brightness_delta", a.brightness);
    a.contrast = aug.range("contrast_factor", a.contrast);
    a.hue_shift_deg = aug.range("hue_shift_deg", a.hue_shift_deg);
    a.saturation = aug.range("saturation_factor", a.saturation);
    a.grayscale = aug.boolean("grayscale", a.grayscale);
    if (aug.has("flip_pairs")) {
      const Reader fp = aug.child("flip_pairs");
      if (fp.node().is_string()) {
        if (fp.node().get<std::string>() != "auto") fp.fail("must be \"auto\" or a list of pairs");
      } else if (fp.node().is_array()) {
        std::vector<std::array<std::string, 2>> pairs;
        for (const auto& p : fp.node()) {
          if (!p.is_array() || p.size() != 2) fp.fail("entries must be [left, right] pairs");
          std::array<std::string, 2> pair;
          for (int k = 0; k < 2; ++k) {
            if (p[k].is_string()) {
              pair[k] = p[k].get<std::string>();
            } else if (p[k].is_number_integer() && (p[k].is_number_unsigned() || p[k].get<std::int64_t>() >= 0)) {
              pair[k] = "#" + std::to_string(p[k].get<std::size_t>());
            } else {
              fp.fail("pair members must be joint names or indices");
            }
          }
          pairs.push_back(pair);
        }
        c.flip_pairs = std::move(pairs);
      } else {
        fp.fail("must be \"auto\" or a list of pairs");
      }
    }
    validate(a, std::numeric_limits<std::size_t>::max());
  }

  if (root.has("render")) {
    const Reader r = root.child("render");
    r.allow({"bone_thickness", "joint_radius", "bone_color", "joint_color"});
    c.style.bone_thickness = r.number("bone_thickness", c.style.bone_thickness);
    c.style.joint_radius = r.number("joint_radius", c.style.joint_radius);
    c.style.bone_color = r.color("bone_color", c.style.bone_color);
    c.style.joint_color = r.color("joint_color", c.style.joint_color);
    if (c.style.bone_thickness < 0.0 || c.style.joint_radius < 0.0) r.fail("sizes must be nonnegative");
  }

  if (root.has("background_dir") && !doc.at("background_dir").is_null()) {
    c.background_dir = resolve(base_dir, root.string("background_dir", ""));
    if (!fs::is_directory(*c.background_dir)) {
      root.child("background_dir").fail("does not name a directory: " + c.background_dir->string());
    }
  }
  if (root.has("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      root.child("seed").fail("must be a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  c.output = resolve(base_dir, root.string("output", c.output.string()));
  if (root.has("split")) {
    const json& s = doc.at("split");
    if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number() || !s[2].is_number()) {
      root.child("split").fail("must be [train, val, test]");
    }
    c.split = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    c.split_explicit = true;
    const double sum = c.split[0] + c.split[1] + c.split[2];
    if (c.split[0] < 0 || c.split[1] < 0 || c.split[2] < 0 || std::abs(sum - 1.0) > 1e-9) {
      root.child("split").fail("ratios must be nonnegative and sum to 1");
    }
  }
  c.workers = root.integer("workers", c.workers);
  if (c.workers < 1) root.child("workers").fail("must be at least 1");
  c.root_relative = root.boolean("root_relative", c.root_relative);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig c = parse_config(doc, path.parent_path());
  resolve_clip_paths(c.clips);  // referenced clips must exist at load time
  return c;
}

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<int>(v);
  }
  return 1;
}

std::vector<fs::path> resolve_clip_paths(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  std::set<std::string> seen;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc != 0) {
      globfree(&g);
      throw ValidationError("clip path or pattern matches nothing: " + pattern);
    }
    for (std::size_t i = 0; i < g.gl_pathc; ++i) {
      const std::string p = g.gl_pathv[i];
      if (seen.insert(p).second) out.emplace_back(p);
    }
    globfree(&g);
  }
  return out;
}

std::vector<NamedClip> load_clips(const std::vector<fs::path>& paths) {
  std::vector<NamedClip> out;
  std::set<std::string> ids;
  for (const auto& p : paths) {
    NamedClip c;
    c.source = p.string();
    c.clip = load_clip(p);
    std::string id = p.stem().string();
    if (id.empty()) id = "clip";
    std::string unique = id;
    for (int k = 2; ids.count(unique); ++k) unique = id + "_" + std::to_string(k);
    ids.insert(unique);
    c.id = unique;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<FlipPair> resolve_flip_pairs(const RunConfig& config, const Skeleton& skeleton) {
  if (!config.flip_pairs) return mirror_pairs_by_name(skeleton);
  std::vector<FlipPair> out;
  auto index_of = [&](const std::string& ref) -> std::size_t {
    if (!ref.empty() && ref[0] == '#') {
      const std::size_t idx = std::stoul(ref.substr(1));
      if (idx >= skeleton.size()) throw ValidationError("config: flip pair index " + ref.substr(1) + " out of range");
      return idx;
    }
    const auto idx = skeleton.find(ref);
    if (!idx) throw ValidationError("config: flip pair names unknown joint '" + ref + "'");
    return *idx;
  };
  for (const auto& [l, r] : *config.flip_pairs) out.emplace_back(index_of(l), index_of(r));
  return out;
}

GenerateOptions to_generate_options(const RunConfig& config, const Skeleton& skeleton) {
  GenerateOptions o;
  o.rig = config.rig;
  o.augmentation = config.augmentation;
  o.augmentation.flip_pairs = resolve_flip_pairs(config, skeleton);
  validate(o.augmentation, skeleton.size());
  o.bake_augmentation = config.bake_augmentation;
  o.background_dir = config.background_dir;
  o.seed = config.seed;
  o.output = config.output;
  o.split = config.split;
  o.workers = config.workers;
  o.style = config.style;
  o.root_relative = config.root_relative;
  return o;
}

}  // namespace vmocap
