#include "vmocap/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "vmocap/error.hpp"
#include "vmocap/metrics.hpp"
#include "vmocap/serialize.hpp"

namespace vmocap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Rgba kFlatGray{128, 128, 128, 255};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_atomic(const fs::path& path, const std::string& text) {
  write_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

bool valid_path_component(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  return std::none_of(s.begin(), s.end(), [](char c) { return c == '/' || c == '\\' || c == '\0'; });
}

bool same_topology(const Skeleton& a, const Skeleton& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.joints[i].name != b.joints[i].name || a.joints[i].parent != b.joints[i].parent) return false;
  }
  return true;
}

bool matrices_close(const Mat4& a, const Mat4& b) {
  return ((a - b).cwiseAbs().array() <= 1e-9 * (1.0 + b.cwiseAbs().array())).all();
}

std::string annotation_text(const SampleRecord& record) { return record_to_json(record).dump(1) + "\n"; }

}  // namespace

ClipRig plan_rig(const AnimationClip& clip, const RigConfig& config) {
  validate_clip(clip);
  std::vector<WorldPose> poses;
  poses.reserve(clip.frames.size());
  Vec3 centroid = Vec3::Zero();
  for (const auto& frame : clip.frames) {
    poses.push_back(forward_kinematics(clip.skeleton, frame));
    centroid += poses.back().positions[0];
  }
  centroid /= static_cast<double>(poses.size());

  double extent = 0.0;
  for (const auto& pose : poses) {
    for (const auto& p : pose.positions) extent = std::max(extent, (p - centroid).norm());
  }

  ClipRig rig;
  rig.center = centroid;
  rig.radius = config.radius.value_or(config.radius_factor * extent);
  rig.height = config.height.value_or(config.height_factor * extent);
  if (!(rig.radius > 0.0)) {
    throw ValidationError("cannot size the camera rig automatically for a clip with zero extent; set rig.radius");
  }
  rig.cameras = build_ring_rig(rig.center, rig.radius, rig.height, config.count, config.intrinsics);
  return rig;
}

std::vector<Camera> cameras_for_frame(const ClipRig& rig, const RigConfig& config, const WorldPose& pose) {
  if (!config.track_root) return rig.cameras;
  const Vec3 shift = pose.positions.at(0) - rig.center;
  std::vector<Camera> out = rig.cameras;
  for (auto& cam : out) {
    cam.extrinsics.eye += shift;
    cam.extrinsics.focal_point += shift;
  }
  return out;
}

std::vector<Vec3> SampleRecord::absolute_joints_view() const {
  if (!root_view) return joints3d_view;
  std::vector<Vec3> out = joints3d_view;
  for (auto& p : out) p += *root_view;
  return out;
}

json camera_to_json(const Camera& camera) {
  json j = to_json(camera.intrinsics);
  j["id"] = camera.id;
  j["eye"] = to_json(camera.extrinsics.eye);
  j["focal_point"] = to_json(camera.extrinsics.focal_point);
  j["up"] = to_json(camera.extrinsics.up);
  return j;
}

Camera camera_from_json(const json& j) {
  Camera c;
  c.id = j.at("id").get<std::string>();
  c.extrinsics.eye = vec3_from_json(j.at("eye"));
  c.extrinsics.focal_point = vec3_from_json(j.at("focal_point"));
  c.extrinsics.up = vec3_from_json(j.at("up"));
  c.intrinsics = intrinsics_from_json(j);
  return c;
}

json record_to_json(const SampleRecord& r) {
  json kps = json::array();
  for (const auto& k : r.keypoints2d) kps.push_back({k.x, k.y, k.visible ? 1 : 0});
  json joints = json::array();
  for (const auto& p : r.joints3d_view) joints.push_back(to_json(p));
  json cam = camera_to_json(r.camera);
  cam["view_matrix"] = to_json(r.view_matrix);
  cam["projection_matrix"] = to_json(r.projection_matrix);

  json doc = {{"clip_id", r.clip_id},
              {"frame_index", r.frame_index},
              {"camera_id", r.camera_id},
              {"image", r.image_path},
              {"keypoints2d", std::move(kps)},
              {"joints3d_view", std::move(joints)},
              {"camera", std::move(cam)}};
  if (r.root_view) doc["root_view"] = to_json(*r.root_view);
  if (r.augmentation) doc["augmentation"] = to_json(*r.augmentation);
  return doc;
}

SampleRecord record_from_json(const json& doc) {
  SampleRecord r;
  r.clip_id = doc.at("clip_id").get<std::string>();
  r.frame_index = doc.at("frame_index").get<std::size_t>();
  r.camera_id = doc.at("camera_id").get<std::string>();
  r.image_path = doc.at("image").get<std::string>();
  for (const auto& k : doc.at("keypoints2d")) {
    if (!k.is_array() || k.size() != 3) throw ParseError("keypoint rows must be [x, y, v]", 0);
    r.keypoints2d.push_back({k[0].get<double>(), k[1].get<double>(), k[2].get<int>() != 0});
  }
  for (const auto& p : doc.at("joints3d_view")) r.joints3d_view.push_back(vec3_from_json(p));
  const json& cam = doc.at("camera");
  r.camera = camera_from_json(cam);
  r.view_matrix = mat4_from_json(cam.at("view_matrix"));
  r.projection_matrix = mat4_from_json(cam.at("projection_matrix"));
  if (doc.contains("root_view")) r.root_view = vec3_from_json(doc.at("root_view"));
  if (doc.contains("augmentation")) r.augmentation = applied_augmentation_from_json(doc.at("augmentation"));
  return r;
}

json manifest_to_json(const Manifest& m) {
  json clips = json::array();
  for (const auto& c : m.clips) {
    json cams = json::array();
    for (const auto& cam : c.cameras) cams.push_back(camera_to_json(cam));
    clips.push_back({{"id", c.id},
                     {"source", c.source},
                     {"frame_count", c.frame_count},
                     {"frame_time", c.frame_time},
                     {"split", c.split},
                     {"rig", {{"center", to_json(c.rig_center)}, {"radius", c.rig_radius}, {"height", c.rig_height}}},
                     {"cameras", std::move(cams)}});
  }
  json aug = to_json(m.augmentation);
  aug["baked"] = m.augmentation_baked;
  return {{"format_version", m.format_version},
          {"skeleton", to_json(m.skeleton)},
          {"camera_count", m.camera_count},
          {"intrinsics", to_json(m.intrinsics)},
          {"track_root", m.track_root},
          {"root_relative", m.root_relative},
          {"seed", m.seed},
          {"augmentation", std::move(aug)},
          {"split_ratios", m.split_ratios},
          {"count_formula", "sum(clip.frame_count) * camera_count"},
          {"total_samples", m.total_samples},
          {"clips", std::move(clips)},
          {"annotation_digests", m.annotation_digests}};
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kDatasetFormatVersion) {
    throw ParseError("unsupported dataset format_version " + std::to_string(m.format_version), 0);
  }
  m.skeleton = skeleton_from_json(j.at("skeleton"));
  m.camera_count = j.at("camera_count").get<std::size_t>();
  m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
  m.track_root = j.at("track_root").get<bool>();
  m.root_relative = j.at("root_relative").get<bool>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.augmentation = augmentation_spec_from_json(j.at("augmentation"));
  m.augmentation_baked = j.at("augmentation").at("baked").get<bool>();
  m.split_ratios = j.at("split_ratios").get<std::array<double, 3>>();
  m.total_samples = j.at("total_samples").get<std::size_t>();
  for (const auto& c : j.at("clips")) {
    ClipEntry e;
    e.id = c.at("id").get<std::string>();
    e.source = c.at("source").get<std::string>();
    e.frame_count = c.at("frame_count").get<std::size_t>();
    e.frame_time = c.at("frame_time").get<double>();
    e.split = c.at("split").get<std::string>();
    e.rig_center = vec3_from_json(c.at("rig").at("center"));
    e.rig_radius = c.at("rig").at("radius").get<double>();
    e.rig_height = c.at("rig").at("height").get<double>();
    for (const auto& cam : c.at("cameras")) e.cameras.push_back(camera_from_json(cam));
    if (!valid_path_component(e.id)) throw ParseError("invalid clip id '" + e.id + "'", 0);
    for (const auto& cam : e.cameras) {
      if (!valid_path_component(cam.id)) throw ParseError("invalid camera id '" + cam.id + "'", 0);
    }
    m.clips.push_back(std::move(e));
  }
  m.annotation_digests = j.at("annotation_digests").get<std::map<std::string, std::string>>();
  return m;
}

std::size_t total_sample_count(std::span<const std::size_t> frame_counts, std::size_t camera_count) {
  std::size_t frames = 0;
  for (std::size_t f : frame_counts) frames += f;
  return frames * camera_count;
}

std::string frame_name(std::size_t frame) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%06zu", frame);
  return buf;
}

std::string sample_id(const SampleKey& key) {
  return key.clip_id + "/" + key.camera_id + "/" + frame_name(key.frame);
}

fs::path image_relpath(const SampleKey& key) {
  return fs::path("images") / key.clip_id / key.camera_id / (frame_name(key.frame) + ".png");
}

fs::path annotation_relpath(const SampleKey& key) {
  return fs::path("ann") / key.clip_id / key.camera_id / (frame_name(key.frame) + ".json");
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    default: return "test";
  }
}

std::vector<Split> split_dataset(std::span<const std::string> clip_ids, const std::array<double, 3>& ratios,
                                 std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("split ratios must be nonnegative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
  const std::size_t n = clip_ids.size();
  const auto nonzero = static_cast<std::size_t>(std::count_if(ratios.begin(), ratios.end(), [](double r) { return r > 0.0; }));
  if (n < nonzero) {
    throw ValidationError("need at least " + std::to_string(nonzero) + " clips for the requested splits, have " +
                          std::to_string(n));
  }

  // Largest-remainder apportionment, at least one clip per nonzero split.
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double ideal = ratios[s] * static_cast<double>(n);
    counts[s] = static_cast<std::size_t>(std::floor(ideal));
    remainder[s] = ideal - std::floor(ideal);
    if (ratios[s] > 0.0 && counts[s] == 0) {
      counts[s] = 1;
      remainder[s] = -1.0;
    }
    assigned += counts[s];
  }
  while (assigned < n) {
    const auto s = static_cast<std::size_t>(std::max_element(remainder.begin(), remainder.end()) - remainder.begin());
    ++counts[s];
    remainder[s] = -2.0;
    ++assigned;
  }
  while (assigned > n) {
    const auto s = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    --counts[s];
    --assigned;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto rank = [&](std::size_t i) { return splitmix64(seed ^ fnv1a64(clip_ids[i])); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : clip_ids[a] < clip_ids[b];
  });

  std::vector<Split> out(n, Split::Train);
  std::size_t pos = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t k = 0; k < counts[s]; ++k) out[order[pos++]] = static_cast<Split>(s);
  }
  return out;
}

struct BackgroundPool::Impl {
  std::vector<fs::path> files;
  int width = 0;
  int height = 0;
  std::function<void(const std::string&)> warn;
  Image flat;
  mutable std::mutex mutex;
  mutable std::vector<std::unique_ptr<Image>> cache;
};

BackgroundPool::BackgroundPool(const std::optional<fs::path>& dir, int width, int height,
                               std::function<void(const std::string&)> warn)
    : impl_(std::make_unique<Impl>()) {
  impl_->width = width;
  impl_->height = height;
  impl_->warn = std::move(warn);
  impl_->flat = Image(width, height, kFlatGray);
  if (!dir) return;

  std::error_code ec;
  fs::directory_iterator it(*dir, ec);
  if (ec) {
    if (impl_->warn) impl_->warn("background directory " + dir->string() + " is unreadable (" + ec.message() +
                                 "); using flat gray backgrounds");
    return;
  }
  for (const auto& entry : it) {
    if (!entry.is_regular_file(ec)) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") impl_->files.push_back(entry.path());
  }
  std::sort(impl_->files.begin(), impl_->files.end());
  impl_->cache.resize(impl_->files.size());
  if (impl_->files.empty() && impl_->warn) {
    impl_->warn("background directory " + dir->string() + " holds no PNG/JPEG files; using flat gray backgrounds");
  }
}

BackgroundPool::~BackgroundPool() = default;

std::size_t BackgroundPool::size() const { return impl_->files.size(); }

const Image& BackgroundPool::pick(std::uint64_t seed, const SampleKey& key) const {
  if (impl_->files.empty()) return impl_->flat;
  CounterRng rng(seed, key, RngStream::Background);
  const std::size_t idx = rng.below(impl_->files.size());
  std::lock_guard lock(impl_->mutex);
  auto& slot = impl_->cache[idx];
  if (!slot) {
    try {
      slot = std::make_unique<Image>(scale_nearest(read_image(impl_->files[idx]), impl_->width, impl_->height));
    } catch (const Error& e) {
      if (impl_->warn) impl_->warn(std::string(e.what()) + "; using flat gray instead");
      slot = std::make_unique<Image>(impl_->flat);
    }
  }
  return *slot;
}

GeneratedSample make_sample(const NamedClip& clip, const ClipRig& rig, std::size_t frame, std::size_t camera_index,
                            const GenerateOptions& options, const BackgroundPool* backgrounds) {
  const Skeleton& skeleton = clip.clip.skeleton;
  const WorldPose pose = forward_kinematics(skeleton, clip.clip.frames.at(frame));
  const Camera camera = cameras_for_frame(rig, options.rig, pose).at(camera_index);
  const CameraIntrinsics& intr = camera.intrinsics;

  GeneratedSample out;
  SampleRecord& r = out.record;
  r.clip_id = clip.id;
  r.frame_index = frame;
  r.camera_id = camera.id;
  r.image_path = image_relpath(r.key()).generic_string();
  r.camera = camera;
  r.view_matrix = view_matrix(camera.extrinsics);
  r.projection_matrix = projection_matrix(intr);

  ProjectedJoints projected = project_joints(pose.positions, r.view_matrix, r.projection_matrix, intr);
  const Image foreground = render_projected(skeleton, projected, intr, options.style);
  Image image = backgrounds ? composite(foreground, backgrounds->pick(options.seed, r.key()))
                            : composite(foreground, Image(intr.image_width, intr.image_height, kFlatGray));
  r.keypoints2d = std::move(projected.keypoints);

  if (options.bake_augmentation) {
    const AppliedAugmentation params = sample_params(options.augmentation, options.seed, r.key());
    AugmentedSample aug = apply_geometric(image, r.keypoints2d, params, options.augmentation.flip_pairs);
    CounterRng noise(options.seed, r.key(), RngStream::Photometric);
    image = apply_photometric(aug.image, params, noise);
    r.keypoints2d = std::move(aug.keypoints);
    r.augmentation = params;
  }
  if (options.augmentation.grayscale) image = to_grayscale(image);

  if (options.root_relative) {
    r.root_view = projected.joints_view.at(0);
    r.joints3d_view = to_root_relative(projected.joints_view);
  } else {
    r.joints3d_view = std::move(projected.joints_view);
  }
  out.image = std::move(image);
  return out;
}

std::vector<SampleKey> manifest_keys(const Manifest& manifest) {
  std::vector<SampleKey> keys;
  keys.reserve(manifest.total_samples);
  for (const auto& c : manifest.clips) {
    for (std::size_t f = 0; f < c.frame_count; ++f) {
      for (const auto& cam : c.cameras) keys.push_back({c.id, f, cam.id});
    }
  }
  return keys;
}

Manifest generate_dataset(const std::vector<NamedClip>& clips, const GenerateOptions& options) {
  if (clips.empty()) throw ValidationError("generate_dataset needs at least one clip");
  if (options.workers < 1) throw ValidationError("worker count must be at least 1");
  if (options.output.empty()) throw ValidationError("output path is empty");
  std::unordered_set<std::string> ids;
  for (const auto& c : clips) {
    if (!valid_path_component(c.id)) throw ValidationError("invalid clip id '" + c.id + "'");
    if (!ids.insert(c.id).second) throw ValidationError("duplicate clip id '" + c.id + "'");
    validate_clip(c.clip);
    if (!same_topology(c.clip.skeleton, clips.front().clip.skeleton)) {
      throw ValidationError("clip '" + c.id + "' uses a different skeleton than '" + clips.front().id + "'");
    }
  }
  const Skeleton& skeleton = clips.front().clip.skeleton;
  validate(options.augmentation, skeleton.size());
  validate(options.rig.intrinsics);

  Manifest manifest;
  manifest.skeleton = skeleton;
  manifest.camera_count = static_cast<std::size_t>(options.rig.count);
  manifest.intrinsics = options.rig.intrinsics;
  manifest.track_root = options.rig.track_root;
  manifest.root_relative = options.root_relative;
  manifest.seed = options.seed;
  manifest.augmentation = options.augmentation;
  manifest.augmentation_baked = options.bake_augmentation;
  manifest.split_ratios = options.split;

  std::vector<std::string> clip_ids;
  for (const auto& c : clips) clip_ids.push_back(c.id);
  const auto splits = split_dataset(clip_ids, options.split, options.seed);

  std::vector<ClipRig> rigs;
  std::vector<std::size_t> frame_counts;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    rigs.push_back(plan_rig(clips[i].clip, options.rig));
    ClipEntry e;
    e.id = clips[i].id;
    e.source = clips[i].source;
    e.frame_count = clips[i].clip.frames.size();
    e.frame_time = clips[i].clip.frame_time;
    e.split = std::string(split_name(splits[i]));
    e.rig_center = rigs.back().center;
    e.rig_radius = rigs.back().radius;
    e.rig_height = rigs.back().height;
    e.cameras = rigs.back().cameras;
    frame_counts.push_back(e.frame_count);
    manifest.clips.push_back(std::move(e));
  }
  manifest.total_samples = total_sample_count(frame_counts, manifest.camera_count);

  struct Job {
    std::size_t clip, frame, camera;
  };
  std::vector<Job> jobs;
  jobs.reserve(manifest.total_samples);
  for (std::size_t c = 0; c < clips.size(); ++c) {
    for (std::size_t f = 0; f < frame_counts[c]; ++f) {
      for (std::size_t k = 0; k < manifest.camera_count; ++k) jobs.push_back({c, f, k});
    }
  }
  const auto keys = manifest_keys(manifest);

  const fs::path& root = options.output;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
  for (const auto& c : manifest.clips) {
    for (const auto& cam : c.cameras) {
      fs::create_directories(root / "images" / c.id / cam.id, ec);
      if (!ec) fs::create_directories(root / "ann" / c.id / cam.id, ec);
      if (ec) throw IoError("cannot create sample directories under " + root.string() + ": " + ec.message());
    }
  }

  std::vector<std::optional<std::uint64_t>> digests(jobs.size());
  const fs::path journal_path = root / "journal.txt";
  if (options.resume && fs::exists(journal_path)) {
    std::set<std::string> done;
    std::ifstream in(journal_path);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) done.insert(line);
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (!done.count(sample_id(keys[i]))) continue;
      const fs::path ann = root / annotation_relpath(keys[i]);
      if (fs::exists(ann) && fs::exists(root / image_relpath(keys[i]))) digests[i] = fnv1a64(read_bytes(ann));
    }
  } else {
    fs::remove(journal_path, ec);
  }
  std::ofstream journal(journal_path, std::ios::app);
  if (!journal) throw IoError("cannot open journal " + journal_path.string());

  BackgroundPool backgrounds(options.background_dir, options.rig.intrinsics.image_width,
                             options.rig.intrinsics.image_height, options.warn);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;
  std::string first_error;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      if (digests[i]) continue;
      try {
        const Job& job = jobs[i];
        const GeneratedSample sample =
            make_sample(clips[job.clip], rigs[job.clip], job.frame, job.camera, options, &backgrounds);
        write_atomic(root / sample.record.image_path, encode_png(sample.image, false));
        const std::string text = annotation_text(sample.record);
        write_atomic(root / annotation_relpath(keys[i]), text);
        digests[i] = fnv1a64(text);
        std::lock_guard lock(mutex);
        journal << sample_id(keys[i]) << '\n' << std::flush;
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        if (!failed.exchange(true)) first_error = sample_id(keys[i]) + ": " + e.what();
      }
    }
  };

  if (options.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < options.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed) throw IoError("generation aborted, journal kept at " + journal_path.string() + ": " + first_error);

  for (std::size_t i = 0; i < keys.size(); ++i) manifest.annotation_digests[sample_id(keys[i])] = hex64(*digests[i]);
  write_atomic(root / "manifest.json", manifest_to_json(manifest).dump(1) + "\n");
  journal.close();
  fs::remove(journal_path, ec);
  return manifest;
}

Manifest read_manifest(const fs::path& root) {
  const fs::path path = root / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError("corrupt manifest " + path.string() + ": " + e.what(), 0);
  }
}

DatasetReader::DatasetReader(fs::path root) : root_(std::move(root)) {
  manifest_ = read_manifest(root_);
  keys_ = manifest_keys(manifest_);
}

std::optional<SampleRecord> DatasetReader::next() {
  while (cursor_ < keys_.size()) {
    const SampleKey& key = keys_[cursor_++];
    const std::string id = sample_id(key);
    const fs::path ann = root_ / annotation_relpath(key);
    std::ifstream in(ann, std::ios::binary);
    if (!in) {
      diagnostics_.push_back({id, "missing annotation " + ann.string()});
      continue;
    }
    SampleRecord record;
    try {
      record = record_from_json(json::parse(in));
    } catch (const std::exception& e) {
      diagnostics_.push_back({id, std::string("unreadable annotation: ") + e.what()});
      continue;
    }
    if (!fs::exists(root_ / record.image_path)) {
      diagnostics_.push_back({id, "missing image " + (root_ / record.image_path).string()});
    }
    return record;
  }
  return std::nullopt;
}

DatasetReader read_dataset(const fs::path& root) { return DatasetReader(root); }

ValidationReport validate_dataset(const fs::path& root) {
  ValidationReport report;
  auto violation = [&](const std::string& sample, const char* rule, std::string msg) {
    report.violations.push_back({sample, rule, std::move(msg)});
  };

  Manifest manifest;
  try {
    manifest = read_manifest(root);
  } catch (const std::exception& e) {
    violation("manifest", "manifest", e.what());
    return report;
  }

  std::vector<std::size_t> frame_counts;
  for (const auto& c : manifest.clips) {
    frame_counts.push_back(c.frame_count);
    if (c.cameras.size() != manifest.camera_count) {
      violation(c.id, "camera_count",
                "clip lists " + std::to_string(c.cameras.size()) + " cameras, manifest declares " +
                    std::to_string(manifest.camera_count));
    }
  }
  const std::size_t expected = total_sample_count(frame_counts, manifest.camera_count);
  if (manifest.total_samples != expected) {
    violation("manifest", "sample_count",
              "total_samples is " + std::to_string(manifest.total_samples) + ", clips imply " +
                  std::to_string(expected));
  }
  const auto keys = manifest_keys(manifest);
  if (manifest.annotation_digests.size() != keys.size()) {
    violation("manifest", "sample_count",
              std::to_string(manifest.annotation_digests.size()) + " annotation digests for " +
                  std::to_string(keys.size()) + " samples");
  }

  const std::size_t joints = manifest.skeleton.size();
  for (const auto& key : keys) {
    const std::string id = sample_id(key);
    ++report.samples_checked;

    std::vector<std::uint8_t> bytes;
    try {
      bytes = read_bytes(root / annotation_relpath(key));
    } catch (const IoError&) {
      violation(id, "missing_annotation", "annotation file is missing");
      continue;
    }
    const auto digest = manifest.annotation_digests.find(id);
    if (digest == manifest.annotation_digests.end()) {
      violation(id, "digest", "no digest recorded in the manifest");
    } else if (digest->second != hex64(fnv1a64(bytes))) {
      violation(id, "digest", "annotation bytes do not match the manifest digest");
    }

    SampleRecord r;
    try {
      r = record_from_json(json::parse(bytes.begin(), bytes.end()));
    } catch (const std::exception& e) {
      violation(id, "annotation_parse", e.what());
      continue;
    }

    if (!(r.key() == key)) violation(id, "identity", "annotation identifies itself as " + sample_id(r.key()));
    if (r.image_path != image_relpath(key).generic_string()) {
      violation(id, "identity", "image path '" + r.image_path + "' does not match the layout");
    }
    if (r.keypoints2d.size() != joints) {
      violation(id, "joint_count",
                std::to_string(r.keypoints2d.size()) + " 2D keypoints, skeleton has " + std::to_string(joints));
    }
    if (r.joints3d_view.size() != joints) {
      violation(id, "joint_count",
                std::to_string(r.joints3d_view.size()) + " 3D joints, skeleton has " + std::to_string(joints));
    }
    if (!(r.camera.intrinsics == manifest.intrinsics)) {
      violation(id, "camera", "camera intrinsics differ from the manifest");
    }
    bool camera_ok = true;
    try {
      if (!matrices_close(r.view_matrix, view_matrix(r.camera.extrinsics))) {
        violation(id, "camera", "view matrix does not match eye/focal_point/up");
        camera_ok = false;
      }
      if (!matrices_close(r.projection_matrix, projection_matrix(r.camera.intrinsics))) {
        violation(id, "camera", "projection matrix does not match the intrinsics");
        camera_ok = false;
      }
    } catch (const ValidationError& e) {
      violation(id, "camera", e.what());
      camera_ok = false;
    }

    if (camera_ok && !r.augmentation && r.keypoints2d.size() == joints && r.joints3d_view.size() == joints) {
      const auto err = reprojection_error(r);
      for (std::size_t j = 0; j < joints; ++j) {
        if (err.per_joint[j] && *err.per_joint[j] > kReprojectionTolerancePx) {
          violation(id, "reprojection",
                    "joint '" + manifest.skeleton.joints[j].name + "' reprojects " +
                        std::to_string(*err.per_joint[j]) + " px from its keypoint");
        }
      }
      const auto view = r.absolute_joints_view();
      for (std::size_t j = 0; j < joints; ++j) {
        const Keypoint2D kp = view_to_image(view[j], r.projection_matrix, r.camera.intrinsics);
        if (kp.visible != r.keypoints2d[j].visible) {
          violation(id, "visibility", "joint '" + manifest.skeleton.joints[j].name + "' has the wrong visibility flag");
        }
      }
    }

    try {
      const Image image = read_image(root / r.image_path);
      if (image.width != manifest.intrinsics.image_width || image.height != manifest.intrinsics.image_height) {
        violation(id, "image", "image is " + std::to_string(image.width) + "x" + std::to_string(image.height));
      }
    } catch (const IoError& e) {
      violation(id, "image", e.what());
    }
  }
  return report;
}

json export_coco(const fs::path& root) {
  DatasetReader reader(root);
  const Manifest& m = reader.manifest();
  json images = json::array();
  json annotations = json::array();
  std::size_t id = 0;
  while (auto r = reader.next()) {
    ++id;
    images.push_back({{"id", id},
                      {"file_name", r->image_path},
                      {"width", r->camera.intrinsics.image_width},
                      {"height", r->camera.intrinsics.image_height}});
    json kps = json::array();
    std::size_t visible = 0;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    for (const auto& k : r->keypoints2d) {
      if (k.visible) {
        if (visible == 0) {
          x0 = x1 = k.x;
          y0 = y1 = k.y;
        }
        x0 = std::min(x0, k.x);
        x1 = std::max(x1, k.x);
        y0 = std::min(y0, k.y);
        y1 = std::max(y1, k.y);
        ++visible;
        kps.insert(kps.end(), {k.x, k.y, 2});
      } else {
        kps.insert(kps.end(), {0, 0, 0});
      }
    }
    annotations.push_back({{"id", id},
                           {"image_id", id},
                           {"category_id", 1},
                           {"keypoints", std::move(kps)},
                           {"num_keypoints", visible},
                           {"bbox", {x0, y0, x1 - x0, y1 - y0}},
                           {"area", (x1 - x0) * (y1 - y0)},
                           {"iscrowd", 0}});
  }
  json bones = json::array();
  for (std::size_t j = 0; j < m.skeleton.size(); ++j) {
    if (m.skeleton.joints[j].parent) bones.push_back({*m.skeleton.joints[j].parent + 1, j + 1});
  }
  return {{"images", std::move(images)},
          {"annotations", std::move(annotations)},
          {"categories", json::array({{{"id", 1},
                                       {"name", "animal"},
                                       {"keypoints", m.skeleton.joint_names()},
                                       {"skeleton", std::move(bones)}}})}};
}

}  // namespace vmocap
