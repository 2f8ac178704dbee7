#include "vmocap/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "vmocap/demo.hpp"
#include "vmocap/error.hpp"

namespace vmocap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_vec(const Vec3& v) { return "(" + fmt(v.x()) + ", " + fmt(v.y()) + ", " + fmt(v.z()) + ")"; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

NamedClip named_clip(const fs::path& path) {
  NamedClip c;
  c.id = path.stem().string();
  c.source = path.string();
  c.clip = load_clip(path);
  return c;
}

}  // namespace

int cmd_generate(const RunConfig& config, bool resume, std::ostream& out, std::ostream& err) {
  if (config.clips.empty()) throw ValidationError("no input clips: set \"clips\" in the config or pass --clip");
  const auto clips = load_clips(resolve_clip_paths(config.clips));
  GenerateOptions options = to_generate_options(config, clips.front().clip.skeleton);
  options.resume = resume;
  options.warn = [&err](const std::string& m) { err << "warning: " << m << "\n"; };
  const auto nonzero = static_cast<std::size_t>(
      std::count_if(options.split.begin(), options.split.end(), [](double r) { return r > 0.0; }));
  if (!config.split_explicit && clips.size() < nonzero) {
    options.warn(std::to_string(clips.size()) + " clip(s) cannot fill the default train/val/test split; all go to train");
    options.split = {1.0, 0.0, 0.0};
  }
  const Manifest m = generate_dataset(clips, options);
  out << "wrote " << m.total_samples << " samples (" << m.clips.size() << " clips x " << m.camera_count
      << " cameras) to " << options.output.string() << "\n";
  return kExitOk;
}

int cmd_validate(const fs::path& dataset, std::ostream& out) {
  const ValidationReport report = validate_dataset(dataset);
  for (const auto& v : report.violations) {
    out << (v.sample.empty() ? std::string("<dataset>") : v.sample) << ": " << v.rule << ": " << v.message << "\n";
  }
  out << report.samples_checked << " samples checked, " << report.violations.size() << " violations\n";
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_stats(const fs::path& path, std::ostream& out) {
  if (fs::is_directory(path)) {
    const Manifest m = read_manifest(path);
    std::map<std::string, std::pair<std::size_t, std::size_t>> splits;  // clips, samples
    std::size_t frames = 0;
    for (const auto& c : m.clips) {
      auto& s = splits[c.split];
      s.first += 1;
      s.second += c.frame_count * m.camera_count;
      frames += c.frame_count;
    }
    out << "dataset:        " << path.string() << "\n"
        << "format_version: " << m.format_version << "\n"
        << "joints:         " << m.skeleton.size() << "\n"
        << "clips:          " << m.clips.size() << "\n"
        << "frames:         " << frames << "\n"
        << "cameras:        " << m.camera_count << "\n"
        << "samples:        " << m.total_samples << "\n"
        << "image:          " << m.intrinsics.image_width << "x" << m.intrinsics.image_height << ", fov "
        << fmt(m.intrinsics.vertical_fov, 2) << " deg\n"
        << "seed:           " << m.seed << "\n"
        << "augmentation:   " << (m.augmentation_baked ? "baked" : "parameters only") << "\n";
    for (const auto& [name, s] : splits) {
      out << "split " << name << ": " << s.first << " clips, " << s.second << " samples\n";
    }
    return kExitOk;
  }
  const AnimationClip clip = load_clip(path);
  const ClipStats s = clip_stats(clip);
  std::size_t end_sites = 0;
  for (const auto& j : clip.skeleton.joints) end_sites += j.channels.empty() ? 1 : 0;
  out << "clip:       " << path.string() << "\n"
      << "joints:     " << s.joint_count << " (" << end_sites << " without channels)\n"
      << "channels:   " << clip.skeleton.channel_count() << "\n"
      << "frames:     " << s.frame_count << "\n"
      << "frame_time: " << fmt(clip.frame_time, 6) << " s\n"
      << "duration:   " << fmt(s.duration, 3) << " s\n"
      << "root_min:   " << fmt_vec(s.root_min) << "\n"
      << "root_max:   " << fmt_vec(s.root_max) << "\n";
  return kExitOk;
}

int cmd_eval(const fs::path& dataset, const fs::path& predictions, const EvalOptions& options, bool as_json,
             std::ostream& out) {
  DatasetReader reader(dataset);
  std::vector<SampleRecord> gt;
  while (auto r = reader.next()) gt.push_back(std::move(*r));
  std::ifstream in(predictions);
  if (!in) throw IoError("cannot open predictions " + predictions.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("predictions are not valid JSON: ") + e.what(), 0);
  }
  const auto preds = predictions_from_json(doc);
  const EvalReport report = evaluate(gt, preds, options, reader.manifest().skeleton.joint_names());
  if (as_json) {
    out << report_to_json(report).dump(2) << "\n";
  } else {
    out << report_table(report);
  }
  return kExitOk;
}

int cmd_preview(const fs::path& clip_path, std::size_t frame, std::size_t camera_index, const RunConfig& config,
                const fs::path& image_out, std::ostream& out, std::ostream& err) {
  const NamedClip clip = named_clip(clip_path);
  if (frame >= clip.clip.frames.size()) {
    throw ValidationError("frame " + std::to_string(frame) + " out of range (clip has " +
                          std::to_string(clip.clip.frames.size()) + " frames)");
  }
  if (camera_index >= static_cast<std::size_t>(config.rig.count)) {
    throw ValidationError("camera " + std::to_string(camera_index) + " out of range (rig has " +
                          std::to_string(config.rig.count) + " cameras)");
  }
  GenerateOptions options = to_generate_options(config, clip.clip.skeleton);
  options.warn = [&err](const std::string& m) { err << "warning: " << m << "\n"; };
  const ClipRig rig = plan_rig(clip.clip, options.rig);
  const BackgroundPool backgrounds(options.background_dir, options.rig.intrinsics.image_width,
                                   options.rig.intrinsics.image_height, options.warn);
  GeneratedSample s = make_sample(clip, rig, frame, camera_index, options, &backgrounds);
  s.record.image_path = image_out.filename().string();
  if (image_out.has_parent_path()) fs::create_directories(image_out.parent_path());
  write_png(s.image, image_out, false);
  fs::path ann = image_out;
  ann.replace_extension(".json");
  write_text(ann, record_to_json(s.record).dump(1) + "\n");
  std::size_t visible = 0;
  for (const auto& k : s.record.keypoints2d) visible += k.visible ? 1 : 0;
  out << "wrote " << image_out.string() << " and " << ann.string() << " (" << visible << "/"
      << s.record.keypoints2d.size() << " joints visible from " << s.record.camera_id << ")\n";
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic multi-view pose dataset generator"};
  app.name("vmocap");
  app.require_subcommand(1);
  app.fallthrough(false);

  // generate
  auto* gen = app.add_subcommand("generate", "Render a dataset from animation clips");
  std::string gen_config;
  std::vector<std::string> gen_clips;
  std::string gen_out, gen_backgrounds;
  std::uint64_t gen_seed = 0;
  int gen_workers = 0;
  bool gen_resume = false, gen_bake = false, gen_no_bake = false;
  gen->add_option("-c,--config", gen_config, "Config file (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--clip", gen_clips, "Clip path or glob; replaces the config's clips");
  gen->add_option("-o,--out", gen_out, "Output directory");
  gen->add_option("--seed", gen_seed, "Master seed");
  std::vector<double> gen_split;
  gen->add_option("--split", gen_split, "Train, val and test ratios")->expected(3);
  gen->add_option("-j,--workers", gen_workers, "Worker threads")->check(CLI::PositiveNumber);
  gen->add_option("--backgrounds", gen_backgrounds, "Directory of background images")->check(CLI::ExistingDirectory);
  gen->add_flag("--resume", gen_resume, "Continue an interrupted run from its journal");
  auto* bake_flag = gen->add_flag("--bake", gen_bake, "Bake augmentation into stored images");
  gen->add_flag("--no-bake", gen_no_bake, "Store augmentation parameters only")->excludes(bake_flag);

  // validate
  auto* val = app.add_subcommand("validate", "Check a dataset's structure and annotation invariants");
  std::string val_path;
  val->add_option("dataset", val_path, "Dataset directory")->required()->check(CLI::ExistingDirectory);

  // stats
  auto* st = app.add_subcommand("stats", "Summarize a clip or dataset");
  std::string st_path;
  bool st_show_config = false;
  st->add_option("path", st_path, "Clip file or dataset directory")->check(CLI::ExistingPath);
  st->add_flag("--show-config", st_show_config, "Print the config schema with default values");

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions against a dataset");
  std::string ev_dataset, ev_preds;
  std::vector<double> ev_alphas;
  bool ev_no_align = false, ev_json = false;
  ev->add_option("dataset", ev_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("predictions", ev_preds, "Predictions JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--alpha", ev_alphas, "PCK thresholds as fractions of the box diagonal")
      ->check(CLI::PositiveNumber);
  ev->add_flag("--no-root-align", ev_no_align, "Skip the root-aligned MPJPE");
  ev->add_flag("--json", ev_json, "Print the report as JSON");

  // preview
  auto* pv = app.add_subcommand("preview", "Render one annotated sample");
  std::string pv_clip, pv_config, pv_out = "preview.png";
  std::size_t pv_frame = 0, pv_camera = 0;
  pv->add_option("clip", pv_clip, "Clip file")->required()->check(CLI::ExistingFile);
  pv->add_option("-f,--frame", pv_frame, "Frame index");
  pv->add_option("--camera", pv_camera, "Camera index in the ring");
  pv->add_option("-c,--config", pv_config, "Config file (JSON)")->check(CLI::ExistingFile);
  pv->add_option("-o,--out", pv_out, "Output PNG; the annotation goes next to it");

  // make-demo
  auto* md = app.add_subcommand("make-demo", "Write the built-in 37-joint quadruped walk clip");
  std::string md_out;
  std::size_t md_frames = 100;
  md->add_option("-o,--out", md_out, "Output file (.bvh or .json)")->required();
  md->add_option("--frames", md_frames, "Frame count")->check(CLI::PositiveNumber);

  // export-coco
  auto* cc = app.add_subcommand("export-coco", "Export 2D labels in COCO keypoints form");
  std::string cc_dataset, cc_out;
  cc->add_option("dataset", cc_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cc->add_option("-o,--out", cc_out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      RunConfig config = gen_config.empty() ? parse_config(json::object(), fs::path{}) : load_config(gen_config);
      if (!gen_clips.empty()) config.clips = gen_clips;
      if (!gen_out.empty()) config.output = gen_out;
      if (gen->count("--seed")) config.seed = gen_seed;
      if (!gen_split.empty()) {
        json patch = {{"split", gen_split}};
        config.split = parse_config(patch, fs::path{}).split;
        config.split_explicit = true;
      }
      if (gen_workers > 0) config.workers = gen_workers;
      if (!gen_backgrounds.empty()) config.background_dir = gen_backgrounds;
      if (gen_bake) config.bake_augmentation = true;
      if (gen_no_bake) config.bake_augmentation = false;
      return cmd_generate(config, gen_resume, out, err);
    }
    if (*val) return cmd_validate(val_path, out);
    if (*st) {
      if (st_show_config) {
        out << default_config_json().dump(2) << "\n";
        if (st_path.empty()) return kExitOk;
      }
      if (st_path.empty()) {
        err << "stats: a clip or dataset path is required\n";
        return kExitUsage;
      }
      return cmd_stats(st_path, out);
    }
    if (*ev) {
      EvalOptions options;
      if (!ev_alphas.empty()) options.pck_alphas = ev_alphas;
      options.root_aligned = !ev_no_align;
      return cmd_eval(ev_dataset, ev_preds, options, ev_json, out);
    }
    if (*pv) {
      const RunConfig config =
          pv_config.empty() ? parse_config(json::object(), fs::path{}) : load_config(pv_config);
      return cmd_preview(pv_clip, pv_frame, pv_camera, config, pv_out, out, err);
    }
    if (*md) {
      const AnimationClip clip = demo::walk_clip(md_frames);
      const fs::path path(md_out);
      std::ostringstream text;
      if (path.extension() == ".json") {
        write_clip(clip, text);
      } else {
        write_bvh(clip, text);
      }
      write_text(path, text.str());
      out << "wrote " << clip.skeleton.size() << "-joint clip with " << clip.frames.size() << " frames to " << md_out
          << "\n";
      return kExitOk;
    }
    if (*cc) {
      write_text(cc_out, export_coco(cc_dataset).dump(1) + "\n");
      out << "wrote " << cc_out << "\n";
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace vmocap
