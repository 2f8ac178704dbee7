#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vmocap/cli.hpp"
#include "vmocap/dataset.hpp"
#include "vmocap/metrics.hpp"

using namespace vmocap;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vmocap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Demo clip plus a small-image config in `dir`.
fs::path small_setup(const TempDir& dir) {
  EXPECT_EQ(cli({"make-demo", "-o", (dir / "walk.bvh").string(), "--frames", "3"}).code, 0);
  std::ofstream(dir / "cfg.json") << R"({"clips": ["walk.bvh"],
    "rig": {"count": 3, "width": 80, "height_px": 60},
    "render": {"joint_radius": 1.5, "bone_thickness": 1.0},
    "output": "ds"})";
  return dir / "cfg.json";
}

}  // namespace

TEST(Cli, HelpForEverySubcommand) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  for (const char* sub : {"generate", "validate", "stats", "eval", "preview", "make-demo", "export-coco"}) {
    const CliResult r = cli({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"validate", ".", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"generate", "--workers", "-3"}).code, 2);
  EXPECT_EQ(cli({"validate", "/definitely/not/here"}).code, 2);
  EXPECT_EQ(cli({"generate"}).code, 2);
}

TEST(Cli, GenerateThenValidate) {
  TempDir dir("cli_gen");
  const fs::path cfg = small_setup(dir);
  const CliResult g = cli({"generate", "--config", cfg.string(), "--out", (dir / "D").string()});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(g.out.find("9 samples"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "ds"));
  const CliResult v = cli({"validate", (dir / "D").string()});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_NE(v.out.find("0 violations"), std::string::npos);

  const CliResult s = cli({"stats", (dir / "D").string()});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("samples:        9"), std::string::npos);
  const CliResult cs = cli({"stats", (dir / "walk.bvh").string()});
  EXPECT_EQ(cs.code, 0);
  EXPECT_NE(cs.out.find("joints:     37"), std::string::npos);
}

TEST(Cli, ValidateFlagsDeletedImage) {
  TempDir dir("cli_del");
  const fs::path cfg = small_setup(dir);
  ASSERT_EQ(cli({"generate", "-c", cfg.string()}).code, 0);
  fs::remove(dir / "ds/images/walk/cam01/000002.png");
  const CliResult v = cli({"validate", (dir / "ds").string()});
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.out.find("walk/cam01/000002"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfigAndWorkersDoNotChangeOutput) {
  TempDir dir("cli_workers");
  const fs::path cfg = small_setup(dir);
  ASSERT_EQ(cli({"generate", "-c", cfg.string(), "-o", (dir / "one").string(), "-j", "1", "--bake"}).code, 0);
  ASSERT_EQ(cli({"generate", "-c", cfg.string(), "-o", (dir / "four").string(), "-j", "4", "--bake"}).code, 0);
  const Manifest a = read_manifest(dir / "one");
  const Manifest b = read_manifest(dir / "four");
  EXPECT_TRUE(a.augmentation_baked);
  EXPECT_EQ(a.annotation_digests, b.annotation_digests);
  ASSERT_EQ(cli({"generate", "-c", cfg.string(), "-o", (dir / "seeded").string(), "--seed", "9"}).code, 0);
  EXPECT_EQ(read_manifest(dir / "seeded").seed, 9u);
}

TEST(Cli, EvalWithGroundTruthPredictions) {
  TempDir dir("cli_eval");
  const fs::path cfg = small_setup(dir);
  ASSERT_EQ(cli({"generate", "-c", cfg.string()}).code, 0);
  std::vector<SampleRecord> gt;
  DatasetReader reader(dir / "ds");
  while (auto r = reader.next()) gt.push_back(*r);
  std::ofstream(dir / "preds.json") << predictions_to_json(predictions_from_records(gt)).dump();
  const CliResult table = cli({"eval", (dir / "ds").string(), (dir / "preds.json").string()});
  ASSERT_EQ(table.code, 0) << table.err;
  EXPECT_NE(table.out.find("1.000000"), std::string::npos);
  const CliResult js = cli({"eval", (dir / "ds").string(), (dir / "preds.json").string(), "--json", "--alpha", "0.1"});
  ASSERT_EQ(js.code, 0);
  const auto doc = nlohmann::json::parse(js.out);
  EXPECT_EQ(doc["pck"].size(), 1u);
  EXPECT_EQ(doc["pck"][0]["mean"], 1.0);
  EXPECT_EQ(doc["mpjpe"]["mean"], 0.0);
}

TEST(Cli, PreviewWritesImageAndAnnotation) {
  TempDir dir("cli_preview");
  const fs::path cfg = small_setup(dir);
  const CliResult r = cli({"preview", (dir / "walk.bvh").string(), "--frame", "2", "--camera", "1", "-c", cfg.string(),
                     "-o", (dir / "p/shot.png").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Image im = read_image(dir / "p/shot.png");
  EXPECT_EQ(im.width, 80);
  std::ifstream f(dir / "p/shot.json");
  const SampleRecord rec = record_from_json(nlohmann::json::parse(f));
  EXPECT_EQ(rec.frame_index, 2u);
  EXPECT_EQ(rec.camera_id, "cam01");
  EXPECT_LE(*reprojection_error(rec).max, 1e-3);
  EXPECT_EQ(cli({"preview", (dir / "walk.bvh").string(), "--frame", "3", "-c", cfg.string()}).code, 2);
}

TEST(Cli, ConfigErrorsExitTwoAndShowConfigPrintsDefaults) {
  TempDir dir("cli_cfg");
  std::ofstream(dir / "bad.json") << R"({"rigg": {}})";
  const CliResult r = cli({"generate", "-c", (dir / "bad.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("rigg"), std::string::npos);
  const CliResult s = cli({"stats", "--show-config"});
  EXPECT_EQ(s.code, 0);
  const auto doc = nlohmann::json::parse(s.out);
  EXPECT_EQ(doc["seed"], kDefaultSeed);
  EXPECT_EQ(doc["rig"]["count"], 12);
}

TEST(Cli, IoErrorsExitThree) {
  TempDir dir("cli_io");
  const fs::path cfg = small_setup(dir);
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(cli({"generate", "-c", cfg.string(), "-o", (dir / "blocker/sub").string()}).code, 3);
  EXPECT_EQ(cli({"make-demo", "-o", (dir / "blocker/x.bvh").string()}).code, 3);
}

TEST(Cli, ExportCoco) {
  TempDir dir("cli_coco");
  const fs::path cfg = small_setup(dir);
  ASSERT_EQ(cli({"generate", "-c", cfg.string()}).code, 0);
  ASSERT_EQ(cli({"export-coco", (dir / "ds").string(), "-o", (dir / "coco.json").string()}).code, 0);
  std::ifstream f(dir / "coco.json");
  const auto doc = nlohmann::json::parse(f);
  EXPECT_EQ(doc["annotations"].size(), 9u);
}
