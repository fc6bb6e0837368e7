// End-to-end runs of the ampi binary on generated fixtures.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ampi/depthprep.hpp"
#include "ampi/filters.hpp"
#include "ampi/image_io.hpp"
#include "ampi/inpaint.hpp"
#include "ampi/mpiformat.hpp"
#include "ampi/synthetic.hpp"
#include "test_util.hpp"

namespace ampi {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(AMPI_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  int run(const std::string& args) {
    const int code = run_cli(args, log());
    if (code != 0) std::cerr << slurp(log());
    return code;
  }
  fs::path log() const { return dir.path() / "log.txt"; }
  fs::path p(const std::string& name) const { return dir.path() / name; }
  std::string q(const std::string& name) const { return "'" + p(name).string() + "'"; }

  // Disc fixture: disparity 0.9 inside a disc, 0.1 outside.
  void write_disc(Size size = {96, 128}) {
    const SyntheticScene s = make_disc_scene(size, 0.9, 0.1);
    write_png(s.image, p("img.png"));
    write_disparity_pfm(s.disparity, p("depth.pfm"));
  }

  TempDir dir;
};

TEST_F(Cli, FuseSingleInputIsItsNormalization) {
  ImageBuffer raw(6, 5, 1);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 5; ++x) raw.at(y, x) = 2.0 + 0.25 * (y * 5 + x);
  write_pfm(raw, p("a.pfm"));
  ASSERT_EQ(run("fuse " + q("a.pfm") + " -o " + q("out/f.pfm")), 0);
  const ImageBuffer fused = read_pfm(p("out/f.pfm"));
  ASSERT_EQ(fused.height(), 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_FLOAT_EQ(fused.at(y, x), (y * 5 + x) / 29.0);
  EXPECT_TRUE(fs::exists(p("out/run.json")));
}

TEST_F(Cli, FuseEnsembleRecipeOutputsLargestResolution) {
  // Five resolutions, each plain and mirrored.
  std::string args = "fuse";
  const int widths[] = {64, 96, 128, 160, 192};
  for (int i = 0; i < 5; ++i) {
    const int w = widths[i];
    const int h = w * 3 / 4;
    ImageBuffer d(h, w, 1);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) d.at(y, x) = static_cast<double>(x) / (w - 1) + 0.1 * i;
    write_pfm(d, p("r" + std::to_string(i) + ".pfm"));
    write_pfm(flip_horizontal(d), p("f" + std::to_string(i) + ".pfm"));
    args += " " + q("r" + std::to_string(i) + ".pfm") + " --flipped " + q("f" + std::to_string(i) + ".pfm");
  }
  ASSERT_EQ(run(args + " -o " + q("fused.pfm")), 0);
  const ImageBuffer fused = read_pfm(p("fused.pfm"));
  EXPECT_EQ(fused.height(), 144);
  EXPECT_EQ(fused.width(), 192);
  EXPECT_NEAR(fused.at(10, 0), 0.0, 1e-6);
  EXPECT_NEAR(fused.at(10, 191), 1.0, 1e-6);
}

TEST_F(Cli, FuseWithoutInputsIsUsageError) { EXPECT_EQ(run_cli("fuse -o " + q("x.pfm"), log()), 2); }

TEST_F(Cli, SliceDiscGivesTwoLayers) {
  write_disc();
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("mpi")), 0);
  const AdaptiveMpi mpi = load_mpi(p("mpi"));
  ASSERT_EQ(mpi.layer_count(), 2);
  EXPECT_NEAR(mpi.layers[0].disparity, 0.1, 1e-6);
  EXPECT_NEAR(mpi.layers[1].disparity, 0.9, 1e-6);
  EXPECT_EQ(mpi.layers[1].occupancy, threshold_mask(read_disparity(p("depth.pfm")).raster, 0.5, 0));

  const json run_json = read_json(p("mpi/run.json"));
  EXPECT_EQ(run_json["command"], "slice");
  EXPECT_EQ(run_json["config"]["max-planes"], 16);
  EXPECT_EQ(run_json["config"]["xi"], 8);
  EXPECT_DOUBLE_EQ(run_json["config"]["min-value"].get<double>(), 0.1);
  EXPECT_EQ(run_json["inputs"].size(), 2u);
}

TEST_F(Cli, SliceUniformBaseline) {
  ImageBuffer ramp(32, 256, 1);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 256; ++x) ramp.at(y, x) = 0.1 + x / 255.0;
  write_pfm(ramp, p("ramp.pfm"));
  write_png(ImageBuffer(32, 256, 3, 0.5), p("gray.png"));
  ASSERT_EQ(run("slice --uniform 4 --image " + q("gray.png") + " --depth " + q("ramp.pfm") + " -o " + q("u")), 0);
  EXPECT_EQ(load_mpi(p("u")).transitions, (std::vector<int>{0, 63, 127, 191, 255}));
}

TEST_F(Cli, SliceMismatchedSizesFails) {
  write_disc();
  write_png(ImageBuffer(10, 10, 3, 0.5), p("small.png"));
  EXPECT_EQ(run_cli("slice --image " + q("small.png") + " --depth " + q("depth.pfm") + " -o " + q("m"), log()), 1);
  EXPECT_NE(slurp(log()).find("depth"), std::string::npos);
}

TEST_F(Cli, SliceMissingDepthIsUsageError) {
  write_disc();
  EXPECT_EQ(run_cli("slice --image " + q("img.png") + " --depth " + q("nope.pfm") + " -o " + q("m"), log()), 2);
}

TEST_F(Cli, ConfigFilePrecedence) {
  write_disc();
  std::ofstream(p("cfg.toml")) << "[slice]\nmax-planes = 4\nxi = 6\n";
  ASSERT_EQ(run("--config " + q("cfg.toml") + " slice --image " + q("img.png") + " --depth " + q("depth.pfm") +
                " -o " + q("c") + " --xi 5"),
            0);
  const json cfg = read_json(p("c/run.json"))["config"];
  EXPECT_EQ(cfg["max-planes"], 4);  // file over default
  EXPECT_EQ(cfg["xi"], 5);          // flag over file
  EXPECT_EQ(cfg["canny-high"], 150);
}

TEST_F(Cli, InpaintSingleLayerPassthrough) {
  AdaptiveMpi mpi;
  mpi.source_dims = {20, 30};
  mpi.ref_intrinsics = CameraIntrinsics::default_for(mpi.source_dims);
  mpi.transitions = {0, 255};
  MpiLayer layer;
  layer.rgba = ImageBuffer(20, 30, 4, 1.0);
  layer.occupancy = BinaryMask({20, 30}, true);
  layer.disparity = 0.5;
  mpi.layers.push_back(layer);
  save_mpi(mpi, p("one"));
  ASSERT_EQ(run("inpaint -i " + q("one") + " -o " + q("two")), 0);
  EXPECT_EQ(slurp(p("one/layer_000.png")), slurp(p("two/layer_000.png")));
  EXPECT_EQ(slurp(p("one/manifest.json")), slurp(p("two/manifest.json")));
}

TEST_F(Cli, InpaintDiscGainsBandAndIsIdempotent) {
  write_disc({192, 256});
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  ASSERT_EQ(run("inpaint -i " + q("s") + " -o " + q("i1")), 0);
  ASSERT_EQ(run("inpaint -i " + q("i1") + " -o " + q("i2")), 0);
  const AdaptiveMpi sliced = load_mpi(p("s"));
  const AdaptiveMpi filled = load_mpi(p("i1"));
  const BinaryMask before = threshold_mask(sliced.layers[0].rgba, 0.5, 3);
  const BinaryMask after = threshold_mask(filled.layers[0].rgba, 0.5, 3);
  // 40 px at 768 scales to 10 px at 192; the band is 10 steps of 3x3 dilation
  // clipped to the disc that hides it.
  BinaryMask expected = dilate(before, 3, 10);
  expected &= sliced.layers[1].occupancy;
  expected |= before;
  EXPECT_GT(after.count(), before.count());
  EXPECT_EQ(after, expected);
  EXPECT_EQ(slurp(p("i1/layer_000.png")), slurp(p("i2/layer_000.png")));
  EXPECT_EQ(slurp(p("i1/layer_001.png")), slurp(p("i2/layer_001.png")));
}

TEST_F(Cli, RenderIdentityReproducesSource) {
  write_disc();
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  ASSERT_EQ(run("render -i " + q("s") + " -o " + q("f")), 0);
  EXPECT_EQ(read_png(p("f/frame_0000.png")), read_png(p("img.png")));
  ASSERT_EQ(run("render -i " + q("s") + " -o " + q("g") + " --pose 0 0 0"), 0);
  EXPECT_EQ(slurp(p("f/frame_0000.png")), slurp(p("g/frame_0000.png")));
}

TEST_F(Cli, RenderSwingEmits180Frames) {
  write_disc({24, 32});
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  ASSERT_EQ(run("render -i " + q("s") + " -o " + q("f") + " --trajectory swing --frames 180 -j 2"), 0);
  int pngs = 0;
  for (const auto& e : fs::directory_iterator(p("f"))) pngs += e.path().extension() == ".png";
  EXPECT_EQ(pngs, 180);
  const json index = read_json(p("f/frames.json"));
  EXPECT_EQ(index["frame_count"], 180);
  EXPECT_EQ(index["fps"], 30);
  EXPECT_EQ(index["frames"][179], "frame_0179.png");
}

TEST_F(Cli, RenderCameraFile) {
  write_disc();
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  std::ofstream(p("cam.txt")) << "https://www.youtube.com/watch?v=x\n"
                              << "0 0.5 0.6 0.5 0.5 0 0 1 0 0 0 0 1 0 0 0 0 1 0\n"
                              << "33366 0.5 0.6 0.5 0.5 0 0 1 0 0 0.02 0 1 0 0 0 0 1 0\n";
  ASSERT_EQ(run("render -i " + q("s") + " -o " + q("f") + " --camera " + q("cam.txt")), 0);
  EXPECT_EQ(read_png(p("f/frame_0000.png")), read_png(p("img.png")));
  EXPECT_FALSE(read_png(p("f/frame_0001.png")) == read_png(p("img.png")));
}

TEST_F(Cli, RenderBadCameraFileFails) {
  write_disc();
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  std::ofstream(p("cam.txt")) << "0 0.5 0.5 0.5\n";
  EXPECT_EQ(run_cli("render -i " + q("s") + " -o " + q("f") + " --camera " + q("cam.txt"), log()), 1);
  EXPECT_NE(slurp(log()).find("cam.txt:1"), std::string::npos);
}

TEST_F(Cli, RenderConflictingPoseSourcesIsUsageError) {
  write_disc();
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  EXPECT_EQ(run_cli("render -i " + q("s") + " -o " + q("f") + " --pose 0.1 0 0 --trajectory swing", log()), 2);
}

TEST_F(Cli, EvalIdenticalPairs) {
  write_disc();
  std::ofstream(p("pairs.json")) << R"({"depth": [{"pred": "depth.pfm", "gt": "depth.pfm"}],
                                        "views": [{"pred": "img.png", "target": "img.png"}]})";
  ASSERT_EQ(run("eval --pairs " + q("pairs.json") + " -o " + q("ev")), 0);
  const json report = read_json(p("ev/report.json"));
  EXPECT_EQ(report["depth"][0]["delta_1"], 1.0);
  EXPECT_EQ(report["views"][0]["ssim"], 1.0);
  EXPECT_EQ(report["views"][0]["psnr"], 99.0);
  EXPECT_NE(slurp(p("ev/depth_metrics.csv")).find("delta_1"), std::string::npos);
  EXPECT_TRUE(fs::exists(p("ev/run.json")));
}

TEST_F(Cli, EvalEmptyManifestIsUsageError) {
  std::ofstream(p("pairs.json")) << R"({"depth": [], "views": []})";
  EXPECT_EQ(run_cli("eval --pairs " + q("pairs.json") + " -o " + q("ev"), log()), 2);
  EXPECT_EQ(run_cli("eval -o " + q("ev"), log()), 2);
}

TEST_F(Cli, EvalSyntheticSweep) {
  ASSERT_EQ(run("eval --synthetic --scenes 2 --plane-counts 4,8 -o " + q("sw")), 0);
  const json report = read_json(p("sw/report.json"));
  ASSERT_EQ(report["synthetic"].size(), 2u);
  EXPECT_EQ(report["synthetic"][0]["max_planes"], 4);
  EXPECT_EQ(report["synthetic"][1]["scenes"], 2);
}

TEST_F(Cli, ExportTrainingPairsDeterministic) {
  write_disc({192, 256});
  ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q("s")), 0);
  ASSERT_EQ(run("export-training-pairs -i " + q("s") + " -o " + q("a") + " --count 4 --seed 3"), 0);
  ASSERT_EQ(run("export-training-pairs -i " + q("s") + " -o " + q("b") + " --count 4 --seed 3"), 0);
  const json index = read_json(p("a/pairs.json"));
  ASSERT_EQ(index["count"], 4);
  for (const auto& e : index["pairs"]) {
    for (const char* k : {"input", "mask", "target"}) {
      const std::string f = e[k];
      EXPECT_EQ(slurp(p("a") / f), slurp(p("b") / f)) << f;
    }
  }
  const ImageBuffer mask = read_png(p("a") / index["pairs"][0]["mask"].get<std::string>());
  EXPECT_EQ(mask.channels(), 1);
}

TEST_F(Cli, OutputsAreDeterministic) {
  write_disc();
  for (const char* out : {"r1", "r2"}) {
    ASSERT_EQ(run("slice --image " + q("img.png") + " --depth " + q("depth.pfm") + " -o " + q(out)), 0);
  }
  for (const char* f : {"manifest.json", "layer_000.png", "layer_001.png"}) {
    EXPECT_EQ(slurp(p("r1") / f), slurp(p("r2") / f)) << f;
  }
  // run.json differs only in the output path.
  json a = read_json(p("r1/run.json"));
  json b = read_json(p("r2/run.json"));
  a["config"].erase("output");
  b["config"].erase("output");
  EXPECT_EQ(a, b);
}

TEST_F(Cli, HelpAndUnknownSubcommand) {
  EXPECT_EQ(run_cli("--help", log()), 0);
  EXPECT_EQ(run_cli("frobnicate", log()), 2);
  EXPECT_EQ(run_cli("", log()), 2);
}

}  // namespace
}  // namespace ampi
