#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nwb/image_io.hpp"
#include "nwb/scenegen.hpp"
#include "test_helpers.hpp"

using namespace nwb;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("nwb_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliRun nwb_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "nwb_cli_stdout.txt";
  const fs::path err = fs::temp_directory_path() / "nwb_cli_stderr.txt";
  const std::string cmd = std::string("\"") + NWB_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Query with a red/green template planted at (14, 9) on a blue background.
// The template's blue channel is empty, so a perfect hit scores 2.
void planted_scene(const fs::path& dir) {
  ImageBuffer query(60, 40, LinearRgb{0.0, 0.0, 0.6});
  ImageBuffer templ(10, 8);
  Xoshiro256StarStar rng(9);
  for (auto& p : templ.pixels()) {
    p = srgb_decode(Srgb8{static_cast<std::uint8_t>(rng.uniform_int(40, 250)),
                          static_cast<std::uint8_t>(rng.uniform_int(40, 250)), 0});
  }
  query.paste(templ, 14, 9);
  write_image(dir / "query.ppm", query);
  write_image(dir / "template.ppm", templ);
}

}  // namespace

TEST(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(nwb_cli("").code, 1);
  EXPECT_EQ(nwb_cli("frobnicate").code, 1);
  EXPECT_EQ(nwb_cli("adjust only_one_arg.ppm").code, 1);
  EXPECT_EQ(nwb_cli("adjust a.ppm b.ppm --mode sideways").code, 1);
  EXPECT_EQ(nwb_cli("adjust a.ppm b.ppm --n 0").code, 1);
  EXPECT_EQ(nwb_cli("match a.ppm b.ppm --gt 1,2,3").code, 1);
  EXPECT_EQ(nwb_cli("--help").code, 0);
}

TEST(Cli, IoErrorsExitWithTwo) {
  const auto dir = fresh_dir("io");
  const CliRun r = nwb_cli("adjust " + q(dir / "nope.ppm") + " " + q(dir / "out.ppm"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.ppm"), std::string::npos);
  write_image(dir / "in.ppm", ImageBuffer(4, 4, LinearRgb{0.5, 0.5, 0.5}));
  EXPECT_EQ(nwb_cli("adjust " + q(dir / "in.ppm") + " " + q(dir / "out.gif")).code, 2);
}

TEST(Cli, ProcessingErrorsExitWithThree) {
  const auto dir = fresh_dir("proc");
  write_image(dir / "black.ppm", ImageBuffer(8, 8));
  EXPECT_EQ(nwb_cli("adjust " + q(dir / "black.ppm") + " " + q(dir / "o.ppm") + " --mode wb").code,
            3);
  write_image(dir / "small.ppm", ImageBuffer(4, 4, LinearRgb{0.5, 0.5, 0.5}));
  EXPECT_EQ(nwb_cli("match " + q(dir / "small.ppm") + " " + q(dir / "black.ppm")).code, 3);
}

TEST(Cli, AdjustNoneRoundTripsPixels) {
  const auto dir = fresh_dir("none");
  planted_scene(dir);
  ASSERT_EQ(nwb_cli("adjust " + q(dir / "query.ppm") + " " + q(dir / "out.ppm") + " --mode none")
                .code,
            0);
  EXPECT_EQ(slurp(dir / "out.ppm"), slurp(dir / "query.ppm"));
  ASSERT_EQ(nwb_cli("adjust " + q(dir / "query.ppm") + " " + q(dir / "out.png") + " --mode none")
                .code,
            0);
  EXPECT_EQ(read_image(dir / "out.png"), read_image(dir / "query.ppm"));
}

TEST(Cli, NwbWithOneBlockEqualsWb) {
  const auto dir = fresh_dir("n1");
  write_image(dir / "in.ppm", nwb::testing::random_image(50, 30, 3, 0.05, 1.0));
  ASSERT_EQ(nwb_cli("adjust " + q(dir / "in.ppm") + " " + q(dir / "wb.ppm") + " --mode wb").code,
            0);
  ASSERT_EQ(
      nwb_cli("adjust " + q(dir / "in.ppm") + " " + q(dir / "nwb.ppm") + " --mode nwb --n 1").code,
      0);
  EXPECT_EQ(slurp(dir / "wb.ppm"), slurp(dir / "nwb.ppm"));
}

TEST(Cli, WbNeutralisesUniformCast) {
  const auto dir = fresh_dir("cast");
  std::ofstream(dir / "spec.json") << R"({
    "size": {"width": 120, "height": 90}, "seed": 11,
    "template_rect": {"x": 30, "y": 20, "w": 41, "h": 41},
    "illuminants": [{"gain": [1.0, 0.8, 0.6], "region": {"kind": "full"}}],
    "noise_sigma": 0.0, "template_color": [0.5, 0.5, 0.5]})";
  ASSERT_EQ(nwb_cli("synth " + q(dir / "spec.json") + " " + q(dir) + " --format ppm").code, 0);
  ASSERT_EQ(nwb_cli("adjust " + q(dir / "query.ppm") + " " + q(dir / "wb.ppm") + " --mode wb").code,
            0);
  const std::string bytes = slurp(dir / "wb.ppm");
  const ImageBuffer out = decode_image(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()),
                                    bytes.size()));
  const Srgb8 centre = srgb_encode(out.at(50, 40));  // inside the grey star
  EXPECT_LE(std::abs(centre.r - centre.g), 2);
  EXPECT_LE(std::abs(centre.g - centre.b), 2);
}

TEST(Cli, MatchPrintsPlantedLocationAndAnnotates) {
  const auto dir = fresh_dir("match");
  planted_scene(dir);
  const CliRun r = nwb_cli("match " + q(dir / "query.ppm") + " " + q(dir / "template.ppm") +
                        " --mode none --gt 14,9,10,8 --annotate " + q(dir / "ann.ppm"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "14 9 2.000000\n");
  EXPECT_NE(r.err.find("iou 1.000"), std::string::npos);
  const ImageBuffer before = read_image(dir / "query.ppm");
  const ImageBuffer after = read_image(dir / "ann.ppm");
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 60; ++x) {
      const bool border = x >= 14 && x < 24 && y >= 9 && y < 17 &&
                          !(x >= 17 && x < 21 && y >= 12 && y < 14);
      if (border) {
        EXPECT_EQ(after.at(x, y), (LinearRgb{1.0, 1.0, 0.0}));
      } else {
        EXPECT_EQ(after.at(x, y), before.at(x, y));
      }
    }
  }
}

TEST(Cli, EvalSingleRecordAndEmptyFile) {
  const auto dir = fresh_dir("eval");
  planted_scene(dir);
  std::ofstream(dir / "gt.json") << R"([{"query": "query.ppm", "template": "template.ppm",
                                         "rect": {"x": 14, "y": 9, "w": 10, "h": 8}}])";
  const CliRun r = nwb_cli("eval " + q(dir / "gt.json") + " --modes none --report " +
                        q(dir / "report.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "mode,count,mean_iou\nnone,1,1.000\n");
  EXPECT_EQ(slurp(dir / "report.csv"),
            "image,mode,x,y,score,iou\nquery.ppm,none,14,9,2.000000,1.000\n# mean\n"
            "mode,count,mean_iou\nnone,1,1.000\n");

  std::ofstream(dir / "empty.json") << "[]";
  const CliRun empty = nwb_cli("eval " + q(dir / "empty.json"));
  EXPECT_NE(empty.code, 0);
  EXPECT_FALSE(empty.err.empty());

  std::ofstream(dir / "missing.json") << R"([{"query": "lost.ppm", "template": "template.ppm",
                                              "rect": {"x": 0, "y": 0, "w": 4, "h": 4}}])";
  const CliRun missing = nwb_cli("eval " + q(dir / "missing.json"));
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("lost.ppm"), std::string::npos);
}

TEST(Cli, SynthIsDeterministicAndIdentityCastKeepsTemplate) {
  const auto a = fresh_dir("synth_a");
  const auto b = fresh_dir("synth_b");
  std::ofstream(a / "spec.json") << R"({
    "size": {"width": 96, "height": 64}, "seed": 3,
    "template_rect": {"x": 20, "y": 10, "w": 31, "h": 31},
    "illuminants": [{"gain": [1, 1, 1], "region": {"kind": "full"}}], "noise_sigma": 0})";
  ASSERT_EQ(nwb_cli("synth " + q(a / "spec.json") + " " + q(a)).code, 0);
  ASSERT_EQ(nwb_cli("synth " + q(a / "spec.json") + " " + q(b)).code, 0);
  EXPECT_EQ(slurp(a / "query.png"), slurp(b / "query.png"));
  EXPECT_EQ(slurp(a / "template.png"), slurp(b / "template.png"));
  EXPECT_EQ(read_image(a / "query.png").crop({20, 10, 31, 31}), read_image(a / "template.png"));

  std::ofstream(a / "bad.json") << R"({"size": {"width": 96, "height": 64}, "seed": 3,
    "template_rect": {"x": 90, "y": 10, "w": 31, "h": 31},
    "illuminants": [{"gain": [1, 1, 1], "region": {"kind": "full"}}], "noise_sigma": 0})";
  const CliRun bad = nwb_cli("synth " + q(a / "bad.json") + " " + q(b));
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.err.find("template_rect"), std::string::npos) << bad.err;
}

TEST(Cli, ExampleSceneChecksumsArePinned) {
  const auto dir = fresh_dir("example");
  ASSERT_EQ(nwb_cli("synth " + q(fs::path(NWB_SCENES_DIR) / "two_lamps.json") + " " + q(dir) +
                    " --format ppm")
                .code,
            0);
  EXPECT_EQ(fnv1a(slurp(dir / "query.ppm")), 0xDF23DD7188F02220ull);
  EXPECT_EQ(fnv1a(slurp(dir / "template.ppm")), 0x34996BC4D4C7BA14ull);
  const CliRun r = nwb_cli("eval " + q(dir / "ground_truth.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fnv1a(r.out), 0x25BC2725D33F8DACull);
}
