#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nwb/error.hpp"
#include "nwb/image_io.hpp"
#include "nwb/pipeline.hpp"
#include "test_helpers.hpp"

using namespace nwb;
using nwb::testing::random_image;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nwb_pipeline_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST(Config, ParsingAndValidation) {
  EXPECT_EQ(parse_adjustment("NWB"), Adjustment::Nwb);
  EXPECT_EQ(parse_adjustment("none"), Adjustment::None);
  EXPECT_THROW(parse_adjustment("auto"), Error);
  EXPECT_EQ(to_string(Adjustment::Wb), "wb");
  EXPECT_EQ(named_white_point("d65"), kD65);
  EXPECT_THROW(named_white_point("D50"), Error);

  RunConfig c;
  EXPECT_EQ(c.n, 9);
  EXPECT_EQ(c.mode, Adjustment::Nwb);
  EXPECT_NO_THROW(validate(c));
  c.n = 0;
  EXPECT_THROW(validate(c), Error);
  c.n = 4;
  c.weight_power = -1.0;
  EXPECT_THROW(validate(c), Error);
}

TEST(Adjust, ModesDispatch) {
  const ImageBuffer img = random_image(30, 20, 1, 0.05, 1.0);
  RunConfig c;
  c.mode = Adjustment::None;
  EXPECT_EQ(adjust(img, c), img);
  c.mode = Adjustment::Wb;
  const ImageBuffer wb = adjust(img, c);
  EXPECT_EQ(wb, single_wb(img, kD65, WhitePointEstimator::WhitePatch));
  c.mode = Adjustment::Nwb;
  c.n = 1;
  EXPECT_EQ(adjust(img, c), wb);
  c.n = 6;
  EXPECT_EQ(adjust(img, c), n_white_balance(img, kD65, 6, WhitePointEstimator::WhitePatch));
}

TEST(RunPipeline, FindsPlantedTemplateUnderEveryMode) {
  ImageBuffer q = random_image(80, 60, 2, 0.0, 0.8);
  const ImageBuffer t = random_image(12, 10, 3, 0.1, 0.8);
  q.paste(t, 33, 21);
  for (Adjustment mode : {Adjustment::None, Adjustment::Wb, Adjustment::Nwb}) {
    RunConfig c;
    c.mode = mode;
    const PipelineResult r = run_pipeline(q, t, c);
    EXPECT_EQ(r.detected, (Rect{33, 21, 12, 10})) << to_string(mode);
    EXPECT_EQ(r.query.width(), 80);
    for (const auto& p : r.query.pixels()) {
      EXPECT_GE(std::min({p.r, p.g, p.b}), 0.0);
      EXPECT_LE(std::max({p.r, p.g, p.b}), 1.0);
    }
  }
}

TEST(RunPipeline, TemplateIsOnlyAdjustedWhenModeIsNotNone) {
  const ImageBuffer q = random_image(40, 30, 4);
  const ImageBuffer t = random_image(8, 8, 5, 0.0, 0.7);
  RunConfig c;
  c.mode = Adjustment::None;
  EXPECT_EQ(run_pipeline(q, t, c).templ, t);
  c.mode = Adjustment::Nwb;
  EXPECT_EQ(run_pipeline(q, t, c).templ,
            clamp_unit(single_wb(t, kD65, WhitePointEstimator::WhitePatch)));
  EXPECT_THROW(run_pipeline(t, q, c), DimensionError);
}

TEST(DrawBorder, PaintsInsideEdgesOnly) {
  ImageBuffer img(20, 20, LinearRgb{0.5, 0.5, 0.5});
  const ImageBuffer before = img;
  draw_border(img, {4, 5, 10, 8}, kDetectionColor);
  int painted = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const bool inside = x >= 4 && x < 14 && y >= 5 && y < 13;
      const bool core = x >= 7 && x < 11 && y >= 8 && y < 10;
      if (inside && !core) {
        EXPECT_EQ(img.at(x, y), kDetectionColor);
        ++painted;
      } else {
        EXPECT_EQ(img.at(x, y), before.at(x, y));
      }
    }
  }
  EXPECT_EQ(painted, 10 * 8 - 4 * 2);
  draw_border(img, {15, 15, 10, 10}, kTruthColor);  // clipped at the frame
  EXPECT_EQ(img.at(15, 19), kTruthColor);
  EXPECT_EQ(img.at(19, 17), kTruthColor);
  EXPECT_EQ(img.at(19, 19), before.at(19, 19));
}

TEST(GroundTruthFile, LoadsAndResolvesRelativePaths) {
  const auto dir = fresh_dir("load");
  write_image(dir / "q.ppm", ImageBuffer(10, 10, LinearRgb{0.2, 0.3, 0.4}));
  write_image(dir / "t.ppm", ImageBuffer(4, 4, LinearRgb{0.2, 0.3, 0.4}));
  write_text(dir / "gt.json",
             R"([{"query": "q.ppm", "template": "t.ppm", "rect": {"x": 1, "y": 2, "w": 4, "h": 4}}])");
  const auto entries = load_ground_truth(dir / "gt.json");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].query, dir / "q.ppm");
  EXPECT_EQ(entries[0].query_label, "q.ppm");
  EXPECT_EQ(entries[0].rect, (Rect{1, 2, 4, 4}));
}

TEST(GroundTruthFile, ErrorsAreSpecific) {
  const auto dir = fresh_dir("errors");
  write_text(dir / "empty.json", "[]");
  EXPECT_THROW(load_ground_truth(dir / "empty.json"), EmptyTableError);
  write_text(dir / "bad.json", "{\"query\": 1}");
  EXPECT_THROW(load_ground_truth(dir / "bad.json"), InvalidSpecError);
  write_text(dir / "degenerate.json",
             R"([{"query": "q.ppm", "template": "t.ppm", "rect": {"x": 0, "y": 0, "w": 0, "h": 4}}])");
  EXPECT_THROW(load_ground_truth(dir / "degenerate.json"), InvalidSpecError);
  write_text(dir / "missing.json",
             R"([{"query": "gone.ppm", "template": "t.ppm", "rect": {"x": 0, "y": 0, "w": 4, "h": 4}}])");
  try {
    load_ground_truth(dir / "missing.json");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("gone.ppm"), std::string::npos);
  }
  EXPECT_THROW(load_ground_truth(dir / "absent.json"), IoError);
}

TEST(Evaluation, RowsFollowInputThenModeOrder) {
  const auto dir = fresh_dir("eval");
  ImageBuffer q = random_image(40, 30, 6, 0.0, 0.8);
  const ImageBuffer t = random_image(8, 6, 7, 0.1, 0.8);
  q.paste(t, 5, 9);
  write_image(dir / "q.ppm", q);
  write_image(dir / "t.ppm", t);
  GroundTruthEntry e;
  e.query = "q.ppm";
  e.templ = "t.ppm";
  e.rect = {5, 9, 8, 6};
  GroundTruthEntry miss = e;
  miss.rect = {0, 0, 8, 6};
  write_text(dir / "gt.json", ground_truth_to_json({e, miss}));
  const auto entries = load_ground_truth(dir / "gt.json");
  const auto rows = run_evaluation(entries, RunConfig{},
                                   {Adjustment::Nwb, Adjustment::None, Adjustment::Nwb});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].record.label, "none");
  EXPECT_EQ(rows[1].record.label, "nwb");
  EXPECT_EQ(rows[0].record.iou, 1.0);
  EXPECT_EQ(rows[2].record.iou, 0.0);
  const std::string report = format_eval_report(rows);
  EXPECT_EQ(report.substr(0, report.find('\n')), "image,mode,x,y,score,iou");
  EXPECT_NE(report.find("q.ppm,none,5,9,"), std::string::npos);
  EXPECT_NE(report.find("# mean\nmode,count,mean_iou\nnone,2,0.500\nnwb,2,0.500\n"),
            std::string::npos);
}
