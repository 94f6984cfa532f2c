#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nwb/color.hpp"
#include "nwb/evaluator.hpp"
#include "nwb/image.hpp"
#include "nwb/matcher.hpp"
#include "nwb/scenegen.hpp"
#include "nwb/white_balance.hpp"

namespace nwb {

enum class Adjustment { None, Wb, Nwb };

Adjustment parse_adjustment(std::string_view name);
std::string_view to_string(Adjustment mode);

// Named reference whites accepted by --white. Only D65 is shipped.
Xyz named_white_point(std::string_view name);

struct RunConfig {
  int n = kDefaultBlockCount;
  WhitePointEstimator estimator = WhitePointEstimator::WhitePatch;
  Xyz ground_truth = kD65;
  double weight_power = kDefaultWeightPower;
  Adjustment mode = Adjustment::Nwb;
};

// Throws Error when n < 1 or weight_power <= 0.
void validate(const RunConfig& config);

// Unclamped linear result of the configured adjustment.
ImageBuffer adjust(const ImageBuffer& image, const RunConfig& config);

struct PipelineResult {
  ImageBuffer query;  // adjusted and clamped to [0, 1]
  ImageBuffer templ;  // single-WB adjusted unless mode is none
  MatchOutcome match;
  Rect detected;
};

// Adjust both images, clamp them to the displayable range, then locate the
// template with the accelerated matcher.
PipelineResult run_pipeline(const ImageBuffer& query, const ImageBuffer& templ,
                            const RunConfig& config);

inline constexpr LinearRgb kDetectionColor{1.0, 1.0, 0.0};
inline constexpr LinearRgb kTruthColor{0.0, 1.0, 0.0};
inline constexpr int kBorderWidth = 3;

// Paints the `thickness` pixels just inside the rectangle's edge; parts of
// the rectangle outside the frame are ignored.
void draw_border(ImageBuffer& image, const Rect& rect, const LinearRgb& color,
                 int thickness = kBorderWidth);

struct GroundTruthEntry {
  std::filesystem::path query;
  std::filesystem::path templ;
  std::string query_label;  // path as written in the file
  Rect rect;
};

// JSON array of {"query": path, "template": path, "rect": {x, y, w, h}}.
// Relative paths resolve against the file's directory. Throws IoError naming
// the first missing path, InvalidSpecError on malformed content and
// EmptyTableError on an empty array.
std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path);
std::string ground_truth_to_json(const std::vector<GroundTruthEntry>& entries);

struct EvalRow {
  EvalRecord record;
  int x = 0;
  int y = 0;
  double score = 0.0;
};

// Every entry under every mode, in input order then mode order.
std::vector<EvalRow> run_evaluation(const std::vector<GroundTruthEntry>& entries,
                                    const RunConfig& base_config,
                                    const std::vector<Adjustment>& modes);

// "image,mode,x,y,score,iou" rows, then "# mean" and the per-mode table.
std::string format_eval_report(const std::vector<EvalRow>& rows);

}  // namespace nwb
