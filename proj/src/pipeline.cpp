#include "nwb/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "nwb/error.hpp"
#include "nwb/image_io.hpp"

namespace nwb {

using json = nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

Adjustment parse_adjustment(std::string_view name) {
  const std::string v = lower(name);
  if (v == "none") return Adjustment::None;
  if (v == "wb") return Adjustment::Wb;
  if (v == "nwb") return Adjustment::Nwb;
  throw Error("unknown adjustment mode '" + std::string(name) + "' (expected none|wb|nwb)");
}

std::string_view to_string(Adjustment mode) {
  switch (mode) {
    case Adjustment::None:
      return "none";
    case Adjustment::Wb:
      return "wb";
    case Adjustment::Nwb:
      return "nwb";
  }
  return "none";
}

Xyz named_white_point(std::string_view name) {
  if (lower(name) == "d65") return kD65;
  throw Error("unknown reference white '" + std::string(name) + "' (expected D65)");
}

void validate(const RunConfig& config) {
  if (config.n < 1) throw Error("n must be at least 1");
  if (!(config.weight_power > 0.0) || !std::isfinite(config.weight_power)) {
    throw Error("weight power must be positive");
  }
}

ImageBuffer adjust(const ImageBuffer& image, const RunConfig& config) {
  validate(config);
  switch (config.mode) {
    case Adjustment::None:
      return image;
    case Adjustment::Wb:
      return single_wb(image, config.ground_truth, config.estimator);
    case Adjustment::Nwb:
      return n_white_balance(image, config.ground_truth, config.n, config.estimator,
                             config.weight_power);
  }
  return image;
}

PipelineResult run_pipeline(const ImageBuffer& query, const ImageBuffer& templ,
                            const RunConfig& config) {
  if (templ.width() > query.width() || templ.height() > query.height()) {
    throw DimensionError("template is larger than the query image");
  }
  PipelineResult result;
  result.query = clamp_unit(adjust(query, config));
  result.templ = config.mode == Adjustment::None
                     ? templ
                     : clamp_unit(single_wb(templ, config.ground_truth, config.estimator));
  result.match = match_accelerated(result.query, result.templ);
  result.detected = Rect{result.match.x, result.match.y, templ.width(), templ.height()};
  return result;
}

void draw_border(ImageBuffer& image, const Rect& rect, const LinearRgb& color, int thickness) {
  for (int y = std::max(0, rect.y); y < std::min(image.height(), rect.bottom()); ++y) {
    for (int x = std::max(0, rect.x); x < std::min(image.width(), rect.right()); ++x) {
      const bool edge = x < rect.x + thickness || x >= rect.right() - thickness ||
                        y < rect.y + thickness || y >= rect.bottom() - thickness;
      if (edge) image.at(x, y) = color;
    }
  }
}

std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  json root;
  try {
    root = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw InvalidSpecError(path.string() + ": not valid JSON: " + e.what());
  }
  if (!root.is_array()) throw InvalidSpecError(path.string() + ": expected a JSON array");
  if (root.empty()) throw EmptyTableError(path.string() + ": ground-truth file has no entries");

  const std::filesystem::path dir = path.parent_path();
  std::vector<GroundTruthEntry> entries;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& e = root[i];
    const std::string where = path.string() + "[" + std::to_string(i) + "]";
    try {
      GroundTruthEntry entry;
      entry.query_label = e.at("query").get<std::string>();
      entry.query = dir / entry.query_label;
      entry.templ = dir / e.at("template").get<std::string>();
      const json& r = e.at("rect");
      entry.rect = Rect{r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(),
                        r.at("h").get<int>()};
      if (entry.rect.w < 1 || entry.rect.h < 1 || entry.rect.x < 0 || entry.rect.y < 0) {
        throw InvalidSpecError(where + ".rect: degenerate rectangle");
      }
      entries.push_back(std::move(entry));
    } catch (const json::exception& ex) {
      throw InvalidSpecError(where + ": " + ex.what());
    }
  }
  for (const auto& entry : entries) {
    for (const auto& p : {entry.query, entry.templ}) {
      if (!std::filesystem::exists(p)) throw IoError("missing file: " + p.string());
    }
  }
  return entries;
}

std::string ground_truth_to_json(const std::vector<GroundTruthEntry>& entries) {
  json root = json::array();
  for (const auto& e : entries) {
    root.push_back({{"query", e.query.generic_string()},
                    {"template", e.templ.generic_string()},
                    {"rect", {{"x", e.rect.x}, {"y", e.rect.y}, {"w", e.rect.w}, {"h", e.rect.h}}}});
  }
  return root.dump(2) + "\n";
}

std::vector<EvalRow> run_evaluation(const std::vector<GroundTruthEntry>& entries,
                                    const RunConfig& base_config,
                                    const std::vector<Adjustment>& modes) {
  std::vector<Adjustment> ordered = modes;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  std::vector<EvalRow> rows;
  for (const auto& entry : entries) {
    const ImageBuffer query = read_image(entry.query);
    const ImageBuffer templ = read_image(entry.templ);
    for (Adjustment mode : ordered) {
      RunConfig config = base_config;
      config.mode = mode;
      const PipelineResult result = run_pipeline(query, templ, config);
      EvalRow row;
      row.record = make_record(entry.query_label, result.detected, entry.rect,
                               std::string(to_string(mode)));
      row.x = result.match.x;
      row.y = result.match.y;
      row.score = result.match.score;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_eval_report(const std::vector<EvalRow>& rows) {
  std::string out = "image,mode,x,y,score,iou\n";
  std::vector<EvalRecord> records;
  records.reserve(rows.size());
  for (const auto& row : rows) {
    out += row.record.image + "," + row.record.label + "," + std::to_string(row.x) + "," +
           std::to_string(row.y) + "," + format_fixed(row.score, 6) + "," +
           format_fixed(row.record.iou, 3) + "\n";
    records.push_back(row.record);
  }
  out += "# mean\n";
  out += format_mean_table(evaluate_batch(records), "mode");
  return out;
}

}  // namespace nwb
