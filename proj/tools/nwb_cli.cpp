// nwb: N-white balancing and colour template matching from the command line.
//
//   nwb adjust  <in> <out>      [--mode none|wb|nwb] [--n 9] ...
//   nwb match   <query> <templ> [--annotate out.png] [--gt x,y,w,h] ...
//   nwb eval    <gt.json>       [--modes none,wb,nwb] [--report out.csv]
//   nwb synth   <spec.json> <outdir> [--format png|ppm]
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 processing error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nwb/error.hpp"
#include "nwb/image_io.hpp"
#include "nwb/pipeline.hpp"
#include "nwb/scenegen.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitProcessing = 3;

struct ConfigFlags {
  int n = nwb::kDefaultBlockCount;
  std::string estimator = "whitepatch";
  std::string mode = "nwb";
  std::string white = "D65";
  double weight_power = nwb::kDefaultWeightPower;

  nwb::RunConfig resolve() const {
    nwb::RunConfig config;
    config.n = n;
    config.estimator = nwb::parse_estimator(estimator);
    config.mode = nwb::parse_adjustment(mode);
    config.ground_truth = nwb::named_white_point(white);
    config.weight_power = weight_power;
    nwb::validate(config);
    return config;
  }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags, bool with_mode) {
  cmd->add_option("--n", flags.n, "Number of source white points (blocks)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--estimator", flags.estimator, "White point estimator")
      ->check(CLI::IsMember({"whitepatch", "greyworld"}, CLI::ignore_case));
  if (with_mode) {
    cmd->add_option("--mode", flags.mode, "Adjustment applied before matching")
        ->check(CLI::IsMember({"none", "wb", "nwb"}, CLI::ignore_case));
  }
  cmd->add_option("--white", flags.white, "Reference white")
      ->check(CLI::IsMember({"D65"}, CLI::ignore_case));
  cmd->add_option("--weight-power", flags.weight_power, "Inverse-distance weight exponent")
      ->check(CLI::PositiveNumber);
}

nwb::Rect parse_rect(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--gt", "expected x,y,w,h integers");
    }
  }
  if (v.size() != 4 || v[2] < 1 || v[3] < 1 || v[0] < 0 || v[1] < 0) {
    throw CLI::ValidationError("--gt", "expected x,y,w,h with w,h >= 1");
  }
  return {v[0], v[1], v[2], v[3]};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  nwb::write_file_bytes(path, std::span<const std::uint8_t>(
                                  reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

int cmd_adjust(const std::string& input, const std::string& output, const ConfigFlags& flags) {
  const nwb::RunConfig config = flags.resolve();
  nwb::format_from_path(output);
  const nwb::ImageBuffer image = nwb::read_image(input);
  nwb::write_image(output, nwb::adjust(image, config));
  return 0;
}

int cmd_match(const std::string& query_path, const std::string& templ_path,
              const ConfigFlags& flags, const std::string& annotate,
              const std::string& gt_text) {
  const nwb::RunConfig config = flags.resolve();
  std::optional<nwb::Rect> truth;
  if (!gt_text.empty()) truth = parse_rect(gt_text);
  if (!annotate.empty()) nwb::format_from_path(annotate);

  const nwb::ImageBuffer query = nwb::read_image(query_path);
  const nwb::ImageBuffer templ = nwb::read_image(templ_path);
  const nwb::PipelineResult result = nwb::run_pipeline(query, templ, config);

  std::cout << result.match.x << " " << result.match.y << " "
            << nwb::format_fixed(result.match.score, 6) << "\n";
  if (truth) {
    std::cerr << "iou " << nwb::format_fixed(nwb::iou(result.detected, *truth), 3) << "\n";
  }
  if (!annotate.empty()) {
    nwb::ImageBuffer canvas = result.query;
    if (truth) nwb::draw_border(canvas, *truth, nwb::kTruthColor);
    nwb::draw_border(canvas, result.detected, nwb::kDetectionColor);
    nwb::write_image(annotate, canvas);
  }
  return 0;
}

int cmd_eval(const std::string& gt_path, const ConfigFlags& flags,
             const std::vector<std::string>& mode_names, const std::string& report) {
  const nwb::RunConfig config = flags.resolve();
  std::vector<nwb::Adjustment> modes;
  for (const auto& name : mode_names) modes.push_back(nwb::parse_adjustment(name));
  const auto entries = nwb::load_ground_truth(gt_path);
  const auto rows = nwb::run_evaluation(entries, config, modes);
  const std::string text = nwb::format_eval_report(rows);
  if (report.empty()) {
    std::cout << text;
  } else {
    write_text(report, text);
    std::vector<nwb::EvalRecord> records;
    for (const auto& r : rows) records.push_back(r.record);
    std::cout << nwb::format_mean_table(nwb::evaluate_batch(records), "mode");
  }
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              const std::string& format) {
  const auto bytes = nwb::read_file_bytes(spec_path);
  const nwb::SceneSpec spec = nwb::scene_spec_from_json(std::string(bytes.begin(), bytes.end()));
  const nwb::SceneBundle bundle = nwb::generate_scene(spec);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw nwb::IoError("cannot create directory " + out_dir + ": " + ec.message());

  const std::string ext = format == "ppm" ? ".ppm" : ".png";
  const std::filesystem::path dir(out_dir);
  nwb::write_image(dir / ("query" + ext), bundle.query);
  nwb::write_image(dir / ("template" + ext), bundle.templ);
  nwb::GroundTruthEntry entry;
  entry.query = "query" + ext;
  entry.templ = "template" + ext;
  entry.rect = bundle.ground_truth;
  write_text(dir / "ground_truth.json", nwb::ground_truth_to_json({entry}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-white balancing and colour template matching"};
  app.require_subcommand(1);

  ConfigFlags adjust_flags;
  std::string adjust_in, adjust_out;
  auto* adjust = app.add_subcommand("adjust", "White-balance an image");
  adjust->add_option("input", adjust_in, "Input PNG or PPM")->required();
  adjust->add_option("output", adjust_out, "Output .png or .ppm")->required();
  add_config_flags(adjust, adjust_flags, true);

  ConfigFlags match_flags;
  std::string match_query, match_templ, match_annotate, match_gt;
  auto* match = app.add_subcommand("match", "Adjust a query and locate a template in it");
  match->add_option("query", match_query, "Query image")->required();
  match->add_option("template", match_templ, "Template image")->required();
  match->add_option("--annotate", match_annotate,
                    "Write the adjusted query with the detection outlined");
  match->add_option("--gt", match_gt, "Ground-truth rectangle x,y,w,h");
  add_config_flags(match, match_flags, true);

  ConfigFlags eval_flags;
  std::string eval_gt, eval_report;
  std::vector<std::string> eval_modes{"none", "wb", "nwb"};
  auto* eval = app.add_subcommand("eval", "Evaluate IoU over a ground-truth file");
  eval->add_option("ground_truth", eval_gt, "Ground-truth JSON")->required();
  eval->add_option("--modes", eval_modes, "Adjustment modes to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"none", "wb", "nwb"}, CLI::ignore_case));
  eval->add_option("--report", eval_report, "CSV report path (stdout when omitted)");
  add_config_flags(eval, eval_flags, false);

  std::string synth_spec, synth_out, synth_format = "png";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene bundle");
  synth->add_option("spec", synth_spec, "Scene spec JSON")->required();
  synth->add_option("outdir", synth_out, "Output directory")->required();
  synth->add_option("--format", synth_format, "Image format")
      ->check(CLI::IsMember({"png", "ppm"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*adjust) return cmd_adjust(adjust_in, adjust_out, adjust_flags);
    if (*match) return cmd_match(match_query, match_templ, match_flags, match_annotate, match_gt);
    if (*eval) return cmd_eval(eval_gt, eval_flags, eval_modes, eval_report);
    if (*synth) return cmd_synth(synth_spec, synth_out, synth_format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "nwb: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nwb::IoError& e) {
    std::cerr << "nwb: " << e.what() << "\n";
    return kExitIo;
  } catch (const nwb::FormatError& e) {
    std::cerr << "nwb: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "nwb: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitUsage;
}
