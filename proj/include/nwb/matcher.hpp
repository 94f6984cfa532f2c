#pragma once

#include <optional>
#include <vector>

#include "nwb/image.hpp"

namespace nwb {

// Scores for every valid placement, (W - w + 1) x (H - h + 1), row-major.
struct ScoreMap {
  int width = 0;
  int height = 0;
  std::vector<double> scores;

  double at(int x, int y) const {
    return scores[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

struct MatchOutcome {
  int x = 0;
  int y = 0;
  double score = 0.0;
  std::optional<ScoreMap> score_map;
};

// Channel-summed normalised cross-correlation of the template against the
// query window whose top-left corner is (x, y). No mean subtraction; a channel
// whose template or window energy is zero contributes 0. Range [0, 3] for
// non-negative images.
double ncc_score(const ImageBuffer& query, const ImageBuffer& templ, int x, int y);

// Exhaustive evaluation of ncc_score over all placements; first maximum in
// row-major order wins.
MatchOutcome match_template(const ImageBuffer& query, const ImageBuffer& templ,
                            bool keep_map = false);

// Same outcome as match_template. Numerators come from FFT cross-correlation,
// window energies from squared-sum integral images; the leading candidates
// are then re-scored exactly with ncc_score so the argmax and its tie-break
// agree with the direct path.
MatchOutcome match_accelerated(const ImageBuffer& query, const ImageBuffer& templ,
                               bool keep_map = false);

}  // namespace nwb
