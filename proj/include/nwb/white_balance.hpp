#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nwb/color.hpp"
#include "nwb/image.hpp"
#include "nwb/rect.hpp"

namespace nwb {

enum class WhitePointEstimator { WhitePatch, GreyWorld };

// Parses "whitepatch" / "greyworld" (case-insensitive, "grayworld" accepted).
WhitePointEstimator parse_estimator(std::string_view name);
std::string_view to_string(WhitePointEstimator kind);

inline constexpr int kDefaultBlockCount = 9;
inline constexpr double kDefaultWeightPower = 2.0;

struct BlockPartition {
  int rows = 0;
  int cols = 0;
  // Row-major: block m sits at row m / cols, column m % cols.
  std::vector<Rect> blocks;
};

struct LocatedWhitePoint {
  Xyz value;
  int x = 0;
  int y = 0;
  int block_index = 0;  // 1-based, matching S_1..S_N
};

// White point of the pixels in `region` (the whole image when omitted).
// Throws DegenerateRegionError when the estimate is the zero vector.
Xyz estimate_white_point(const ImageBuffer& image, const Rect& region, WhitePointEstimator kind);
Xyz estimate_white_point(const ImageBuffer& image, WhitePointEstimator kind);

// Near-square grid: rows is the largest divisor of n not above sqrt(n), and
// the last (size % count) columns/rows each take one extra pixel.
BlockPartition partition_blocks(int width, int height, int n);

// Per block: estimate S_m, then pick the block pixel whose XYZ value has the
// highest cosine similarity with S_m (first in row-major order on ties).
std::vector<LocatedWhitePoint> locate_white_points(const ImageBuffer& image,
                                                   const BlockPartition& partition,
                                                   WhitePointEstimator kind);

// Correction for one white point expressed directly on linear RGB.
Mat3 rgb_correction(const Xyz& source, const Xyz& ground_truth);

// Apply a linear-RGB matrix to every pixel.
ImageBuffer apply_matrix(const ImageBuffer& image, const Mat3& rgb_matrix);

ImageBuffer single_wb(const ImageBuffer& image, const Xyz& ground_truth,
                      WhitePointEstimator kind);

// Normalised inverse-distance weights of the located points as seen from
// pixel (x, y). A pixel that coincides with a located point gets weight 1 on
// that point and 0 elsewhere.
std::vector<double> idw_weights(int x, int y, std::span<const LocatedWhitePoint> points,
                                double weight_power);

ImageBuffer n_white_balance(const ImageBuffer& image, const Xyz& ground_truth, int n,
                            WhitePointEstimator kind, double weight_power = kDefaultWeightPower);

}  // namespace nwb
