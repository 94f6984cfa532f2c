#include "nwb/white_balance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "nwb/error.hpp"

namespace nwb {

WhitePointEstimator parse_estimator(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "whitepatch" || lower == "white-patch" || lower == "maxrgb") {
    return WhitePointEstimator::WhitePatch;
  }
  if (lower == "greyworld" || lower == "grayworld" || lower == "grey-world") {
    return WhitePointEstimator::GreyWorld;
  }
  throw Error("unknown white point estimator '" + std::string(name) + "'");
}

std::string_view to_string(WhitePointEstimator kind) {
  return kind == WhitePointEstimator::WhitePatch ? "whitepatch" : "greyworld";
}

Xyz estimate_white_point(const ImageBuffer& image, const Rect& region, WhitePointEstimator kind) {
  if (region.w < 1 || region.h < 1 || region.x < 0 || region.y < 0 ||
      region.right() > image.width() || region.bottom() > image.height()) {
    throw DimensionError("estimation region is empty or leaves the image");
  }
  LinearRgb acc;
  if (kind == WhitePointEstimator::WhitePatch) {
    acc = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
    for (int y = region.y; y < region.bottom(); ++y) {
      for (int x = region.x; x < region.right(); ++x) {
        const auto& p = image.at(x, y);
        acc.r = std::max(acc.r, p.r);
        acc.g = std::max(acc.g, p.g);
        acc.b = std::max(acc.b, p.b);
      }
    }
  } else {
    // Serial row-major accumulation keeps the estimate order-deterministic.
    for (int y = region.y; y < region.bottom(); ++y) {
      for (int x = region.x; x < region.right(); ++x) {
        const auto& p = image.at(x, y);
        acc.r += p.r;
        acc.g += p.g;
        acc.b += p.b;
      }
    }
    const double count = static_cast<double>(region.area());
    acc = {acc.r / count, acc.g / count, acc.b / count};
  }
  const Xyz xyz = rgb_to_xyz(acc);
  if (xyz.x == 0.0 && xyz.y == 0.0 && xyz.z == 0.0) {
    throw DegenerateRegionError("white point estimate is zero (all-black region at " +
                                std::to_string(region.x) + "," + std::to_string(region.y) +
                                ")");
  }
  return xyz;
}

Xyz estimate_white_point(const ImageBuffer& image, WhitePointEstimator kind) {
  return estimate_white_point(image, Rect{0, 0, image.width(), image.height()}, kind);
}

namespace {

// Split `extent` into `count` spans whose sizes differ by at most one; the
// trailing spans take the remainder.
std::vector<std::pair<int, int>> split_extent(int extent, int count) {
  std::vector<std::pair<int, int>> spans;
  spans.reserve(count);
  const int base = extent / count;
  const int extra = extent % count;
  int start = 0;
  for (int i = 0; i < count; ++i) {
    const int len = base + (i >= count - extra ? 1 : 0);
    spans.emplace_back(start, len);
    start += len;
  }
  return spans;
}

}  // namespace

BlockPartition partition_blocks(int width, int height, int n) {
  if (n < 1) {
    throw InvalidPartitionError("block count must be at least 1, got " + std::to_string(n));
  }
  int rows = 1;
  for (int r = 1; static_cast<long long>(r) * r <= n; ++r) {
    if (n % r == 0) rows = r;
  }
  const int cols = n / rows;
  if (width < cols || height < rows) {
    throw InvalidPartitionError("image " + std::to_string(width) + "x" +
                                std::to_string(height) + " is smaller than the " +
                                std::to_string(rows) + "x" + std::to_string(cols) +
                                " block grid");
  }
  BlockPartition out;
  out.rows = rows;
  out.cols = cols;
  out.blocks.reserve(n);
  const auto col_spans = split_extent(width, cols);
  const auto row_spans = split_extent(height, rows);
  for (const auto& [y0, h] : row_spans) {
    for (const auto& [x0, w] : col_spans) {
      out.blocks.push_back(Rect{x0, y0, w, h});
    }
  }
  return out;
}

std::vector<LocatedWhitePoint> locate_white_points(const ImageBuffer& image,
                                                   const BlockPartition& partition,
                                                   WhitePointEstimator kind) {
  std::vector<LocatedWhitePoint> points;
  points.reserve(partition.blocks.size());
  int index = 1;
  for (const Rect& block : partition.blocks) {
    const Xyz source = estimate_white_point(image, block, kind);
    double best = -std::numeric_limits<double>::infinity();
    int best_x = block.x;
    int best_y = block.y;
    for (int y = block.y; y < block.bottom(); ++y) {
      for (int x = block.x; x < block.right(); ++x) {
        const double s = cosine_similarity(rgb_to_xyz(image.at(x, y)), source);
        if (s > best) {
          best = s;
          best_x = x;
          best_y = y;
        }
      }
    }
    points.push_back(LocatedWhitePoint{source, best_x, best_y, index++});
  }
  return points;
}

Mat3 rgb_correction(const Xyz& source, const Xyz& ground_truth) {
  return xyz_to_rgb_matrix() * adaptation_matrix(source, ground_truth) * rgb_to_xyz_matrix();
}

ImageBuffer apply_matrix(const ImageBuffer& image, const Mat3& rgb_matrix) {
  ImageBuffer out = image;
  for (auto& p : out.pixels()) {
    p = rgb_matrix.apply(p);
  }
  return out;
}

ImageBuffer single_wb(const ImageBuffer& image, const Xyz& ground_truth,
                      WhitePointEstimator kind) {
  const Xyz source = estimate_white_point(image, kind);
  return apply_matrix(image, rgb_correction(source, ground_truth));
}

std::vector<double> idw_weights(int x, int y, std::span<const LocatedWhitePoint> points,
                                double weight_power) {
  std::vector<double> weights(points.size(), 0.0);
  if (points.empty()) return weights;

  std::vector<double> dist2(points.size());
  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < points.size(); ++m) {
    const double dx = static_cast<double>(x - points[m].x);
    const double dy = static_cast<double>(y - points[m].y);
    dist2[m] = dx * dx + dy * dy;
    if (dist2[m] == 0.0) {
      weights[m] = 1.0;
      return weights;
    }
    min_d2 = std::min(min_d2, dist2[m]);
  }
  // (d_min / d_m)^p equals d_m^-p up to a common factor and cannot underflow
  // for the nearest point.
  const double half_power = weight_power / 2.0;
  double sum = 0.0;
  for (std::size_t m = 0; m < points.size(); ++m) {
    weights[m] = std::pow(min_d2 / dist2[m], half_power);
    sum += weights[m];
  }
  for (double& w : weights) w /= sum;
  return weights;
}

ImageBuffer n_white_balance(const ImageBuffer& image, const Xyz& ground_truth, int n,
                            WhitePointEstimator kind, double weight_power) {
  if (!(weight_power > 0.0) || !std::isfinite(weight_power)) {
    throw Error("weight power must be positive and finite");
  }
  const BlockPartition partition = partition_blocks(image.width(), image.height(), n);
  const auto points = locate_white_points(image, partition, kind);

  std::vector<Mat3> corrections;
  corrections.reserve(points.size());
  for (const auto& p : points) {
    corrections.push_back(rgb_correction(p.value, ground_truth));
  }

  ImageBuffer out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto weights = idw_weights(x, y, points, weight_power);
      const auto sole = std::find(weights.begin(), weights.end(), 1.0);
      if (sole != weights.end()) {
        out.at(x, y) = corrections[sole - weights.begin()].apply(image.at(x, y));
        continue;
      }
      Mat3 blended;
      for (std::size_t m = 0; m < corrections.size(); ++m) {
        const double w = weights[m];
        if (w == 0.0) continue;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            blended.m[i][j] += w * corrections[m].m[i][j];
          }
        }
      }
      out.at(x, y) = blended.apply(image.at(x, y));
    }
  }
  return out;
}

}  // namespace nwb
