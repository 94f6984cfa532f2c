#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nwb/color.hpp"
#include "nwb/rect.hpp"

namespace nwb {

// Row-major W x H raster of linear RGB pixels.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  // Throws DimensionError for non-positive sizes.
  ImageBuffer(int width, int height, LinearRgb fill = {});
  ImageBuffer(int width, int height, std::vector<LinearRgb> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  LinearRgb& at(int x, int y) { return data_[index(x, y)]; }
  const LinearRgb& at(int x, int y) const { return data_[index(x, y)]; }

  std::span<LinearRgb> pixels() { return data_; }
  std::span<const LinearRgb> pixels() const { return data_; }

  // Copy of the pixels inside `r`; throws DimensionError when r leaves the frame.
  ImageBuffer crop(const Rect& r) const;
  void paste(const ImageBuffer& src, int x, int y);

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<LinearRgb> data_;
};

// Clamp every channel into [0, 1].
ImageBuffer clamp_unit(const ImageBuffer& image);

}  // namespace nwb
