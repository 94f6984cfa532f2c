#include "nwb/image.hpp"

#include <algorithm>
#include <string>

#include "nwb/error.hpp"

namespace nwb {

ImageBuffer::ImageBuffer(int width, int height, LinearRgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw DimensionError("image dimensions must be positive, got " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<LinearRgb> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw DimensionError("image dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionError("pixel count does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

ImageBuffer ImageBuffer::crop(const Rect& r) const {
  if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.right() > width_ || r.bottom() > height_) {
    throw DimensionError("crop rectangle leaves the image frame");
  }
  ImageBuffer out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    for (int x = 0; x < r.w; ++x) {
      out.at(x, y) = at(r.x + x, r.y + y);
    }
  }
  return out;
}

void ImageBuffer::paste(const ImageBuffer& src, int x0, int y0) {
  if (x0 < 0 || y0 < 0 || x0 + src.width() > width_ || y0 + src.height() > height_) {
    throw DimensionError("paste target leaves the image frame");
  }
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      at(x0 + x, y0 + y) = src.at(x, y);
    }
  }
}

ImageBuffer clamp_unit(const ImageBuffer& image) {
  ImageBuffer out = image;
  for (auto& p : out.pixels()) {
    p.r = std::clamp(p.r, 0.0, 1.0);
    p.g = std::clamp(p.g, 0.0, 1.0);
    p.b = std::clamp(p.b, 0.0, 1.0);
  }
  return out;
}

}  // namespace nwb
