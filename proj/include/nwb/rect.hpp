#pragma once

#include <compare>

namespace nwb {

// Pixel-aligned rectangle; (x, y) is the top-left pixel.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  long long area() const { return static_cast<long long>(w) * h; }
  bool contains(int px, int py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace nwb
