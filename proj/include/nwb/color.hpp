#pragma once

#include <array>
#include <cstdint>

namespace nwb {

struct LinearRgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const LinearRgb&, const LinearRgb&) = default;
};

struct Xyz {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Xyz&, const Xyz&) = default;
};

struct Srgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Srgb8&, const Srgb8&) = default;
};

// Row-major 3x3 matrix acting on column vectors.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  static Mat3 identity();
  static Mat3 diagonal(double a, double b, double c);

  double operator()(int row, int col) const { return m[row][col]; }
  double& operator()(int row, int col) { return m[row][col]; }

  Mat3 operator*(const Mat3& rhs) const;
  Mat3 inverse() const;

  std::array<double, 3> apply(const std::array<double, 3>& v) const;
  Xyz apply(const Xyz& v) const;
  LinearRgb apply(const LinearRgb& v) const;

  friend bool operator==(const Mat3&, const Mat3&) = default;
};

// D65 reference white, 2 degree observer, Y normalised to 1.
inline constexpr Xyz kD65{0.95047, 1.00000, 1.08883};

// sRGB (IEC 61966-2-1) transfer function on a single channel.
double srgb_decode_channel(std::uint8_t code);
std::uint8_t srgb_encode_channel(double linear);

LinearRgb srgb_decode(Srgb8 encoded);
Srgb8 srgb_encode(const LinearRgb& pixel);

// Linear sRGB primaries with D65 white.
const Mat3& rgb_to_xyz_matrix();
const Mat3& xyz_to_rgb_matrix();

Xyz rgb_to_xyz(const LinearRgb& pixel);
LinearRgb xyz_to_rgb(const Xyz& xyz);

// Cosine of the angle between two triples. Returns 0 when either has zero
// norm so that black pixels never look like a white-point carrier.
double cosine_similarity(const std::array<double, 3>& a, const std::array<double, 3>& b);
double cosine_similarity(const Xyz& a, const Xyz& b);
double cosine_similarity(const LinearRgb& a, const LinearRgb& b);

// Bradford chromatic adaptation carrying `source` white onto `target` white
// in XYZ. Throws DegenerateWhitePointError unless every component (and every
// cone response) of both white points is strictly positive.
Mat3 adaptation_matrix(const Xyz& source, const Xyz& target);

const Mat3& bradford_matrix();

}  // namespace nwb
