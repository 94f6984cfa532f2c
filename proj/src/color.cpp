#include "nwb/color.hpp"

#include <cmath>
#include <string>

#include "nwb/error.hpp"

namespace nwb {

Mat3 Mat3::identity() { return diagonal(1.0, 1.0, 1.0); }

Mat3 Mat3::diagonal(double a, double b, double c) {
  Mat3 out;
  out.m[0][0] = a;
  out.m[1][1] = b;
  out.m[2][2] = c;
  return out;
}

Mat3 Mat3::operator*(const Mat3& rhs) const {
  Mat3 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.m[i][j] = m[i][0] * rhs.m[0][j] + m[i][1] * rhs.m[1][j] + m[i][2] * rhs.m[2][j];
    }
  }
  return out;
}

Mat3 Mat3::inverse() const {
  const auto& a = m;
  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error("singular 3x3 matrix");
  }
  const double inv = 1.0 / det;
  Mat3 out;
  out.m[0][0] = c00 * inv;
  out.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv;
  out.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv;
  out.m[1][0] = c01 * inv;
  out.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv;
  out.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv;
  out.m[2][0] = c02 * inv;
  out.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv;
  out.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv;
  return out;
}

std::array<double, 3> Mat3::apply(const std::array<double, 3>& v) const {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Xyz Mat3::apply(const Xyz& v) const {
  const auto r = apply(std::array<double, 3>{v.x, v.y, v.z});
  return {r[0], r[1], r[2]};
}

LinearRgb Mat3::apply(const LinearRgb& v) const {
  const auto r = apply(std::array<double, 3>{v.r, v.g, v.b});
  return {r[0], r[1], r[2]};
}

namespace {

struct DecodeTable {
  std::array<double, 256> values{};
  DecodeTable() {
    for (int i = 0; i < 256; ++i) {
      const double v = i / 255.0;
      values[i] = v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
    }
  }
};

const DecodeTable& decode_table() {
  static const DecodeTable table;
  return table;
}

Mat3 make_rgb_to_xyz() {
  Mat3 out;
  out.m = {{{0.4124564, 0.3575761, 0.1804375},
            {0.2126729, 0.7151522, 0.0721750},
            {0.0193339, 0.1191920, 0.9503041}}};
  return out;
}

Mat3 make_bradford() {
  Mat3 out;
  out.m = {{{0.8951, 0.2664, -0.1614},
            {-0.7502, 1.7135, 0.0367},
            {0.0389, -0.0685, 1.0296}}};
  return out;
}

double norm(const std::array<double, 3>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

double srgb_decode_channel(std::uint8_t code) { return decode_table().values[code]; }

std::uint8_t srgb_encode_channel(double linear) {
  if (!(linear > 0.0)) return 0;  // also maps NaN to 0
  if (linear >= 1.0) return 255;
  const double v =
      linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
  const double scaled = std::floor(v * 255.0 + 0.5);
  return static_cast<std::uint8_t>(scaled > 255.0 ? 255.0 : scaled);
}

LinearRgb srgb_decode(Srgb8 encoded) {
  return {srgb_decode_channel(encoded.r), srgb_decode_channel(encoded.g),
          srgb_decode_channel(encoded.b)};
}

Srgb8 srgb_encode(const LinearRgb& pixel) {
  return {srgb_encode_channel(pixel.r), srgb_encode_channel(pixel.g),
          srgb_encode_channel(pixel.b)};
}

const Mat3& rgb_to_xyz_matrix() {
  static const Mat3 m = make_rgb_to_xyz();
  return m;
}

const Mat3& xyz_to_rgb_matrix() {
  static const Mat3 m = rgb_to_xyz_matrix().inverse();
  return m;
}

const Mat3& bradford_matrix() {
  static const Mat3 m = make_bradford();
  return m;
}

Xyz rgb_to_xyz(const LinearRgb& pixel) {
  const auto v = rgb_to_xyz_matrix().apply(std::array<double, 3>{pixel.r, pixel.g, pixel.b});
  return {v[0], v[1], v[2]};
}

LinearRgb xyz_to_rgb(const Xyz& xyz) {
  const auto v = xyz_to_rgb_matrix().apply(std::array<double, 3>{xyz.x, xyz.y, xyz.z});
  return {v[0], v[1], v[2]};
}

double cosine_similarity(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

double cosine_similarity(const Xyz& a, const Xyz& b) {
  return cosine_similarity(std::array<double, 3>{a.x, a.y, a.z},
                           std::array<double, 3>{b.x, b.y, b.z});
}

double cosine_similarity(const LinearRgb& a, const LinearRgb& b) {
  return cosine_similarity(std::array<double, 3>{a.r, a.g, a.b},
                           std::array<double, 3>{b.r, b.g, b.b});
}

Mat3 adaptation_matrix(const Xyz& source, const Xyz& target) {
  auto check = [](const Xyz& w, const char* which) {
    if (!(w.x > 0.0 && w.y > 0.0 && w.z > 0.0) || !std::isfinite(w.x) ||
        !std::isfinite(w.y) || !std::isfinite(w.z)) {
      throw DegenerateWhitePointError(std::string(which) +
                                      " white point must have positive finite components");
    }
  };
  check(source, "source");
  check(target, "target");

  const Mat3& cone = bradford_matrix();
  static const Mat3 cone_inv = bradford_matrix().inverse();
  const auto s = cone.apply(std::array<double, 3>{source.x, source.y, source.z});
  const auto t = cone.apply(std::array<double, 3>{target.x, target.y, target.z});
  for (int i = 0; i < 3; ++i) {
    if (!(s[i] > 0.0) || !(t[i] > 0.0)) {
      throw DegenerateWhitePointError("white point has a non-positive cone response");
    }
  }
  return cone_inv * Mat3::diagonal(t[0] / s[0], t[1] / s[1], t[2] / s[2]) * cone;
}

}  // namespace nwb
