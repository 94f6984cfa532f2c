#include "nwb/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "nwb/error.hpp"

namespace nwb {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Xoshiro256StarStar::next() {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256StarStar::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

int Xoshiro256StarStar::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<long long>(hi) - lo + 1);
  return lo + static_cast<int>(next() % span);
}

double Xoshiro256StarStar::gaussian() {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

bool inside(const Rect& r, int width, int height) {
  return r.w >= 1 && r.h >= 1 && r.x >= 0 && r.y >= 0 && r.right() <= width &&
         r.bottom() <= height;
}

bool overlaps(const Rect& a, const Rect& b) {
  return a.x < b.right() && b.x < a.right() && a.y < b.bottom() && b.y < a.bottom();
}

double region_weight(const IlluminantRegion& region, double u, double v) {
  using Kind = IlluminantRegion::Kind;
  switch (region.kind) {
    case Kind::Full:
      return 1.0;
    case Kind::Half:
      if (region.side == "left") return u < region.at ? 1.0 : 0.0;
      if (region.side == "right") return u >= region.at ? 1.0 : 0.0;
      if (region.side == "top") return v < region.at ? 1.0 : 0.0;
      return v >= region.at ? 1.0 : 0.0;
    case Kind::Quadrant: {
      const bool left = u < region.cx;
      const bool top = v < region.cy;
      if (region.quadrant == "tl") return left && top ? 1.0 : 0.0;
      if (region.quadrant == "tr") return !left && top ? 1.0 : 0.0;
      if (region.quadrant == "bl") return left && !top ? 1.0 : 0.0;
      return !left && !top ? 1.0 : 0.0;
    }
    case Kind::Gradient: {
      const double t = region.axis == "x" ? u : v;
      if (region.start == region.end) return t >= region.start ? 1.0 : 0.0;
      return std::clamp((t - region.start) / (region.end - region.start), 0.0, 1.0);
    }
  }
  return 0.0;
}

// Five-pointed star on the background, 4x4 supersampled.
ImageBuffer render_star_patch(int w, int h, const LinearRgb& color) {
  ImageBuffer patch(w, h, LinearRgb{kBackgroundLevel, kBackgroundLevel, kBackgroundLevel});
  const double cx = w / 2.0;
  const double cy = h / 2.0;
  const double outer = 0.46 * std::min(w, h);
  const double inner = 0.45 * outer;
  std::array<std::array<double, 2>, 10> poly{};
  for (int k = 0; k < 10; ++k) {
    const double angle = -std::numbers::pi / 2.0 + k * std::numbers::pi / 5.0;
    const double r = (k % 2 == 0) ? outer : inner;
    poly[k] = {cx + r * std::cos(angle), cy + r * std::sin(angle)};
  }
  auto in_star = [&](double px, double py) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const auto& a = poly[i];
      const auto& b = poly[j];
      if ((a[1] > py) != (b[1] > py) &&
          px < (b[0] - a[0]) * (py - a[1]) / (b[1] - a[1]) + a[0]) {
        in = !in;
      }
    }
    return in;
  };
  constexpr int kSub = 4;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int hits = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          if (in_star(x + (sx + 0.5) / kSub, y + (sy + 0.5) / kSub)) ++hits;
        }
      }
      const double a = static_cast<double>(hits) / (kSub * kSub);
      patch.at(x, y) = {kBackgroundLevel * (1.0 - a) + color.r * a,
                        kBackgroundLevel * (1.0 - a) + color.g * a,
                        kBackgroundLevel * (1.0 - a) + color.b * a};
    }
  }
  return patch;
}

LinearRgb clamp_pigment(const LinearRgb& c) {
  return {std::clamp(c.r, 0.02, kBackgroundLevel), std::clamp(c.g, 0.02, kBackgroundLevel),
          std::clamp(c.b, 0.02, kBackgroundLevel)};
}

LinearRgb draw_template_color(Xoshiro256StarStar& rng) {
  // One strong channel, the others clearly weaker.
  std::array<double, 3> c{rng.uniform(0.05, 0.35), rng.uniform(0.05, 0.35),
                          rng.uniform(0.05, 0.35)};
  c[rng.uniform_int(0, 2)] = rng.uniform(0.6, 0.8);
  return {c[0], c[1], c[2]};
}

}  // namespace

void validate(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1) {
    throw InvalidSpecError("size: width and height must be positive");
  }
  if (!inside(spec.template_rect, spec.width, spec.height)) {
    throw InvalidSpecError("template_rect: must be non-empty and lie inside the frame");
  }
  if (spec.illuminants.empty()) {
    throw InvalidSpecError("illuminants: at least one illuminant is required");
  }
  for (std::size_t i = 0; i < spec.illuminants.size(); ++i) {
    const auto& il = spec.illuminants[i];
    const std::string where = "illuminants[" + std::to_string(i) + "]";
    if (!positive_finite(il.gain.r) || !positive_finite(il.gain.g) ||
        !positive_finite(il.gain.b)) {
      throw InvalidSpecError(where + ".gain: every channel must be > 0");
    }
    const auto& r = il.region;
    using Kind = IlluminantRegion::Kind;
    if (r.kind == Kind::Half && r.side != "left" && r.side != "right" && r.side != "top" &&
        r.side != "bottom") {
      throw InvalidSpecError(where + ".region.side: expected left|right|top|bottom");
    }
    if (r.kind == Kind::Quadrant && r.quadrant != "tl" && r.quadrant != "tr" &&
        r.quadrant != "bl" && r.quadrant != "br") {
      throw InvalidSpecError(where + ".region.quadrant: expected tl|tr|bl|br");
    }
    if (r.kind == Kind::Gradient && r.axis != "x" && r.axis != "y") {
      throw InvalidSpecError(where + ".region.axis: expected x|y");
    }
    if (!std::isfinite(r.at) || !std::isfinite(r.cx) || !std::isfinite(r.cy) ||
        !std::isfinite(r.start) || !std::isfinite(r.end)) {
      throw InvalidSpecError(where + ".region: coordinates must be finite");
    }
  }
  if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0) {
    throw InvalidSpecError("noise_sigma: must be finite and >= 0");
  }
  if (spec.template_color) {
    const auto& c = *spec.template_color;
    for (double v : {c.r, c.g, c.b}) {
      if (!std::isfinite(v) || v < 0.0 || v > kBackgroundLevel) {
        throw InvalidSpecError("template_color: channels must lie in [0, background level]");
      }
    }
  }
  for (std::size_t i = 0; i < spec.decoys.size(); ++i) {
    const auto& d = spec.decoys[i];
    const std::string where = "decoys[" + std::to_string(i) + "]";
    const Rect r{d.x, d.y, spec.template_rect.w, spec.template_rect.h};
    if (!inside(r, spec.width, spec.height)) {
      throw InvalidSpecError(where + ": decoy must lie inside the frame");
    }
    if (overlaps(r, spec.template_rect)) {
      throw InvalidSpecError(where + ": decoy overlaps template_rect");
    }
    if (!positive_finite(d.tint.r) || !positive_finite(d.tint.g) ||
        !positive_finite(d.tint.b)) {
      throw InvalidSpecError(where + ".tint: every channel must be > 0");
    }
  }
}

LinearRgb illumination_gain(const SceneSpec& spec, int x, int y) {
  const double u = (x + 0.5) / spec.width;
  const double v = (y + 0.5) / spec.height;
  LinearRgb acc;
  double total = 0.0;
  for (const auto& il : spec.illuminants) {
    const double w = region_weight(il.region, u, v);
    if (w <= 0.0) continue;
    acc.r += w * il.gain.r;
    acc.g += w * il.gain.g;
    acc.b += w * il.gain.b;
    total += w;
  }
  if (total <= 0.0) return {1.0, 1.0, 1.0};
  return {acc.r / total, acc.g / total, acc.b / total};
}

ImageBuffer render_base(const SceneSpec& spec) {
  validate(spec);
  Xoshiro256StarStar rng(spec.seed);
  const LinearRgb star = spec.template_color ? *spec.template_color : draw_template_color(rng);

  ImageBuffer base(spec.width, spec.height, LinearRgb{kBackgroundLevel, kBackgroundLevel, kBackgroundLevel});

  const long long area = static_cast<long long>(spec.width) * spec.height;
  const int shape_count = static_cast<int>(std::max<long long>(4, area / 5000));
  const int max_extent = std::max(8, std::min(spec.width, spec.height) / 8);
  for (int s = 0; s < shape_count; ++s) {
    const bool ellipse = rng.uniform() < 0.5;
    const int sw = rng.uniform_int(4, max_extent);
    const int sh = rng.uniform_int(4, max_extent);
    const int x0 = rng.uniform_int(-sw / 2, spec.width - sw / 2);
    const int y0 = rng.uniform_int(-sh / 2, spec.height - sh / 2);
    const LinearRgb color{rng.uniform(0.03, 0.8), rng.uniform(0.03, 0.8),
                          rng.uniform(0.03, 0.8)};
    const double rx = sw / 2.0;
    const double ry = sh / 2.0;
    for (int y = std::max(0, y0); y < std::min(spec.height, y0 + sh); ++y) {
      for (int x = std::max(0, x0); x < std::min(spec.width, x0 + sw); ++x) {
        if (ellipse) {
          const double dx = (x + 0.5 - x0 - rx) / rx;
          const double dy = (y + 0.5 - y0 - ry) / ry;
          if (dx * dx + dy * dy > 1.0) continue;
        }
        base.at(x, y) = color;
      }
    }
  }

  const int tw = spec.template_rect.w;
  const int th = spec.template_rect.h;
  for (const auto& d : spec.decoys) {
    const LinearRgb tinted{star.r * d.tint.r, star.g * d.tint.g, star.b * d.tint.b};
    base.paste(render_star_patch(tw, th, clamp_pigment(tinted)), d.x, d.y);
  }
  base.paste(render_star_patch(tw, th, star), spec.template_rect.x, spec.template_rect.y);
  return base;
}

SceneBundle generate_scene(const SceneSpec& spec) {
  const ImageBuffer base = render_base(spec);
  ImageBuffer query(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const LinearRgb g = illumination_gain(spec, x, y);
      const LinearRgb& p = base.at(x, y);
      query.at(x, y) = {p.r * g.r, p.g * g.g, p.b * g.b};
    }
  }
  if (spec.noise_sigma > 0.0) {
    std::uint64_t state = spec.seed;
    splitmix64(state);
    Xoshiro256StarStar noise(splitmix64(state) ^ 0x6e6f697365ULL);
    for (auto& p : query.pixels()) {
      p.r = std::clamp(p.r + spec.noise_sigma * noise.gaussian(), 0.0, 1.0);
      p.g = std::clamp(p.g + spec.noise_sigma * noise.gaussian(), 0.0, 1.0);
      p.b = std::clamp(p.b + spec.noise_sigma * noise.gaussian(), 0.0, 1.0);
    }
  }
  return SceneBundle{std::move(query), base.crop(spec.template_rect), spec.template_rect};
}

// --- JSON ------------------------------------------------------------------

namespace {

LinearRgb rgb_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw InvalidSpecError(where + ": expected an array of three numbers");
  }
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidSpecError(where + ": expected numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json rgb_to_json(const LinearRgb& c) { return json::array({c.r, c.g, c.b}); }

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InvalidSpecError(where + "." + key + ": missing");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidSpecError(where + "." + key + ": wrong type");
  }
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidSpecError(where + "." + key + ": wrong type");
  }
}

IlluminantRegion region_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidSpecError(where + ": expected an object");
  IlluminantRegion r;
  const auto kind = required<std::string>(j, "kind", where);
  using Kind = IlluminantRegion::Kind;
  if (kind == "full") {
    r.kind = Kind::Full;
  } else if (kind == "half") {
    r.kind = Kind::Half;
    r.side = optional_field<std::string>(j, "side", r.side, where);
    r.at = optional_field<double>(j, "at", r.at, where);
  } else if (kind == "quadrant") {
    r.kind = Kind::Quadrant;
    r.quadrant = optional_field<std::string>(j, "quadrant", r.quadrant, where);
    r.cx = optional_field<double>(j, "cx", r.cx, where);
    r.cy = optional_field<double>(j, "cy", r.cy, where);
  } else if (kind == "gradient") {
    r.kind = Kind::Gradient;
    r.axis = optional_field<std::string>(j, "axis", r.axis, where);
    r.start = optional_field<double>(j, "start", r.start, where);
    r.end = optional_field<double>(j, "end", r.end, where);
  } else {
    throw InvalidSpecError(where + ".kind: expected full|half|quadrant|gradient");
  }
  return r;
}

json region_to_json(const IlluminantRegion& r) {
  using Kind = IlluminantRegion::Kind;
  switch (r.kind) {
    case Kind::Full:
      return {{"kind", "full"}};
    case Kind::Half:
      return {{"kind", "half"}, {"side", r.side}, {"at", r.at}};
    case Kind::Quadrant:
      return {{"kind", "quadrant"}, {"quadrant", r.quadrant}, {"cx", r.cx}, {"cy", r.cy}};
    case Kind::Gradient:
      return {{"kind", "gradient"}, {"axis", r.axis}, {"start", r.start}, {"end", r.end}};
  }
  return {};
}

}  // namespace

SceneSpec scene_spec_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidSpecError(std::string("scene spec is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidSpecError("scene spec: expected a JSON object");

  SceneSpec spec;
  const json& size = root.contains("size") ? root["size"] : json();
  if (!size.is_object()) throw InvalidSpecError("spec.size: missing or not an object");
  spec.width = required<int>(size, "width", "spec.size");
  spec.height = required<int>(size, "height", "spec.size");
  const json& seed = root.contains("seed") ? root["seed"] : json();
  if (!seed.is_number_integer()) throw InvalidSpecError("spec.seed: expected an integer");
  spec.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                        : static_cast<std::uint64_t>(seed.get<std::int64_t>());

  const json& tr = root.contains("template_rect") ? root["template_rect"] : json();
  spec.template_rect = Rect{required<int>(tr, "x", "spec.template_rect"),
                            required<int>(tr, "y", "spec.template_rect"),
                            required<int>(tr, "w", "spec.template_rect"),
                            required<int>(tr, "h", "spec.template_rect")};

  if (!root.contains("illuminants") || !root["illuminants"].is_array()) {
    throw InvalidSpecError("spec.illuminants: missing or not an array");
  }
  for (std::size_t i = 0; i < root["illuminants"].size(); ++i) {
    const json& il = root["illuminants"][i];
    const std::string where = "spec.illuminants[" + std::to_string(i) + "]";
    if (!il.is_object()) throw InvalidSpecError(where + ": expected an object");
    Illuminant out;
    if (!il.contains("gain")) throw InvalidSpecError(where + ".gain: missing");
    out.gain = rgb_from_json(il["gain"], where + ".gain");
    if (il.contains("region")) out.region = region_from_json(il["region"], where + ".region");
    spec.illuminants.push_back(out);
  }
  spec.noise_sigma = optional_field<double>(root, "noise_sigma", 0.0, "spec");
  if (root.contains("template_color")) {
    spec.template_color = rgb_from_json(root["template_color"], "spec.template_color");
  }
  if (root.contains("decoys")) {
    if (!root["decoys"].is_array()) throw InvalidSpecError("spec.decoys: expected an array");
    for (std::size_t i = 0; i < root["decoys"].size(); ++i) {
      const json& d = root["decoys"][i];
      const std::string where = "spec.decoys[" + std::to_string(i) + "]";
      Decoy out;
      out.x = required<int>(d, "x", where);
      out.y = required<int>(d, "y", where);
      if (d.contains("tint")) out.tint = rgb_from_json(d["tint"], where + ".tint");
      spec.decoys.push_back(out);
    }
  }
  validate(spec);
  return spec;
}

std::string scene_spec_to_json(const SceneSpec& spec) {
  json root;
  root["size"] = {{"width", spec.width}, {"height", spec.height}};
  root["seed"] = spec.seed;
  root["template_rect"] = {{"x", spec.template_rect.x},
                           {"y", spec.template_rect.y},
                           {"w", spec.template_rect.w},
                           {"h", spec.template_rect.h}};
  json illuminants = json::array();
  for (const auto& il : spec.illuminants) {
    illuminants.push_back({{"gain", rgb_to_json(il.gain)}, {"region", region_to_json(il.region)}});
  }
  root["illuminants"] = illuminants;
  root["noise_sigma"] = spec.noise_sigma;
  if (spec.template_color) root["template_color"] = rgb_to_json(*spec.template_color);
  if (!spec.decoys.empty()) {
    json decoys = json::array();
    for (const auto& d : spec.decoys) {
      decoys.push_back({{"x", d.x}, {"y", d.y}, {"tint", rgb_to_json(d.tint)}});
    }
    root["decoys"] = decoys;
  }
  return root.dump(2) + "\n";
}

}  // namespace nwb
