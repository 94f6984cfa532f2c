#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nwb/color.hpp"
#include "nwb/image.hpp"
#include "nwb/rect.hpp"

namespace nwb {

// xoshiro256** 1.0 seeded through splitmix64. Fixed algorithm so scenes are
// portable test vectors.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, 1) with 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  // Standard normal via the Box-Muller transform (one value per call).
  double gaussian();

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

// Where an illuminant shines. Coordinates are fractions of the frame,
// evaluated at pixel centres.
struct IlluminantRegion {
  enum class Kind { Full, Half, Quadrant, Gradient };
  Kind kind = Kind::Full;
  // Half: "left" | "right" | "top" | "bottom", split at `at`.
  std::string side = "left";
  double at = 0.5;
  // Quadrant: "tl" | "tr" | "bl" | "br" around (cx, cy).
  std::string quadrant = "tl";
  double cx = 0.5;
  double cy = 0.5;
  // Gradient: weight ramps linearly from 0 at `start` to 1 at `end` along
  // `axis` ("x" | "y"), clamped outside. start > end gives a falling ramp.
  std::string axis = "x";
  double start = 0.0;
  double end = 1.0;
};

struct Illuminant {
  LinearRgb gain{1.0, 1.0, 1.0};
  IlluminantRegion region;
};

// A recoloured copy of the template: the template's star colour is
// multiplied channel-wise by `tint`.
struct Decoy {
  int x = 0;
  int y = 0;
  LinearRgb tint{1.0, 1.0, 1.0};
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  Rect template_rect;
  std::vector<Illuminant> illuminants;
  double noise_sigma = 0.0;
  // Star colour of the template; drawn from the seed when absent.
  std::optional<LinearRgb> template_color;
  std::vector<Decoy> decoys;
};

struct SceneBundle {
  ImageBuffer query;
  ImageBuffer templ;  // pre-cast, as seen under the reference light
  Rect ground_truth;
};

// Reflectance of the blank background the scene is printed on. Every other
// surface is at most this bright in every channel.
inline constexpr double kBackgroundLevel = 0.85;

// Throws InvalidSpecError on an invalid spec.
void validate(const SceneSpec& spec);

// Per-pixel illumination gain: weighted mean of the covering illuminants'
// gains; (1, 1, 1) where no illuminant has positive weight.
LinearRgb illumination_gain(const SceneSpec& spec, int x, int y);

// Scene content before illumination and noise.
ImageBuffer render_base(const SceneSpec& spec);

SceneBundle generate_scene(const SceneSpec& spec);

// JSON schema:
// {
//   "size": {"width": W, "height": H},
//   "seed": 42,
//   "template_rect": {"x": .., "y": .., "w": .., "h": ..},
//   "illuminants": [{"gain": [r, g, b], "region": {"kind": "full"}}, ...],
//   "noise_sigma": 0.0,
//   "template_color": [r, g, b],                      (optional)
//   "decoys": [{"x": .., "y": .., "tint": [r, g, b]}] (optional)
// }
// Region kinds: {"kind":"full"}, {"kind":"half","side":"left","at":0.5},
// {"kind":"quadrant","quadrant":"tl","cx":0.5,"cy":0.5},
// {"kind":"gradient","axis":"x","start":0.3,"end":0.7}.
SceneSpec scene_spec_from_json(const std::string& text);
std::string scene_spec_to_json(const SceneSpec& spec);

}  // namespace nwb
