#include "scene_suites.hpp"

#include <algorithm>
#include <array>

namespace nwb::acceptance {

namespace {

LinearRgb draw_template_color(Xoshiro256StarStar& rng) {
  std::array<double, 3> c{rng.uniform(0.05, 0.35), rng.uniform(0.05, 0.35),
                          rng.uniform(0.05, 0.35)};
  c[static_cast<std::size_t>(rng.uniform_int(0, 2))] = rng.uniform(0.6, 0.8);
  return {c[0], c[1], c[2]};
}

bool overlaps(const Rect& a, const Rect& b) {
  return a.x < b.right() && b.x < a.right() && a.y < b.bottom() && b.y < a.bottom();
}

// Three recoloured copies carrying the other channel orders of the template
// colour, scattered without overlap.
void add_decoys(SceneSpec& spec, Xoshiro256StarStar& rng) {
  const LinearRgb c = *spec.template_color;
  const std::array<LinearRgb, 3> perms{LinearRgb{c.g, c.b, c.r}, LinearRgb{c.b, c.r, c.g},
                                       LinearRgb{c.r, c.b, c.g}};
  std::vector<Rect> taken{spec.template_rect};
  const int side = spec.template_rect.w;
  for (const LinearRgb& p : perms) {
    for (;;) {
      const Rect r{rng.uniform_int(0, spec.width - side), rng.uniform_int(0, spec.height - side),
                   side, side};
      if (std::none_of(taken.begin(), taken.end(),
                       [&](const Rect& t) { return overlaps(r, t); })) {
        taken.push_back(r);
        spec.decoys.push_back({r.x, r.y, {p.r / c.r, p.g / c.g, p.b / c.b}});
        break;
      }
    }
  }
}

SceneSpec frame(std::uint64_t seed) {
  SceneSpec s;
  s.seed = seed;
  s.width = kSuiteWidth;
  s.height = kSuiteHeight;
  s.noise_sigma = 0.01;
  return s;
}

}  // namespace

std::vector<SceneSpec> single_cast_suite() {
  std::vector<SceneSpec> suite;
  for (int i = 0; i < kSuiteSize; ++i) {
    SceneSpec s = frame(1000 + static_cast<std::uint64_t>(i));
    Xoshiro256StarStar rng(s.seed ^ 0x5c3e5ull);
    s.template_color = draw_template_color(rng);
    s.template_rect = {rng.uniform_int(0, s.width - kSuiteTemplate),
                       rng.uniform_int(0, s.height - kSuiteTemplate), kSuiteTemplate,
                       kSuiteTemplate};
    s.illuminants.push_back(
        {{rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0)}, {}});
    add_decoys(s, rng);
    suite.push_back(s);
  }
  return suite;
}

std::vector<SceneSpec> two_cast_suite() {
  std::vector<SceneSpec> suite;
  for (int i = 0; i < kSuiteSize; ++i) {
    SceneSpec s = frame(2000 + static_cast<std::uint64_t>(i));
    Xoshiro256StarStar rng(s.seed ^ 0x5c3e5ull);
    s.template_color = draw_template_color(rng);
    const LinearRgb warm{1.0, rng.uniform(0.6, 0.8), rng.uniform(0.3, 0.5)};
    const LinearRgb cool{rng.uniform(0.3, 0.5), rng.uniform(0.6, 0.8), 1.0};
    const bool along_x = i % 2 == 0;
    const int extent = along_x ? s.width : s.height;
    const int across = along_x ? s.height : s.width;
    int lo = 0, hi = 0;
    IlluminantRegion first, second;
    if (i < 4) {
      first.kind = second.kind = IlluminantRegion::Kind::Half;
      first.side = along_x ? "left" : "top";
      second.side = along_x ? "right" : "bottom";
      first.at = second.at = 0.5;
      if (rng.uniform() < 0.5) {
        lo = 0;
        hi = extent / 2 - kSuiteTemplate;
      } else {
        lo = (extent + 1) / 2;
        hi = extent - kSuiteTemplate;
      }
    } else {
      first.kind = second.kind = IlluminantRegion::Kind::Gradient;
      first.axis = second.axis = along_x ? "x" : "y";
      first.start = 0.7;
      first.end = 0.3;
      second.start = 0.3;
      second.end = 0.7;
      lo = static_cast<int>(0.3 * extent);
      hi = static_cast<int>(0.7 * extent) - kSuiteTemplate;
    }
    const int along = rng.uniform_int(lo, hi);
    const int other = rng.uniform_int(0, across - kSuiteTemplate);
    s.template_rect = along_x ? Rect{along, other, kSuiteTemplate, kSuiteTemplate}
                              : Rect{other, along, kSuiteTemplate, kSuiteTemplate};
    s.illuminants = {{warm, first}, {cool, second}};
    add_decoys(s, rng);
    suite.push_back(s);
  }
  return suite;
}

}  // namespace nwb::acceptance
