#pragma once

#include <vector>

#include "nwb/scenegen.hpp"

namespace nwb::acceptance {

inline constexpr int kSuiteWidth = 627;
inline constexpr int kSuiteHeight = 418;
inline constexpr int kSuiteTemplate = 81;
inline constexpr int kSuiteSize = 8;

// One cast over the whole frame, gains uniform in [0.5, 1.0] per channel.
std::vector<SceneSpec> single_cast_suite();

// A warm and a cool lamp. Scenes 0-3 split the frame hard (alternating
// vertical and horizontal) with the template inside one side; scenes 4-7 blend
// the lamps over the middle 40% of the frame with the template inside the
// blend.
std::vector<SceneSpec> two_cast_suite();

}  // namespace nwb::acceptance
