#pragma once

#include <chromaterm/colourspace.hpp>
#include <chromaterm/ellipsoid_model.hpp>

#include <optional>
#include <string_view>
#include <vector>

namespace chromaterm {

/// Fixed display colour for a known term name (the eleven basic terms plus a few
/// common extras such as "cream").
std::optional<Srgb8> display_colour(std::string_view term);

/// One display colour per model term, in model order. Terms without a fixed
/// entry are shown as their ellipsoid centre rendered to sRGB.
std::vector<Srgb8> model_palette(const ColourModel& model);

}  // namespace chromaterm
