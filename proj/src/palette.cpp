#include <chromaterm/palette.hpp>

#include <array>
#include <utility>

namespace chromaterm {

namespace {

struct PaletteEntry {
    std::string_view name;
    Srgb8 colour;
};

constexpr std::array<PaletteEntry, 16> kPalette{{
    {"black", {0, 0, 0}},
    {"blue", {0, 0, 255}},
    {"brown", {139, 69, 19}},
    {"green", {0, 170, 0}},
    {"grey", {128, 128, 128}},
    {"orange", {255, 140, 0}},
    {"pink", {255, 150, 200}},
    {"purple", {128, 0, 160}},
    {"red", {220, 0, 0}},
    {"white", {255, 255, 255}},
    {"yellow", {255, 235, 0}},
    {"cream", {255, 245, 200}},
    {"olive", {128, 128, 0}},
    {"turquoise", {64, 224, 208}},
    {"beige", {225, 205, 160}},
    {"cyan", {0, 220, 220}},
}};

}  // namespace

std::optional<Srgb8> display_colour(std::string_view term) {
    for (const auto& e : kPalette)
        if (e.name == term) return e.colour;
    return std::nullopt;
}

std::vector<Srgb8> model_palette(const ColourModel& model) {
    std::vector<Srgb8> out;
    out.reserve(model.size());
    for (const auto& t : model.terms())
        out.push_back(display_colour(t.name).value_or(quantise(lab_to_srgb(t.ellipsoid.centre))));
    return out;
}

}  // namespace chromaterm
