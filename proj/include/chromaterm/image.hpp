#pragma once

#include <chromaterm/colourspace.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace chromaterm {

/// Decoded RGB image with channels normalised to [0,1]. Greyscale sources are
/// expanded to RGB, alpha is dropped, 16-bit samples are divided by 65535.
struct Image {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    std::vector<Srgb> pixels;  // row-major

    Image() = default;
    Image(int w, int h, Srgb fill = {});

    const Srgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    Srgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return pixels.size(); }
};

/// Binary region mask; `true` marks labelled pixels.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> on;

    Mask() = default;
    Mask(int w, int h, bool value);

    bool at(int x, int y) const { return on[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t count() const;
};

/// Decodes PNG (8/16-bit, any colour type) or binary PPM/PGM (P6/P5), chosen by magic bytes.
/// Throws chromaterm::Error (data) with the file name and reason on failure.
Image read_image(const std::filesystem::path& path);

/// Reads an image and thresholds it: pixels whose mean channel value is >= 0.5 are "on".
Mask read_mask(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place on success,
/// so a failed write never leaves a partial file at `path`.
void write_atomically(const std::filesystem::path& path, const std::function<void(const std::filesystem::path&)>& writer);

void write_png_rgb8(const std::filesystem::path& path, int width, int height, std::span<const Srgb8> pixels);
void write_png_grey8(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> values);
/// 8-bit palette PNG; every index must be < palette.size() <= 256.
void write_png_indexed(const std::filesystem::path& path, int width, int height,
                       std::span<const std::uint8_t> indices, std::span<const Srgb8> palette);
void write_png_rgb16(const std::filesystem::path& path, const Image& image);
void write_ppm(const std::filesystem::path& path, int width, int height, std::span<const Srgb8> pixels);

/// Image quantised to 8 bits per channel.
std::vector<Srgb8> to_rgb8(const Image& image);

/// Decoded 8-bit palette PNG: indices plus palette, used to inspect label maps.
struct IndexedImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> indices;
    std::vector<Srgb8> palette;
};
IndexedImage read_png_indexed(const std::filesystem::path& path);

}  // namespace chromaterm
