#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chromaterm {

/// One image of a labelled directory tree.
struct LabelledFile {
    std::filesystem::path image;
    std::optional<std::filesystem::path> mask;  // absent: the whole image carries the label
    std::string label;
};

/// Scans `root/<term>/<image>` with optional `root/<term>/masks/<image>` binary masks.
/// Terms and files are returned in lexicographic order. Only .png, .ppm and .pnm
/// files are considered images.
std::vector<LabelledFile> scan_labelled_directory(const std::filesystem::path& root);

/// Files directly inside `dir` that look like images, sorted; masks are taken
/// from `dir/masks/<name>` when present.
std::vector<LabelledFile> scan_image_files(const std::filesystem::path& dir, const std::string& label);

/// Mask path for an image following the sibling `masks/` convention, if that file exists.
std::optional<std::filesystem::path> sibling_mask(const std::filesystem::path& image);

bool has_image_extension(const std::filesystem::path& p);

}  // namespace chromaterm
