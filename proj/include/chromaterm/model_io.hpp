#pragma once

#include <chromaterm/ellipsoid_model.hpp>

#include <filesystem>
#include <string>

namespace chromaterm {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kRotationConvention = "R_L(theta)*R_a(phi)*R_b(gamma)";

/// JSON document with a fixed key order; doubles use the shortest representation
/// that reads back exactly, so write(read(text)) == text for canonical files.
std::string model_to_json(const ColourModel& model);
ColourModel model_from_json(const std::string& text);

ColourModel read_model(const std::filesystem::path& path);
/// Writes via a temporary file; nothing is left at `path` on failure.
void write_model(const std::filesystem::path& path, const ColourModel& model);

}  // namespace chromaterm
