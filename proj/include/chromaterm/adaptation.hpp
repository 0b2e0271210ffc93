#pragma once

#include <chromaterm/ellipsoid_model.hpp>
#include <chromaterm/image.hpp>

#include <string>
#include <vector>

namespace chromaterm {

struct AdaptationConfig {
    std::vector<std::string> achromatic_terms{"black", "grey", "white"};
    /// Stretch per Lab unit of mean chroma deviation. Zero disables adaptation.
    double gain = 1.0;
};

/// Mean (a*, b*) of an image, i.e. its average departure from neutral grey.
struct ChromaDeviation {
    double a = 0.0;
    double b = 0.0;

    double norm() const;
};

/// Deviations shorter than this (Lab units) leave the model untouched.
inline constexpr double kAdaptationThreshold = 0.5;

ChromaDeviation mean_chroma_deviation(const Image& image);

/// Stretches each achromatic term by 1 + gain * |deviation| along the deviation
/// direction in the world a*b* plane. The stretch moves points only along that
/// direction, keeping the ellipsoid's conjugate diametral plane fixed, so the
/// result is a quadric containing the original one; it is stored as the term's
/// adapted quadratic form. Chromatic terms are copied untouched.
ColourModel adapt_model(const ColourModel& model, ChromaDeviation deviation, const AdaptationConfig& config);
ColourModel adapt_model(const ColourModel& model, const Image& image, const AdaptationConfig& config);

}  // namespace chromaterm
