#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace chromaterm {

/// 8-bit sRGB triple, channels 0..255.
struct Srgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Srgb8&, const Srgb8&) = default;
};

/// Normalised sRGB triple, channels in [0,1].
struct Srgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    friend bool operator==(const Srgb&, const Srgb&) = default;
};

/// A point in CIE L*a*b*. No box constraint: out-of-gamut values are legal.
struct LabColour {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;

    Eigen::Vector3d vec() const { return {L, a, b}; }
    static LabColour from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

    friend bool operator==(const LabColour&, const LabColour&) = default;
};

/// Reference white in XYZ, normalised so that Y = 1.
struct WhitePoint {
    double X = 0.0;
    double Y = 1.0;
    double Z = 0.0;

    static WhitePoint from_chromaticity(double x, double y);
    /// CIE D65, 2 degree observer, from its chromaticity (0.3127, 0.3290).
    static WhitePoint d65();
};

Srgb normalise(Srgb8 c);

/// Rounds and clamps each channel to 0..255.
Srgb8 quantise(Srgb c);

/// sRGB (IEC 61966-2-1 transfer and primaries) -> XYZ -> CIE 1976 L*a*b*.
LabColour srgb_to_lab(Srgb c, const WhitePoint& white = WhitePoint::d65());
LabColour srgb_to_lab(Srgb8 c, const WhitePoint& white = WhitePoint::d65());

/// Inverse of srgb_to_lab. Channels outside [0,1] are clipped; when that happens and
/// `out_of_gamut` is non-null it is set to true (it is set to false otherwise).
Srgb lab_to_srgb(LabColour c, const WhitePoint& white = WhitePoint::d65(), bool* out_of_gamut = nullptr);

/// Linear-light RGB before clipping; exposed so callers can inspect the gamut excursion.
Eigen::Vector3d lab_to_linear_rgb(LabColour c, const WhitePoint& white = WhitePoint::d65());

}  // namespace chromaterm
