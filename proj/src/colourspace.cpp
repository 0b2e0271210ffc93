#include <chromaterm/colourspace.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace chromaterm {

namespace {

// CIE constants in exact rational form.
constexpr double kDelta = 6.0 / 29.0;
constexpr double kDeltaCubed = kDelta * kDelta * kDelta;

Eigen::Vector3d xy_to_xyz(double x, double y) { return {x / y, 1.0, (1.0 - x - y) / y}; }

// RGB -> XYZ matrix built from the sRGB primaries and the D65 white, so that
// RGB (1,1,1) maps exactly onto the white point.
struct SrgbMatrices {
    Eigen::Matrix3d to_xyz;
    Eigen::Matrix3d from_xyz;

    SrgbMatrices() {
        Eigen::Matrix3d primaries;
        primaries.col(0) = xy_to_xyz(0.64, 0.33);
        primaries.col(1) = xy_to_xyz(0.30, 0.60);
        primaries.col(2) = xy_to_xyz(0.15, 0.06);
        const Eigen::Vector3d white = xy_to_xyz(0.3127, 0.3290);
        const Eigen::Vector3d scale = primaries.partialPivLu().solve(white);
        to_xyz = primaries * scale.asDiagonal();
        from_xyz = to_xyz.inverse();
    }
};

const SrgbMatrices& matrices() {
    static const SrgbMatrices m;
    return m;
}

double decode_transfer(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double encode_transfer(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kDeltaCubed ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

}  // namespace

WhitePoint WhitePoint::from_chromaticity(double x, double y) {
    const Eigen::Vector3d w = xy_to_xyz(x, y);
    return {w[0], w[1], w[2]};
}

WhitePoint WhitePoint::d65() { return from_chromaticity(0.3127, 0.3290); }

Srgb normalise(Srgb8 c) { return {c.r / 255.0, c.g / 255.0, c.b / 255.0}; }

Srgb8 quantise(Srgb c) {
    auto q = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
    };
    return {q(c.r), q(c.g), q(c.b)};
}

LabColour srgb_to_lab(Srgb c, const WhitePoint& white) {
    const Eigen::Vector3d linear(decode_transfer(c.r), decode_transfer(c.g), decode_transfer(c.b));
    const Eigen::Vector3d xyz = matrices().to_xyz * linear;
    const double fx = lab_f(xyz[0] / white.X);
    const double fy = lab_f(xyz[1] / white.Y);
    const double fz = lab_f(xyz[2] / white.Z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabColour srgb_to_lab(Srgb8 c, const WhitePoint& white) { return srgb_to_lab(normalise(c), white); }

Eigen::Vector3d lab_to_linear_rgb(LabColour c, const WhitePoint& white) {
    const double fy = (c.L + 16.0) / 116.0;
    const double fx = fy + c.a / 500.0;
    const double fz = fy - c.b / 200.0;
    const Eigen::Vector3d xyz(lab_f_inv(fx) * white.X, lab_f_inv(fy) * white.Y, lab_f_inv(fz) * white.Z);
    return matrices().from_xyz * xyz;
}

Srgb lab_to_srgb(LabColour c, const WhitePoint& white, bool* out_of_gamut) {
    const Eigen::Vector3d linear = lab_to_linear_rgb(c, white);
    // Tolerance absorbs round-off for colours that sit exactly on the gamut boundary.
    constexpr double kSlack = 1e-9;
    bool clipped = false;
    double channel[3];
    for (int i = 0; i < 3; ++i) {
        double v = linear[i];
        if (v < -kSlack || v > 1.0 + kSlack) clipped = true;
        v = std::clamp(v, 0.0, 1.0);
        channel[i] = std::clamp(encode_transfer(v), 0.0, 1.0);
    }
    if (out_of_gamut) *out_of_gamut = clipped;
    return {channel[0], channel[1], channel[2]};
}

}  // namespace chromaterm
