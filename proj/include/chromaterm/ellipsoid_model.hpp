#pragma once

#include <chromaterm/colourspace.hpp>
#include <chromaterm/image.hpp>

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chromaterm {

/// Distances below this (Lab units) have no usable direction from the centre.
inline constexpr double kDegenerateRadius = 1e-9;

/// Rotated ellipsoid in colour-opponent space.
///
/// `rotation` holds the angles (about L*, a*, b*) of R = R_L(theta) * R_a(phi) * R_b(gamma).
/// A body-frame point d maps to world coordinates as centre + R * d.
struct Ellipsoid {
    LabColour centre;
    std::array<double, 3> semi_axes{1.0, 1.0, 1.0};
    std::array<double, 3> rotation{0.0, 0.0, 0.0};

    /// Throws if an axis is not positive, an angle is outside [0, pi), or anything is non-finite.
    void validate() const;

    /// Positive-definite Q with the surface given by (p - c)^T Q (p - c) = 1.
    Eigen::Matrix3d quadratic_form() const;

    friend bool operator==(const Ellipsoid&, const Ellipsoid&) = default;
};

/// One named colour category: an ellipsoid plus the sigmoid steepness g in (0, 1].
///
/// `adapted_form`, when set, replaces the ellipsoid's shape with a general
/// positive-definite quadratic form about the same centre (see adaptation.hpp).
struct ColourTerm {
    std::string name;
    Ellipsoid ellipsoid;
    double steepness = 1.0;
    std::optional<Eigen::Matrix3d> adapted_form;

    void validate() const;
    Eigen::Matrix3d quadratic_form() const;

    bool operator==(const ColourTerm& other) const;
};

/// Ordered, immutable collection of uniquely-named terms. Term order is the
/// tie-break order of naming.
class ColourModel {
public:
    static constexpr std::string_view kColourSpace = "CIELab";

    explicit ColourModel(std::vector<ColourTerm> terms, std::string colour_space = std::string(kColourSpace));

    const std::vector<ColourTerm>& terms() const { return terms_; }
    const ColourTerm& term(std::size_t i) const { return terms_.at(i); }
    std::size_t size() const { return terms_.size(); }
    const std::string& colour_space() const { return colour_space_; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    std::vector<std::string> names() const;

    friend bool operator==(const ColourModel&, const ColourModel&) = default;

private:
    std::vector<ColourTerm> terms_;
    std::string colour_space_;
};

/// The eleven basic terms in their canonical (alphabetical) order.
const std::vector<std::string>& basic_colour_terms();

/// R_L(theta) * R_a(phi) * R_b(gamma), each a right-handed elementary rotation
/// about the named Lab axis.
Eigen::Matrix3d rotation_matrix(const std::array<double, 3>& angles);
/// Angles (theta, phi, gamma) with rotation_matrix(angles) == r for a proper rotation r.
std::array<double, 3> rotation_angles(const Eigen::Matrix3d& r);

/// Radial distance from the centre to the surface along the direction of p.
/// Falls back to the mean semi-axis when p is within kDegenerateRadius of the centre.
double half_height_distance(const Ellipsoid& e, LabColour p);
double half_height_distance(const ColourTerm& t, LabColour p);

/// B_t(p) = 1 / (1 + exp(g (|p - c| - h))).
double belongingness(const ColourTerm& t, LabColour p);

/// Per-term belongingness in model order. Independent sigmoids, not normalised.
std::vector<double> membership_vector(const ColourModel& model, LabColour p);

/// Index of the maximal belongingness; the lowest index wins ties.
std::size_t name_pixel_index(const ColourModel& model, LabColour p);
const std::string& name_pixel(const ColourModel& model, LabColour p);

/// First index of the maximum entry.
std::size_t argmax(const std::vector<double>& values);

struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> labels;                // term index per pixel
    std::vector<std::vector<double>> probabilities;   // [term][pixel], empty unless requested
};

LabelMap name_image(const ColourModel& model, const Image& image, bool with_probabilities = false);

}  // namespace chromaterm
