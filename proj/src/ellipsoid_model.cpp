#include <chromaterm/ellipsoid_model.hpp>

#include <chromaterm/error.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <set>

namespace chromaterm {

namespace {

bool finite(double v) { return std::isfinite(v); }

double mean_semi_axis(const Eigen::Matrix3d& form) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(form, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseSqrt().cwiseInverse().mean();
}

}  // namespace

void Ellipsoid::validate() const {
    if (!finite(centre.L) || !finite(centre.a) || !finite(centre.b))
        throw data_error("ellipsoid centre must be finite");
    for (double s : semi_axes)
        if (!finite(s) || s <= 0.0) throw data_error("ellipsoid semi-axes must be positive and finite");
    for (double angle : rotation)
        if (!finite(angle) || angle < 0.0 || angle >= std::numbers::pi)
            throw data_error("ellipsoid rotation angles must lie in [0, pi)");
}

Eigen::Matrix3d Ellipsoid::quadratic_form() const {
    const Eigen::Matrix3d r = rotation_matrix(rotation);
    const Eigen::Vector3d inv_sq(1.0 / (semi_axes[0] * semi_axes[0]), 1.0 / (semi_axes[1] * semi_axes[1]),
                                 1.0 / (semi_axes[2] * semi_axes[2]));
    return r * inv_sq.asDiagonal() * r.transpose();
}

void ColourTerm::validate() const {
    if (name.empty()) throw data_error("colour term name must be non-empty");
    ellipsoid.validate();
    if (!finite(steepness) || steepness <= 0.0 || steepness > 1.0)
        throw data_error("term '" + name + "': steepness must lie in (0, 1]");
    if (adapted_form) {
        const Eigen::Matrix3d& q = *adapted_form;
        if (!q.allFinite() || !q.isApprox(q.transpose(), 1e-12))
            throw data_error("term '" + name + "': adapted quadratic form must be finite and symmetric");
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(q, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() <= 0.0)
            throw data_error("term '" + name + "': adapted quadratic form must be positive definite");
    }
}

Eigen::Matrix3d ColourTerm::quadratic_form() const {
    return adapted_form ? *adapted_form : ellipsoid.quadratic_form();
}

bool ColourTerm::operator==(const ColourTerm& other) const {
    if (name != other.name || !(ellipsoid == other.ellipsoid) || steepness != other.steepness) return false;
    if (adapted_form.has_value() != other.adapted_form.has_value()) return false;
    return !adapted_form || *adapted_form == *other.adapted_form;
}

ColourModel::ColourModel(std::vector<ColourTerm> terms, std::string colour_space)
    : terms_(std::move(terms)), colour_space_(std::move(colour_space)) {
    if (colour_space_ != kColourSpace)
        throw data_error("unsupported colour space '" + colour_space_ + "' (only CIELab)");
    if (terms_.empty()) throw data_error("a colour model needs at least one term");
    std::set<std::string> seen;
    for (const auto& t : terms_) {
        t.validate();
        if (!seen.insert(t.name).second) throw data_error("duplicate colour term '" + t.name + "'");
    }
}

std::optional<std::size_t> ColourModel::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::string> ColourModel::names() const {
    std::vector<std::string> out;
    for (const auto& t : terms_) out.push_back(t.name);
    return out;
}

const std::vector<std::string>& basic_colour_terms() {
    static const std::vector<std::string> terms{"black", "blue",   "brown", "green", "grey",  "orange",
                                                "pink",  "purple", "red",   "white", "yellow"};
    return terms;
}

Eigen::Matrix3d rotation_matrix(const std::array<double, 3>& angles) {
    const double ct = std::cos(angles[0]), st = std::sin(angles[0]);
    const double cp = std::cos(angles[1]), sp = std::sin(angles[1]);
    const double cg = std::cos(angles[2]), sg = std::sin(angles[2]);
    Eigen::Matrix3d about_l, about_a, about_b;
    about_l << 1, 0, 0, 0, ct, -st, 0, st, ct;
    about_a << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    about_b << cg, -sg, 0, sg, cg, 0, 0, 0, 1;
    return about_l * about_a * about_b;
}

std::array<double, 3> rotation_angles(const Eigen::Matrix3d& r) {
    const double phi = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
    if (std::abs(r(0, 2)) < 1.0 - 1e-12)
        return {std::atan2(-r(1, 2), r(2, 2)), phi, std::atan2(-r(0, 1), r(0, 0))};
    // Gimbal lock: only theta +/- gamma is determined; put it all in theta.
    return {std::atan2(r(2, 1), r(1, 1)), phi, 0.0};
}

double half_height_distance(const Ellipsoid& e, LabColour p) {
    const Eigen::Vector3d d = p.vec() - e.centre.vec();
    const double r = d.norm();
    if (r < kDegenerateRadius) return (e.semi_axes[0] + e.semi_axes[1] + e.semi_axes[2]) / 3.0;
    const Eigen::Vector3d u = rotation_matrix(e.rotation).transpose() * (d / r);
    const double q = (u[0] / e.semi_axes[0]) * (u[0] / e.semi_axes[0]) +
                     (u[1] / e.semi_axes[1]) * (u[1] / e.semi_axes[1]) +
                     (u[2] / e.semi_axes[2]) * (u[2] / e.semi_axes[2]);
    return 1.0 / std::sqrt(q);
}

double half_height_distance(const ColourTerm& t, LabColour p) {
    if (!t.adapted_form) return half_height_distance(t.ellipsoid, p);
    const Eigen::Vector3d d = p.vec() - t.ellipsoid.centre.vec();
    const double r = d.norm();
    if (r < kDegenerateRadius) return mean_semi_axis(*t.adapted_form);
    const Eigen::Vector3d u = d / r;
    return 1.0 / std::sqrt(u.dot(*t.adapted_form * u));
}

double belongingness(const ColourTerm& t, LabColour p) {
    const double r = (p.vec() - t.ellipsoid.centre.vec()).norm();
    const double h = half_height_distance(t, p);
    return 1.0 / (1.0 + std::exp(t.steepness * (r - h)));
}

std::vector<double> membership_vector(const ColourModel& model, LabColour p) {
    std::vector<double> out;
    out.reserve(model.size());
    for (const auto& t : model.terms()) out.push_back(belongingness(t, p));
    return out;
}

std::size_t argmax(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

std::size_t name_pixel_index(const ColourModel& model, LabColour p) { return argmax(membership_vector(model, p)); }

const std::string& name_pixel(const ColourModel& model, LabColour p) {
    return model.term(name_pixel_index(model, p)).name;
}

LabelMap name_image(const ColourModel& model, const Image& image, bool with_probabilities) {
    LabelMap map;
    map.width = image.width;
    map.height = image.height;
    map.labels.resize(image.size());
    if (with_probabilities) map.probabilities.assign(model.size(), std::vector<double>(image.size()));
    for (std::size_t i = 0; i < image.size(); ++i) {
        const std::vector<double> b = membership_vector(model, srgb_to_lab(image.pixels[i]));
        map.labels[i] = static_cast<std::uint16_t>(argmax(b));
        if (with_probabilities)
            for (std::size_t t = 0; t < b.size(); ++t) map.probabilities[t][i] = b[t];
    }
    return map;
}

}  // namespace chromaterm
