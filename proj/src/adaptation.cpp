#include <chromaterm/adaptation.hpp>

#include <chromaterm/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace chromaterm {

double ChromaDeviation::norm() const { return std::hypot(a, b); }

ChromaDeviation mean_chroma_deviation(const Image& image) {
    if (image.size() == 0) return {};
    double sum_a = 0.0, sum_b = 0.0;
    for (const auto& p : image.pixels) {
        const LabColour lab = srgb_to_lab(p);
        sum_a += lab.a;
        sum_b += lab.b;
    }
    const double n = static_cast<double>(image.size());
    return {sum_a / n, sum_b / n};
}

ColourModel adapt_model(const ColourModel& model, ChromaDeviation deviation, const AdaptationConfig& config) {
    if (!(config.gain >= 0.0) || !std::isfinite(config.gain)) throw usage_error("adaptation gain must be non-negative");
    for (const auto& name : config.achromatic_terms)
        if (!model.index_of(name)) throw usage_error("achromatic term '" + name + "' is not in the model");

    const double length = deviation.norm();
    if (config.gain == 0.0 || length < kAdaptationThreshold) return model;

    const double stretch = 1.0 + config.gain * length;
    const Eigen::Vector3d w(0.0, deviation.a / length, deviation.b / length);
    // Q' = Q - (1 - 1/s^2) (Q w)(Q w)^T / (w^T Q w): the image of the ellipsoid under
    // x -> x + (s - 1) (n . x) w with n = Q w / (w^T Q w). Radius along w grows by s,
    // and Q' <= Q so every radial half-height distance can only grow.
    const double shrink = 1.0 - 1.0 / (stretch * stretch);

    std::vector<ColourTerm> terms = model.terms();
    for (auto& term : terms) {
        const bool achromatic = std::find(config.achromatic_terms.begin(), config.achromatic_terms.end(),
                                          term.name) != config.achromatic_terms.end();
        if (!achromatic) continue;
        const Eigen::Matrix3d q = term.quadratic_form();
        const Eigen::Vector3d qw = q * w;
        Eigen::Matrix3d adapted = q - (shrink / w.dot(qw)) * (qw * qw.transpose());
        adapted = 0.5 * (adapted + adapted.transpose()).eval();
        term.adapted_form = adapted;
    }
    return ColourModel(std::move(terms), model.colour_space());
}

ColourModel adapt_model(const ColourModel& model, const Image& image, const AdaptationConfig& config) {
    return adapt_model(model, mean_chroma_deviation(image), config);
}

}  // namespace chromaterm
