#pragma once

#include <chromaterm/ellipsoid_model.hpp>
#include <chromaterm/ground_truth.hpp>
#include <chromaterm/optimiser.hpp>

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace chromaterm {

struct FitConfig {
    int max_iterations = 1000;
    double tolerance = 1e-3;
    double bin_size = 1.0;
    std::uint64_t seed = 0;
    /// Extra starts from seeded random orientations; the best result is kept.
    int restarts = 0;
    /// Also start from the membership-weighted mean and covariance of the term's bins.
    bool moment_start = true;

    void validate() const;
};

/// Box on the ten term parameters. Centres are unbounded.
struct ParameterBounds {
    double min_semi_axis = 0.1;
    double max_angle = std::numbers::pi - 1e-9;
    double min_steepness = 1e-4;
    double max_steepness = 1.0;

    Box box() const;
    bool admits(const ColourTerm& term) const;
};

/// Parameter vector layout: [L, a, b, axis0, axis1, axis2, theta, phi, gamma, g].
inline constexpr int kTermParameters = 10;
using TermParameters = Eigen::Matrix<double, kTermParameters, 1>;

TermParameters to_parameters(const ColourTerm& term);
ColourTerm from_parameters(std::string name, const TermParameters& x);

/// B_t(p) and its analytic derivative with respect to the ten parameters.
struct BelongingnessGradient {
    double value = 0.0;
    TermParameters gradient = TermParameters::Zero();
};
BelongingnessGradient belongingness_gradient(const ColourTerm& term, LabColour p);

/// Equivalent orientation with every angle in [0, pi). Uses the half-turn
/// symmetries of an ellipsoid, so the quadratic form is unchanged.
std::array<double, 3> canonical_angles(std::array<double, 3> angles);

/// Centre at the mean of all bins with non-zero membership, semi-axes (10,10,10),
/// no rotation, steepness 1. Throws when the term has no supporting bin.
ColourTerm initialise_term(const std::string& name, const MembershipGroundTruth& gt);

/// Centre at the membership-weighted mean of the term's bins, axes along the
/// eigenvectors of their covariance with semi-axes of two standard deviations
/// (at least one bin), steepness 1. Angles are canonical and inside `bounds`.
ColourTerm moment_term(const std::string& name, const MembershipGroundTruth& gt, const ParameterBounds& bounds = {});

/// Sum over every bin of (B_t(bin centre) - G_t(bin))^2.
double fit_objective(const ColourTerm& term, const MembershipGroundTruth& gt, std::size_t term_index);

struct TermFit {
    ColourTerm term;
    double initial_objective = 0.0;
    double objective = 0.0;
    int iterations = 0;
    /// False when no start improved on the initial point; `term` is then the initial point.
    bool improved = false;
};

using ParameterObserver = std::function<void(const TermParameters&)>;

/// Local least-squares fit of one term from initialise_term (and, when enabled,
/// from moment_term and random orientations), inside `bounds` throughout. The
/// lowest objective wins; ties keep the earlier start.
TermFit fit_term(const std::string& name, const MembershipGroundTruth& gt, const FitConfig& config,
                 const ParameterBounds& bounds = {}, const ParameterObserver& observer = {});

struct ModelFit {
    ColourModel model;
    std::vector<TermFit> terms;  // model order
};

/// Fits every term independently and returns them in canonical (lexicographic) order.
ModelFit fit_model(std::vector<std::string> term_names, const MembershipGroundTruth& gt, const FitConfig& config,
                   const ParameterBounds& bounds = {});

struct ModelExtension {
    ColourModel model;
    TermFit fit;
};

/// Learns one new term from a few examples, keeping the existing terms frozen, and
/// appends it to the model. Every example's pixels count as the new term. The
/// displayable colours already covered by the model, away from the examples,
/// enter the fit as non-members.
ModelExtension extend_model(const ColourModel& model, const std::string& name,
                            std::span<const TrainingExample> examples, const FitConfig& config,
                            const ParameterBounds& bounds = {});

/// Model without the named term (order of the others preserved).
ColourModel remove_term(const ColourModel& model, const std::string& name);

}  // namespace chromaterm
