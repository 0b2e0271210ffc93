#include <chromaterm/fitting.hpp>

#include <chromaterm/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <set>

namespace chromaterm {

void FitConfig::validate() const {
    if (max_iterations < 1) throw usage_error("max_iterations must be at least 1");
    if (!(tolerance > 0.0)) throw usage_error("tolerance must be positive");
    if (!(bin_size > 0.0)) throw usage_error("bin_size must be positive");
    if (restarts < 0) throw usage_error("restarts must be non-negative");
}

Box ParameterBounds::box() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Box b{TermParameters::Zero(), TermParameters::Zero()};
    b.lower << -inf, -inf, -inf, min_semi_axis, min_semi_axis, min_semi_axis, 0.0, 0.0, 0.0, min_steepness;
    b.upper << inf, inf, inf, inf, inf, inf, max_angle, max_angle, max_angle, max_steepness;
    return b;
}

bool ParameterBounds::admits(const ColourTerm& term) const {
    const TermParameters x = to_parameters(term);
    return x.allFinite() && box().contains(x);
}

TermParameters to_parameters(const ColourTerm& term) {
    const auto& e = term.ellipsoid;
    TermParameters x;
    x << e.centre.L, e.centre.a, e.centre.b, e.semi_axes[0], e.semi_axes[1], e.semi_axes[2], e.rotation[0],
        e.rotation[1], e.rotation[2], term.steepness;
    return x;
}

ColourTerm from_parameters(std::string name, const TermParameters& x) {
    ColourTerm t;
    t.name = std::move(name);
    t.ellipsoid.centre = {x[0], x[1], x[2]};
    t.ellipsoid.semi_axes = {x[3], x[4], x[5]};
    t.ellipsoid.rotation = {x[6], x[7], x[8]};
    t.steepness = x[9];
    return t;
}

namespace {

// Precomputes the rotation and its angle derivatives for one parameter vector,
// then evaluates B (and optionally dB/dx) at many points.
class TermEvaluator {
public:
    explicit TermEvaluator(const TermParameters& x)
        : centre_(x[0], x[1], x[2]), axes_(x[3], x[4], x[5]), steepness_(x[9]) {
        const double ct = std::cos(x[6]), st = std::sin(x[6]);
        const double cp = std::cos(x[7]), sp = std::sin(x[7]);
        const double cg = std::cos(x[8]), sg = std::sin(x[8]);
        Eigen::Matrix3d rl, ra, rb, drl, dra, drb;
        rl << 1, 0, 0, 0, ct, -st, 0, st, ct;
        ra << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
        rb << cg, -sg, 0, sg, cg, 0, 0, 0, 1;
        drl << 0, 0, 0, 0, -st, -ct, 0, ct, -st;
        dra << -sp, 0, cp, 0, 0, 0, -cp, 0, -sp;
        drb << -sg, -cg, 0, cg, -sg, 0, 0, 0, 0;
        rotation_t_ = (rl * ra * rb).transpose();
        drotation_t_[0] = (drl * ra * rb).transpose();
        drotation_t_[1] = (rl * dra * rb).transpose();
        drotation_t_[2] = (rl * ra * drb).transpose();
        inv_sq_ = axes_.cwiseProduct(axes_).cwiseInverse();
    }

    double value(const Eigen::Vector3d& p) const {
        const Eigen::Vector3d d = p - centre_;
        const double r = d.norm();
        double h;
        if (r < kDegenerateRadius) {
            h = axes_.mean();
        } else {
            const Eigen::Vector3d e = rotation_t_ * d;
            h = r / std::sqrt(e.cwiseProduct(e).dot(inv_sq_));
        }
        return 1.0 / (1.0 + std::exp(steepness_ * (r - h)));
    }

    double value_and_gradient(const Eigen::Vector3d& p, TermParameters& grad) const {
        const Eigen::Vector3d d = p - centre_;
        const double r = d.norm();
        // dz/dx for the exponent z = g (r - h).
        TermParameters dz = TermParameters::Zero();
        double h;
        if (r < kDegenerateRadius) {
            h = axes_.mean();
            dz.segment<3>(3).setConstant(-steepness_ / 3.0);
        } else {
            const Eigen::Vector3d e = rotation_t_ * d;
            const Eigen::Vector3d e_scaled = e.cwiseProduct(inv_sq_);  // D e
            const double rho2 = e.dot(e_scaled);
            const double rho = std::sqrt(rho2);
            h = r / rho;
            // Centre: dh/dc = -d / (r rho) + r Q d / rho^3, with Q d = R D e.
            const Eigen::Vector3d qd = rotation_t_.transpose() * e_scaled;
            const Eigen::Vector3d dh_dc = -d / (r * rho) + (r / (rho2 * rho)) * qd;
            const Eigen::Vector3d dr_dc = -d / r;
            dz.segment<3>(0) = steepness_ * (dr_dc - dh_dc);
            // Semi-axes: dh/ds_k = r e_k^2 / (s_k^3 rho^3).
            for (int k = 0; k < 3; ++k) {
                const double dh = r * e[k] * e[k] / (axes_[k] * axes_[k] * axes_[k] * rho2 * rho);
                dz[3 + k] = -steepness_ * dh;
            }
            // Angles: drho/dangle = (D e) . (dR^T/dangle d) / rho; dh = -r/rho^2 drho.
            for (int j = 0; j < 3; ++j) {
                const double drho = e_scaled.dot(drotation_t_[j] * d) / rho;
                dz[6 + j] = steepness_ * (r / rho2) * drho;
            }
        }
        dz[9] = r - h;
        const double b = 1.0 / (1.0 + std::exp(steepness_ * (r - h)));
        grad = (-b * (1.0 - b)) * dz;
        return b;
    }

private:
    Eigen::Vector3d centre_;
    Eigen::Vector3d axes_;
    double steepness_;
    Eigen::Matrix3d rotation_t_;
    Eigen::Matrix3d drotation_t_[3];
    Eigen::Vector3d inv_sq_;
};

struct FitData {
    std::vector<Eigen::Vector3d> points;
    std::vector<double> targets;
};

FitData flatten(const MembershipGroundTruth& gt, std::size_t term) {
    FitData data;
    data.points.reserve(gt.size());
    data.targets.reserve(gt.size());
    for (const auto& [key, m] : gt.bins()) {
        data.points.push_back(gt.centre_of(key).vec());
        data.targets.push_back(m[term]);
    }
    return data;
}

LeastSquaresProblem make_problem(const FitData& data) {
    LeastSquaresProblem problem;
    problem.objective = [&data](const Eigen::VectorXd& x) {
        const TermEvaluator eval(x);
        double sum = 0.0;
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            const double r = eval.value(data.points[i]) - data.targets[i];
            sum += r * r;
        }
        return sum;
    };
    problem.linearise = [&data](const Eigen::VectorXd& x) {
        const TermEvaluator eval(x);
        LeastSquaresProblem::Linearisation lin;
        Eigen::Matrix<double, kTermParameters, kTermParameters> jtj =
            Eigen::Matrix<double, kTermParameters, kTermParameters>::Zero();
        TermParameters jtr = TermParameters::Zero();
        TermParameters grad;
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            const double r = eval.value_and_gradient(data.points[i], grad) - data.targets[i];
            lin.objective += r * r;
            jtr += r * grad;
            jtj.selfadjointView<Eigen::Lower>().rankUpdate(grad);
        }
        lin.jtj = jtj.selfadjointView<Eigen::Lower>();
        lin.jtr = jtr;
        return lin;
    };
    return problem;
}

// Index of an angle resting on a bound while the objective wants to cross it, or -1.
int blocked_angle(const LeastSquaresProblem& problem, const TermParameters& x, const Box& box) {
    const auto lin = problem.linearise(x);
    for (int j = 6; j < 9; ++j) {
        if (x[j] <= box.lower[j] && lin.jtr[j] > 0.0) return j;
        if (x[j] >= box.upper[j] && lin.jtr[j] < 0.0) return j;
    }
    return -1;
}

TermParameters with_canonical_angles(TermParameters x, const ParameterBounds& bounds) {
    const auto angles = canonical_angles({x[6], x[7], x[8]});
    for (int j = 0; j < 3; ++j) x[6 + j] = std::min(angles[j], bounds.max_angle);
    return x;
}

}  // namespace

BelongingnessGradient belongingness_gradient(const ColourTerm& term, LabColour p) {
    if (term.adapted_form) throw usage_error("gradients are only defined for plain ellipsoid terms");
    BelongingnessGradient out;
    out.value = TermEvaluator(to_parameters(term)).value_and_gradient(p.vec(), out.gradient);
    return out;
}

std::array<double, 3> canonical_angles(std::array<double, 3> angles) {
    constexpr double pi = std::numbers::pi;
    auto& [theta, phi, gamma] = angles;
    // R_L(theta + pi) R_a(phi) R_b(gamma) describes the same ellipsoid as
    // R_L(theta) R_a(-phi) R_b(-gamma); likewise phi + pi flips gamma, and
    // gamma has period pi.
    const double turns_theta = std::floor(theta / pi);
    theta -= turns_theta * pi;
    if (static_cast<long long>(turns_theta) % 2 != 0) {
        phi = -phi;
        gamma = -gamma;
    }
    const double turns_phi = std::floor(phi / pi);
    phi -= turns_phi * pi;
    if (static_cast<long long>(turns_phi) % 2 != 0) gamma = -gamma;
    gamma -= std::floor(gamma / pi) * pi;
    for (double* a : {&theta, &phi, &gamma})
        if (*a >= pi || *a < 0.0) *a = 0.0;  // floor() round-off at exact multiples of pi
    return angles;
}

ColourTerm initialise_term(const std::string& name, const MembershipGroundTruth& gt) {
    const auto idx = gt.term_index(name);
    if (!idx) throw data_error("term '" + name + "' is not in the ground truth");
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    std::size_t n = 0;
    for (const auto& [key, m] : gt.bins()) {
        if (m[*idx] > 0.0) {
            sum += gt.centre_of(key).vec();
            ++n;
        }
    }
    if (n == 0) throw data_error("term '" + name + "' has no supporting bins in the ground truth");
    ColourTerm t;
    t.name = name;
    t.ellipsoid.centre = LabColour::from(sum / static_cast<double>(n));
    t.ellipsoid.semi_axes = {10.0, 10.0, 10.0};
    t.ellipsoid.rotation = {0.0, 0.0, 0.0};
    t.steepness = 1.0;
    return t;
}

ColourTerm moment_term(const std::string& name, const MembershipGroundTruth& gt, const ParameterBounds& bounds) {
    const auto idx = gt.term_index(name);
    if (!idx) throw data_error("term '" + name + "' is not in the ground truth");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    double weight = 0.0;
    for (const auto& [key, m] : gt.bins()) {
        mean += m[*idx] * gt.centre_of(key).vec();
        weight += m[*idx];
    }
    if (!(weight > 0.0)) throw data_error("term '" + name + "' has no supporting bins in the ground truth");
    mean /= weight;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& [key, m] : gt.bins()) {
        const Eigen::Vector3d d = gt.centre_of(key).vec() - mean;
        cov += m[*idx] * d * d.transpose();
    }
    cov /= weight;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Matrix3d axes = eig.eigenvectors();
    if (axes.determinant() < 0.0) axes.col(2) = -axes.col(2);
    const double floor = std::max(gt.bin_size(), bounds.min_semi_axis);

    ColourTerm t;
    t.name = name;
    t.ellipsoid.centre = LabColour::from(mean);
    for (int k = 0; k < 3; ++k) t.ellipsoid.semi_axes[k] = std::max(2.0 * std::sqrt(std::max(eig.eigenvalues()[k], 0.0)), floor);
    t.ellipsoid.rotation = canonical_angles(rotation_angles(axes));
    for (double& a : t.ellipsoid.rotation) a = std::min(a, bounds.max_angle);
    t.steepness = std::clamp(1.0, bounds.min_steepness, bounds.max_steepness);
    return t;
}

double fit_objective(const ColourTerm& term, const MembershipGroundTruth& gt, std::size_t term_index) {
    if (term_index >= gt.term_names().size()) throw usage_error("term index outside the ground truth");
    double sum = 0.0;
    for (const auto& [key, m] : gt.bins()) {
        const double r = belongingness(term, gt.centre_of(key)) - m[term_index];
        sum += r * r;
    }
    return sum;
}

TermFit fit_term(const std::string& name, const MembershipGroundTruth& gt, const FitConfig& config,
                 const ParameterBounds& bounds, const ParameterObserver& observer) {
    config.validate();
    const ColourTerm initial = initialise_term(name, gt);
    const FitData data = flatten(gt, *gt.term_index(name));
    const LeastSquaresProblem problem = make_problem(data);
    const Box box = bounds.box();

    OptimiserOptions options;
    options.max_iterations = config.max_iterations;
    options.tolerance = config.tolerance;
    if (observer) options.on_iterate = [&observer](const Eigen::VectorXd& x) { observer(x); };

    // An angle pinned at 0 or pi wants to continue past the bound: restart from the
    // same ellipsoid expressed with angles inside the box.
    int iterations = 0;
    auto descend = [&](const TermParameters& start) {
        auto result = minimise_box_least_squares(problem, start, box, options);
        iterations += result.iterations;
        for (int attempt = 0; attempt < 4; ++attempt) {
            const int j = blocked_angle(problem, result.x, box);
            if (j < 0) break;
            TermParameters nudged = result.x;
            nudged[j] += nudged[j] <= box.lower[j] ? -1e-3 : 1e-3;
            auto rerun = minimise_box_least_squares(problem, with_canonical_angles(nudged, bounds), box, options);
            iterations += rerun.iterations;
            if (!(rerun.objective < result.objective)) break;
            result = std::move(rerun);
        }
        return result;
    };

    const TermParameters x0 = box.project(to_parameters(initial));
    auto best = descend(x0);
    const double initial_objective = best.initial_objective;

    if (config.moment_start) {
        auto alt = descend(box.project(to_parameters(moment_term(name, gt, bounds))));
        if (alt.objective < best.objective) best = std::move(alt);
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> angle(0.0, bounds.max_angle);
    for (int k = 0; k < config.restarts; ++k) {
        TermParameters start = best.x;
        for (int j = 6; j < 9; ++j) start[j] = angle(rng);
        auto rerun = descend(start);
        if (rerun.objective < best.objective) best = std::move(rerun);
    }

    TermFit fit;
    fit.initial_objective = initial_objective;
    fit.iterations = iterations;
    fit.improved = best.objective < initial_objective;
    if (fit.improved) {
        fit.term = from_parameters(name, best.x);
        fit.objective = best.objective;
    } else {
        fit.term = from_parameters(name, x0);
        fit.objective = initial_objective;
    }
    if (!std::isfinite(fit.objective)) throw numerical_error("term '" + name + "': objective is not finite");
    return fit;
}

ModelFit fit_model(std::vector<std::string> term_names, const MembershipGroundTruth& gt, const FitConfig& config,
                   const ParameterBounds& bounds) {
    config.validate();
    if (term_names.empty()) throw usage_error("no terms to fit");
    std::sort(term_names.begin(), term_names.end());
    if (std::adjacent_find(term_names.begin(), term_names.end()) != term_names.end())
        throw usage_error("duplicate term names");

    std::vector<std::future<TermFit>> jobs;
    for (const auto& name : term_names) {
        jobs.push_back(std::async(std::launch::async, [&, name] {
            try {
                return fit_term(name, gt, config, bounds);
            } catch (const Error& e) {
                throw Error(e.kind(), "term '" + name + "': " + e.what());
            }
        }));
    }
    std::vector<TermFit> fits;
    for (auto& job : jobs) fits.push_back(job.get());

    std::vector<ColourTerm> terms;
    for (const auto& f : fits) terms.push_back(f.term);
    return {ColourModel(std::move(terms)), std::move(fits)};
}

ModelExtension extend_model(const ColourModel& model, const std::string& name,
                            std::span<const TrainingExample> examples, const FitConfig& config,
                            const ParameterBounds& bounds) {
    config.validate();
    if (name.empty()) throw usage_error("new term name must be non-empty");
    if (model.index_of(name)) throw usage_error("term '" + name + "' already exists in the model");
    if (examples.empty()) throw usage_error("extending a model needs at least one example image");

    std::vector<TrainingExample> relabelled(examples.begin(), examples.end());
    for (auto& ex : relabelled) ex.term = name;
    const MembershipGroundTruth positives = build_ground_truth(relabelled, config.bin_size);

    // Non-members: a coarse lattice over the sRGB cube, which the existing terms name.
    MembershipGroundTruth gt = positives;
    constexpr int kSteps = 16;
    for (int r = 0; r <= kSteps; ++r)
        for (int g = 0; g <= kSteps; ++g)
            for (int b = 0; b <= kSteps; ++b) {
                const Srgb c{r / double(kSteps), g / double(kSteps), b / double(kSteps)};
                const BinKey key = gt.bin_of(srgb_to_lab(c));
                if (!gt.bins().count(key)) gt.set(key, {0.0});
            }

    ModelExtension out{model, fit_term(name, gt, config, bounds)};
    std::vector<ColourTerm> terms = model.terms();
    terms.push_back(out.fit.term);
    out.model = ColourModel(std::move(terms), model.colour_space());
    return out;
}

ColourModel remove_term(const ColourModel& model, const std::string& name) {
    std::vector<ColourTerm> terms;
    for (const auto& t : model.terms())
        if (t.name != name) terms.push_back(t);
    if (terms.size() == model.size()) throw usage_error("term '" + name + "' is not in the model");
    return ColourModel(std::move(terms), model.colour_space());
}

}  // namespace chromaterm
