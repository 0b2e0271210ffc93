#include "support.hpp"

#include <chromaterm/error.hpp>
#include <chromaterm/fitting.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace chromaterm;
using testing::make_term;

namespace {

/// Ground truth sampled from a known term on a cubic grid around its centre.
MembershipGroundTruth sampled_ground_truth(const ColourTerm& truth, double bin_size, long radius) {
    MembershipGroundTruth gt({truth.name}, bin_size);
    const BinKey c = gt.bin_of(truth.ellipsoid.centre);
    for (long i = -radius; i <= radius; ++i)
        for (long j = -radius; j <= radius; ++j)
            for (long k = -radius; k <= radius; ++k) {
                const BinKey key{c.L + i, c.a + j, c.b + k};
                gt.set(key, {belongingness(truth, gt.centre_of(key))});
            }
    return gt;
}

std::array<double, 3> sorted(std::array<double, 3> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("initialise_term: single bin and symmetric bins") {
    MembershipGroundTruth one({"red"}, 1.0);
    one.set({50, 10, -10}, {1.0});
    const ColourTerm t = initialise_term("red", one);
    CHECK(t.ellipsoid.centre == LabColour{50, 10, -10});
    CHECK(t.ellipsoid.semi_axes == std::array<double, 3>{10, 10, 10});
    CHECK(t.ellipsoid.rotation == std::array<double, 3>{0, 0, 0});
    CHECK(t.steepness == 1.0);

    MembershipGroundTruth two({"a", "b"}, 1.0);
    two.set({40, 10, 0}, {0.2, 0.8});
    two.set({60, -10, 0}, {1.0, 0.0});
    two.set({70, 70, 70}, {0.0, 1.0});
    const ColourTerm a = initialise_term("a", two);
    CHECK(a.ellipsoid.centre.L == doctest::Approx(50));
    CHECK(a.ellipsoid.centre.a == doctest::Approx(0));
    CHECK(a.ellipsoid.centre.b == doctest::Approx(0));

    MembershipGroundTruth none({"a", "b"}, 1.0);
    none.set({0, 0, 0}, {0.0, 1.0});
    CHECK_THROWS_AS(initialise_term("a", none), Error);
    CHECK_THROWS_AS(initialise_term("zzz", none), Error);
}

TEST_CASE("fit_objective of a single bin at the surface") {
    // Bin on the surface of a sphere of radius 10: B = 0.5, G = 1.
    MembershipGroundTruth gt({"t"}, 1.0);
    gt.set({60, 0, 0}, {1.0});
    const ColourTerm t = make_term("t", {50, 0, 0}, {10, 10, 10});
    CHECK(fit_objective(t, gt, 0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(fit_objective(t, gt, 1), Error);
}

TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> off(0.0, 15.0);
    constexpr double kStep = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        ColourTerm t = testing::random_term(rng);
        t.ellipsoid.rotation = {0.1 + 2.9 * t.ellipsoid.rotation[0] / std::numbers::pi,
                                0.1 + 2.9 * t.ellipsoid.rotation[1] / std::numbers::pi,
                                0.1 + 2.9 * t.ellipsoid.rotation[2] / std::numbers::pi};
        const LabColour c = t.ellipsoid.centre;
        const LabColour p{c.L + off(rng), c.a + off(rng), c.b + off(rng)};
        const auto analytic = belongingness_gradient(t, p);
        CHECK(analytic.value == doctest::Approx(belongingness(t, p)).epsilon(1e-12));
        const TermParameters x = to_parameters(t);
        for (int k = 0; k < kTermParameters; ++k) {
            TermParameters up = x, down = x;
            up[k] += kStep;
            down[k] -= kStep;
            const double numeric =
                (belongingness(from_parameters("t", up), p) - belongingness(from_parameters("t", down), p)) / (2 * kStep);
            const double scale = std::max(std::abs(numeric), 1e-6);
            worst = std::max(worst, std::abs(analytic.gradient[k] - numeric) / scale);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("parameter vector round trip") {
    const ColourTerm t = make_term("x", {1, 2, 3}, {4, 5, 6}, {0.7, 0.8, 0.9}, 0.3);
    const TermParameters p = to_parameters(t);
    CHECK(p[0] == 1);
    CHECK(p[5] == 6);
    CHECK(p[9] == 0.3);
    CHECK(from_parameters("x", p) == t);
}

TEST_CASE("canonical angles keep the quadratic form") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-7.0, 7.0);
    for (int i = 0; i < 500; ++i) {
        const std::array<double, 3> raw{angle(rng), angle(rng), angle(rng)};
        const auto canon = canonical_angles(raw);
        for (double a : canon) {
            CHECK(a >= 0.0);
            CHECK(a < std::numbers::pi);
        }
        Ellipsoid e2{{0, 0, 0}, {3, 7, 11}, canon};
        const Eigen::Matrix3d q1 = rotation_matrix(raw) * Eigen::Vector3d(1 / 9.0, 1 / 49.0, 1 / 121.0).asDiagonal() *
                                   rotation_matrix(raw).transpose();
        CHECK((q1 - e2.quadratic_form()).norm() < 1e-12);
    }
    const auto same = canonical_angles({0.1, 0.2, 0.3});
    CHECK(same == std::array<double, 3>{0.1, 0.2, 0.3});
}

TEST_CASE("moment_term follows the spread of the bins") {
    MembershipGroundTruth gt({"t"}, 1.0);
    for (long i = -20; i <= 20; ++i) gt.set({50 + i, 0, 0}, {1.0});
    const ColourTerm t = moment_term("t", gt);
    CHECK(t.ellipsoid.centre.L == doctest::Approx(50));
    CHECK(ParameterBounds{}.admits(t));
    // Longest axis along L*, about two standard deviations of a uniform run of 41 bins.
    const Eigen::Matrix3d q = t.quadratic_form();
    const double extent_L = 1.0 / std::sqrt(q(0, 0));
    CHECK(extent_L == doctest::Approx(2.0 * std::sqrt(140.0)).epsilon(1e-6));
    CHECK(1.0 / std::sqrt(q(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("synthetic recovery of a rotated term") {
    const ColourTerm truth = make_term("t", {50, 20, -10}, {15, 8, 5}, {0.4, 0.9, 0.3}, 0.6);
    const auto gt = sampled_ground_truth(truth, 2.0, 15);
    FitConfig cfg;
    cfg.tolerance = 1e-10;
    const TermFit fit = fit_term("t", gt, cfg);
    CHECK(fit.objective < 1e-6);
    CHECK(fit.objective <= fit.initial_objective);
    const Ellipsoid& e = fit.term.ellipsoid;
    CHECK((e.centre.vec() - truth.ellipsoid.centre.vec()).norm() < 1.0);
    const auto got = sorted(e.semi_axes), want = sorted(truth.ellipsoid.semi_axes);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - want[k]) < 0.1 * want[k]);
    CHECK((fit.term.quadratic_form() - truth.quadratic_form()).norm() < 0.05 * truth.quadratic_form().norm());
    CHECK(fit.term.steepness == doctest::Approx(truth.steepness).epsilon(0.05));
}

TEST_CASE("every iterate respects the bounds and the fit is deterministic") {
    const ColourTerm truth = make_term("t", {30, -40, 25}, {25, 4, 9}, {2.5, 0.2, 1.6}, 0.9);
    const auto gt = sampled_ground_truth(truth, 2.0, 14);
    ParameterBounds bounds;
    bounds.min_semi_axis = 0.5;
    bounds.min_steepness = 0.01;
    std::size_t seen = 0, violations = 0;
    FitConfig cfg;
    cfg.restarts = 2;
    cfg.seed = 3;
    const TermFit a = fit_term("t", gt, cfg, bounds, [&](const TermParameters& x) {
        ++seen;
        if (!bounds.box().contains(x)) ++violations;
    });
    CHECK(seen > 0);
    CHECK(violations == 0);
    CHECK(bounds.admits(a.term));
    const TermFit b = fit_term("t", gt, cfg, bounds);
    CHECK(a.term == b.term);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("fit never ends above its start") {
    MembershipGroundTruth gt({"t"}, 1.0);
    gt.set({50, 10, -10}, {1.0});
    gt.set({52, 10, -10}, {0.5});
    FitConfig cfg;
    cfg.max_iterations = 1;
    const TermFit fit = fit_term("t", gt, cfg);
    CHECK(fit.objective <= fit.initial_objective);
    CHECK(fit.initial_objective == doctest::Approx(fit_objective(initialise_term("t", gt), gt, 0)));
}

TEST_CASE("fit_model orders terms and reports failures by name") {
    MembershipGroundTruth gt({"blue", "red"}, 1.0);
    for (long i = -3; i <= 3; ++i) {
        gt.set({50 + i, 60, 50}, {0.0, 1.0});
        gt.set({30 + i, 20, -60}, {1.0, 0.0});
    }
    const ModelFit fit = fit_model({"red", "blue"}, gt, {});
    CHECK(fit.model.names() == std::vector<std::string>{"blue", "red"});
    REQUIRE(fit.terms.size() == 2);
    CHECK(name_pixel(fit.model, {50, 60, 50}) == "red");
    CHECK(name_pixel(fit.model, {30, 20, -60}) == "blue");

    try {
        fit_model({"red", "zzz"}, gt, {});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("zzz") != std::string::npos);
    }
    CHECK_THROWS_AS(fit_model({}, gt, {}), Error);
    CHECK_THROWS_AS(fit_model({"red", "red"}, gt, {}), Error);
}

TEST_CASE("config validation") {
    FitConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.tolerance = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.bin_size = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.restarts = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("extend_model appends a term and freezes the others") {
    const ColourModel base({make_term("blue", {30, 20, -60}, {15, 20, 20}), make_term("red", {50, 65, 45}, {15, 20, 20})});
    std::vector<TrainingExample> examples(2);
    examples[0] = {"teal", testing::uniform_image(8, 8, {0, 128, 128}), std::nullopt, "teal_1"};
    examples[1] = {"teal", testing::uniform_image(8, 8, {20, 140, 130}), std::nullopt, "teal_2"};
    const ModelExtension ext = extend_model(base, "teal", examples, {});
    REQUIRE(ext.model.size() == 3);
    CHECK(ext.model.term(0) == base.term(0));
    CHECK(ext.model.term(1) == base.term(1));
    CHECK(ext.model.term(2).name == "teal");
    CHECK(name_pixel(ext.model, srgb_to_lab(Srgb8{10, 134, 129})) == "teal");
    CHECK(remove_term(ext.model, "teal") == base);

    CHECK_THROWS_AS(extend_model(base, "red", examples, {}), Error);
    CHECK_THROWS_AS(extend_model(base, "teal", std::span<const TrainingExample>{}, {}), Error);
    CHECK_THROWS_AS(extend_model(base, "", examples, {}), Error);
    CHECK_THROWS_AS(remove_term(base, "teal"), Error);
}
