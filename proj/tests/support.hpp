#pragma once

#include <chromaterm/ellipsoid_model.hpp>
#include <chromaterm/image.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include <unistd.h>

namespace testing {

inline std::filesystem::path data_dir() { return CHROMATERM_DATA_DIR; }

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("chromaterm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline chromaterm::ColourTerm make_term(std::string name, chromaterm::LabColour centre, std::array<double, 3> axes,
                                        std::array<double, 3> angles = {0, 0, 0}, double g = 1.0) {
    chromaterm::ColourTerm t;
    t.name = std::move(name);
    t.ellipsoid.centre = centre;
    t.ellipsoid.semi_axes = axes;
    t.ellipsoid.rotation = angles;
    t.steepness = g;
    return t;
}

/// Random valid term: centre in the Lab box, axes in [2, 40], angles in [0, pi), g in (0.05, 1].
inline chromaterm::ColourTerm random_term(std::mt19937_64& rng, std::string name = "t") {
    std::uniform_real_distribution<double> L(0, 100), ab(-100, 100), axis(2, 40), angle(0, std::numbers::pi),
        g(0.05, 1.0);
    return make_term(std::move(name), {L(rng), ab(rng), ab(rng)}, {axis(rng), axis(rng), axis(rng)},
                     {angle(rng), angle(rng), angle(rng)}, g(rng));
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    Eigen::Vector3d v;
    do v = {n(rng), n(rng), n(rng)};
    while (v.norm() < 1e-6);
    return v.normalized();
}

inline chromaterm::Image uniform_image(int w, int h, chromaterm::Srgb8 c) {
    return chromaterm::Image(w, h, chromaterm::normalise(c));
}

}  // namespace testing
