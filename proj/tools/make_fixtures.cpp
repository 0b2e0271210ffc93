// Regenerates the bundled image fixtures under a data directory:
//   corpus/<term>/<term>_<k>.png (+ masks/)   11 terms x 5 patches, Lab noise sigma 2
//   cream/examples/cream_<k>.png              two cream example images
//   cream/heldout_cream.png                   held-out cream patch (Lab midpoint of the two examples)
//   synthetic3/<term>/<term>_<k>.png          small 3-term ground truth for `chromaterm fit`
#include <chromaterm/colourspace.hpp>
#include <chromaterm/image.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace chromaterm;

namespace {

struct Focal {
    std::string term;
    std::vector<Srgb8> exemplars;
};

// Chromatic terms: the focal colour first, then dark, pale and hue-neighbour variants.
// Achromatic terms: neutral levels.
const std::vector<Focal>& corpus_terms() {
    static const std::vector<Focal> terms = {
        {"black", {{10, 10, 10}, {25, 25, 25}, {0, 0, 0}, {35, 35, 35}, {15, 15, 20}}},
        {"blue", {{30, 60, 200}, {20, 40, 120}, {140, 190, 240}, {0, 130, 200}, {50, 100, 230}}},
        {"brown", {{120, 70, 30}, {80, 45, 20}, {150, 100, 60}, {100, 60, 30}, {160, 110, 50}}},
        {"green", {{40, 160, 40}, {0, 100, 0}, {150, 220, 140}, {60, 180, 120}, {110, 170, 40}}},
        {"grey", {{128, 128, 128}, {100, 100, 100}, {160, 160, 160}, {80, 80, 80}, {190, 190, 190}}},
        {"orange", {{255, 140, 0}, {240, 120, 30}, {255, 180, 90}, {220, 100, 20}, {250, 150, 80}}},
        {"pink", {{255, 160, 190}, {250, 200, 215}, {230, 100, 150}, {255, 170, 170}, {235, 140, 200}}},
        {"purple", {{120, 40, 160}, {70, 20, 100}, {180, 140, 220}, {150, 50, 150}, {130, 60, 190}}},
        {"red", {{200, 20, 30}, {230, 40, 40}, {140, 10, 20}, {210, 0, 0}, {190, 30, 60}}},
        {"white", {{250, 250, 250}, {240, 240, 240}, {255, 255, 255}, {230, 230, 230}, {245, 245, 240}}},
        {"yellow", {{255, 230, 0}, {250, 220, 60}, {255, 245, 150}, {240, 240, 90}, {230, 200, 20}}},
    };
    return terms;
}

class PatchMaker {
public:
    explicit PatchMaker(std::uint32_t seed) : rng_(seed) {}

    Srgb8 noisy(Srgb8 focal, double sigma) {
        const Eigen::Vector3d lab = srgb_to_lab(focal).vec();
        Eigen::Vector3d p;
        for (int k = 0; k < 3; ++k) p[k] = lab[k] + sigma * normal_(rng_);
        return quantise(lab_to_srgb(LabColour::from(p)));
    }

    // Patch of `focal` noise in the inner region, flat `surround` in a border of width `border`.
    std::vector<Srgb8> patch(int size, int border, Srgb8 focal, Srgb8 surround, double sigma) {
        std::vector<Srgb8> px(static_cast<std::size_t>(size) * size);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const bool inner = x >= border && y >= border && x < size - border && y < size - border;
                px[static_cast<std::size_t>(y) * size + x] = inner ? noisy(focal, sigma) : surround;
            }
        return px;
    }

private:
    std::mt19937 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::vector<std::uint8_t> inner_mask(int size, int border) {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(size) * size, 0);
    for (int y = border; y < size - border; ++y)
        for (int x = border; x < size - border; ++x) m[static_cast<std::size_t>(y) * size + x] = 255;
    return m;
}

void write_corpus(const fs::path& root, PatchMaker& maker) {
    constexpr int kSize = 32;
    constexpr int kBorder = 4;
    const auto& terms = corpus_terms();
    const auto mask = inner_mask(kSize, kBorder);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const fs::path dir = root / terms[t].term;
        fs::create_directories(dir / "masks");
        const Srgb8 surround = terms[(t + 5) % terms.size()].exemplars[0];
        for (std::size_t k = 0; k < terms[t].exemplars.size(); ++k) {
            const std::string file = terms[t].term + "_" + std::to_string(k + 1) + ".png";
            write_png_rgb8(dir / file, kSize, kSize, maker.patch(kSize, kBorder, terms[t].exemplars[k], surround, 2.0));
            write_png_grey8(dir / "masks" / file, kSize, kSize, mask);
        }
    }
}

void write_cream(const fs::path& root, PatchMaker& maker) {
    constexpr int kSize = 32;
    fs::create_directories(root / "examples");
    const Srgb8 examples[] = {{255, 253, 208}, {243, 229, 171}};
    for (int k = 0; k < 2; ++k)
        write_png_rgb8(root / "examples" / ("cream_" + std::to_string(k + 1) + ".png"), kSize, kSize,
                       maker.patch(kSize, 0, examples[k], {}, 2.0));
    write_png_rgb8(root / "heldout_cream.png", 8, 8, maker.patch(8, 0, {250, 243, 193}, {}, 0.0));
}

void write_synthetic3(const fs::path& root, PatchMaker& maker) {
    constexpr int kSize = 16;
    const std::vector<Focal> terms = {
        {"blue", {{20, 50, 210}, {40, 80, 190}}},
        {"green", {{30, 170, 40}, {60, 150, 70}}},
        {"red", {{215, 20, 30}, {190, 40, 40}}},
    };
    for (const auto& t : terms) {
        fs::create_directories(root / t.term);
        for (std::size_t k = 0; k < t.exemplars.size(); ++k)
            write_png_rgb8(root / t.term / (t.term + "_" + std::to_string(k + 1) + ".png"), kSize, kSize,
                           maker.patch(kSize, 0, t.exemplars[k], {}, 2.0));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regenerate bundled image fixtures"};
    std::string out = "data";
    std::uint32_t seed = 20161016;
    app.add_option("out", out, "Data directory")->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    PatchMaker maker(seed);
    const fs::path root(out);
    write_corpus(root / "corpus", maker);
    write_cream(root / "cream", maker);
    write_synthetic3(root / "synthetic3", maker);
    std::cout << "fixtures written to " << root << "\n";
    return 0;
}
