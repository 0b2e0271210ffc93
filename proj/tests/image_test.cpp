#include "support.hpp"

#include <chromaterm/dataset.hpp>
#include <chromaterm/error.hpp>
#include <chromaterm/image.hpp>

#include <doctest.h>

#include <fstream>

using namespace chromaterm;

namespace {

std::vector<Srgb8> gradient(int w, int h) {
    std::vector<Srgb8> px;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            px.push_back({static_cast<std::uint8_t>(x * 40), static_cast<std::uint8_t>(y * 50), static_cast<std::uint8_t>(x + y)});
    return px;
}

}  // namespace

TEST_CASE("8-bit PNG and PPM round trips") {
    testing::TempDir dir("image");
    const auto px = gradient(5, 3);
    write_png_rgb8(dir / "a.png", 5, 3, px);
    write_ppm(dir / "a.ppm", 5, 3, px);
    for (const auto* name : {"a.png", "a.ppm"}) {
        const Image img = read_image(dir / name);
        CHECK(img.width == 5);
        CHECK(img.height == 3);
        CHECK(to_rgb8(img) == px);
    }
}

TEST_CASE("16-bit PNG keeps full precision") {
    testing::TempDir dir("image16");
    Image img(2, 1);
    img.bit_depth = 16;
    img.pixels = {{1.0 / 65535, 0.5, 1.0}, {0.0, 12345.0 / 65535, 40000.0 / 65535}};
    write_png_rgb16(dir / "b.png", img);
    const Image back = read_image(dir / "b.png");
    CHECK(back.bit_depth == 16);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.pixels[i].r == doctest::Approx(img.pixels[i].r).epsilon(1e-12));
        CHECK(back.pixels[i].g == doctest::Approx(std::round(img.pixels[i].g * 65535) / 65535).epsilon(1e-12));
        CHECK(back.pixels[i].b == doctest::Approx(img.pixels[i].b).epsilon(1e-12));
    }
}

TEST_CASE("grey and indexed PNGs") {
    testing::TempDir dir("image_misc");
    const std::vector<std::uint8_t> grey = {0, 127, 128, 255};
    write_png_grey8(dir / "m.png", 2, 2, grey);
    const Mask m = read_mask(dir / "m.png");
    CHECK(m.count() == 2);
    CHECK_FALSE(m.at(1, 0));
    CHECK(m.at(0, 1));
    CHECK(to_rgb8(read_image(dir / "m.png"))[1] == Srgb8{127, 127, 127});

    const std::vector<std::uint8_t> idx = {0, 1, 1, 2};
    const std::vector<Srgb8> palette = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    write_png_indexed(dir / "i.png", 2, 2, idx, palette);
    const IndexedImage back = read_png_indexed(dir / "i.png");
    CHECK(back.indices == idx);
    CHECK(back.palette == palette);
    CHECK(to_rgb8(read_image(dir / "i.png"))[3] == Srgb8{7, 8, 9});

    const std::vector<std::uint8_t> out_of_range = {3, 0, 0, 0};
    CHECK_THROWS_AS(write_png_indexed(dir / "j.png", 2, 2, out_of_range, palette), Error);
    CHECK_FALSE(std::filesystem::exists(dir / "j.png"));
}

TEST_CASE("unreadable images are data errors") {
    testing::TempDir dir("image_bad");
    std::ofstream(dir / "junk.png") << "definitely not an image";
    std::ofstream(dir / "trunc.ppm") << "P6\n4 4\n255\nabc";
    for (const auto* name : {"junk.png", "trunc.ppm", "missing.png"}) {
        try {
            read_image(dir / name);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::data);
            CHECK(std::string(e.what()).find(name) != std::string::npos);
        }
    }
    CHECK_THROWS_AS(write_png_rgb8(dir / "x.png", 2, 2, gradient(1, 1)), Error);
}

TEST_CASE("labelled directory scan") {
    testing::TempDir dir("scan");
    std::filesystem::create_directories(dir / "red" / "masks");
    std::filesystem::create_directories(dir / "blue");
    const auto px = gradient(2, 2);
    write_png_rgb8(dir / "red" / "b.png", 2, 2, px);
    write_png_rgb8(dir / "red" / "a.png", 2, 2, px);
    write_png_grey8(dir / "red" / "masks" / "a.png", 2, 2, std::vector<std::uint8_t>{255, 0, 0, 0});
    write_ppm(dir / "blue" / "c.ppm", 2, 2, px);
    std::ofstream(dir / "blue" / "notes.txt") << "x";

    const auto files = scan_labelled_directory(dir.path());
    REQUIRE(files.size() == 3);
    CHECK(files[0].label == "blue");
    CHECK(files[1].image.filename() == "a.png");
    CHECK(files[1].mask.has_value());
    CHECK_FALSE(files[2].mask.has_value());
    CHECK(sibling_mask(dir / "red" / "a.png").has_value());
    CHECK_FALSE(sibling_mask(dir / "red" / "b.png").has_value());
}
