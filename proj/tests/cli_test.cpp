#include "support.hpp"

#include <chromaterm/cli.hpp>
#include <chromaterm/model_io.hpp>

#include <doctest.h>

#include <sstream>

using namespace chromaterm;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "chromaterm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string synthetic3() { return (testing::data_dir() / "synthetic3").string(); }

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"fit"}).code == kExitUsage);
    CHECK(run({"fit", synthetic3(), "-o", "x.json", "--iterations", "0"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"fit", "--help"}).out.find("Exit codes") != std::string::npos);
}

TEST_CASE("fit writes a model and reports every term") {
    testing::TempDir dir("cli_fit");
    const auto model = (dir / "m.json").string();
    const Run r = run({"fit", synthetic3(), "-o", model});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("term=blue objective=") == 0);
    CHECK(r.out.find("term=green") != std::string::npos);
    CHECK(r.out.find("term=red") != std::string::npos);
    CHECK(read_model(model).names() == std::vector<std::string>{"blue", "green", "red"});

    const auto again = (dir / "m2.json").string();
    CHECK(run({"fit", synthetic3(), "-o", again}).out == r.out);
    CHECK(testing::slurp(model) == testing::slurp(again));

    const Run one = run({"fit", synthetic3(), "-o", (dir / "m3.json").string(), "--iterations", "1"});
    CHECK(one.code == kExitOk);
    CHECK(fs::exists(dir / "m3.json"));
}

TEST_CASE("fit on a missing directory is a data error and writes nothing") {
    testing::TempDir dir("cli_missing");
    const Run r = run({"fit", (dir / "nope").string(), "-o", (dir / "m.json").string()});
    CHECK(r.code == kExitData);
    CHECK(r.err.find("error:") == 0);
    CHECK_FALSE(fs::exists(dir / "m.json"));
}

TEST_CASE("name writes labels and maps") {
    testing::TempDir dir("cli_name");
    const auto model = (dir / "m.json").string();
    REQUIRE(run({"fit", synthetic3(), "-o", model}).code == kExitOk);
    write_png_rgb8(dir / "px.png", 1, 1, std::vector<Srgb8>{{210, 25, 35}});

    const Run r = run({"name", model, (dir / "px.png").string(), (dir / "out.png").string(), "--maps",
                       (dir / "maps").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out == "term=red pixels=1\n");
    const IndexedImage labels = read_png_indexed(dir / "out.png");
    CHECK(labels.width == 1);
    CHECK(labels.indices == std::vector<std::uint8_t>{2});
    CHECK(labels.palette.size() == 3);
    for (const auto* t : {"blue", "green", "red"}) {
        const Image map = read_image(dir / "maps" / (std::string(t) + ".png"));
        CHECK(map.width == 1);
        CHECK(map.height == 1);
    }
    CHECK(to_rgb8(read_image(dir / "maps" / "red.png"))[0].r > 127);

    CHECK(run({"name", model, (dir / "missing.png").string(), (dir / "o.png").string()}).code == kExitData);
    CHECK(run({"name", (dir / "missing.json").string(), (dir / "px.png").string(), (dir / "o.png").string()}).code ==
          kExitData);
}

TEST_CASE("adaptation on a neutral image changes nothing") {
    testing::TempDir dir("cli_adapt");
    const ColourModel model({testing::make_term("black", {10, 0, 0}, {15, 8, 8}),
                             testing::make_term("grey", {50, 0, 0}, {25, 8, 8}),
                             testing::make_term("green", {60, -50, 40}, {30, 30, 30}),
                             testing::make_term("white", {95, 0, 0}, {15, 8, 8})});
    write_model(dir / "m.json", model);
    std::vector<Srgb8> px;
    for (int i = 0; i < 16; ++i) px.push_back({static_cast<std::uint8_t>(i * 16), static_cast<std::uint8_t>(i * 16),
                                               static_cast<std::uint8_t>(i * 16)});
    write_png_rgb8(dir / "n.png", 4, 4, px);
    const auto m = (dir / "m.json").string(), in = (dir / "n.png").string();
    REQUIRE(run({"name", m, in, (dir / "plain.png").string()}).code == kExitOk);
    REQUIRE(run({"name", m, in, (dir / "adapted.png").string(), "--adapt"}).code == kExitOk);
    REQUIRE(run({"name", m, in, (dir / "k.png").string(), "--adapt=2.5"}).code == kExitOk);
    CHECK(testing::slurp(dir / "plain.png") == testing::slurp(dir / "adapted.png"));
    CHECK(testing::slurp(dir / "plain.png") == testing::slurp(dir / "k.png"));
}

TEST_CASE("extend adds a term, rejects duplicates and empty input") {
    testing::TempDir dir("cli_extend");
    const auto model = (dir / "m.json").string();
    REQUIRE(run({"fit", synthetic3(), "-o", model}).code == kExitOk);
    const auto cream = testing::data_dir() / "cream" / "examples";
    const Run r = run({"extend", model, "--term", "cream", "-o", (dir / "m2.json").string(),
                       (cream / "cream_1.png").string(), (cream / "cream_2.png").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("term=cream") == 0);
    CHECK(read_model(dir / "m2.json").names() == std::vector<std::string>{"blue", "green", "red", "cream"});

    const Run dup = run({"extend", model, "--term", "red", "-o", (dir / "m3.json").string(),
                         (cream / "cream_1.png").string()});
    CHECK(dup.code == kExitUsage);
    CHECK_FALSE(fs::exists(dir / "m3.json"));
    CHECK(run({"extend", model, "--term", "teal", "-o", (dir / "m4.json").string()}).code == kExitUsage);
    CHECK_FALSE(fs::exists(dir / "m4.json"));
}

TEST_CASE("eval: chart and dataset") {
    testing::TempDir dir("cli_eval");
    const auto model = (dir / "m.json").string();
    REQUIRE(run({"fit", synthetic3(), "-o", model}).code == kExitOk);

    const Run ds = run({"eval", model, "--dataset", synthetic3(), "--confusion", (dir / "c.csv").string()});
    REQUIRE(ds.code == kExitOk);
    CHECK(ds.out.find("protocol=dataset\nitems=6\nfailed=0\nmean_tpr=1.000000\n") == 0);
    CHECK(testing::slurp(dir / "c.csv").rfind("reference,blue,green,red\n", 0) == 0);
    CHECK(run({"eval", model, "--dataset", synthetic3()}).out == ds.out);

    // The chart reference uses terms this 3-term model lacks.
    const auto chart = (testing::data_dir() / "munsell_chart.csv").string();
    const auto ref = (testing::data_dir() / "munsell_reference_english.csv").string();
    CHECK(run({"eval", model, "--munsell", chart, "--reference", ref}).code == kExitUsage);
    std::ofstream(dir / "ref.csv") << "row,column,term\n1,1,red\n";
    const Run ch = run({"eval", model, "--munsell", chart, "--reference", (dir / "ref.csv").string(), "--render",
                        (dir / "r.png").string(), "--cell", "2"});
    REQUIRE(ch.code == kExitOk);
    CHECK(ch.out.find("labelled=1\n") != std::string::npos);
    const Image render = read_image(dir / "r.png");
    CHECK(render.width == 82);
    CHECK(render.height == 20);

    CHECK(run({"eval", model}).code == kExitUsage);
    CHECK(run({"eval", model, "--munsell", chart}).code == kExitUsage);
    CHECK(run({"eval", model, "--munsell", chart, "--dataset", synthetic3(), "--reference", ref}).code == kExitUsage);
    CHECK(run({"eval", model, "--dataset", synthetic3(), "--render", (dir / "x.png").string()}).code == kExitUsage);
}

TEST_CASE("eval --dataset with a broken item") {
    testing::TempDir dir("cli_eval_broken");
    const auto model = (dir / "m.json").string();
    REQUIRE(run({"fit", synthetic3(), "-o", model}).code == kExitOk);
    fs::create_directories(dir / "ds" / "red");
    write_png_rgb8(dir / "ds" / "red" / "a.png", 2, 2, std::vector<Srgb8>(4, Srgb8{215, 20, 30}));
    std::ofstream(dir / "ds" / "red" / "b.png") << "broken";
    const auto ds = (dir / "ds").string();
    const Run strict = run({"eval", model, "--dataset", ds});
    CHECK(strict.code == kExitData);
    CHECK(strict.out.find("failed=1") != std::string::npos);
    const Run lenient = run({"eval", model, "--dataset", ds, "--allow-errors"});
    CHECK(lenient.code == kExitOk);
    CHECK(lenient.out.find("mean_tpr=1.000000") != std::string::npos);
}
