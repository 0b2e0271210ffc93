#include <chromaterm/cli.hpp>

#include <chromaterm/adaptation.hpp>
#include <chromaterm/dataset.hpp>
#include <chromaterm/error.hpp>
#include <chromaterm/evaluation.hpp>
#include <chromaterm/fitting.hpp>
#include <chromaterm/model_io.hpp>
#include <chromaterm/palette.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace chromaterm {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical failure.";

std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
        if (!out.flush()) throw data_error(path.string() + ": write failed");
    });
}

void add_fit_flags(CLI::App* cmd, FitConfig& config) {
    cmd->add_option("--iterations", config.max_iterations, "Maximum optimiser iterations per term")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", config.tolerance, "Stop when an iteration improves the objective by less")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bin-size", config.bin_size, "Lab bin edge used to quantise ground truth")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", config.seed, "Seed for random restarts")->capture_default_str();
    cmd->add_option("--restarts", config.restarts, "Extra random-orientation starts per term")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

void print_fit(std::ostream& out, const TermFit& f) {
    out << "term=" << f.term.name << " objective=" << fixed6(f.objective) << " initial=" << fixed6(f.initial_objective)
        << " iterations=" << f.iterations << (f.improved ? "" : " improved=false") << "\n";
}

void check_fits(const std::vector<TermFit>& fits, std::ostream& err) {
    for (const auto& f : fits) {
        if (!std::isfinite(f.objective)) throw numerical_error("term '" + f.term.name + "': non-finite objective");
        if (!f.improved) err << "warning: term '" << f.term.name << "' did not improve on its initial point\n";
    }
}

struct FitArgs {
    std::string gt_dir;
    std::string out;
    FitConfig config;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const auto files = scan_labelled_directory(a.gt_dir);
    const auto examples = load_training_examples(files);
    std::vector<std::string> warnings;
    const auto gt = build_ground_truth(examples, a.config.bin_size, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    const ModelFit fit = fit_model(gt.term_names(), gt, a.config);
    check_fits(fit.terms, err);
    write_model(a.out, fit.model);
    for (const auto& f : fit.terms) print_fit(out, f);
    return kExitOk;
}

struct NameArgs {
    std::string model;
    std::string input;
    std::string output;
    std::string maps;
    double kappa = 1.0;
    bool adapt = false;
};

int cmd_name(const NameArgs& a, std::ostream& out) {
    ColourModel model = read_model(a.model);
    const Image image = read_image(a.input);
    if (a.adapt) {
        AdaptationConfig config;
        config.gain = a.kappa;
        model = adapt_model(model, image, config);
    }
    if (model.size() > 256) throw usage_error("label images support at most 256 terms");
    const LabelMap map = name_image(model, image, !a.maps.empty());

    std::vector<std::uint8_t> indices(map.labels.begin(), map.labels.end());
    if (!a.maps.empty()) {
        fs::create_directories(a.maps);
        for (std::size_t t = 0; t < model.size(); ++t) {
            std::vector<std::uint8_t> grey(map.probabilities[t].size());
            for (std::size_t i = 0; i < grey.size(); ++i)
                grey[i] = static_cast<std::uint8_t>(std::lround(255.0 * map.probabilities[t][i]));
            write_png_grey8(fs::path(a.maps) / (model.term(t).name + ".png"), map.width, map.height, grey);
        }
    }
    write_png_indexed(a.output, map.width, map.height, indices, model_palette(model));

    std::vector<std::size_t> counts(model.size(), 0);
    for (auto l : map.labels) ++counts[l];
    for (std::size_t t = 0; t < model.size(); ++t)
        if (counts[t]) out << "term=" << model.term(t).name << " pixels=" << counts[t] << "\n";
    return kExitOk;
}

struct ExtendArgs {
    std::string model;
    std::string term;
    std::string out;
    std::vector<std::string> images;
    FitConfig config;
};

int cmd_extend(const ExtendArgs& a, std::ostream& out) {
    const ColourModel model = read_model(a.model);
    if (a.images.empty()) throw usage_error("extend needs at least one example image");
    std::vector<LabelledFile> files;
    for (const auto& img : a.images) files.push_back({img, sibling_mask(img), a.term});
    const auto examples = load_training_examples(files);
    const ModelExtension ext = extend_model(model, a.term, examples, a.config);
    if (!std::isfinite(ext.fit.objective)) throw numerical_error("new term: non-finite objective");
    write_model(a.out, ext.model);
    print_fit(out, ext.fit);
    return kExitOk;
}

struct EvalArgs {
    std::string model;
    std::string munsell;
    std::string reference;
    std::string dataset;
    std::string render;
    std::string confusion;
    int cell = 16;
    bool allow_errors = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    const ColourModel model = read_model(a.model);
    if (a.munsell.empty() == a.dataset.empty()) throw usage_error("eval needs exactly one of --munsell or --dataset");
    if (!a.munsell.empty()) {
        std::vector<std::string> warnings;
        const MunsellChart chart = load_chart(a.munsell, &warnings);
        for (const auto& w : warnings) err << "warning: " << w << "\n";
        if (a.reference.empty()) throw usage_error("--munsell requires --reference");
        const ChartReport report = evaluate_chart(model, chart, load_chart_reference(a.reference));
        if (!a.render.empty()) {
            const RgbImage8 img = render_chart_segmentation(model, chart, a.cell);
            write_png_rgb8(a.render, img.width, img.height, img.pixels);
        }
        if (!a.confusion.empty()) write_text(a.confusion, confusion_csv(report, model));
        out << format_report(report);
        return kExitOk;
    }
    if (!a.render.empty()) throw usage_error("--render applies to --munsell only");
    const auto files = scan_labelled_directory(a.dataset);
    const DatasetReport report = evaluate_dataset(model, std::span<const LabelledFile>(files));
    if (!a.confusion.empty()) write_text(a.confusion, confusion_csv(report, model));
    out << format_report(report);
    if (!report.failures.empty() && !a.allow_errors) {
        err << "error: " << report.failures.size() << " item(s) failed; rerun with --allow-errors to accept\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"chromaterm: ellipsoidal colour-term naming", "chromaterm"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Learn a model from a <term>/<image> ground-truth directory");
    fit_cmd->add_option("gt_dir", fit.gt_dir, "Ground-truth directory")->required();
    fit_cmd->add_option("-o,--out", fit.out, "Output model file")->required();
    add_fit_flags(fit_cmd, fit.config);
    fit_cmd->footer(kExitCodes);

    NameArgs name;
    auto* name_cmd = app.add_subcommand("name", "Name every pixel of an image");
    name_cmd->add_option("model", name.model, "Model file")->required();
    name_cmd->add_option("input", name.input, "Input image (PNG or PPM)")->required();
    name_cmd->add_option("output", name.output, "Output indexed label PNG")->required();
    name_cmd->add_option("--maps", name.maps, "Directory for per-term probability PNGs");
    auto* adapt_opt = name_cmd->add_option("--adapt", name.kappa, "Adapt achromatic terms to the image (gain, default 1)")
                          ->expected(0, 1)
                          ->default_str("1");
    name_cmd->footer(kExitCodes);

    ExtendArgs ext;
    auto* ext_cmd = app.add_subcommand("extend", "Add a new colour term learnt from example images");
    ext_cmd->add_option("model", ext.model, "Existing model file")->required();
    ext_cmd->add_option("--term", ext.term, "Name of the new term")->required();
    ext_cmd->add_option("-o,--out", ext.out, "Output model file")->required();
    ext_cmd->add_option("images", ext.images, "Example images (masks from sibling masks/ directories)");
    add_fit_flags(ext_cmd, ext.config);
    ext_cmd->footer(kExitCodes);

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on the Munsell chart or a labelled dataset");
    eval_cmd->add_option("model", ev.model, "Model file")->required();
    eval_cmd->add_option("--munsell", ev.munsell, "Munsell chip table CSV");
    eval_cmd->add_option("--reference", ev.reference, "Reference naming CSV (row,column,term)");
    eval_cmd->add_option("--dataset", ev.dataset, "Dataset directory <term>/<image> with masks/");
    eval_cmd->add_option("--render", ev.render, "Write the chart segmentation PNG");
    eval_cmd->add_option("--cell", ev.cell, "Chart cell size in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    eval_cmd->add_option("--confusion", ev.confusion, "Write a CSV confusion matrix");
    eval_cmd->add_flag("--allow-errors", ev.allow_errors, "Do not fail when some items cannot be evaluated");
    eval_cmd->footer(kExitCodes);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit, out, err);
        if (*name_cmd) {
            name.adapt = adapt_opt->count() > 0;
            return cmd_name(name, out);
        }
        if (*ext_cmd) return cmd_extend(ext, out);
        if (*eval_cmd) return cmd_eval(ev, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::usage: return kExitUsage;
            case ErrorKind::data: return kExitData;
            case ErrorKind::numerical: return kExitNumerical;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace chromaterm
