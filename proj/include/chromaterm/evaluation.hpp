#pragma once

#include <chromaterm/colourspace.hpp>
#include <chromaterm/dataset.hpp>
#include <chromaterm/ellipsoid_model.hpp>
#include <chromaterm/image.hpp>

#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chromaterm {

// ---------------------------------------------------------------------------
// Munsell chart protocol
// ---------------------------------------------------------------------------

/// One chart chip. Column 0 holds the ten neutral chips (rows 0..9); chromatic
/// chips sit in rows 1..8 and hue columns 1..40.
struct MunsellChip {
    std::string notation;
    LabColour lab;
    int row = 0;
    int column = 0;

    bool achromatic() const { return column == 0; }
};

struct MunsellChart {
    static constexpr std::size_t kChips = 330;
    static constexpr std::size_t kAchromatic = 10;
    static constexpr int kHueColumns = 40;
    static constexpr int kRows = 10;

    std::vector<MunsellChip> chips;
};

/// CSV with header `notation,L,a,b,row,column`; lines starting with '#' are comments.
/// Throws on a wrong chip count, duplicate or out-of-range positions, or unparsable rows.
/// Neutral chips with |a| or |b| >= 2 produce a warning.
MunsellChart parse_chart(std::istream& in, const std::string& source, std::vector<std::string>* warnings = nullptr);
MunsellChart load_chart(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Per-position reference names from an external naming study; may be partial.
struct ChartReference {
    std::map<std::pair<int, int>, std::string> labels;  // (row, column) -> term
};

/// CSV with header `row,column,term`.
ChartReference parse_chart_reference(std::istream& in, const std::string& source);
ChartReference load_chart_reference(const std::filesystem::path& path);

/// Model naming of every chip as a reference (useful for self-consistency checks).
ChartReference name_chart(const ColourModel& model, const MunsellChart& chart);

struct ChipOutcome {
    std::string notation;
    int row = 0;
    int column = 0;
    std::string reference;
    std::string predicted;
};

struct ChartReport {
    std::size_t chips = 0;
    std::size_t labelled = 0;
    std::size_t matched = 0;
    double accuracy = 0.0;
    std::vector<ChipOutcome> outcomes;  // every referenced chip, ordered by (row, column)
};

ChartReport evaluate_chart(const ColourModel& model, const MunsellChart& chart, const ChartReference& reference);

struct RgbImage8 {
    int width = 0;
    int height = 0;
    std::vector<Srgb8> pixels;
};

/// Grid of (hue columns + 1) x rows cells of `cell` pixels, each chip cell filled
/// with the palette colour of its assigned term. Empty positions stay dark grey.
RgbImage8 render_chart_segmentation(const ColourModel& model, const MunsellChart& chart, int cell = 16);

// ---------------------------------------------------------------------------
// Per-image true-positive-ratio protocol
// ---------------------------------------------------------------------------

struct LabelledImage {
    std::string id;
    Image image;
    Mask mask;
    std::string label;
};

/// Reads the image and its mask (or a full mask when none is given).
LabelledImage load_labelled_image(const LabelledFile& file);

/// TP / (TP + FN) over the masked pixels. Throws on an empty or mismatched mask.
double true_positive_ratio(const ColourModel& model, const LabelledImage& item);

struct ImageOutcome {
    std::string id;
    std::string label;
    double tpr = 0.0;
    std::size_t pixels = 0;
};

struct TermSummary {
    std::size_t items = 0;
    double mean_tpr = 0.0;
};

struct DatasetReport {
    double mean_tpr = 0.0;                               // unweighted mean over images
    std::vector<ImageOutcome> items;                     // input order
    std::vector<std::pair<std::string, std::string>> failures;  // (id, reason)
    std::map<std::string, TermSummary> per_term;
    std::map<std::string, std::map<std::string, std::size_t>> confusion;  // label -> predicted -> pixels
};

DatasetReport evaluate_dataset(const ColourModel& model, std::span<const LabelledImage> items);
/// Loads each file; items that fail to load or evaluate are recorded in `failures`.
DatasetReport evaluate_dataset(const ColourModel& model, std::span<const LabelledFile> files);

/// Line-oriented key=value reports.
std::string format_report(const ChartReport& report);
std::string format_report(const DatasetReport& report);

/// CSV confusion matrix, rows = reference term, columns = predicted term (model order).
std::string confusion_csv(const ChartReport& report, const ColourModel& model);
std::string confusion_csv(const DatasetReport& report, const ColourModel& model);

}  // namespace chromaterm
