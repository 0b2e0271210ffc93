#include <chromaterm/evaluation.hpp>

#include <chromaterm/error.hpp>
#include <chromaterm/palette.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace chromaterm {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error(where + ": cannot parse number '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error(where + ": cannot parse integer '" + s + "'");
    }
}

// Yields (line number, fields) for data lines, skipping comments, blanks and the header.
template <typename Fn>
void for_each_csv_row(std::istream& in, const std::string& header, const std::string& source, Fn&& fn) {
    std::string line;
    int number = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!seen_header) {
            if (t != header) throw data_error(source + ":" + std::to_string(number) + ": expected header '" + header + "'");
            seen_header = true;
            continue;
        }
        fn(number, split_csv(t));
    }
    if (!seen_header) throw data_error(source + ": missing header '" + header + "'");
}

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Order-independent mean: summing sorted values makes the result exact across permutations.
double stable_mean(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

MunsellChart parse_chart(std::istream& in, const std::string& source, std::vector<std::string>* warnings) {
    MunsellChart chart;
    std::set<std::pair<int, int>> positions;
    for_each_csv_row(in, "notation,L,a,b,row,column", source, [&](int line, const std::vector<std::string>& f) {
        const std::string where = source + ":" + std::to_string(line);
        if (f.size() != 6) throw data_error(where + ": expected 6 fields");
        MunsellChip chip{f[0], {parse_double(f[1], where), parse_double(f[2], where), parse_double(f[3], where)},
                         parse_int(f[4], where), parse_int(f[5], where)};
        if (chip.notation.empty()) throw data_error(where + ": empty notation");
        const bool valid_neutral = chip.column == 0 && chip.row >= 0 && chip.row < MunsellChart::kRows;
        const bool valid_chromatic =
            chip.column >= 1 && chip.column <= MunsellChart::kHueColumns && chip.row >= 1 && chip.row <= 8;
        if (!valid_neutral && !valid_chromatic) throw data_error(where + ": chip position out of range");
        if (!positions.insert({chip.row, chip.column}).second)
            throw data_error(where + ": duplicate chip position (" + std::to_string(chip.row) + "," +
                             std::to_string(chip.column) + ")");
        if (chip.achromatic() && warnings && (std::abs(chip.lab.a) >= 2.0 || std::abs(chip.lab.b) >= 2.0))
            warnings->push_back(where + ": neutral chip " + chip.notation + " is noticeably chromatic");
        chart.chips.push_back(std::move(chip));
    });
    if (chart.chips.size() != MunsellChart::kChips)
        throw data_error(source + ": expected " + std::to_string(MunsellChart::kChips) + " chips, found " +
                         std::to_string(chart.chips.size()));
    return chart;
}

MunsellChart load_chart(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw data_error(path.string() + ": cannot open chart table");
    return parse_chart(in, path.string(), warnings);
}

ChartReference parse_chart_reference(std::istream& in, const std::string& source) {
    ChartReference ref;
    for_each_csv_row(in, "row,column,term", source, [&](int line, const std::vector<std::string>& f) {
        const std::string where = source + ":" + std::to_string(line);
        if (f.size() != 3 || f[2].empty()) throw data_error(where + ": expected row,column,term");
        const auto key = std::make_pair(parse_int(f[0], where), parse_int(f[1], where));
        if (!ref.labels.emplace(key, f[2]).second) throw data_error(where + ": duplicate reference position");
    });
    return ref;
}

ChartReference load_chart_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path.string() + ": cannot open reference table");
    return parse_chart_reference(in, path.string());
}

ChartReference name_chart(const ColourModel& model, const MunsellChart& chart) {
    ChartReference ref;
    for (const auto& chip : chart.chips) ref.labels[{chip.row, chip.column}] = name_pixel(model, chip.lab);
    return ref;
}

ChartReport evaluate_chart(const ColourModel& model, const MunsellChart& chart, const ChartReference& reference) {
    for (const auto& [pos, label] : reference.labels)
        if (!model.index_of(label)) throw usage_error("reference term '" + label + "' is not in the model");

    std::vector<const MunsellChip*> ordered;
    for (const auto& chip : chart.chips) ordered.push_back(&chip);
    std::sort(ordered.begin(), ordered.end(), [](const MunsellChip* x, const MunsellChip* y) {
        return std::tie(x->row, x->column) < std::tie(y->row, y->column);
    });

    ChartReport report;
    report.chips = chart.chips.size();
    for (const MunsellChip* chip : ordered) {
        const auto it = reference.labels.find({chip->row, chip->column});
        if (it == reference.labels.end()) continue;
        ChipOutcome o{chip->notation, chip->row, chip->column, it->second, name_pixel(model, chip->lab)};
        ++report.labelled;
        if (o.reference == o.predicted) ++report.matched;
        report.outcomes.push_back(std::move(o));
    }
    report.accuracy = report.labelled ? static_cast<double>(report.matched) / static_cast<double>(report.labelled) : 0.0;
    return report;
}

RgbImage8 render_chart_segmentation(const ColourModel& model, const MunsellChart& chart, int cell) {
    if (cell < 1) throw usage_error("chart cell size must be positive");
    const std::vector<Srgb8> palette = model_palette(model);
    RgbImage8 img;
    img.width = (MunsellChart::kHueColumns + 1) * cell;
    img.height = MunsellChart::kRows * cell;
    img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, Srgb8{40, 40, 40});
    for (const auto& chip : chart.chips) {
        const Srgb8 colour = palette[name_pixel_index(model, chip.lab)];
        for (int y = chip.row * cell; y < (chip.row + 1) * cell; ++y)
            for (int x = chip.column * cell; x < (chip.column + 1) * cell; ++x)
                img.pixels[static_cast<std::size_t>(y) * img.width + x] = colour;
    }
    return img;
}

LabelledImage load_labelled_image(const LabelledFile& file) {
    LabelledImage item;
    item.id = file.image.string();
    item.label = file.label;
    item.image = read_image(file.image);
    item.mask = file.mask ? read_mask(*file.mask) : Mask(item.image.width, item.image.height, true);
    return item;
}

namespace {

struct Tally {
    std::size_t pixels = 0;
    std::size_t correct = 0;
    std::map<std::string, std::size_t> predicted;
};

Tally tally(const ColourModel& model, const LabelledImage& item) {
    if (item.mask.width != item.image.width || item.mask.height != item.image.height)
        throw data_error(item.id + ": mask dimensions do not match the image");
    Tally t;
    for (std::size_t i = 0; i < item.image.size(); ++i) {
        if (!item.mask.on[i]) continue;
        const std::string& name = name_pixel(model, srgb_to_lab(item.image.pixels[i]));
        ++t.pixels;
        ++t.predicted[name];
        if (name == item.label) ++t.correct;
    }
    if (t.pixels == 0) throw data_error(item.id + ": empty mask");
    return t;
}

DatasetReport summarise(DatasetReport report) {
    std::vector<double> all;
    std::map<std::string, std::vector<double>> by_term;
    for (const auto& it : report.items) {
        all.push_back(it.tpr);
        by_term[it.label].push_back(it.tpr);
    }
    report.mean_tpr = stable_mean(all);
    for (auto& [term, values] : by_term) report.per_term[term] = {values.size(), stable_mean(values)};
    return report;
}

void accumulate(DatasetReport& report, const ColourModel& model, const LabelledImage& item) {
    const Tally t = tally(model, item);
    report.items.push_back(
        {item.id, item.label, static_cast<double>(t.correct) / static_cast<double>(t.pixels), t.pixels});
    for (const auto& [name, n] : t.predicted) report.confusion[item.label][name] += n;
}

}  // namespace

double true_positive_ratio(const ColourModel& model, const LabelledImage& item) {
    const Tally t = tally(model, item);
    return static_cast<double>(t.correct) / static_cast<double>(t.pixels);
}

DatasetReport evaluate_dataset(const ColourModel& model, std::span<const LabelledImage> items) {
    if (items.empty()) throw usage_error("dataset evaluation needs at least one item");
    DatasetReport report;
    for (const auto& item : items) {
        try {
            accumulate(report, model, item);
        } catch (const Error& e) {
            report.failures.emplace_back(item.id, e.what());
        }
    }
    return summarise(std::move(report));
}

DatasetReport evaluate_dataset(const ColourModel& model, std::span<const LabelledFile> files) {
    if (files.empty()) throw usage_error("dataset evaluation needs at least one item");
    DatasetReport report;
    for (const auto& file : files) {
        try {
            accumulate(report, model, load_labelled_image(file));
        } catch (const Error& e) {
            report.failures.emplace_back(file.image.string(), e.what());
        }
    }
    return summarise(std::move(report));
}

std::string format_report(const ChartReport& report) {
    std::ostringstream out;
    out << "protocol=munsell\n";
    out << "chips=" << report.chips << "\n";
    out << "labelled=" << report.labelled << "\n";
    out << "matched=" << report.matched << "\n";
    out << "accuracy=" << fixed6(report.accuracy) << "\n";
    for (const auto& o : report.outcomes)
        if (o.reference != o.predicted)
            out << "mismatch=" << o.notation << "," << o.row << "," << o.column << "," << o.reference << ","
                << o.predicted << "\n";
    return out.str();
}

std::string format_report(const DatasetReport& report) {
    std::ostringstream out;
    out << "protocol=dataset\n";
    out << "items=" << report.items.size() << "\n";
    out << "failed=" << report.failures.size() << "\n";
    out << "mean_tpr=" << fixed6(report.mean_tpr) << "\n";
    for (const auto& [term, s] : report.per_term) {
        out << "term." << term << ".items=" << s.items << "\n";
        out << "term." << term << ".mean_tpr=" << fixed6(s.mean_tpr) << "\n";
    }
    for (const auto& it : report.items)
        out << "item=" << it.id << "," << it.label << "," << fixed6(it.tpr) << "," << it.pixels << "\n";
    for (const auto& [id, reason] : report.failures) out << "failure=" << id << ": " << reason << "\n";
    return out.str();
}

namespace {

std::string confusion_table(const std::map<std::string, std::map<std::string, std::size_t>>& counts,
                            const ColourModel& model) {
    std::ostringstream out;
    out << "reference";
    for (const auto& t : model.terms()) out << "," << t.name;
    out << "\n";
    std::vector<std::string> rows = model.names();
    for (const auto& [label, m] : counts)
        if (!model.index_of(label)) rows.push_back(label);
    for (const auto& label : rows) {
        const auto it = counts.find(label);
        out << label;
        for (const auto& t : model.terms()) {
            std::size_t n = 0;
            if (it != counts.end()) {
                const auto c = it->second.find(t.name);
                if (c != it->second.end()) n = c->second;
            }
            out << "," << n;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::string confusion_csv(const ChartReport& report, const ColourModel& model) {
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    for (const auto& o : report.outcomes) ++counts[o.reference][o.predicted];
    return confusion_table(counts, model);
}

std::string confusion_csv(const DatasetReport& report, const ColourModel& model) {
    return confusion_table(report.confusion, model);
}

}  // namespace chromaterm
