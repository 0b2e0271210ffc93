#include <chromaterm/dataset.hpp>

#include <chromaterm/error.hpp>

#include <algorithm>
#include <cctype>

namespace chromaterm {

namespace fs = std::filesystem;

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm" || ext == ".pnm" || ext == ".pgm";
}

std::optional<fs::path> sibling_mask(const fs::path& image) {
    fs::path mask = image.parent_path() / "masks" / image.filename();
    if (fs::is_regular_file(mask)) return mask;
    return std::nullopt;
}

std::vector<LabelledFile> scan_image_files(const fs::path& dir, const std::string& label) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<LabelledFile> out;
    for (auto& f : files) out.push_back({f, sibling_mask(f), label});
    return out;
}

std::vector<LabelledFile> scan_labelled_directory(const fs::path& root) {
    if (!fs::is_directory(root)) throw data_error(root.string() + ": not a directory");
    std::vector<fs::path> terms;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && entry.path().filename() != "masks") terms.push_back(entry.path());
    std::sort(terms.begin(), terms.end());
    std::vector<LabelledFile> out;
    for (const auto& dir : terms) {
        auto files = scan_image_files(dir, dir.filename().string());
        out.insert(out.end(), files.begin(), files.end());
    }
    if (out.empty()) throw data_error(root.string() + ": no labelled images found (expected <term>/<image> layout)");
    return out;
}

}  // namespace chromaterm
