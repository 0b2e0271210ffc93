#include <chromaterm/ground_truth.hpp>

#include <chromaterm/error.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace chromaterm {

MembershipGroundTruth::MembershipGroundTruth(std::vector<std::string> term_names, double bin_size)
    : term_names_(std::move(term_names)), bin_size_(bin_size) {
    if (!(bin_size_ > 0.0) || !std::isfinite(bin_size_)) throw usage_error("bin size must be positive");
    if (term_names_.empty()) throw usage_error("ground truth needs at least one term");
    std::set<std::string> unique(term_names_.begin(), term_names_.end());
    if (unique.size() != term_names_.size()) throw usage_error("ground truth term names must be unique");
}

std::optional<std::size_t> MembershipGroundTruth::term_index(std::string_view name) const {
    for (std::size_t i = 0; i < term_names_.size(); ++i)
        if (term_names_[i] == name) return i;
    return std::nullopt;
}

BinKey MembershipGroundTruth::bin_of(LabColour c) const {
    return {std::lround(c.L / bin_size_), std::lround(c.a / bin_size_), std::lround(c.b / bin_size_)};
}

LabColour MembershipGroundTruth::centre_of(const BinKey& key) const {
    return {static_cast<double>(key.L) * bin_size_, static_cast<double>(key.a) * bin_size_,
            static_cast<double>(key.b) * bin_size_};
}

void MembershipGroundTruth::set(const BinKey& key, std::vector<double> memberships) {
    if (memberships.size() != term_names_.size())
        throw usage_error("membership vector size does not match the term count");
    for (double m : memberships)
        if (!(m >= 0.0 && m <= 1.0)) throw data_error("membership degrees must lie in [0, 1]");
    bins_[key] = std::move(memberships);
}

double MembershipGroundTruth::membership(const BinKey& key, std::size_t term) const {
    const auto it = bins_.find(key);
    return it == bins_.end() ? 0.0 : it->second.at(term);
}

std::vector<TrainingExample> load_training_examples(std::span<const LabelledFile> files) {
    std::vector<TrainingExample> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        TrainingExample ex{f.label, read_image(f.image), std::nullopt, f.image.string()};
        if (f.mask) ex.mask = read_mask(*f.mask);
        out.push_back(std::move(ex));
    }
    return out;
}

MembershipGroundTruth build_ground_truth(std::span<const TrainingExample> examples, double bin_size,
                                         std::vector<std::string>* warnings) {
    if (examples.empty()) throw usage_error("ground truth needs at least one example");
    std::set<std::string> names;
    for (const auto& ex : examples) {
        if (ex.term.empty()) throw usage_error(ex.source + ": example has no term name");
        names.insert(ex.term);
    }
    MembershipGroundTruth gt({names.begin(), names.end()}, bin_size);

    std::map<BinKey, std::vector<double>> counts;
    std::size_t total = 0;
    for (const auto& ex : examples) {
        const std::size_t term = *gt.term_index(ex.term);
        if (ex.mask) {
            if (ex.mask->width != ex.image.width || ex.mask->height != ex.image.height)
                throw data_error(ex.source + ": mask dimensions do not match the image");
            if (ex.mask->count() == 0) {
                if (warnings) warnings->push_back(ex.source + ": empty mask, example skipped");
                continue;
            }
        }
        for (std::size_t i = 0; i < ex.image.size(); ++i) {
            if (ex.mask && !ex.mask->on[i]) continue;
            auto& slot = counts[gt.bin_of(srgb_to_lab(ex.image.pixels[i]))];
            if (slot.empty()) slot.assign(gt.term_names().size(), 0.0);
            slot[term] += 1.0;
            ++total;
        }
    }
    if (total == 0) throw data_error("no labelled pixels in the training examples");

    for (auto& [key, c] : counts) {
        double sum = 0.0;
        for (double v : c) sum += v;
        for (double& v : c) v /= sum;
        gt.set(key, std::move(c));
    }
    return gt;
}

MembershipGroundTruth average_ground_truths(const MembershipGroundTruth& first, const MembershipGroundTruth& second,
                                            double weight) {
    if (!(weight >= 0.0 && weight <= 1.0)) throw usage_error("averaging weight must lie in [0, 1]");
    if (first.bin_size() != second.bin_size()) throw data_error("ground truths use different bin sizes");

    const std::set<std::string> a(first.term_names().begin(), first.term_names().end());
    const std::set<std::string> b(second.term_names().begin(), second.term_names().end());
    if (a != b) {
        std::ostringstream msg;
        msg << "ground truth term sets differ:";
        for (const auto& n : a)
            if (!b.count(n)) msg << " -" << n;
        for (const auto& n : b)
            if (!a.count(n)) msg << " +" << n;
        throw data_error(msg.str());
    }

    const std::size_t n = first.term_names().size();
    std::vector<std::size_t> map_second(n);
    for (std::size_t i = 0; i < n; ++i) map_second[i] = *second.term_index(first.term_names()[i]);

    MembershipGroundTruth out(first.term_names(), first.bin_size());
    // Bins observed only by a zero-weight input contribute nothing and are left out.
    std::set<BinKey> keys;
    if (weight > 0.0)
        for (const auto& [k, v] : first.bins()) keys.insert(k);
    if (weight < 1.0)
        for (const auto& [k, v] : second.bins()) keys.insert(k);
    for (const auto& key : keys) {
        std::vector<double> m(n);
        for (std::size_t i = 0; i < n; ++i)
            m[i] = weight * first.membership(key, i) + (1.0 - weight) * second.membership(key, map_second[i]);
        out.set(key, std::move(m));
    }
    return out;
}

}  // namespace chromaterm
