#pragma once

#include <chromaterm/colourspace.hpp>
#include <chromaterm/dataset.hpp>
#include <chromaterm/image.hpp>

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chromaterm {

/// Integer coordinates of a cubic Lab bin; the bin centre is key * bin_size.
struct BinKey {
    long L = 0;
    long a = 0;
    long b = 0;

    friend auto operator<=>(const BinKey&, const BinKey&) = default;
};

/// Sparse per-bin membership degrees, one entry per term. Missing bins are
/// unobserved; an observed bin stores count_t / total for every term.
class MembershipGroundTruth {
public:
    MembershipGroundTruth(std::vector<std::string> term_names, double bin_size);

    const std::vector<std::string>& term_names() const { return term_names_; }
    double bin_size() const { return bin_size_; }
    std::optional<std::size_t> term_index(std::string_view name) const;

    BinKey bin_of(LabColour c) const;
    LabColour centre_of(const BinKey& key) const;

    /// Memberships must have one entry per term, each in [0, 1].
    void set(const BinKey& key, std::vector<double> memberships);
    double membership(const BinKey& key, std::size_t term) const;

    const std::map<BinKey, std::vector<double>>& bins() const { return bins_; }
    std::size_t size() const { return bins_.size(); }

    friend bool operator==(const MembershipGroundTruth&, const MembershipGroundTruth&) = default;

private:
    std::vector<std::string> term_names_;
    double bin_size_;
    std::map<BinKey, std::vector<double>> bins_;
};

/// An image whose masked pixels (all pixels when `mask` is empty) carry `term`.
struct TrainingExample {
    std::string term;
    Image image;
    std::optional<Mask> mask;
    std::string source;  // for diagnostics
};

std::vector<TrainingExample> load_training_examples(std::span<const LabelledFile> files);

/// Counts, per Lab bin, how often masked pixels were labelled with each term and
/// divides by the bin's total. Term order is lexicographic. Examples with an empty
/// mask are skipped with a warning appended to `warnings`; throws when no pixel at
/// all was counted or a mask does not match its image.
MembershipGroundTruth build_ground_truth(std::span<const TrainingExample> examples, double bin_size,
                                         std::vector<std::string>* warnings = nullptr);

/// weight * first + (1 - weight) * second per bin and term; a bin missing from
/// one input counts as zero there. Terms are matched by name (first's order wins).
MembershipGroundTruth average_ground_truths(const MembershipGroundTruth& first, const MembershipGroundTruth& second,
                                            double weight);

}  // namespace chromaterm
