#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace filterlr {

/// Binary labels are stored as -1/+1 throughout the library.
using Label = std::int8_t;

enum class LabelCoding { PlusMinusOne, ZeroOne };

/// {-1,+1} -> {0,1}, i.e. f(y) = (y + 1) / 2.
inline int to_zero_one(Label y) { return (y + 1) / 2; }
/// {0,1} -> {-1,+1}.
inline Label from_zero_one(int v) { return static_cast<Label>(2 * v - 1); }

/// Maps a raw label value under the given coding to the canonical -1/+1.
/// Throws ValidationError if the value is not part of the coding.
Label canonical_label(double raw, LabelCoding coding);

/// n samples of p continuous covariates with a binary label.
///
/// Features are stored column-major (all samples of covariate 0, then
/// covariate 1, ...) because every consumer works one covariate at a time.
/// A Dataset is immutable once constructed.
class Dataset {
public:
    Dataset() = default;

    /// `features_col_major` has n * p entries. Validates finiteness, label
    /// values and name count; throws ValidationError otherwise.
    Dataset(std::size_t n, std::vector<double> features_col_major, std::vector<Label> labels,
            std::vector<std::string> feature_names, std::string label_name = "y");

    /// Builds from row-major storage (row i holds sample i).
    static Dataset from_rows(const std::vector<std::vector<double>>& rows, std::vector<Label> labels,
                             std::vector<std::string> feature_names, std::string label_name = "y");

    std::size_t n() const { return n_; }
    std::size_t p() const { return names_.size(); }

    std::span<const double> column(std::size_t j) const {
        return {features_.data() + j * n_, n_};
    }
    double at(std::size_t i, std::size_t j) const { return features_[j * n_ + i]; }
    std::vector<double> row(std::size_t i) const;

    std::span<const Label> labels() const { return labels_; }
    const std::vector<std::string>& feature_names() const { return names_; }
    const std::string& label_name() const { return label_name_; }

    std::size_t count_positive() const;
    bool has_both_classes() const;

    /// Samples selected by `rows` (repeats allowed), in that order.
    Dataset subset(std::span<const std::size_t> rows) const;

    /// Throws ValidationError unless n >= 2 and both classes are present.
    void require_fittable() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> features_;
    std::vector<Label> labels_;
    std::vector<std::string> names_;
    std::string label_name_ = "y";
};

/// Optional: a file without the label column loads with every label -1
/// (for scoring new samples).
enum class LabelMode { Required, Optional };

/// Reads a headed CSV file. Every column except `label_column` is a
/// covariate. Labels may be coded 0/1 or -1/+1 and are canonicalized.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 LabelMode mode = LabelMode::Required);

/// Parses CSV text (same rules as load_csv; `source` names the input in errors).
Dataset parse_csv(const std::string& text, const std::string& label_column,
                  const std::string& source = "<memory>", LabelMode mode = LabelMode::Required);

/// Writes covariates followed by the label column. Floats use 17 significant
/// digits so values read back bit-exactly.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              LabelCoding coding = LabelCoding::PlusMinusOne);

std::string to_csv(const Dataset& data, LabelCoding coding = LabelCoding::PlusMinusOne);

}  // namespace filterlr
