#include "filterlr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "filterlr/csv.hpp"
#include "filterlr/error.hpp"

namespace filterlr {

Label canonical_label(double raw, LabelCoding coding) {
    if (coding == LabelCoding::ZeroOne) {
        if (raw == 0.0) return -1;
        if (raw == 1.0) return 1;
    } else {
        if (raw == -1.0) return -1;
        if (raw == 1.0) return 1;
    }
    throw ValidationError("label value " + csv::format_double(raw) + " is not binary");
}

Dataset::Dataset(std::size_t n, std::vector<double> features_col_major, std::vector<Label> labels,
                 std::vector<std::string> feature_names, std::string label_name)
    : n_(n),
      features_(std::move(features_col_major)),
      labels_(std::move(labels)),
      names_(std::move(feature_names)),
      label_name_(std::move(label_name)) {
    if (labels_.size() != n_) {
        throw ValidationError("dataset: " + std::to_string(labels_.size()) + " labels for " +
                              std::to_string(n_) + " samples");
    }
    if (features_.size() != n_ * names_.size()) {
        throw ValidationError("dataset: feature storage has " + std::to_string(features_.size()) +
                              " values, expected n*p = " + std::to_string(n_ * names_.size()));
    }
    for (std::size_t j = 0; j < names_.size(); ++j) {
        for (std::size_t i = 0; i < n_; ++i) {
            if (!std::isfinite(features_[j * n_ + i])) {
                throw ValidationError("dataset: non-finite value at row " + std::to_string(i) +
                                      ", column '" + names_[j] + "'");
            }
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (labels_[i] != -1 && labels_[i] != 1) {
            throw ValidationError("dataset: label at row " + std::to_string(i) + " is not -1/+1");
        }
    }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, std::vector<Label> labels,
                           std::vector<std::string> feature_names, std::string label_name) {
    const std::size_t n = rows.size();
    const std::size_t p = feature_names.size();
    std::vector<double> cols(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != p) {
            throw ValidationError("dataset: row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " values, expected " +
                                  std::to_string(p));
        }
        for (std::size_t j = 0; j < p; ++j) cols[j * n + i] = rows[i][j];
    }
    return Dataset(n, std::move(cols), std::move(labels), std::move(feature_names),
                   std::move(label_name));
}

std::vector<double> Dataset::row(std::size_t i) const {
    std::vector<double> r(p());
    for (std::size_t j = 0; j < p(); ++j) r[j] = at(i, j);
    return r;
}

std::size_t Dataset::count_positive() const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label{1}));
}

bool Dataset::has_both_classes() const {
    const std::size_t pos = count_positive();
    return pos > 0 && pos < n_;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    const std::size_t m = rows.size();
    Dataset out;
    out.n_ = m;
    out.names_ = names_;
    out.label_name_ = label_name_;
    out.features_.resize(m * p());
    out.labels_.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (rows[r] >= n_) throw ValidationError("dataset: subset row index out of range");
        out.labels_[r] = labels_[rows[r]];
    }
    for (std::size_t j = 0; j < p(); ++j) {
        const double* src = features_.data() + j * n_;
        double* dst = out.features_.data() + j * m;
        for (std::size_t r = 0; r < m; ++r) dst[r] = src[rows[r]];
    }
    return out;
}

void Dataset::require_fittable() const {
    if (n_ < 2) throw ValidationError("dataset: at least 2 samples are required for fitting");
    if (!has_both_classes()) {
        throw ValidationError("dataset: both classes must be present for fitting");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string cell_location(const std::string& source, std::size_t line, const std::string& column) {
    return source + ": line " + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& label_column, const std::string& source,
                  LabelMode mode) {
    const auto rows = csv::parse(text);
    if (rows.empty()) throw ValidationError(source + ": missing header row");
    const auto& header = rows.front();
    const auto label_it = std::find(header.begin(), header.end(), label_column);
    const bool has_label = label_it != header.end();
    if (!has_label && mode == LabelMode::Required) {
        throw ValidationError(source + ": label column '" + label_column + "' not found in header");
    }
    const auto label_idx = has_label ? static_cast<std::size_t>(label_it - header.begin()) : header.size();

    std::vector<std::string> names;
    std::vector<std::size_t> feature_idx;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_idx) continue;
        names.push_back(header[c]);
        feature_idx.push_back(c);
    }

    const std::size_t n = rows.size() - 1;
    const std::size_t p = names.size();
    std::vector<double> cols(n * p);
    std::vector<double> raw_labels(n);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::size_t line = r + 1;
        if (row.size() != header.size()) {
            throw ValidationError(source + ": line " + std::to_string(line) + " has " +
                                  std::to_string(row.size()) + " fields, header has " +
                                  std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < p; ++j) {
            double v = 0.0;
            const auto& cell = row[feature_idx[j]];
            if (!parse_number(cell, v)) {
                throw ValidationError(cell_location(source, line, names[j]) + ": non-numeric value '" +
                                      cell + "'");
            }
            if (!std::isfinite(v)) {
                throw ValidationError(cell_location(source, line, names[j]) + ": non-finite value '" +
                                      cell + "'");
            }
            cols[j * n + (r - 1)] = v;
        }
        double lv = -1.0;
        if (has_label && !parse_number(row[label_idx], lv)) {
            throw ValidationError(cell_location(source, line, label_column) + ": non-numeric label '" +
                                  row[label_idx] + "'");
        }
        raw_labels[r - 1] = lv;
    }

    bool has_zero = false;
    bool has_minus = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = raw_labels[i];
        if (v == 0.0) {
            has_zero = true;
        } else if (v == -1.0) {
            has_minus = true;
        } else if (v != 1.0) {
            throw ValidationError(cell_location(source, i + 2, label_column) + ": label '" +
                                  rows[i + 1][label_idx] + "' is not one of 0/1 or -1/+1");
        }
    }
    if (has_zero && has_minus) {
        throw ValidationError(source + ": label column '" + label_column +
                              "' mixes 0/1 and -1/+1 codings");
    }
    const LabelCoding coding = has_zero ? LabelCoding::ZeroOne : LabelCoding::PlusMinusOne;
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = canonical_label(raw_labels[i], coding);

    return Dataset(n, std::move(cols), std::move(labels), std::move(names), label_column);
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column, LabelMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open data file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), label_column, path.string(), mode);
}

std::string to_csv(const Dataset& data, LabelCoding coding) {
    std::string out;
    csv::Row header = data.feature_names();
    header.push_back(data.label_name());
    out += csv::join(header);
    out += '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.p(); ++j) {
            out += csv::format_double(data.at(i, j));
            out += ',';
        }
        const Label y = data.labels()[i];
        out += coding == LabelCoding::ZeroOne ? std::to_string(to_zero_one(y)) : std::to_string(int{y});
        out += '\n';
    }
    return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path, LabelCoding coding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("cannot open '" + path.string() + "' for writing");
    out << to_csv(data, coding);
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

}  // namespace filterlr
