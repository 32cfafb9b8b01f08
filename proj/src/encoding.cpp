#include "filterlr/encoding.hpp"

#include <algorithm>

#include "filterlr/error.hpp"

namespace filterlr {

std::uint8_t level_of(std::span<const double> cuts, double x) {
    return static_cast<std::uint8_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

LevelMatrix encode_levels(const Dataset& data, const ThresholdSet& thresholds) {
    thresholds.validate();
    if (thresholds.p() != data.p()) {
        throw ValidationError("encode: thresholds cover " + std::to_string(thresholds.p()) +
                              " covariates but the data has " + std::to_string(data.p()));
    }
    for (std::size_t j = 0; j < data.p(); ++j) {
        if (thresholds.names[j] != data.feature_names()[j]) {
            throw ValidationError("encode: covariate " + std::to_string(j) + " is '" +
                                  data.feature_names()[j] + "' in the data but '" + thresholds.names[j] +
                                  "' in the thresholds");
        }
    }
    LevelMatrix m;
    m.n = data.n();
    m.block_sizes.resize(data.p());
    m.levels.resize(data.n() * data.p());
    for (std::size_t j = 0; j < data.p(); ++j) {
        const auto& cuts = thresholds.cuts[j];
        m.block_sizes[j] = cuts.size();
        const auto x = data.column(j);
        for (std::size_t i = 0; i < data.n(); ++i) m.levels[j * m.n + i] = level_of(cuts, x[i]);
    }
    return m;
}

ThresholdedDesign::ThresholdedDesign(LevelMatrix levels) : levels_(std::move(levels)) {
    if (levels_.levels.size() != levels_.n * levels_.p()) {
        throw ValidationError("design: level storage does not match n * p");
    }
    offsets_.assign(1, 0);
    for (std::size_t j = 0; j < levels_.p(); ++j) {
        for (std::size_t k = 1; k <= levels_.block_sizes[j]; ++k) {
            col_block_.push_back(j);
            col_level_.push_back(k);
        }
        offsets_.push_back(offsets_.back() + levels_.block_sizes[j]);
    }
}

double ThresholdedDesign::value(std::size_t i, std::size_t col) const {
    const double z = levels_.level(i, col_block_[col]) == col_level_[col] ? 1.0 : 0.0;
    return centered_ ? z - means_[col] : z;
}

std::vector<double> ThresholdedDesign::dense() const {
    std::vector<double> out(n() * cols());
    for (std::size_t i = 0; i < n(); ++i) {
        for (std::size_t c = 0; c < cols(); ++c) out[i * cols() + c] = value(i, c);
    }
    return out;
}

ThresholdedDesign ThresholdedDesign::centered_with(std::vector<double> means) const {
    if (means.size() != cols()) {
        throw ValidationError("design: " + std::to_string(means.size()) + " column means for " +
                              std::to_string(cols()) + " columns");
    }
    ThresholdedDesign out = *this;
    out.centered_ = true;
    out.means_ = std::move(means);
    return out;
}

ThresholdedDesign encode(const Dataset& data, const ThresholdSet& thresholds) {
    return ThresholdedDesign(encode_levels(data, thresholds));
}

ThresholdedDesign center(const ThresholdedDesign& design) {
    if (design.centered()) return design;
    std::vector<double> means(design.cols(), 0.0);
    const auto& lv = design.levels();
    const double inv_n = design.n() ? 1.0 / static_cast<double>(design.n()) : 0.0;
    for (std::size_t j = 0; j < design.p(); ++j) {
        std::vector<double> counts(lv.block_sizes[j] + 1, 0.0);
        for (std::size_t i = 0; i < lv.n; ++i) counts[lv.level(i, j)] += 1.0;
        for (std::size_t k = 1; k <= lv.block_sizes[j]; ++k) {
            means[design.offsets()[j] + k - 1] = counts[k] * inv_n;
        }
    }
    return design.centered_with(std::move(means));
}

DifferenceTransform::DifferenceTransform(std::vector<std::size_t> block_sizes)
    : blocks_(std::move(block_sizes)) {
    for (std::size_t k : blocks_) total_ += k;
}

void DifferenceTransform::check(std::span<const double> v) const {
    if (v.size() != total_) {
        throw ValidationError("difference transform: vector has " + std::to_string(v.size()) +
                              " entries, blocks need " + std::to_string(total_));
    }
}

std::vector<double> DifferenceTransform::to_theta(std::span<const double> beta) const {
    check(beta);
    std::vector<double> theta(total_);
    std::size_t o = 0;
    for (std::size_t kj : blocks_) {
        double prev = 0.0;
        for (std::size_t k = 0; k < kj; ++k) {
            theta[o + k] = beta[o + k] - prev;
            prev = beta[o + k];
        }
        o += kj;
    }
    return theta;
}

std::vector<double> DifferenceTransform::from_theta(std::span<const double> theta) const {
    check(theta);
    std::vector<double> beta(total_);
    std::size_t o = 0;
    for (std::size_t kj : blocks_) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kj; ++k) {
            acc += theta[o + k];
            beta[o + k] = acc;
        }
        o += kj;
    }
    return beta;
}

std::vector<double> DifferenceTransform::dense_t() const {
    std::vector<double> t(total_ * total_, 0.0);
    std::size_t o = 0;
    for (std::size_t kj : blocks_) {
        for (std::size_t k = 0; k < kj; ++k) {
            t[(o + k) * total_ + o + k] = 1.0;
            if (k > 0) t[(o + k) * total_ + o + k - 1] = -1.0;
        }
        o += kj;
    }
    return t;
}

std::vector<double> DifferenceTransform::dense_d() const {
    std::vector<double> d(total_ * total_, 0.0);
    std::size_t o = 0;
    for (std::size_t kj : blocks_) {
        for (std::size_t k = 0; k < kj; ++k) {
            for (std::size_t l = 0; l <= k; ++l) d[(o + k) * total_ + o + l] = 1.0;
        }
        o += kj;
    }
    return d;
}

TransformedDesign transform_design(const ThresholdedDesign& design, const DifferenceTransform& t) {
    if (t.block_sizes() != design.block_sizes()) {
        throw ValidationError("transform_design: block structure of the transform does not match the design");
    }
    TransformedDesign out;
    out.levels_ = design.levels();
    out.offsets_ = design.offsets();
    out.centered_ = design.centered();
    out.shifted_means_.assign(design.cols(), 0.0);
    if (design.centered()) {
        // Column k of Z~_j sums indicator columns k..K_j, so its mean is the
        // suffix sum of the indicator means.
        const auto& means = design.column_means();
        for (std::size_t j = 0; j < design.p(); ++j) {
            double acc = 0.0;
            const std::size_t o = design.offsets()[j];
            for (std::size_t k = design.block_sizes()[j]; k >= 1; --k) {
                acc += means[o + k - 1];
                out.shifted_means_[o + k - 1] = acc;
            }
        }
    }
    const std::size_t n = out.levels_.n;
    out.order_.resize(n * design.p());
    out.seg_offsets_.reserve(design.p());
    out.major_.resize(design.p());
    for (std::size_t j = 0; j < design.p(); ++j) {
        const std::size_t kj = design.block_sizes()[j];
        out.seg_offsets_.push_back(out.segments_.size());
        std::vector<std::uint32_t> counts(kj + 1, 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[out.levels_.level(i, j)];
        std::uint32_t start = 0;
        std::size_t major = 0;
        for (std::size_t k = 0; k <= kj; ++k) {
            out.segments_.push_back(start);
            start += counts[k];
            if (counts[k] > counts[major]) major = k;
        }
        out.segments_.push_back(start);
        out.major_[j] = static_cast<std::uint8_t>(major);
        std::vector<std::uint32_t> next(out.segments_.end() - static_cast<std::ptrdiff_t>(kj + 2),
                                        out.segments_.end() - 1);
        std::uint32_t* ord = out.order_.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) ord[next[out.levels_.level(i, j)]++] = static_cast<std::uint32_t>(i);
    }
    return out;
}

double TransformedDesign::value(std::size_t i, std::size_t col) const {
    const auto block = static_cast<std::size_t>(
        std::upper_bound(offsets_.begin(), offsets_.end(), col) - offsets_.begin() - 1);
    const std::size_t k = col - offsets_[block] + 1;
    const double z = levels_.level(i, block) >= k ? 1.0 : 0.0;
    return z - shifted_means_[col];
}

std::vector<double> TransformedDesign::dense() const {
    std::vector<double> out(n() * cols());
    for (std::size_t i = 0; i < n(); ++i) {
        for (std::size_t c = 0; c < cols(); ++c) out[i * cols() + c] = value(i, c);
    }
    return out;
}

void TransformedDesign::multiply(std::span<const double> theta, double intercept, std::span<double> out) const {
    if (theta.size() != cols() || out.size() != n()) {
        throw ValidationError("transformed design: multiply shape mismatch");
    }
    double shift = intercept;
    for (std::size_t c = 0; c < cols(); ++c) shift -= shifted_means_[c] * theta[c];
    // A sample at level L contributes theta_1 + ... + theta_L. Samples at the
    // block's major level get that value through the common shift.
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < p(); ++j) {
        const std::size_t o = offsets_[j];
        double major_value = 0.0;
        bool any = false;
        for (std::size_t k = 0; k < levels_.block_sizes[j]; ++k) {
            any |= theta[o + k] != 0.0;
            if (k < major_[j]) major_value += theta[o + k];
        }
        if (!any) continue;
        shift += major_value;
        active.push_back(j);
    }
    std::fill(out.begin(), out.end(), shift);
    const std::size_t nn = n();
    for (std::size_t j : active) {
        const std::size_t o = offsets_[j];
        const std::size_t kj = levels_.block_sizes[j];
        const std::uint32_t* seg = segments_.data() + seg_offsets_[j];
        const std::uint32_t* ord = order_.data() + j * nn;
        double cum = 0.0;
        double major_value = 0.0;
        for (std::size_t k = 0; k < major_[j]; ++k) major_value += theta[o + k];
        for (std::size_t level = 0; level <= kj; ++level) {
            if (level > 0) cum += theta[o + level - 1];
            if (level == major_[j]) continue;
            const double d = cum - major_value;
            if (d == 0.0) continue;
            for (std::uint32_t pos = seg[level]; pos < seg[level + 1]; ++pos) out[ord[pos]] += d;
        }
    }
}

void TransformedDesign::transpose_block(std::size_t j, std::span<const double> r, double total,
                                        std::vector<double>& level_sum, std::span<double> out) const {
    const std::size_t o = offsets_[j];
    const std::size_t kj = levels_.block_sizes[j];
    if (kj == 0) return;
    const std::uint32_t* seg = segments_.data() + seg_offsets_[j];
    const std::uint32_t* ord = order_.data() + j * n();
    level_sum.assign(kj + 1, 0.0);
    double others = 0.0;
    for (std::size_t level = 0; level <= kj; ++level) {
        if (level == major_[j]) continue;
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        std::uint32_t pos = seg[level];
        const std::uint32_t end = seg[level + 1];
        for (; pos + 4 <= end; pos += 4) {
            for (std::uint32_t u = 0; u < 4; ++u) acc[u] += r[ord[pos + u]];
        }
        for (; pos < end; ++pos) acc[0] += r[ord[pos]];
        level_sum[level] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        others += level_sum[level];
    }
    level_sum[major_[j]] = total - others;
    double acc = 0.0;
    for (std::size_t k = kj; k >= 1; --k) {
        acc += level_sum[k];
        out[o + k - 1] = acc - shifted_means_[o + k - 1] * total;
    }
}

void TransformedDesign::transpose_multiply(std::span<const double> r, std::span<double> out) const {
    if (r.size() != n() || out.size() != cols()) {
        throw ValidationError("transformed design: transpose_multiply shape mismatch");
    }
    double total = 0.0;
    for (double v : r) total += v;
    std::vector<double> level_sum;
    for (std::size_t j = 0; j < p(); ++j) transpose_block(j, r, total, level_sum, out);
}

void TransformedDesign::transpose_multiply_blocks(std::span<const double> r, std::span<const std::size_t> blocks,
                                                  std::span<double> out) const {
    if (r.size() != n() || out.size() != cols()) {
        throw ValidationError("transformed design: transpose_multiply shape mismatch");
    }
    double total = 0.0;
    for (double v : r) total += v;
    std::vector<double> level_sum;
    for (std::size_t j : blocks) {
        if (j >= p()) throw ValidationError("transformed design: block index out of range");
        transpose_block(j, r, total, level_sum, out);
    }
}

}  // namespace filterlr
