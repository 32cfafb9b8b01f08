#pragma once

// Thresholded design and the difference transform.
//
// For covariate j with cuts t_1 < ... < t_K, a sample's level is the number
// of cuts at or below its value (closed-left intervals, t_k <= x < t_{k+1}).
// The indicator block has K columns, one per non-base level; level 0 is
// encoded as the all-zero row. The design is stored as the level index of
// every (sample, covariate) pair rather than as a dense 0/1 matrix.
//
// With theta = T B (adjacent differences within each block) and
// Z~ = Z D (D = T^{-1}, block cumulative sums), <B, z> = <theta, z~> for
// every row, so the fusion penalty ||T B||_1 becomes a plain l1 penalty on
// theta. Column k of Z~_j is 1{level >= k}.

#include <cstdint>
#include <span>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

/// Level index of every sample for every covariate, column-major.
struct LevelMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> block_sizes;  ///< K_j
    std::vector<std::uint8_t> levels;      ///< levels[j * n + i] in [0, K_j]

    std::size_t p() const { return block_sizes.size(); }
    std::uint8_t level(std::size_t i, std::size_t j) const { return levels[j * n + i]; }
};

/// Level of `x` among ascending `cuts`.
std::uint8_t level_of(std::span<const double> cuts, double x);

LevelMatrix encode_levels(const Dataset& data, const ThresholdSet& thresholds);

class ThresholdedDesign {
public:
    ThresholdedDesign() = default;
    explicit ThresholdedDesign(LevelMatrix levels);

    std::size_t n() const { return levels_.n; }
    std::size_t p() const { return levels_.p(); }
    std::size_t cols() const { return offsets_.back(); }
    const std::vector<std::size_t>& block_sizes() const { return levels_.block_sizes; }
    /// offsets()[j] is the first column of block j; offsets().back() == cols().
    const std::vector<std::size_t>& offsets() const { return offsets_; }
    const LevelMatrix& levels() const { return levels_; }

    bool centered() const { return centered_; }
    /// Empirical column means of the uncentered indicators (empty unless centered).
    const std::vector<double>& column_means() const { return means_; }

    /// Entry (i, col), centered when the design is.
    double value(std::size_t i, std::size_t col) const;
    /// Row-major n x cols() copy.
    std::vector<double> dense() const;

    /// Attaches externally computed means (e.g. from a training fold).
    ThresholdedDesign centered_with(std::vector<double> means) const;

private:
    LevelMatrix levels_;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> col_block_;
    std::vector<std::size_t> col_level_;
    bool centered_ = false;
    std::vector<double> means_;
};

/// Indicator design of `data` under `thresholds`. Names must match.
ThresholdedDesign encode(const Dataset& data, const ThresholdSet& thresholds);

/// Subtracts the empirical column means. Centering an already centered
/// design returns it unchanged.
ThresholdedDesign center(const ThresholdedDesign& design);

/// Block-diagonal difference matrix T and its inverse D.
class DifferenceTransform {
public:
    DifferenceTransform() = default;
    explicit DifferenceTransform(std::vector<std::size_t> block_sizes);
    static DifferenceTransform for_design(const ThresholdedDesign& design) {
        return DifferenceTransform(design.block_sizes());
    }

    const std::vector<std::size_t>& block_sizes() const { return blocks_; }
    std::size_t size() const { return total_; }

    /// theta_{k,j} = beta_{k,j} - beta_{k-1,j} with beta_{0,j} = 0.
    std::vector<double> to_theta(std::span<const double> beta) const;
    /// beta_{k,j} = sum_{l<=k} theta_{l,j}.
    std::vector<double> from_theta(std::span<const double> theta) const;

    /// Dense row-major T and D (size() x size()).
    std::vector<double> dense_t() const;
    std::vector<double> dense_d() const;

private:
    void check(std::span<const double> v) const;
    std::vector<std::size_t> blocks_;
    std::size_t total_ = 0;
};

/// Z~ = Z D for a (possibly centered) thresholded design. Products are
/// evaluated from the level indices in O(n p) regardless of the number of
/// columns.
class TransformedDesign {
public:
    TransformedDesign() = default;

    std::size_t n() const { return levels_.n; }
    std::size_t p() const { return levels_.p(); }
    std::size_t cols() const { return offsets_.back(); }
    const std::vector<std::size_t>& block_sizes() const { return levels_.block_sizes; }
    const std::vector<std::size_t>& offsets() const { return offsets_; }
    bool centered() const { return centered_; }
    /// Column means of Z~ (zero when uncentered).
    const std::vector<double>& shifted_means() const { return shifted_means_; }

    double value(std::size_t i, std::size_t col) const;
    std::vector<double> dense() const;

    /// out_i = intercept + <theta, z~_i>.
    void multiply(std::span<const double> theta, double intercept, std::span<double> out) const;
    /// out = Z~^T r.
    void transpose_multiply(std::span<const double> r, std::span<double> out) const;
    /// Z~^T r restricted to the columns of the listed blocks; other entries
    /// of `out` are left untouched.
    void transpose_multiply_blocks(std::span<const double> r, std::span<const std::size_t> blocks,
                                   std::span<double> out) const;

    friend TransformedDesign transform_design(const ThresholdedDesign&, const DifferenceTransform&);

private:
    LevelMatrix levels_;
    std::vector<std::size_t> offsets_{0};
    bool centered_ = false;
    std::vector<double> shifted_means_;
    // Samples of each block grouped by level (counting sort). Products touch
    // only samples outside the most populated level, whose contribution is
    // recovered from totals.
    std::vector<std::uint32_t> order_;       ///< order_[j * n + pos]
    std::vector<std::size_t> seg_offsets_;   ///< first entry of block j in segments_
    std::vector<std::uint32_t> segments_;    ///< K_j + 2 level boundaries per block
    std::vector<std::uint8_t> major_;        ///< most populated level per block

    void transpose_block(std::size_t j, std::span<const double> r, double total, std::vector<double>& level_sum,
                         std::span<double> out) const;
};

TransformedDesign transform_design(const ThresholdedDesign& design, const DifferenceTransform& t);

}  // namespace filterlr
