#pragma once

// Supervised discretization of continuous covariates.
//
// A single covariate is cut by CART-style impurity-reduction search. Bagging
// repeats the search on bootstrap resamples and the resulting multiset of
// intermediate cuts is aggregated either by its mean (one cut per covariate)
// or by one-dimensional k-means (K cuts per covariate).

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "filterlr/dataset.hpp"

namespace filterlr {

enum class SplitCriterion { Gini, Entropy };

SplitCriterion parse_criterion(const std::string& name);
std::string to_string(SplitCriterion c);

/// Node impurity of a region whose positive fraction is `p_hat`:
/// Gini 2p(1-p), entropy -p log p - (1-p) log(1-p) with 0 log 0 = 0.
/// Throws ValidationError outside [0, 1].
double impurity(double p_hat, SplitCriterion criterion);

/// Impurity decrease of splitting a region with (n_left, pos_left) samples
/// left of the cut and (n_right, pos_right) right of it:
///   phi(T) - (n_L/n_T) phi(T_L) - (n_R/n_T) phi(T_R).
double split_gain(double n_left, double pos_left, double n_right, double pos_right,
                  SplitCriterion criterion);

/// Gains at or below this value are treated as "no split".
inline constexpr double kMinSplitGain = 1e-12;

/// Half-open interval [lo, hi) restricting which samples take part in a split.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return lo <= x && x < hi; }
};

struct Split {
    double cut = 0.0;   ///< samples with x >= cut go right
    double gain = 0.0;  ///< impurity decrease within the region
};

/// Best impurity-reducing cut of `x` restricted to `region`. Candidates are
/// midpoints between adjacent distinct sorted values; ties in gain go to the
/// smaller cut. Returns nullopt when the region has fewer than two distinct
/// values or no candidate improves impurity by more than kMinSplitGain.
std::optional<Split> best_split(std::span<const double> x, std::span<const Label> y,
                                Interval region = {},
                                SplitCriterion criterion = SplitCriterion::Gini);

/// Greedy best-first partitioning of one covariate: repeatedly split the
/// region whose best split removes the most impurity from the whole sample
/// (regional gain weighted by the region's share of samples) until
/// `k_splits` cuts exist or no region has a positive gain. Cuts are returned
/// in ascending order; fewer than `k_splits` may come back.
std::vector<double> marginal_thresholds(std::span<const double> x, std::span<const Label> y,
                                        int k_splits,
                                        SplitCriterion criterion = SplitCriterion::Gini);

/// Sorted, weighted view of one covariate used by the bagged search. Equal
/// x-values are merged; each entry carries its sample count and number of
/// positives.
struct WeightedColumn {
    std::vector<double> x;
    std::vector<double> count;
    std::vector<double> positives;
};

/// marginal_thresholds on an already sorted, weighted column.
std::vector<double> marginal_thresholds_weighted(const WeightedColumn& col, int k_splits,
                                                 SplitCriterion criterion);

/// Per-covariate ordered cut points t_1 < ... < t_K. The outer sentinels
/// (infimum and supremum of the covariate range) are implicit.
struct ThresholdSet {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cuts;

    std::size_t p() const { return cuts.size(); }
    std::size_t total_levels() const;  ///< K = sum_j K_j
    std::size_t max_levels() const;    ///< K_0 = max_j K_j

    /// Throws ValidationError unless names/cuts agree and every covariate's
    /// cuts are finite and strictly increasing.
    void validate() const;

    friend bool operator==(const ThresholdSet&, const ThresholdSet&) = default;
};

enum class Resampling {
    Bootstrap,  ///< n draws with replacement per bag
    Identity,   ///< every bag sees the original sample (testing aid)
};

struct BaggingConfig {
    int n_bags = 100;
    std::uint64_t rng_seed = 0;
    /// Splits harvested per covariate per bag.
    int max_depth_per_bag = 1;
    Resampling resampling = Resampling::Bootstrap;
    unsigned threads = 1;

    void validate() const;
};

/// Intermediate cuts for every covariate, concatenated over bags in bag order.
struct IntermediateCuts {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cuts;
};

/// Bootstrap row indices used by bag `bag` (seeded by rng_seed XOR bag).
std::vector<std::size_t> bag_indices(std::size_t n, std::uint64_t rng_seed, int bag);

/// Runs marginal_thresholds with cfg.max_depth_per_bag splits on every
/// covariate of every bag.
IntermediateCuts bagged_thresholds(const Dataset& data, const BaggingConfig& cfg,
                                   SplitCriterion criterion = SplitCriterion::Gini);

struct Aggregation {
    enum class Mode { Mean, KMeans };
    Mode mode = Mode::Mean;
    int k = 1;                       ///< clusters for KMeans
    std::uint64_t rng_seed = 0x5eed;  ///< k-means++ seeding

    static Aggregation mean() { return {}; }
    static Aggregation kmeans(int k, std::uint64_t seed = 0x5eed) {
        return {Mode::KMeans, k, seed};
    }
};

/// Note for a covariate whose aggregation deviated from the request.
struct AggregationNote {
    std::size_t covariate = 0;
    int requested = 0;
    int used = 0;
    std::string reason;
};

struct AggregatedThresholds {
    ThresholdSet thresholds;
    std::vector<AggregationNote> notes;
};

/// Mean: one cut per covariate. KMeans(K): the sorted, de-duplicated cluster
/// centres; a covariate with fewer than K distinct cuts falls back to
/// min(K, #distinct) clusters and is listed in `notes`. Covariates without
/// any intermediate cut end up with no cuts.
AggregatedThresholds aggregate_thresholds(const IntermediateCuts& intermediate, const Aggregation& mode);

/// Result of one-dimensional k-means.
struct KMeansResult {
    std::vector<double> centers;  ///< ascending
    double inertia = 0.0;
    int iterations = 0;
};

struct KMeansConfig {
    int restarts = 50;
    int max_iters = 100;
    double tol = 1e-10;
};

/// Lloyd's algorithm on scalar data with k-means++ seeding; best of
/// cfg.restarts runs by inertia. Requires at least k distinct values.
KMeansResult kmeans_1d(std::span<const double> values, int k, std::uint64_t seed,
                       const KMeansConfig& cfg = {});

}  // namespace filterlr
