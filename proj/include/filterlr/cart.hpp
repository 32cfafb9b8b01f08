#pragma once

// Classification trees used as comparison baselines: a single pruned tree
// and a bootstrap-averaged ensemble of such trees.
//
// Splits maximize the Gini (or entropy) decrease subject to min_split and
// min_bucket. After growing, subtrees are pruned by weakest-link cost
// complexity on the misclassification risk scaled by the root risk until
// every remaining split improves it by more than cp.

#include <cstdint>
#include <span>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

struct CartConfig {
    int min_split = 20;
    int min_bucket = 7;
    double cp = 0.01;
    int max_depth = 30;
    SplitCriterion criterion = SplitCriterion::Gini;

    void validate() const;
};

class CartTree {
public:
    struct Node {
        int feature = -1;  ///< -1 for a leaf
        double cut = 0.0;  ///< x >= cut goes right
        int left = -1;
        int right = -1;
        double n = 0.0;
        double positives = 0.0;
    };

    /// Fits on the rows of `data` with the given multiplicities (empty means 1 each).
    static CartTree fit(const Dataset& data, const CartConfig& cfg, std::span<const double> weights = {});

    /// Positive-class frequency of the leaf reached by each sample.
    std::vector<double> predict_proba(const Dataset& data) const;

    std::size_t leaves() const;
    const std::vector<Node>& nodes() const { return nodes_; }

private:
    std::vector<Node> nodes_;
};

struct BaggedCartConfig {
    CartConfig tree;
    int n_bags = 100;
    std::uint64_t rng_seed = 0;
};

/// Mean of the per-bag tree probabilities for every sample of `test`.
std::vector<double> bagged_cart_proba(const Dataset& train, const Dataset& test, const BaggedCartConfig& cfg);

}  // namespace filterlr
