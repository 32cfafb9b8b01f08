#include "filterlr/cart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "filterlr/error.hpp"

namespace filterlr {

namespace {

using Rows = std::vector<std::uint32_t>;

class Builder {
public:
    Builder(const Dataset& data, const CartConfig& cfg, std::span<const double> w,
            std::vector<CartTree::Node>& nodes)
        : data_(data), cfg_(cfg), w_(w), nodes_(nodes), goes_right_(data.n(), 0) {}

    int grow(std::vector<Rows>& sorted, const Rows& members, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        double n = 0.0;
        double pos = 0.0;
        for (auto i : members) {
            n += w_[i];
            if (data_.labels()[i] > 0) pos += w_[i];
        }
        nodes_[id].n = n;
        nodes_[id].positives = pos;
        if (depth >= cfg_.max_depth || n < cfg_.min_split || pos == 0.0 || pos == n) return id;

        int best_f = -1;
        double best_cut = 0.0;
        double best_gain = kMinSplitGain;
        const auto labels = data_.labels();
        for (std::size_t f = 0; f < sorted.size(); ++f) {
            const auto x = data_.column(f);
            const Rows& rows = sorted[f];
            double nl = 0.0;
            double pl = 0.0;
            for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
                const auto i = rows[r];
                nl += w_[i];
                if (labels[i] > 0) pl += w_[i];
                const double a = x[i];
                const double b = x[rows[r + 1]];
                if (a == b || nl < cfg_.min_bucket || n - nl < cfg_.min_bucket) continue;
                const double gain = split_gain(nl, pl, n - nl, pos - pl, cfg_.criterion);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_f = static_cast<int>(f);
                    const double mid = a + (b - a) / 2.0;
                    best_cut = mid > a ? mid : b;
                }
            }
        }
        if (best_f < 0) return id;

        const auto xs = data_.column(best_f);
        for (auto i : members) goes_right_[i] = xs[i] >= best_cut;
        std::vector<Rows> left_sorted(sorted.size());
        std::vector<Rows> right_sorted(sorted.size());
        for (std::size_t f = 0; f < sorted.size(); ++f) {
            for (auto i : sorted[f]) (goes_right_[i] ? right_sorted : left_sorted)[f].push_back(i);
            Rows().swap(sorted[f]);
        }
        Rows left_members;
        Rows right_members;
        for (auto i : members) (goes_right_[i] ? right_members : left_members).push_back(i);

        const int l = grow(left_sorted, left_members, depth + 1);
        const int r = grow(right_sorted, right_members, depth + 1);
        nodes_[id].feature = best_f;
        nodes_[id].cut = best_cut;
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

private:
    const Dataset& data_;
    const CartConfig& cfg_;
    std::span<const double> w_;
    std::vector<CartTree::Node>& nodes_;
    std::vector<char> goes_right_;
};

double node_risk(const CartTree::Node& n) { return std::min(n.positives, n.n - n.positives); }

/// Subtree risk and leaf count.
std::pair<double, int> subtree(const std::vector<CartTree::Node>& nodes, int id) {
    const auto& nd = nodes[id];
    if (nd.feature < 0) return {node_risk(nd), 1};
    const auto [rl, ll] = subtree(nodes, nd.left);
    const auto [rr, lr] = subtree(nodes, nd.right);
    return {rl + rr, ll + lr};
}

void prune(std::vector<CartTree::Node>& nodes, double cp) {
    const double root_risk = node_risk(nodes[0]);
    if (root_risk <= 0.0) {
        nodes[0].feature = -1;
        return;
    }
    for (;;) {
        int weakest = -1;
        double weakest_g = std::numeric_limits<double>::infinity();
        for (std::size_t id = 0; id < nodes.size(); ++id) {
            if (nodes[id].feature < 0) continue;
            const auto [r_sub, leaves] = subtree(nodes, static_cast<int>(id));
            const double g = (node_risk(nodes[id]) - r_sub) / root_risk / (leaves - 1);
            if (g < weakest_g) {
                weakest_g = g;
                weakest = static_cast<int>(id);
            }
        }
        if (weakest < 0 || weakest_g > cp) return;
        nodes[weakest].feature = -1;
    }
}

}  // namespace

void CartConfig::validate() const {
    if (min_split < 1 || min_bucket < 1) throw ValidationError("cart: min_split and min_bucket must be >= 1");
    if (!(cp >= 0.0)) throw ValidationError("cart: cp must be >= 0");
    if (max_depth < 0) throw ValidationError("cart: max_depth must be >= 0");
}

CartTree CartTree::fit(const Dataset& data, const CartConfig& cfg, std::span<const double> weights) {
    cfg.validate();
    if (data.n() == 0) throw ValidationError("cart: empty training set");
    std::vector<double> w(weights.begin(), weights.end());
    if (w.empty()) w.assign(data.n(), 1.0);
    if (w.size() != data.n()) throw ValidationError("cart: one weight per sample is required");

    Rows members;
    for (std::uint32_t i = 0; i < data.n(); ++i) {
        if (w[i] > 0.0) members.push_back(i);
    }
    std::vector<Rows> sorted(data.p(), members);
    for (std::size_t f = 0; f < data.p(); ++f) {
        const auto x = data.column(f);
        std::stable_sort(sorted[f].begin(), sorted[f].end(),
                         [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
    }
    CartTree tree;
    Builder(data, cfg, w, tree.nodes_).grow(sorted, members, 0);
    prune(tree.nodes_, cfg.cp);
    return tree;
}

std::vector<double> CartTree::predict_proba(const Dataset& data) const {
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        int id = 0;
        while (nodes_[id].feature >= 0) {
            id = data.at(i, nodes_[id].feature) >= nodes_[id].cut ? nodes_[id].right : nodes_[id].left;
        }
        out[i] = nodes_[id].n > 0.0 ? nodes_[id].positives / nodes_[id].n : 0.5;
    }
    return out;
}

std::size_t CartTree::leaves() const {
    return nodes_.empty() ? 0 : static_cast<std::size_t>(subtree(nodes_, 0).second);
}

std::vector<double> bagged_cart_proba(const Dataset& train, const Dataset& test, const BaggedCartConfig& cfg) {
    if (cfg.n_bags < 1) throw ValidationError("bagged cart: n_bags must be >= 1");
    if (train.feature_names() != test.feature_names()) {
        throw ValidationError("bagged cart: training and test covariates differ");
    }
    std::vector<double> mean(test.n(), 0.0);
    std::vector<double> w(train.n());
    for (int b = 0; b < cfg.n_bags; ++b) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i : bag_indices(train.n(), cfg.rng_seed, b)) w[i] += 1.0;
        const auto prob = CartTree::fit(train, cfg.tree, w).predict_proba(test);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += prob[i];
    }
    for (double& v : mean) v /= cfg.n_bags;
    return mean;
}

}  // namespace filterlr
