#include "filterlr/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "filterlr/error.hpp"
#include "filterlr/parallel.hpp"
#include "filterlr/rng.hpp"

namespace filterlr {

SplitCriterion parse_criterion(const std::string& name) {
    if (name == "gini") return SplitCriterion::Gini;
    if (name == "entropy") return SplitCriterion::Entropy;
    throw ValidationError("unknown split criterion '" + name + "' (expected gini or entropy)");
}

std::string to_string(SplitCriterion c) { return c == SplitCriterion::Gini ? "gini" : "entropy"; }

namespace {

double phi(double p, SplitCriterion criterion) {
    if (criterion == SplitCriterion::Gini) return 2.0 * p * (1.0 - p);
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

/// Midpoint strictly above `a` and not above `b` (requires a < b).
double cut_between(double a, double b) {
    const double mid = a + 0.5 * (b - a);
    return mid > a ? mid : b;
}

struct ScanResult {
    std::size_t split_at = 0;  // first entry of the right child
    double cut = 0.0;
    double gain = 0.0;
};

/// Best split of entries [begin, end) of a sorted weighted column.
std::optional<ScanResult> scan_region(const WeightedColumn& col, std::size_t begin, std::size_t end,
                                      SplitCriterion criterion) {
    if (end - begin < 2) return std::nullopt;
    double n_total = 0.0;
    double pos_total = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        n_total += col.count[i];
        pos_total += col.positives[i];
    }
    double n_left = 0.0;
    double pos_left = 0.0;
    std::optional<ScanResult> best;
    for (std::size_t i = begin + 1; i < end; ++i) {
        n_left += col.count[i - 1];
        pos_left += col.positives[i - 1];
        const double gain =
            split_gain(n_left, pos_left, n_total - n_left, pos_total - pos_left, criterion);
        if (!best || gain > best->gain) {
            best = ScanResult{i, cut_between(col.x[i - 1], col.x[i]), gain};
        }
    }
    if (!best || !(best->gain > kMinSplitGain)) return std::nullopt;
    return best;
}

WeightedColumn weigh_sorted(std::vector<std::pair<double, Label>>& samples) {
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    WeightedColumn col;
    for (const auto& [x, y] : samples) {
        const double pos = y > 0 ? 1.0 : 0.0;
        if (!col.x.empty() && col.x.back() == x) {
            col.count.back() += 1.0;
            col.positives.back() += pos;
        } else {
            col.x.push_back(x);
            col.count.push_back(1.0);
            col.positives.push_back(pos);
        }
    }
    return col;
}

void check_xy(std::span<const double> x, std::span<const Label> y) {
    if (x.size() != y.size()) {
        throw ValidationError("split search: x has " + std::to_string(x.size()) + " values but y has " +
                              std::to_string(y.size()));
    }
}

}  // namespace

double impurity(double p_hat, SplitCriterion criterion) {
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
        throw ValidationError("impurity: probability must lie in [0, 1]");
    }
    return phi(p_hat, criterion);
}

double split_gain(double n_left, double pos_left, double n_right, double pos_right,
                  SplitCriterion criterion) {
    const double n_total = n_left + n_right;
    const double parent = phi((pos_left + pos_right) / n_total, criterion);
    const double left = phi(pos_left / n_left, criterion);
    const double right = phi(pos_right / n_right, criterion);
    return parent - (n_left / n_total * left + n_right / n_total * right);
}

std::optional<Split> best_split(std::span<const double> x, std::span<const Label> y, Interval region,
                                SplitCriterion criterion) {
    check_xy(x, y);
    std::vector<std::pair<double, Label>> samples;
    samples.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (region.contains(x[i])) samples.emplace_back(x[i], y[i]);
    }
    const WeightedColumn col = weigh_sorted(samples);
    const auto best = scan_region(col, 0, col.x.size(), criterion);
    if (!best) return std::nullopt;
    return Split{best->cut, best->gain};
}

std::vector<double> marginal_thresholds_weighted(const WeightedColumn& col, int k_splits,
                                                 SplitCriterion criterion) {
    if (k_splits < 1) throw ValidationError("marginal_thresholds: k_splits must be >= 1");
    struct Region {
        std::size_t begin, end;
        double weight;
        std::optional<ScanResult> split;
    };
    const double n_all = std::accumulate(col.count.begin(), col.count.end(), 0.0);
    auto make_region = [&](std::size_t b, std::size_t e) {
        double w = 0.0;
        for (std::size_t i = b; i < e; ++i) w += col.count[i];
        return Region{b, e, w / n_all, scan_region(col, b, e, criterion)};
    };

    std::vector<Region> regions;
    regions.push_back(make_region(0, col.x.size()));
    std::vector<double> cuts;
    while (static_cast<int>(cuts.size()) < k_splits) {
        std::size_t pick = regions.size();
        double best = 0.0;
        for (std::size_t r = 0; r < regions.size(); ++r) {
            if (!regions[r].split) continue;
            const double g = regions[r].weight * regions[r].split->gain;
            if (pick == regions.size() || g > best ||
                (g == best && regions[r].split->cut < regions[pick].split->cut)) {
                pick = r;
                best = g;
            }
        }
        if (pick == regions.size()) break;
        const Region chosen = regions[pick];
        cuts.push_back(chosen.split->cut);
        regions[pick] = make_region(chosen.begin, chosen.split->split_at);
        regions.push_back(make_region(chosen.split->split_at, chosen.end));
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

std::vector<double> marginal_thresholds(std::span<const double> x, std::span<const Label> y,
                                        int k_splits, SplitCriterion criterion) {
    check_xy(x, y);
    std::vector<std::pair<double, Label>> samples;
    samples.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) samples.emplace_back(x[i], y[i]);
    return marginal_thresholds_weighted(weigh_sorted(samples), k_splits, criterion);
}

std::size_t ThresholdSet::total_levels() const {
    std::size_t k = 0;
    for (const auto& c : cuts) k += c.size();
    return k;
}

std::size_t ThresholdSet::max_levels() const {
    std::size_t k = 0;
    for (const auto& c : cuts) k = std::max(k, c.size());
    return k;
}

void ThresholdSet::validate() const {
    if (names.size() != cuts.size()) {
        throw ValidationError("thresholds: " + std::to_string(names.size()) + " names for " +
                              std::to_string(cuts.size()) + " covariates");
    }
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        for (std::size_t k = 0; k < cuts[j].size(); ++k) {
            if (!std::isfinite(cuts[j][k])) {
                throw ValidationError("thresholds: non-finite cut for covariate '" + names[j] + "'");
            }
            if (k > 0 && !(cuts[j][k - 1] < cuts[j][k])) {
                throw ValidationError("thresholds: cuts for covariate '" + names[j] +
                                      "' are not strictly increasing");
            }
        }
        if (cuts[j].size() > 255) {
            throw ValidationError("thresholds: covariate '" + names[j] + "' has more than 255 cuts");
        }
    }
}

void BaggingConfig::validate() const {
    if (n_bags < 1) throw ValidationError("bagging: n_bags must be >= 1");
    if (max_depth_per_bag < 1) throw ValidationError("bagging: max_depth_per_bag must be >= 1");
}

std::vector<std::size_t> bag_indices(std::size_t n, std::uint64_t rng_seed, int bag) {
    Rng rng(rng_seed ^ static_cast<std::uint64_t>(bag));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    return idx;
}

IntermediateCuts bagged_thresholds(const Dataset& data, const BaggingConfig& cfg,
                                   SplitCriterion criterion) {
    cfg.validate();
    const std::size_t n = data.n();
    const std::size_t p = data.p();

    // Sorting each covariate once lets every bag build its sorted sample by
    // walking the order and repeating each row by its bootstrap multiplicity.
    std::vector<std::vector<std::uint32_t>> order(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = data.column(j);
        order[j].resize(n);
        std::iota(order[j].begin(), order[j].end(), 0u);
        std::stable_sort(order[j].begin(), order[j].end(),
                         [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }

    const auto n_bags = static_cast<std::size_t>(cfg.n_bags);
    std::vector<std::vector<std::vector<double>>> per_bag(n_bags);
    const auto labels = data.labels();
    parallel_for(n_bags, cfg.threads, [&](std::size_t b) {
        std::vector<double> multiplicity(n, 1.0);
        if (cfg.resampling == Resampling::Bootstrap) {
            std::fill(multiplicity.begin(), multiplicity.end(), 0.0);
            for (std::size_t i : bag_indices(n, cfg.rng_seed, static_cast<int>(b))) multiplicity[i] += 1.0;
        }
        auto& out = per_bag[b];
        out.resize(p);
        WeightedColumn col;
        for (std::size_t j = 0; j < p; ++j) {
            const auto x = data.column(j);
            col.x.clear();
            col.count.clear();
            col.positives.clear();
            for (std::uint32_t i : order[j]) {
                const double m = multiplicity[i];
                if (m == 0.0) continue;
                const double pos = labels[i] > 0 ? m : 0.0;
                if (!col.x.empty() && col.x.back() == x[i]) {
                    col.count.back() += m;
                    col.positives.back() += pos;
                } else {
                    col.x.push_back(x[i]);
                    col.count.push_back(m);
                    col.positives.push_back(pos);
                }
            }
            out[j] = marginal_thresholds_weighted(col, cfg.max_depth_per_bag, criterion);
        }
    });

    IntermediateCuts result;
    result.names = data.feature_names();
    result.cuts.resize(p);
    for (std::size_t b = 0; b < n_bags; ++b) {
        for (std::size_t j = 0; j < p; ++j) {
            result.cuts[j].insert(result.cuts[j].end(), per_bag[b][j].begin(), per_bag[b][j].end());
        }
    }
    return result;
}

AggregatedThresholds aggregate_thresholds(const IntermediateCuts& intermediate, const Aggregation& mode) {
    if (intermediate.names.size() != intermediate.cuts.size()) {
        throw ValidationError("aggregate_thresholds: names and cuts disagree in length");
    }
    if (mode.mode == Aggregation::Mode::KMeans && mode.k < 1) {
        throw ValidationError("aggregate_thresholds: K must be >= 1");
    }
    AggregatedThresholds out;
    out.thresholds.names = intermediate.names;
    out.thresholds.cuts.resize(intermediate.cuts.size());
    for (std::size_t j = 0; j < intermediate.cuts.size(); ++j) {
        const auto& cuts = intermediate.cuts[j];
        auto& dst = out.thresholds.cuts[j];
        if (cuts.empty()) {
            out.notes.push_back({j, mode.mode == Aggregation::Mode::Mean ? 1 : mode.k, 0,
                                 "no intermediate cuts"});
            continue;
        }
        if (mode.mode == Aggregation::Mode::Mean) {
            double s = 0.0;
            for (double c : cuts) s += c;
            dst.push_back(s / static_cast<double>(cuts.size()));
            continue;
        }
        std::vector<double> distinct = cuts;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::vector<double> centers;
        if (static_cast<int>(distinct.size()) <= mode.k) {
            centers = distinct;
            if (static_cast<int>(distinct.size()) < mode.k) {
                out.notes.push_back({j, mode.k, static_cast<int>(distinct.size()),
                                     "fewer distinct intermediate cuts than clusters"});
            }
        } else {
            centers = kmeans_1d(cuts, mode.k, derive_seed(mode.rng_seed, j)).centers;
        }
        std::sort(centers.begin(), centers.end());
        for (double c : centers) {
            if (dst.empty() || std::abs(c - dst.back()) > 1e-12 * std::max(1.0, std::abs(c))) {
                dst.push_back(c);
            }
        }
        if (static_cast<int>(dst.size()) < static_cast<int>(centers.size())) {
            out.notes.push_back({j, mode.k, static_cast<int>(dst.size()), "coinciding centres merged"});
        }
    }
    return out;
}

}  // namespace filterlr
