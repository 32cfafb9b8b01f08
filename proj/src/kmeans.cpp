#include <algorithm>
#include <cmath>
#include <limits>

#include "filterlr/error.hpp"
#include "filterlr/rng.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

namespace {

struct SortedData {
    std::vector<double> x;
    std::vector<double> s1;  // prefix sums, s1[i] = sum of x[0..i)
    std::vector<double> s2;  // prefix sums of squares

    explicit SortedData(std::span<const double> values) : x(values.begin(), values.end()) {
        std::sort(x.begin(), x.end());
        s1.assign(x.size() + 1, 0.0);
        s2.assign(x.size() + 1, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            s1[i + 1] = s1[i] + x[i];
            s2[i + 1] = s2[i] + x[i] * x[i];
        }
    }

    /// Sum of squared distances of x[b..e) to c.
    double cost(std::size_t b, std::size_t e, double c) const {
        const double m = static_cast<double>(e - b);
        const double v = (s2[e] - s2[b]) - 2.0 * c * (s1[e] - s1[b]) + c * c * m;
        return std::max(v, 0.0);
    }
};

/// Cluster boundaries for ascending centres: cluster k covers the index range
/// [ends[k-1], ends[k]). Points equidistant from two centres join the lower one.
std::vector<std::size_t> assign(const SortedData& d, const std::vector<double>& centers) {
    std::vector<std::size_t> ends(centers.size());
    for (std::size_t k = 0; k + 1 < centers.size(); ++k) {
        const double boundary = 0.5 * (centers[k] + centers[k + 1]);
        ends[k] = static_cast<std::size_t>(std::upper_bound(d.x.begin(), d.x.end(), boundary) - d.x.begin());
    }
    ends.back() = d.x.size();
    return ends;
}

std::vector<double> seed_plus_plus(const SortedData& d, int k, Rng& rng) {
    const std::size_t m = d.x.size();
    std::vector<double> centers;
    centers.push_back(d.x[rng.below(m)]);
    std::vector<double> dist2(m);
    for (std::size_t i = 0; i < m; ++i) dist2[i] = (d.x[i] - centers[0]) * (d.x[i] - centers[0]);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (double v : dist2) total += v;
        std::size_t pick = m - 1;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += dist2[i];
                if (acc > u) {
                    pick = i;
                    break;
                }
            }
            if (dist2[pick] == 0.0) {
                pick = static_cast<std::size_t>(std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
            }
        }
        const double c = d.x[pick];
        centers.push_back(c);
        for (std::size_t i = 0; i < m; ++i) dist2[i] = std::min(dist2[i], (d.x[i] - c) * (d.x[i] - c));
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

}  // namespace

KMeansResult kmeans_1d(std::span<const double> values, int k, std::uint64_t seed, const KMeansConfig& cfg) {
    if (k < 1) throw ValidationError("kmeans: k must be >= 1");
    const SortedData d(values);
    std::size_t distinct = d.x.empty() ? 0 : 1;
    for (std::size_t i = 1; i < d.x.size(); ++i) distinct += d.x[i] != d.x[i - 1];
    if (distinct < static_cast<std::size_t>(k)) {
        throw ValidationError("kmeans: need at least k distinct values");
    }

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        std::vector<double> centers = seed_plus_plus(d, k, rng);
        std::vector<std::size_t> ends;
        int it = 0;
        for (; it < cfg.max_iters; ++it) {
            ends = assign(d, centers);
            double moved = 0.0;
            std::size_t b = 0;
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const std::size_t e = ends[c];
                if (e > b) {
                    const double mean = (d.s1[e] - d.s1[b]) / static_cast<double>(e - b);
                    moved = std::max(moved, std::abs(mean - centers[c]));
                    centers[c] = mean;
                }
                b = e;
            }
            std::sort(centers.begin(), centers.end());
            if (moved < cfg.tol) {
                ++it;
                break;
            }
        }
        ends = assign(d, centers);
        double inertia = 0.0;
        std::size_t b = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            inertia += d.cost(b, ends[c], centers[c]);
            b = ends[c];
        }
        if (inertia < best.inertia) {
            best = KMeansResult{centers, inertia, it};
        }
    }
    return best;
}

}  // namespace filterlr
