#pragma once

// Random instances and independent reference computations shared by the
// unit and acceptance tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/encoding.hpp"
#include "filterlr/fused_logistic.hpp"
#include "filterlr/rng.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr::testing {

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

/// Random labels with both classes present.
inline std::vector<Label> random_labels(Rng& rng, std::size_t n, double p_pos = 0.5) {
    std::vector<Label> y(n);
    for (auto& v : y) v = rng.bernoulli(p_pos) ? 1 : -1;
    if (n >= 2) {
        y[0] = 1;
        y[1] = -1;
    }
    return y;
}

/// Levels drawn uniformly in [0, K_j] with K_j in [1, max_k].
inline LevelMatrix random_levels(Rng& rng, std::size_t n, std::size_t p, std::size_t max_k) {
    LevelMatrix m;
    m.n = n;
    for (std::size_t j = 0; j < p; ++j) m.block_sizes.push_back(uniform_int(rng, 1, max_k));
    m.levels.resize(n * p);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            m.levels[j * n + i] = static_cast<std::uint8_t>(rng.below(m.block_sizes[j] + 1));
        }
    }
    return m;
}

/// A small fitting problem: centered design, transform and labels drawn
/// from a logistic model with moderate signal.
struct Problem {
    ThresholdedDesign design;
    DifferenceTransform transform;
    TransformedDesign z;
    std::vector<Label> y;
};

inline Problem random_problem(Rng& rng, std::size_t n, std::size_t p, std::size_t max_k, double signal = 0.7) {
    Problem pr;
    pr.design = center(ThresholdedDesign(random_levels(rng, n, p, max_k)));
    pr.transform = DifferenceTransform::for_design(pr.design);
    pr.z = transform_design(pr.design, pr.transform);
    std::vector<double> beta(pr.design.cols());
    for (auto& b : beta) b = signal * rng.normal();
    pr.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (std::size_t c = 0; c < beta.size(); ++c) f += beta[c] * pr.design.value(i, c);
        pr.y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-2.0 * f))) ? 1 : -1;
    }
    pr.y[0] = 1;
    pr.y[1] = -1;
    return pr;
}

/// KKT violation of (intercept, theta) computed from the dense design.
inline double reference_kkt(const Problem& pr, const SolverResult& r, double lambda) {
    const std::size_t n = pr.y.size();
    const std::size_t m = pr.z.cols();
    const auto zd = pr.z.dense();
    std::vector<double> resid(n);
    double g0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = r.intercept;
        for (std::size_t c = 0; c < m; ++c) f += zd[i * m + c] * r.theta[c];
        resid[i] = -2.0 * pr.y[i] / (1.0 + std::exp(2.0 * pr.y[i] * f)) / static_cast<double>(n);
        g0 += resid[i];
    }
    double worst = std::abs(g0);
    for (std::size_t c = 0; c < m; ++c) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += zd[i * m + c] * resid[i];
        const double v = r.theta[c] != 0.0 ? std::abs(g + lambda * (r.theta[c] > 0 ? 1.0 : -1.0))
                                           : std::max(0.0, std::abs(g) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

/// Dense row-major matrix as Eigen.
inline Eigen::MatrixXd to_eigen(const std::vector<double>& dense, std::size_t rows, std::size_t cols) {
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = dense[i * cols + c];
    }
    return m;
}

/// Mean of log(1 + exp(-2 y f)) evaluated without the library.
inline double reference_loss(const Eigen::VectorXd& f, const std::vector<Label>& y) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double m = -2.0 * y[i] * f[i];
        s += m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    return s / static_cast<double>(f.size());
}

/// Unpenalized maximum likelihood with intercept by damped Newton on the
/// dense design. Returns (intercept, coefficients) or nullopt if the
/// iteration does not settle.
inline std::optional<Eigen::VectorXd> newton_logistic(const Eigen::MatrixXd& x, const std::vector<Label>& y) {
    const auto n = x.rows();
    Eigen::MatrixXd a(n, x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(a.cols());
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[i];
    for (int it = 0; it < 100; ++it) {
        const Eigen::VectorXd f = a * w;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(a.cols());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(a.cols(), a.cols());
        Eigen::VectorXd r(n), d(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = 1.0 / (1.0 + std::exp(2.0 * yv[i] * f[i]));  // sigma(-2 y f)
            r[i] = -2.0 * yv[i] * s;
            d[i] = 4.0 * s * (1.0 - s);
        }
        g = a.transpose() * r / static_cast<double>(n);
        h = a.transpose() * d.asDiagonal() * a / static_cast<double>(n);
        const Eigen::VectorXd step = h.ldlt().solve(g);
        double t = 1.0;
        const double f0 = reference_loss(f, y);
        while (t > 1e-10 && reference_loss(a * (w - t * step), y) > f0 + 1e-16) t *= 0.5;
        w -= t * step;
        if (g.lpNorm<Eigen::Infinity>() < 1e-14) return w;
    }
    const Eigen::VectorXd f = a * w;
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = -2.0 * yv[i] / (1.0 + std::exp(2.0 * yv[i] * f[i]));
    if ((a.transpose() * r / static_cast<double>(n)).lpNorm<Eigen::Infinity>() < 1e-11) return w;
    return std::nullopt;
}

/// Exhaustive Gini split search in exact integer arithmetic.
///
/// For a candidate with (nL, pL) left and (nR, pR) right the weighted child
/// impurity is proportional to S = (pL (nL - pL) nR + pR (nR - pR) nL) / (nL nR),
/// so candidates are compared by cross multiplication. The smallest S wins,
/// ties go to the smaller cut, and a candidate only counts if it strictly
/// improves on the parent.
struct OracleSplit {
    double cut = 0.0;
    double gain = 0.0;
    int optimal_candidates = 1;  ///< candidates attaining the best value
};

inline std::optional<OracleSplit> oracle_gini_split(const std::vector<double>& x, const std::vector<Label>& y,
                                                    Interval region = {}) {
    std::vector<std::pair<double, int>> s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (region.contains(x[i])) s.emplace_back(x[i], y[i] > 0 ? 1 : 0);
    }
    std::sort(s.begin(), s.end());
    std::vector<double> distinct;
    for (const auto& e : s) {
        if (distinct.empty() || distinct.back() != e.first) distinct.push_back(e.first);
    }
    if (distinct.size() < 2) return std::nullopt;
    const std::int64_t n = static_cast<std::int64_t>(s.size());
    std::int64_t pos = 0;
    for (const auto& e : s) pos += e.second;

    std::optional<OracleSplit> best;
    std::int64_t best_num = 0;
    std::int64_t best_den = 1;
    for (std::size_t c = 1; c < distinct.size(); ++c) {
        std::int64_t nl = 0;
        std::int64_t pl = 0;
        for (const auto& e : s) {
            if (e.first < distinct[c]) {
                ++nl;
                pl += e.second;
            }
        }
        const std::int64_t nr = n - nl;
        const std::int64_t pr = pos - pl;
        const std::int64_t num = pl * (nl - pl) * nr + pr * (nr - pr) * nl;
        const std::int64_t den = nl * nr;
        // Parent: pos (n - pos) / n; strict improvement num/den < parent.
        if (!(num * n < pos * (n - pos) * den)) continue;
        if (best && num * best_den == best_num * den) ++best->optimal_candidates;
        if (best && !(num * best_den < best_num * den)) continue;
        const double a = distinct[c - 1];
        const double b = distinct[c];
        const double mid = a + 0.5 * (b - a);
        const double nd = static_cast<double>(n);
        const double gain = 2.0 * (static_cast<double>(pos * (n - pos)) / nd -
                                   static_cast<double>(num) / static_cast<double>(den)) /
                            nd;
        best = OracleSplit{mid > a ? mid : b, gain};
        best_num = num;
        best_den = den;
    }
    return best;
}

/// Covariate values with many ties: integers from a small range, or
/// continuous draws, or a mix.
inline std::vector<double> random_covariate(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    const auto kind = rng.below(3);
    const auto range = uniform_int(rng, 2, 12);
    for (auto& v : x) {
        if (kind == 0) {
            v = static_cast<double>(rng.below(range));
        } else if (kind == 1) {
            v = rng.normal();
        } else {
            v = rng.bernoulli(0.5) ? static_cast<double>(rng.below(range)) : 0.25 * std::round(4.0 * rng.normal());
        }
    }
    return x;
}

}  // namespace filterlr::testing
