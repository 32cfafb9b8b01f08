#include "filterlr/simulation.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "filterlr/error.hpp"

namespace filterlr {

Family parse_family(const std::string& name) {
    if (name == "single") return Family::SingleThreshold;
    if (name == "threshold") return Family::ThresholdI;
    if (name == "piecewise") return Family::PiecewiseII;
    throw ValidationError("unknown family '" + name + "' (expected single, threshold or piecewise)");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::SingleThreshold: return "single";
        case Family::ThresholdI: return "threshold";
        case Family::PiecewiseII: return "piecewise";
    }
    return "?";
}

void SimDesign::validate() const {
    if (n < 2) throw ValidationError("design: n must be >= 2");
    if (p0 > p) throw ValidationError("design: p0 must not exceed p");
    if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("design: rho must lie in [0, 1)");
    if (n_reps < 1) throw ValidationError("design: n_reps must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw ValidationError("design: train_fraction must lie in (0, 1]");
    }
    if (family != Family::SingleThreshold && level_coefs.size() != 4) {
        throw ValidationError("design: four level coefficients are required");
    }
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw ValidationError("normal_quantile: probability must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal(), prob);
}

std::vector<double> family_cuts(const SimDesign& design) {
    if (design.family == Family::SingleThreshold) return {design.single_cut};
    return {normal_quantile(2.0 / 6.0), normal_quantile(3.0 / 6.0), normal_quantile(4.0 / 6.0)};
}

double signal(const SimDesign& design, double x) {
    const auto& b = design.level_coefs;
    switch (design.family) {
        case Family::SingleThreshold:
            return x >= design.single_cut ? design.single_beta : 0.0;
        case Family::ThresholdI: {
            const auto t = family_cuts(design);
            if (x < t[0]) return b[0];
            if (x < t[1]) return b[1];
            if (x < t[2]) return b[2];
            return b[3];
        }
        case Family::PiecewiseII: {
            const auto t = family_cuts(design);
            if (x <= t[0]) return b[0];
            if (x <= t[1]) return b[1] * std::sin(std::numbers::pi * x);
            if (x <= t[2]) return b[2] * (x - 0.5) * (x - 0.5);
            return b[3] * x;
        }
    }
    return 0.0;
}

std::vector<double> sample_covariates(std::size_t n, std::size_t p, double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("sample_covariates: rho must lie in [0, 1)");
    std::vector<double> x(n * p);
    const double s = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        double prev = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double e = rng.normal();
            prev = j == 0 ? e : rho * prev + s * e;
            x[j * n + i] = prev;
        }
    }
    return x;
}

Response gen_response(std::span<const double> x_col_major, std::size_t n, const SimDesign& design, Rng& rng) {
    if (x_col_major.size() != n * design.p) throw ValidationError("gen_response: covariate matrix has the wrong shape");
    std::vector<double> eta(n, 0.0);
    for (std::size_t j = 0; j < design.p0; ++j) {
        for (std::size_t i = 0; i < n; ++i) eta[i] += signal(design, x_col_major[j * n + i]);
    }
    double mean = 0.0;
    for (double v : eta) mean += v;
    mean /= static_cast<double>(n);
    Response r;
    r.intercept = -mean;
    r.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double prob = 1.0 / (1.0 + std::exp(-(eta[i] + r.intercept)));
        r.labels[i] = rng.bernoulli(prob) ? 1 : -1;
    }
    return r;
}

Dataset simulate_dataset(const SimDesign& design, Rng& rng) {
    design.validate();
    auto x = sample_covariates(design.n, design.p, design.rho, rng);
    Response r = gen_response(x, design.n, design, rng);
    std::vector<std::string> names(design.p);
    for (std::size_t j = 0; j < design.p; ++j) names[j] = "x" + std::to_string(j + 1);
    return Dataset(design.n, std::move(x), std::move(r.labels), std::move(names), "y");
}

Truth make_truth(const SimDesign& design) {
    if (design.family == Family::PiecewiseII) {
        throw ValidationError("make_truth: the piecewise family has no step-function truth");
    }
    const auto cuts = family_cuts(design);
    std::vector<double> values;
    if (design.family == Family::SingleThreshold) {
        values = {0.0, design.single_beta};
    } else {
        values = design.level_coefs;
    }
    std::vector<double> points;
    boost::math::normal nd;
    double lo = 0.0;
    for (std::size_t k = 0; k <= cuts.size(); ++k) {
        const double hi = k < cuts.size() ? boost::math::cdf(nd, cuts[k]) : 1.0;
        points.push_back(normal_quantile(0.5 * (lo + hi)));
        lo = hi;
    }
    Truth t;
    for (std::size_t j = 0; j < design.p; ++j) {
        if (j < design.p0) {
            t.cuts.push_back(cuts);
            t.level_values.push_back(values);
            t.eval_points.push_back(points);
        } else {
            t.cuts.push_back({});
            t.level_values.push_back({0.0});
            t.eval_points.push_back(points);
        }
    }
    return t;
}

}  // namespace filterlr
