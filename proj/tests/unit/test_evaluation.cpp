#include "doctest.h"

#include <cmath>

#include "filterlr/error.hpp"
#include "filterlr/evaluation.hpp"
#include "generators.hpp"

using namespace filterlr;
namespace ft = filterlr::testing;

namespace {

double pair_auc(const std::vector<double>& s, const std::vector<Label>& y) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] <= 0) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] > 0) continue;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            den += 1.0;
        }
    }
    return num / den;
}

// Area of the piecewise-linear ROC on [0, hi] by fine numerical integration.
double numeric_pauc(const std::vector<RocPoint>& roc, double hi) {
    const int steps = 200000;
    double area = 0.0;
    std::size_t seg = 0;
    for (int k = 0; k < steps; ++k) {
        const double x = (k + 0.5) * hi / steps;
        while (seg + 1 < roc.size() && roc[seg + 1].fpr < x) ++seg;
        const auto& a = roc[seg];
        const auto& b = roc[std::min(seg + 1, roc.size() - 1)];
        const double t = b.fpr > a.fpr ? (x - a.fpr) / (b.fpr - a.fpr) : 1.0;
        area += (a.tpr + t * (b.tpr - a.tpr)) * hi / steps;
    }
    return area;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("auc equals the pairwise count with ties") {
    Rng rng(1);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = ft::uniform_int(rng, 2, 80);
        std::vector<double> s(n);
        for (auto& v : s) v = static_cast<double>(rng.below(6));
        const auto y = ft::random_labels(rng, n);
        CHECK(auc(s, y) == doctest::Approx(pair_auc(s, y)).epsilon(1e-12));
        // Monotone transforms leave it unchanged.
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(0.7 * s[i]) - 3.0;
        CHECK(auc(t, y) == auc(s, y));
    }
    CHECK_THROWS_AS(auc(std::vector<double>{1, 2}, std::vector<Label>{1, 1}), ValidationError);
}

TEST_CASE("roc curve and partial auc") {
    const std::vector<double> s{0.9, 0.8, 0.7, 0.6, 0.55, 0.4, 0.3, 0.2};
    const std::vector<Label> y{1, 1, -1, 1, -1, 1, -1, -1};
    const auto roc = roc_curve(s, y);
    CHECK(roc.front().fpr == 0.0);
    CHECK(roc.front().tpr == 0.0);
    CHECK(roc.back().fpr == 1.0);
    CHECK(roc.back().tpr == 1.0);
    const auto full = partial_auc(s, y, 1.0);
    CHECK(full.raw == doctest::Approx(auc(s, y)));
    CHECK(full.standardized == doctest::Approx(auc(s, y)));

    Rng rng(2);
    for (int it = 0; it < 20; ++it) {
        const std::size_t n = ft::uniform_int(rng, 4, 60);
        std::vector<double> sc(n);
        for (auto& v : sc) v = static_cast<double>(rng.below(8));
        const auto yy = ft::random_labels(rng, n);
        const double hi = 0.05 + 0.9 * rng.uniform();
        const auto pa = partial_auc(sc, yy, hi);
        CHECK(pa.raw == doctest::Approx(numeric_pauc(roc_curve(sc, yy), hi)).epsilon(1e-6));
        CHECK(pa.standardized == doctest::Approx(0.5 * (1 + (pa.raw - hi * hi / 2) / (hi - hi * hi / 2))));
    }
}

TEST_CASE("standardized pAUC endpoints") {
    const std::vector<Label> y{1, 1, 1, -1, -1, -1};
    const std::vector<double> perfect{3, 2, 1, 0, -1, -2};
    const std::vector<double> flat(6, 0.5);
    for (double hi : {0.1, 0.3, 1.0}) {
        CHECK(partial_auc(perfect, y, hi).standardized == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(partial_auc(flat, y, hi).standardized == doctest::Approx(0.5).epsilon(1e-15));
    }
    CHECK_THROWS_AS(partial_auc(perfect, y, 0.0), ValidationError);
}

TEST_CASE("proper scores") {
    const std::vector<double> p{0.8, 0.3};
    const std::vector<Label> y{1, -1};
    const auto s = proper_scores(p, y);
    CHECK(s.logs == doctest::Approx(0.5 * (std::log(0.8) + std::log(0.7))));
    CHECK(s.brier == doctest::Approx(-0.5 * (0.04 + 0.09)));
    CHECK(s.crps == doctest::Approx(s.brier));
    const auto c = proper_scores(std::vector<double>{1.0, 0.0}, std::vector<Label>{-1, 1});
    CHECK(c.clamped == 2);
    CHECK(std::isfinite(c.logs));
}

TEST_CASE("scores are proper on a grid") {
    for (double q : {0.05, 0.2, 0.37, 0.5, 0.81, 0.95}) {
        double best[3] = {-INFINITY, -INFINITY, -INFINITY};
        double arg[3] = {0, 0, 0};
        for (int k = 1; k < 1000; ++k) {
            const double p = k / 1000.0;
            const auto pos = proper_scores(std::vector<double>{p}, std::vector<Label>{1});
            const auto neg = proper_scores(std::vector<double>{p}, std::vector<Label>{-1});
            const double e[3] = {q * pos.logs + (1 - q) * neg.logs, q * pos.brier + (1 - q) * neg.brier,
                                 q * pos.crps + (1 - q) * neg.crps};
            for (int m = 0; m < 3; ++m) {
                if (e[m] > best[m]) {
                    best[m] = e[m];
                    arg[m] = p;
                }
            }
        }
        for (double a : arg) CHECK(std::abs(a - q) <= 0.001 + 1e-12);
    }
}

TEST_CASE("murphy elementary scores") {
    CHECK(murphy_elementary(0.2, 1, 0.5, 0.9) == doctest::Approx(0.9 * 0.5));
    CHECK(murphy_elementary(0.7, 0, 0.5, 0.9) == doctest::Approx(0.1 * 0.5));
    CHECK(murphy_elementary(0.7, 1, 0.5, 0.9) == 0.0);
    CHECK(murphy_elementary(0.2, 0, 0.5, 0.9) == 0.0);
    const auto grid = default_murphy_grid();
    CHECK(grid.size() == 99);
    CHECK(grid.front() == doctest::Approx(0.01));
    // A perfect forecaster has zero elementary score everywhere.
    const std::vector<double> p{1.0, 0.0, 1.0};
    const std::vector<Label> y{1, -1, 1};
    for (const auto& pt : murphy_scores(p, y, 0.5, grid)) CHECK(pt.score == 0.0);
    // Integrating the alpha = 1/2 elementary scores over p recovers Brier / 4 (Riemann sum).
    Rng rng(8);
    std::vector<double> q(200);
    std::vector<Label> yy(200);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = rng.uniform();
        yy[i] = rng.bernoulli(q[i]) ? 1 : -1;
    }
    std::vector<double> fine;
    for (int k = 0; k < 20000; ++k) fine.push_back((k + 0.5) / 20000.0);
    double integral = 0.0;
    for (const auto& pt : murphy_scores(q, yy, 0.5, fine)) integral += pt.score / 20000.0;
    CHECK(integral == doctest::Approx(-proper_scores(q, yy).brier / 4.0).epsilon(1e-3));
}

TEST_CASE("evaluate report") {
    const std::vector<double> p{0.9, 0.2, 0.6, 0.4};
    const std::vector<Label> y{1, -1, 1, -1};
    const auto r = evaluate(p, y);
    CHECK(r.auc == 1.0);
    CHECK(r.pauc_standardized == doctest::Approx(1.0));
    CHECK(r.murphy.size() == 99);
    const auto csv = eval_report_csv(r);
    for (const char* key : {"auc", "pauc_raw", "pauc_standardized", "logs", "crps", "brier"}) {
        CHECK(csv.find(std::string("\n") + key + ",") != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate(std::vector<double>{1.5, 0.2}, std::vector<Label>{1, -1}), ValidationError);
}

TEST_CASE("selection metrics against a known truth") {
    FilterModel m;
    m.feature_names = {"a", "b", "c"};
    m.thresholds = ThresholdSet{{"a", "b", "c"}, {{0.1, 1.0}, {0.5}, {}}};
    m.theta = {1.0, 0.0, 0.0};
    m.beta = {1.0, 1.0, 0.0};
    m.column_means = {0.5, 0.2, 0.4};
    m.converged = true;
    m.validate();
    Truth t;
    t.cuts = {{0.0}, {}, {}};
    t.level_values = {{0.0, 1.0}, {0.0}, {0.0}};
    t.eval_points = {{-1.0, 2.0}, {0.0}, {0.0}};
    const auto [sen, spe] = variable_selection(m, t.support());
    CHECK(sen == 1.0);
    CHECK(spe == 1.0);
    const auto r = selection_metrics(m, t);
    CHECK(r.mab_t == doctest::Approx(0.1));
    CHECK(r.sen_vs == 1.0);
}

}
