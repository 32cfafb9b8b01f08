#include "doctest.h"

#include <cmath>

#include "filterlr/cart.hpp"
#include "filterlr/error.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/pipeline.hpp"
#include "filterlr/simulation.hpp"

using namespace filterlr;

TEST_SUITE("cart") {

TEST_CASE("a separable covariate gives two pure leaves") {
    std::vector<std::vector<double>> rows;
    std::vector<Label> y;
    for (int i = 0; i < 100; ++i) {
        rows.push_back({static_cast<double>(i % 7), static_cast<double>(i)});
        y.push_back(i >= 50 ? 1 : -1);
    }
    const auto d = Dataset::from_rows(rows, y, {"noise", "x"});
    const auto tree = CartTree::fit(d, CartConfig{});
    CHECK(tree.leaves() == 2);
    CHECK(tree.nodes()[0].feature == 1);
    CHECK(tree.nodes()[0].cut == 49.5);
    const auto p = tree.predict_proba(d);
    for (int i = 0; i < 100; ++i) CHECK(p[i] == (i >= 50 ? 1.0 : 0.0));
}

TEST_CASE("pure or tiny nodes are not split") {
    const auto d = Dataset::from_rows({{1}, {2}, {3}}, {1, 1, 1}, {"x"});
    CHECK(CartTree::fit(d, CartConfig{}).leaves() == 1);
    CartConfig bad;
    bad.min_bucket = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("weights act as multiplicities") {
    const auto d = Dataset::from_rows({{0}, {1}, {2}, {3}}, {-1, -1, 1, 1}, {"x"});
    CartConfig cfg;
    cfg.min_split = 2;
    cfg.min_bucket = 1;
    const std::vector<double> w{5, 5, 5, 5};
    const auto a = CartTree::fit(d, cfg, w);
    const auto big = d.subset(std::vector<std::size_t>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3});
    const auto b = CartTree::fit(big, cfg);
    CHECK(a.predict_proba(d) == b.predict_proba(d));
}

TEST_CASE("bagged trees are reproducible") {
    SimDesign sd;
    sd.family = Family::ThresholdI;
    sd.n = 300;
    sd.p = 6;
    sd.p0 = 2;
    Rng rng(4);
    const auto d = simulate_dataset(sd, rng);
    BaggedCartConfig cfg;
    cfg.n_bags = 15;
    cfg.rng_seed = 9;
    const auto a = bagged_cart_proba(d, d, cfg);
    CHECK(a == bagged_cart_proba(d, d, cfg));
    CHECK(auc(a, d.labels()) > 0.75);
}

}

TEST_SUITE("pipeline") {

TEST_CASE("end-to-end fit on a threshold design") {
    SimDesign sd;
    sd.family = Family::ThresholdI;
    sd.n = 400;
    sd.p = 20;
    sd.p0 = 3;
    Rng rng(21);
    const auto train = simulate_dataset(sd, rng);
    const auto test = simulate_dataset(sd, rng);
    PipelineConfig cfg;
    cfg.bagging.n_bags = 30;
    cfg.bagging.max_depth_per_bag = 3;
    cfg.aggregation = Aggregation::kmeans(3);
    cfg.cv.n_lambdas = 25;
    cfg.cv.rule = SelectionRule::OneSe;
    const auto r = fit_pipeline(train, cfg);
    CHECK(r.model.converged);
    CHECK(r.model.thresholds.p() == 20);
    const auto sel = r.model.selected();
    for (std::size_t j : {0u, 1u, 2u}) CHECK(std::find(sel.begin(), sel.end(), j) != sel.end());
    CHECK(auc(predict_proba(r.model, test), test.labels()) > 0.8);

    cfg.bagging.threads = 2;
    cfg.cv.threads = 2;
    const auto again = fit_pipeline(train, cfg);
    CHECK(again.model.theta == r.model.theta);
    CHECK(again.model.intercept == r.model.intercept);
    CHECK(again.thresholds.thresholds == r.thresholds.thresholds);
}

}
