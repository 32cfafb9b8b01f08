#include "doctest.h"

#include <cmath>

#include "filterlr/error.hpp"
#include "filterlr/study.hpp"

using namespace filterlr;

namespace {

StudyConfig tiny_config() {
    StudyPlan plan = plan_from_json(R"({"preset": "table1", "n": [120], "p": 8, "p0": 2, "reps": 3,
                                         "bags": 10, "train_fraction": 0.75, "cart": true})");
    REQUIRE(plan.configs.size() == 1);
    return plan.configs[0];
}

}  // namespace

TEST_SUITE("study") {

TEST_CASE("rate fit recovers an exact power law") {
    std::vector<RatePoint> pts;
    for (double n : {100.0, 150.0, 200.0, 300.0, 400.0}) pts.push_back({n, 2.5 * std::pow(n, -0.5)});
    const auto f = fit_rate(pts);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rate_fit_csv(f).rfind("slope,intercept\n", 0) == 0);
    pts[0].value = 0.0;
    CHECK_THROWS_AS(fit_rate(pts), ValidationError);
}

TEST_CASE("summaries") {
    StudyResult r;
    for (int rep = 0; rep < 4; ++rep) {
        r.records.push_back({100, rep, "FILTER", "mab_t", 0.1 * (rep + 1)});
        r.records.push_back({200, rep, "FILTER", "mab_t", 0.05});
    }
    const auto rows = summarize(r);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean == doctest::Approx(0.25));
    CHECK(rows[0].sd == doctest::Approx(std::sqrt(0.05 / 3.0)));
    CHECK(rows[0].reps == 4);
    CHECK(rows[1].sd == 0.0);
    CHECK(summary_mean(rows, 200, "FILTER", "mab_t") == 0.05);
    CHECK(std::isnan(summary_mean(rows, 300, "FILTER", "mab_t")));
    CHECK(study_summary_csv(rows).find("100,FILTER,mab_t,0.25") != std::string::npos);
    CHECK_THROWS_AS(rate_study(rows), ValidationError);
}

TEST_CASE("preset plans") {
    const auto t1 = preset_plan("table1", 5, 1, 1);
    REQUIRE(t1.configs.size() == 7);
    CHECK(t1.configs.front().design.n == 100);
    CHECK(t1.configs.back().design.n == 400);
    CHECK(t1.configs[0].pipeline.cv.rule == SelectionRule::OneSe);
    const auto t3 = preset_plan("table3", 5, 1, 1);
    REQUIRE(t3.configs.size() == 1);
    CHECK(t3.configs[0].design.family == Family::PiecewiseII);
    CHECK(t3.configs[0].design.rho == 0.5);
    CHECK(t3.configs[0].run_cart);
    CHECK_THROWS_AS(preset_plan("table9", 5, 1, 1), ValidationError);
}

TEST_CASE("study json") {
    const auto plan = plan_from_json(R"({"preset": "table2", "n": 250, "rule": "2se", "seed": 4})", 1, 7);
    REQUIRE(plan.configs.size() == 1);
    CHECK(plan.configs[0].design.n == 250);
    CHECK(plan.configs[0].design.n_reps == 7);
    CHECK(plan.configs[0].design.rng_seed == 4);
    CHECK(plan.configs[0].pipeline.cv.rule == SelectionRule::TwoSe);
    const std::string resolved = plan_to_json(plan);
    CHECK(resolved.find("\"rule\": \"2se\"") != std::string::npos);
    CHECK(resolved.find("\"n\": 250") != std::string::npos);
    CHECK_THROWS_AS(plan_from_json(R"({"bogus": 1})"), ValidationError);
    CHECK_THROWS_AS(plan_from_json(R"({"n": "many"})"), ValidationError);
    CHECK_THROWS_AS(plan_from_json("[1, 2]"), ValidationError);
    CHECK_THROWS_AS(plan_from_json("{"), ValidationError);
}

TEST_CASE("replications are reproducible and thread-independent") {
    auto cfg = tiny_config();
    const auto a = run_replication(cfg, 1);
    const auto b = run_replication(cfg, 1);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].metric == b[i].metric);
        CHECK(a[i].value == b[i].value);
    }
    const auto serial = run_study(cfg);
    cfg.threads = 3;
    const auto parallel = run_study(cfg);
    CHECK(study_long_csv(serial) == study_long_csv(parallel));
    CHECK(serial.failures.empty());
    bool has_cart = false;
    for (const auto& r : serial.records) has_cart |= r.method == "CART";
    CHECK(has_cart);
}

}
