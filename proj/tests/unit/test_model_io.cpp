#include "doctest.h"

#include <cmath>

#include "filterlr/error.hpp"
#include "filterlr/model_io.hpp"
#include "filterlr/rng.hpp"

using namespace filterlr;

namespace {

FilterModel random_model(Rng& rng) {
    FilterModel m;
    m.feature_names = {"a", "b \"quoted\"", "c"};
    m.thresholds.names = m.feature_names;
    m.thresholds.cuts = {{-0.3, 1.0 / 3.0}, {}, {std::nextafter(2.0, 3.0)}};
    DifferenceTransform t({2, 0, 1});
    m.theta = {rng.normal(), 0.0, 1e-300};
    m.beta = t.from_theta(m.theta);
    m.column_means = {rng.uniform(), rng.uniform(), rng.uniform()};
    m.intercept = rng.normal();
    m.lambda = 0.0123;
    m.iterations = 17;
    m.converged = true;
    m.kkt_residual = 3e-9;
    return m;
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("model json round trip is bit exact") {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const auto m = random_model(rng);
        const auto back = model_from_json(model_to_json(m));
        CHECK(back.feature_names == m.feature_names);
        CHECK(back.thresholds == m.thresholds);
        CHECK(back.theta == m.theta);
        CHECK(back.beta == m.beta);
        CHECK(back.column_means == m.column_means);
        CHECK(back.intercept == m.intercept);
        CHECK(back.lambda == m.lambda);
        CHECK(back.iterations == m.iterations);
        CHECK(back.converged == m.converged);
        CHECK(back.kkt_residual == m.kkt_residual);
        CHECK(model_to_json(back) == model_to_json(m));
    }
}

TEST_CASE("thresholds json round trip") {
    const ThresholdSet t{{"x", "y"}, {{0.1, 0.2}, {}}};
    CHECK(thresholds_from_json(thresholds_to_json(t)) == t);
    CHECK_THROWS_AS(thresholds_from_json(R"([{"covariate": "x", "cuts": [2, 1]}])"), ValidationError);
    CHECK_THROWS_AS(thresholds_from_json(R"({"x": 1})"), ValidationError);
    CHECK_THROWS_AS(thresholds_from_json("not json"), ValidationError);
}

TEST_CASE("malformed models are rejected") {
    Rng rng(2);
    const std::string good = model_to_json(random_model(rng));
    CHECK_THROWS_AS(model_from_json("{}"), ValidationError);
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string s = good;
        const auto pos = s.find(from);
        REQUIRE(pos != std::string::npos);
        s.replace(pos, from.size(), to);
        return s;
    };
    CHECK_THROWS_AS(model_from_json(replace("filterlr-model", "other")), ValidationError);
    CHECK_THROWS_AS(model_from_json(replace("\"version\": 1", "\"version\": 99")), ValidationError);
}

TEST_CASE("files") {
    Rng rng(3);
    const auto m = random_model(rng);
    const auto dir = std::filesystem::temp_directory_path() / "filterlr_model_io_test";
    save_model(m, dir / "sub" / "model.json");
    CHECK(model_to_json(load_model(dir / "sub" / "model.json")) == model_to_json(m));
    CHECK_THROWS(load_model(dir / "missing.json"));
    std::filesystem::remove_all(dir);
}

}
