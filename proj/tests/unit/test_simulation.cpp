#include "doctest.h"

#include <cmath>

#include "filterlr/error.hpp"
#include "filterlr/simulation.hpp"

using namespace filterlr;

TEST_SUITE("simulation") {

TEST_CASE("normal quantile inverts the normal cdf") {
    for (double p : {1e-10, 0.001, 0.025, 1.0 / 3.0, 0.5, 0.8, 0.999999}) {
        const double x = normal_quantile(p);
        CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THROWS_AS(normal_quantile(0.0), ValidationError);
}

TEST_CASE("AR(1) covariates have unit variance and geometric correlation") {
    Rng rng(5);
    const std::size_t n = 40000, p = 4;
    const double rho = 0.5;
    const auto x = sample_covariates(n, p, rho, rng);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0, v = 0;
        for (std::size_t i = 0; i < n; ++i) m += x[j * n + i];
        m /= n;
        for (std::size_t i = 0; i < n; ++i) v += (x[j * n + i] - m) * (x[j * n + i] - m);
        v /= n;
        CHECK(std::abs(m) < 0.03);
        CHECK(v == doctest::Approx(1.0).epsilon(0.03));
    }
    for (std::size_t lag : {1u, 2u, 3u}) {
        double c = 0;
        for (std::size_t i = 0; i < n; ++i) c += x[i] * x[lag * n + i];
        CHECK(c / n == doctest::Approx(std::pow(rho, lag)).epsilon(0.1).scale(0.05));
    }
}

TEST_CASE("family definitions") {
    SimDesign d;
    CHECK(family_cuts(d) == std::vector<double>{0.0});
    CHECK(signal(d, -0.1) == 0.0);
    CHECK(signal(d, 0.0) == 3.0);
    d.family = Family::ThresholdI;
    const auto c = family_cuts(d);
    REQUIRE(c.size() == 3);
    CHECK(c[1] == 0.0);
    CHECK(c[0] == doctest::Approx(-c[2]).epsilon(1e-14));
    CHECK(signal(d, c[0]) == 5.0);
    CHECK(signal(d, 100.0) == 5.0);
    CHECK(signal(d, -100.0) == 0.0);
    CHECK(parse_family("threshold") == Family::ThresholdI);
    CHECK(to_string(parse_family("piecewise")) == "piecewise");
    CHECK_THROWS_AS(parse_family("other"), ValidationError);
    d.p0 = 600;
    CHECK_THROWS_AS(d.validate(), ValidationError);
}

TEST_CASE("responses follow the signal and are balanced") {
    SimDesign d;
    d.n = 20000;
    d.p = 6;
    d.p0 = 2;
    Rng rng(9);
    const auto data = simulate_dataset(d, rng);
    CHECK(data.n() == 20000);
    CHECK(data.feature_names().front() == "x1");
    CHECK(data.label_name() == "y");
    const double rate = static_cast<double>(data.count_positive()) / d.n;
    CHECK(rate == doctest::Approx(0.5).epsilon(0.05));
    // Both signal covariates above the cut raise the positive rate; noise does not.
    double hi = 0, hi_n = 0, lo = 0, lo_n = 0, nz = 0, nz_n = 0;
    for (std::size_t i = 0; i < d.n; ++i) {
        const bool pos = data.labels()[i] > 0;
        if (data.at(i, 0) >= 0 && data.at(i, 1) >= 0) {
            hi += pos;
            ++hi_n;
        } else if (data.at(i, 0) < 0 && data.at(i, 1) < 0) {
            lo += pos;
            ++lo_n;
        }
        if (data.at(i, 5) >= 0) {
            nz += pos;
            ++nz_n;
        }
    }
    CHECK(hi / hi_n > 0.9);
    CHECK(lo / lo_n < 0.1);
    CHECK(nz / nz_n == doctest::Approx(rate).epsilon(0.06));

    Rng a(3), b(3);
    CHECK(simulate_dataset(d, a) == simulate_dataset(d, b));
}

TEST_CASE("truth for step families") {
    SimDesign d;
    d.family = Family::ThresholdI;
    d.p = 7;
    d.p0 = 3;
    const auto t = make_truth(d);
    t.validate();
    const auto s = t.support();
    CHECK(std::count(s.begin(), s.end(), true) == 3);
    REQUIRE(t.eval_points[0].size() == 4);
    // The conditional median of the middle levels sits at the 5/12 and 7/12 quantiles.
    CHECK(t.eval_points[0][1] == doctest::Approx(normal_quantile(5.0 / 12.0)));
    CHECK(t.eval_points[0][2] == doctest::Approx(normal_quantile(7.0 / 12.0)));
    d.family = Family::PiecewiseII;
    CHECK_THROWS_AS(make_truth(d), ValidationError);
}

}
