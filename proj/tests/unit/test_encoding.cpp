#include "doctest.h"

#include <cmath>

#include "filterlr/encoding.hpp"
#include "filterlr/error.hpp"
#include "generators.hpp"

using namespace filterlr;
namespace ft = filterlr::testing;

TEST_SUITE("encoding") {

TEST_CASE("levels are closed on the left") {
    const std::vector<double> cuts{0.0, 1.0, 2.5};
    CHECK(level_of(cuts, -1.0) == 0);
    CHECK(level_of(cuts, 0.0) == 1);
    CHECK(level_of(cuts, 0.999) == 1);
    CHECK(level_of(cuts, 1.0) == 2);
    CHECK(level_of(cuts, 100.0) == 3);
    CHECK(level_of({}, 5.0) == 0);
}

TEST_CASE("indicator design from data") {
    const auto d = Dataset::from_rows({{-1, 5}, {0.5, 5}, {2, 7}}, {1, -1, 1}, {"a", "b"});
    const ThresholdSet t{{"a", "b"}, {{0.0, 1.0}, {6.0}}};
    const auto z = encode(d, t);
    CHECK(z.cols() == 3);
    CHECK(z.offsets() == std::vector<std::size_t>{0, 2, 3});
    const std::vector<double> expect{0, 0, 0, 1, 0, 0, 0, 1, 1};
    CHECK(z.dense() == expect);
    CHECK_THROWS_AS(encode(d, ThresholdSet{{"b", "a"}, {{0.0}, {6.0}}}), ValidationError);

    const auto c = center(z);
    CHECK(c.centered());
    CHECK(c.column_means() == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(c.value(0, 0) == doctest::Approx(-1.0 / 3));
    const auto cc = center(c);
    CHECK(cc.dense() == c.dense());
    CHECK(z.centered_with({0.5, 0.5, 0.5}).value(2, 2) == 0.5);
}

TEST_CASE("difference transform is inverted by cumulative sums") {
    const DifferenceTransform t({3, 1, 2});
    const std::vector<double> beta{1, 4, 4, -2, 5, 0};
    const auto theta = t.to_theta(beta);
    CHECK(theta == std::vector<double>{1, 3, 0, -2, 5, -5});
    CHECK(t.from_theta(theta) == beta);
    const auto T = t.dense_t();
    const auto D = t.dense_d();
    const std::size_t m = t.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += T[i * m + k] * D[k * m + j];
            CHECK(s == (i == j ? 1.0 : 0.0));
        }
    }
    CHECK_THROWS_AS(t.to_theta(std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("transformed design matches dense Z D") {
    Rng rng(31);
    for (int it = 0; it < 20; ++it) {
        const std::size_t n = ft::uniform_int(rng, 3, 40);
        const std::size_t p = ft::uniform_int(rng, 1, 6);
        ThresholdedDesign z(ft::random_levels(rng, n, p, 5));
        if (rng.bernoulli(0.5)) z = center(z);
        const auto t = DifferenceTransform::for_design(z);
        const auto zt = transform_design(z, t);
        const std::size_t m = z.cols();
        const auto zd = z.dense();
        const auto D = t.dense_d();
        const auto ztd = zt.dense();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < m; ++c) {
                double s = 0.0;
                for (std::size_t k = 0; k < m; ++k) s += zd[i * m + k] * D[k * m + c];
                CHECK(ztd[i * m + c] == doctest::Approx(s).epsilon(1e-12));
                CHECK(zt.value(i, c) == ztd[i * m + c]);
            }
        }
        // Products against the dense matrix.
        std::vector<double> theta(m), r(n), out(n), g(m);
        for (auto& v : theta) v = rng.bernoulli(0.3) ? 0.0 : rng.normal();
        for (auto& v : r) v = rng.normal();
        zt.multiply(theta, 0.25, out);
        zt.transpose_multiply(r, g);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.25;
            for (std::size_t c = 0; c < m; ++c) s += ztd[i * m + c] * theta[c];
            CHECK(out[i] == doctest::Approx(s).epsilon(1e-12));
        }
        for (std::size_t c = 0; c < m; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += ztd[i * m + c] * r[i];
            CHECK(g[c] == doctest::Approx(s).epsilon(1e-12).scale(1.0));
        }
        std::vector<double> gb(m, -7.0);
        const std::vector<std::size_t> blocks{p - 1};
        zt.transpose_multiply_blocks(r, blocks, gb);
        for (std::size_t c = 0; c < m; ++c) {
            if (c >= zt.offsets()[p - 1]) {
                CHECK(gb[c] == doctest::Approx(g[c]).epsilon(1e-12).scale(1.0));
            } else {
                CHECK(gb[c] == -7.0);
            }
        }
    }
}

TEST_CASE("inner products survive the transform") {
    Rng rng(12);
    for (int it = 0; it < 50; ++it) {
        const std::size_t n = 10;
        ThresholdedDesign z(ft::random_levels(rng, n, ft::uniform_int(rng, 1, 8), 6));
        if (it % 2) z = center(z);
        const auto t = DifferenceTransform::for_design(z);
        const auto zt = transform_design(z, t);
        std::vector<double> beta(z.cols());
        for (auto& b : beta) b = rng.normal();
        const auto theta = t.to_theta(beta);
        for (std::size_t i = 0; i < n; ++i) {
            double a = 0.0, b = 0.0;
            for (std::size_t c = 0; c < z.cols(); ++c) {
                a += beta[c] * z.value(i, c);
                b += theta[c] * zt.value(i, c);
            }
            CHECK(std::abs(a - b) <= 1e-12);
        }
    }
}

}
