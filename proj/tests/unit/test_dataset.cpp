#include "doctest.h"

#include <cmath>

#include "filterlr/csv.hpp"
#include "filterlr/dataset.hpp"
#include "filterlr/error.hpp"
#include "filterlr/rng.hpp"

using namespace filterlr;

TEST_SUITE("core_data") {

TEST_CASE("label codings map to -1/+1") {
    CHECK(canonical_label(0.0, LabelCoding::ZeroOne) == -1);
    CHECK(canonical_label(1.0, LabelCoding::ZeroOne) == 1);
    CHECK(canonical_label(-1.0, LabelCoding::PlusMinusOne) == -1);
    CHECK_THROWS_AS(canonical_label(-1.0, LabelCoding::ZeroOne), ValidationError);
    CHECK_THROWS_AS(canonical_label(0.5, LabelCoding::PlusMinusOne), ValidationError);
    for (int v : {0, 1}) CHECK(to_zero_one(from_zero_one(v)) == v);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(Dataset(2, {1.0, 2.0}, {1, -1, 1}, {"a"}), ValidationError);
    CHECK_THROWS_AS(Dataset(2, {1.0, NAN}, {1, -1}, {"a"}), ValidationError);
    CHECK_THROWS_AS(Dataset(2, {1.0, 2.0}, {1, 0}, {"a"}), ValidationError);
    CHECK_THROWS_AS(Dataset(2, {1.0, 2.0, 3.0}, {1, -1}, {"a"}), ValidationError);
    const Dataset one_class(2, {1.0, 2.0}, {1, 1}, {"a"});
    CHECK_FALSE(one_class.has_both_classes());
    CHECK_THROWS_AS(one_class.require_fittable(), ValidationError);
}

TEST_CASE("row and column access agree") {
    const auto d = Dataset::from_rows({{1, 2}, {3, 4}, {5, 6}}, {1, -1, 1}, {"a", "b"});
    CHECK(d.n() == 3);
    CHECK(d.p() == 2);
    CHECK(d.at(2, 1) == 6);
    CHECK(d.column(0)[1] == 3);
    CHECK(d.row(1) == std::vector<double>{3, 4});
    CHECK(d.count_positive() == 2);
    const std::vector<std::size_t> rows{2, 2, 0};
    const Dataset s = d.subset(rows);
    CHECK(s.n() == 3);
    CHECK(s.at(1, 0) == 5);
    CHECK(s.labels()[2] == 1);
}

TEST_CASE("csv round trip is bit exact") {
    Rng rng(3);
    const std::size_t n = 40;
    std::vector<double> x(n * 3);
    for (auto& v : x) v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    std::vector<Label> y(n);
    for (auto& v : y) v = rng.bernoulli(0.4) ? 1 : -1;
    const Dataset d(n, x, y, {"a", "b c", "d,e"}, "outcome");
    for (auto coding : {LabelCoding::PlusMinusOne, LabelCoding::ZeroOne}) {
        const Dataset back = parse_csv(to_csv(d, coding), "outcome");
        CHECK(back == d);
    }
}

TEST_CASE("csv parsing rules") {
    const Dataset d = parse_csv("\xEF\xBB\xBFx1,y,\"x,2\"\r\n1.5,0,2\r\n-3,1,4\r\n\r\n", "y");
    CHECK(d.feature_names() == std::vector<std::string>{"x1", "x,2"});
    CHECK(d.labels()[0] == -1);
    CHECK(d.at(1, 1) == 4);
    CHECK_THROWS_AS(parse_csv("a,b\n1,0\n", "y"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,y\nfoo,0\n", "y"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,y\n1,0,3\n", "y"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,y\n1,2\n", "y"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,y\ninf,1\n", "y"), ValidationError);
    const Dataset unlabeled = parse_csv("a,b\n1,2\n3,4\n", "y", "<memory>", LabelMode::Optional);
    CHECK(unlabeled.p() == 2);
    CHECK(unlabeled.labels()[1] == -1);
}

TEST_CASE("double formatting reads back exactly") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::exp(20.0 * rng.normal());
        CHECK(std::strtod(csv::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(csv::escape("a\"b") == "\"a\"\"b\"");
    CHECK(csv::parse("\"a\nb\",c\n").at(0).at(0) == "a\nb");
}

TEST_CASE("rng streams are fixed") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    // First output of SplitMix64 from state 0.
    SplitMix64 sm(0);
    CHECK(sm.next() == 0xE220A8397B1DCDAFULL);
    Rng r(1);
    for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2, 0) == derive_seed(1, 2));
}

}
