#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "otrisk/measures.hpp"

using namespace otrisk;

TEST_CASE("empirical measures renormalize positive weights") {
    EmpiricalMeasure<double> mu({1.0, 2.0, 3.0}, {2.0, 2.0, 4.0});
    CHECK(mu.size() == 3);
    CHECK(mu.weight(0) == doctest::Approx(0.25));
    CHECK(mu.weight(2) == doctest::Approx(0.5));
    CHECK(mu.total_weight() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mu.expectation([](const double& x) { return x; }) == doctest::Approx(2.25));
}

TEST_CASE("uniform sampling constructor") {
    auto mu = EmpiricalMeasure<int>::from_samples({5, 6, 7, 8});
    CHECK(mu.weight(0) == doctest::Approx(0.25));
    CHECK(mu.point(3) == 8);
}

TEST_CASE("invalid measures are rejected") {
    CHECK_THROWS_AS(EmpiricalMeasure<double>({}, {}), InvalidInput);
    CHECK_THROWS_AS(EmpiricalMeasure<double>({1.0}, {0.0}), InvalidInput);
    CHECK_THROWS_AS(EmpiricalMeasure<double>({1.0}, {-1.0}), InvalidInput);
    CHECK_THROWS_AS(EmpiricalMeasure<double>({1.0, 2.0}, {1.0}), InvalidInput);
}

TEST_CASE("cost specifications validate and price scalar moves") {
    CostSpec spec;
    spec.p = 2.0;
    spec.delta = 1.5;
    spec.validate();
    auto c = spec.scalar_cost();
    CHECK(c(1.0, 3.0) == doctest::Approx(4.0));
    CHECK(c(2.0, 2.0) == 0.0);

    CostSpec bad;
    bad.p = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    CostSpec neg;
    neg.delta = -1.0;
    CHECK_THROWS_AS(neg.validate(), InvalidInput);

    CostSpec weighted;
    weighted.metric = BaseMetric::WeightedEuclidean;
    CHECK_THROWS_AS(weighted.validate(), InvalidInput); // weights missing
    weighted.metric_weights = {1.0, 4.0};
    weighted.validate();
    auto vc = weighted.vector_cost();
    CHECK(vc({0.0, 0.0}, {1.0, 1.0}) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("claim model validation and derived rates") {
    ClaimModel m;
    m.claim_rate = 1.0;
    m.eta = 0.1;
    m.m1 = 11.0 / 6.0;
    m.m2 = 11.0;
    m.horizon = 100.0;
    m.p = 2.0;
    m.validate();
    CHECK(m.premium_rate() == doctest::Approx(1.1 * 11.0 / 6.0));
    CHECK(m.surrogate_drift() == doctest::Approx(0.1 * 11.0 / 6.0));
    CHECK(m.surrogate_vol() == doctest::Approx(std::sqrt(11.0)));

    ClaimModel bad = m;
    bad.theta = 0.05; // must exceed eta
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = m;
    bad.m2 = 1.0; // below m1^2
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = m;
    bad.claim_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("sample moments of claim sizes") {
    const auto [m1, m2] = estimate_moments({1.0, 2.0, 3.0});
    CHECK(m1 == doctest::Approx(2.0));
    CHECK(m2 == doctest::Approx(14.0 / 3.0));
    CHECK_THROWS_AS(estimate_moments({}), InvalidInput);
    CHECK_THROWS_AS(estimate_moments({1.0, -2.0}), InvalidInput);
}

TEST_CASE("claims CSV reader: plain rows") {
    std::istringstream in("1.5\n2.5\n3.5\n");
    const auto claims = read_claims_csv(in);
    REQUIRE(claims.size() == 3);
    CHECK(claims[1] == doctest::Approx(2.5));
}

TEST_CASE("claims CSV reader: header, CRLF and blank lines") {
    std::istringstream in("claim_size\r\n1.0\r\n\r\n2.0\r\n");
    const auto claims = read_claims_csv(in);
    REQUIRE(claims.size() == 2);
    CHECK(claims[0] == doctest::Approx(1.0));
}

TEST_CASE("claims CSV reader: bad rows carry their row number") {
    std::istringstream in("1.0\nnot_a_number\n");
    try {
        read_claims_csv(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
    }
}

TEST_CASE("claims CSV reader: empty input is invalid") {
    std::istringstream in("");
    CHECK_THROWS_AS(read_claims_csv(in), InvalidInput);
    std::istringstream only_header("claims\n");
    CHECK_THROWS_AS(read_claims_csv(only_header), InvalidInput);
}
