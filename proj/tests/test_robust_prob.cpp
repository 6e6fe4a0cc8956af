#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "otrisk/finite_lp.hpp"
#include "otrisk/robust_prob.hpp"

using namespace otrisk;

namespace {

/// Half the mass on the set, half at distance 2.
DistanceProfile half_profile() {
    return DistanceProfile({0.0, 2.0}, {0.5, 0.5});
}

} // namespace

TEST_CASE("profiles merge equal distances and accumulate cost") {
    DistanceProfile p({1.0, 2.0, 1.0}, {0.2, 0.5, 0.3});
    REQUIRE(p.groups().size() == 2);
    CHECK(p.groups()[0].distance == 1.0);
    CHECK(p.groups()[0].weight == doctest::Approx(0.5));
    CHECK(p.total_cost() == doctest::Approx(0.5 * 1.0 + 0.5 * 2.0));
    CHECK(p.mass_at_zero() == 0.0);

    CHECK_THROWS_AS(DistanceProfile({-1.0}, {1.0}), InvalidInput);
    CHECK_THROWS_AS(DistanceProfile({1.0}, {0.0}), InvalidInput);
    CHECK_THROWS_AS(DistanceProfile({1.0, 2.0}, {1.0}), InvalidInput);
}

TEST_CASE("h is the right-continuous cumulative moved cost") {
    const DistanceProfile p = half_profile();
    CHECK(p.h_of_u(0.0) == 0.0);
    CHECK(p.h_of_u(1.999) == 0.0);
    CHECK(p.h_of_u(2.0) == doctest::Approx(1.0));
    CHECK(p.h_of_u(10.0) == doctest::Approx(1.0));
    CHECK(p.mass_below(2.0) == doctest::Approx(0.5));
    CHECK(p.mass_at_most(2.0) == doctest::Approx(1.0));
}

TEST_CASE("threshold calibration inverts h") {
    const DistanceProfile p = half_profile();
    const ThresholdResult t = calibrate_threshold(p, 0.3);
    CHECK(t.u_star == doctest::Approx(2.0));
    CHECK(t.lambda_star == doctest::Approx(0.5));

    const ThresholdResult zero = calibrate_threshold(p, 0.0);
    CHECK(zero.u_star == 0.0);
    CHECK(std::isinf(zero.lambda_star));

    const ThresholdResult beyond = calibrate_threshold(p, 1.5);
    CHECK(std::isinf(beyond.u_star));
    CHECK(beyond.lambda_star == 0.0);
}

TEST_CASE("worst-case probability: randomized move at the threshold") {
    const DistanceProfile p = half_profile();
    const WorstCaseProbability wc = worst_case_probability(p, 0.3);
    // Dual candidates: J(0) = 1, J(1/2) = 0.15 + 0.5 = 0.65.
    CHECK(wc.value == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(wc.lambda_star == doctest::Approx(0.5));
    CHECK(wc.u_star == doctest::Approx(2.0));
    CHECK(wc.c_lower == doctest::Approx(0.0));
    CHECK(wc.c_upper == doctest::Approx(1.0));
    CHECK(wc.randomization_p == doctest::Approx(0.3));
    // Identity: value = mass below threshold + p * mass at the threshold.
    CHECK(wc.value ==
          doctest::Approx(p.mass_below(2.0) + wc.randomization_p * 0.5).epsilon(1e-12));
}

TEST_CASE("worst-case probability sentinels") {
    const DistanceProfile p = half_profile();
    const WorstCaseProbability at_zero = worst_case_probability(p, 0.0);
    CHECK(at_zero.value == doctest::Approx(0.5)); // baseline mass on the set
    CHECK(std::isinf(at_zero.lambda_star));

    const WorstCaseProbability beyond = worst_case_probability(p, 1.5);
    CHECK(beyond.value == doctest::Approx(1.0));
    CHECK(beyond.lambda_star == 0.0);
    CHECK(std::isinf(beyond.u_star));

    CHECK_THROWS_AS(worst_case_probability(p, -0.1), InvalidInput);
}

TEST_CASE("worst-case probability interpolates between group masses") {
    // Three groups; budget inside the second group's range.
    DistanceProfile p({0.0, 1.0, 4.0}, {0.2, 0.3, 0.5});
    // h(1) = 0.3, h(4) = 2.3.  delta = 0.3 moves all of group 1 exactly.
    const WorstCaseProbability exact = worst_case_probability(p, 0.3);
    CHECK(exact.value == doctest::Approx(0.5).epsilon(1e-12));
    // delta = 1.3 moves half of group 2: value = 0.5 + (1.3-0.3)/(4*0.5) mass.
    const WorstCaseProbability mid = worst_case_probability(p, 1.3);
    CHECK(mid.u_star == doctest::Approx(4.0));
    CHECK(mid.randomization_p == doctest::Approx((1.3 - 0.3) / 2.0));
    CHECK(mid.value == doctest::Approx(0.5 + 0.5 * 0.5).epsilon(1e-12));
}

TEST_CASE("cbar bounds bracket the budget at the optimizer") {
    const DistanceProfile p = half_profile();
    const auto [lo, hi] = cbar_bounds(p, 0.5);
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(1.0));
    CHECK(lo <= 0.3);
    CHECK(0.3 <= hi);
}

TEST_CASE("profile CSV export") {
    DistanceProfile p({0.0, 2.0}, {0.25, 0.75});
    const std::string csv = p.to_csv();
    CHECK(csv.substr(0, 16) == std::string("distance,weight\n"));
    CHECK(csv.find("0.25") != std::string::npos);
}

TEST_CASE("dual value matches the exact LP on indicator instances") {
    // States on a line, payoff = indicator of the leftmost state, linear cost.
    // The set-distance dual and the full LP price the same problem.
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> w{0.4, 0.3, 0.2, 0.1};
    FiniteInstance inst;
    inst.support = xs;
    inst.mu = w;
    inst.f = {1.0, 0.0, 0.0, 0.0};
    inst.cost.assign(16, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) inst.cost[i * 4 + j] = std::abs(xs[i] - xs[j]);

    DistanceProfile profile(xs, w);
    for (double delta : {0.0, 0.2, 0.5, 0.9, 1.4, 5.0}) {
        FiniteInstance run = inst;
        run.delta = delta;
        const double lp = solve_primal_lp(run).value;
        const double dual = worst_case_probability(profile, delta).value;
        CHECK(dual == doctest::Approx(lp).epsilon(1e-10));
    }
}

TEST_CASE("coupling sampler reproduces the worst-case set probability") {
    const auto mu = EmpiricalMeasure<double>::from_samples({0.0, 2.0});
    auto set_distance = [](const double& x) { return std::max(0.0, x); };
    auto projection = [](const double&) { return 0.0; };
    auto cost = [](const double& x, const double& y) { return std::abs(x - y); };
    WorstCaseCouplingSampler<double> sampler(mu, set_distance, projection, cost,
                                             /*delta=*/0.3, /*seed=*/123);
    CHECK(sampler.u_star() == doctest::Approx(2.0));
    CHECK(sampler.threshold_move_probability() == doctest::Approx(0.3));

    const int n = 100000;
    int in_set = 0;
    double cost_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto draw = sampler.next();
        if (set_distance(draw.y) == 0.0) ++in_set;
        cost_sum += draw.cost;
        if (draw.moved) {
            CHECK(draw.cost > 0.0);
        } else {
            CHECK(draw.y == draw.x);
        }
    }
    // P(A) = 0.5 + 0.5 * 0.3 = 0.65; E cost = 0.5 * 0.3 * 2 = 0.3 (4-sigma bands).
    CHECK(std::abs(in_set / static_cast<double>(n) - 0.65) < 0.006);
    CHECK(std::abs(cost_sum / static_cast<double>(n) - 0.3) < 0.009);
}

TEST_CASE("projection contract violations are detected") {
    const auto mu = EmpiricalMeasure<double>::from_samples({2.0});
    auto set_distance = [](const double& x) { return std::max(0.0, x); };
    auto bad_projection = [](const double&) { return 0.5; }; // not in the set
    auto cost = [](const double& x, const double& y) { return std::abs(x - y); };
    WorstCaseCouplingSampler<double> sampler(mu, set_distance, bad_projection, cost,
                                             /*delta=*/10.0, /*seed=*/5);
    CHECK_THROWS_AS(sampler.next(), InvalidProjection);

    auto wrong_cost_projection = [](const double&) { return -1.0; }; // distance 0 but cost 3
    WorstCaseCouplingSampler<double> sampler2(mu, set_distance, wrong_cost_projection, cost,
                                              /*delta=*/10.0, /*seed=*/5);
    CHECK_THROWS_AS(sampler2.next(), InvalidProjection);
}
