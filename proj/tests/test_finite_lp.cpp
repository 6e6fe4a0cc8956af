#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "otrisk/finite_lp.hpp"
#include "otrisk/rng.hpp"

using namespace otrisk;

namespace {

FiniteInstance line_instance(std::size_t n, double delta, double p = 1.0) {
    FiniteInstance inst;
    inst.support.resize(n);
    inst.mu.assign(n, 1.0 / static_cast<double>(n));
    inst.f.resize(n);
    inst.cost.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        inst.support[i] = static_cast<double>(i);
        inst.f[i] = static_cast<double>(i);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                inst.cost[i * n + j] =
                    std::pow(std::abs(inst.support[i] - inst.support[j]), p);
    inst.delta = delta;
    return inst;
}

FiniteInstance random_instance(std::size_t n, std::mt19937_64& eng) {
    FiniteInstance inst;
    inst.support.resize(n);
    inst.mu.resize(n);
    inst.f.resize(n);
    inst.cost.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        inst.support[i] = (static_cast<double>(i) + 0.9 * uniform_open(eng));
        inst.mu[i] = 0.05 + uniform_open(eng);
        inst.f[i] = 3.0 * uniform_open(eng) - 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                inst.cost[i * n + j] = std::abs(inst.support[i] - inst.support[j]);
    inst.delta = 2.0 * uniform_open(eng);
    return inst;
}

} // namespace

TEST_CASE("zero budget pins the value to the baseline expectation") {
    FiniteInstance inst = line_instance(5, 0.0);
    const PrimalSolution sol = solve_primal_lp(inst);
    CHECK(sol.value == doctest::Approx(2.0).epsilon(1e-12)); // mean of 0..4
    CHECK(sol.transport_cost == doctest::Approx(0.0));
    const DualSolution dual = solve_dual(inst);
    CHECK(dual.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("huge budget moves all mass to the best payoff") {
    FiniteInstance inst = line_instance(5, 100.0);
    const PrimalSolution sol = solve_primal_lp(inst);
    CHECK(sol.value == doctest::Approx(4.0).epsilon(1e-12));
    const DualSolution dual = solve_dual(inst);
    CHECK(dual.value == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(dual.attained_at_zero);
}

TEST_CASE("two-point instance with a partially binding budget") {
    FiniteInstance inst;
    inst.support = {0.0, 1.0};
    inst.mu = {0.999, 0.001};
    inst.f = {0.0, 1.0};
    inst.cost = {0.0, 1.0, 1.0, 0.0};
    inst.delta = 0.3;
    const PrimalSolution sol = solve_primal_lp(inst);
    CHECK(sol.value == doctest::Approx(0.301).epsilon(1e-12));
    CHECK(sol.transport_cost == doctest::Approx(0.3).epsilon(1e-12));
    const DualSolution dual = solve_dual(inst);
    CHECK(dual.value == doctest::Approx(0.301).epsilon(1e-8));
    CHECK(dual.lambda_star == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("single-atom instance") {
    FiniteInstance inst;
    inst.support = {2.0};
    inst.mu = {1.0};
    inst.f = {7.0};
    inst.cost = {0.0};
    inst.delta = 1.0;
    CHECK(solve_primal_lp(inst).value == doctest::Approx(7.0));
    CHECK(solve_dual(inst).value == doctest::Approx(7.0).epsilon(1e-8));
}

TEST_CASE("primal and dual agree on random instances") {
    for (std::size_t k = 0; k < 30; ++k) {
        auto eng = make_engine(42, k);
        const std::size_t n = 3 + static_cast<std::size_t>(uniform_open(eng) * 12.0);
        FiniteInstance inst = random_instance(n, eng);
        const GapReport rep = duality_gap(inst);
        CHECK(rep.gap <= 1e-6 * (1.0 + std::abs(rep.primal)));
    }
}

TEST_CASE("optimal plans pass slackness and epsilon certificates") {
    for (std::size_t k = 0; k < 10; ++k) {
        auto eng = make_engine(99, k);
        FiniteInstance inst = random_instance(8, eng);
        const PrimalSolution primal = solve_primal_lp(inst);
        const DualSolution dual = solve_dual(inst);
        const SlacknessReport slack =
            check_instance_slackness(inst, primal.coupling, dual.lambda_star, 1e-6);
        CHECK(slack.ok);
        const EpsilonOptimality eps = check_instance_epsilon_optimality(
            inst, primal.coupling, dual.lambda_star,
            1e-6 * (1.0 + std::abs(primal.value)));
        CHECK(eps.certified);
        CHECK(eps.pairing_gap >= -1e-12);
        CHECK(eps.budget_gap >= -1e-12);
    }
}

TEST_CASE("value is nondecreasing and concave in the budget") {
    auto eng = make_engine(7, 0);
    FiniteInstance base = random_instance(9, eng);
    std::vector<double> deltas{0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    std::vector<double> values;
    for (double d : deltas) {
        FiniteInstance inst = base;
        inst.delta = d;
        values.push_back(solve_primal_lp(inst).value);
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        CHECK(values[i] >= values[i - 1] - 1e-9);
    }
    // Concavity over the evenly spaced prefix 0, 0.25, ..., 1.0.
    for (std::size_t i = 1; i + 1 < 5; ++i) {
        CHECK(values[i] >= 0.5 * (values[i - 1] + values[i + 1]) - 1e-9);
    }
}

TEST_CASE("feasibility certificate of the returned coupling") {
    FiniteInstance inst = line_instance(6, 0.8);
    const PrimalSolution sol = solve_primal_lp(inst);
    FiniteInstance checked = inst;
    checked.validate();
    sol.coupling.validate_feasible(checked.mu, checked.cost, checked.delta);
}

TEST_CASE("instance validation rejects malformed inputs") {
    FiniteInstance inst = line_instance(3, 0.1);

    FiniteInstance big = inst;
    big.mu.assign(513, 1.0);
    big.f.assign(513, 0.0);
    big.support.assign(513, 0.0);
    big.cost.assign(513 * 513, 1.0);
    CHECK_THROWS_AS(big.validate(), InvalidInput);

    FiniteInstance offdiag = inst;
    offdiag.cost[0 * 3 + 1] = 0.0; // duplicate-state cost breaks the structure
    CHECK_THROWS_AS(offdiag.validate(), InvalidInput);

    FiniteInstance diag = inst;
    diag.cost[0] = 0.5;
    CHECK_THROWS_AS(diag.validate(), InvalidInput);

    FiniteInstance negmu = inst;
    negmu.mu[0] = -0.1;
    CHECK_THROWS_AS(negmu.validate(), InvalidInput);

    FiniteInstance negdelta = inst;
    negdelta.delta = -1.0;
    CHECK_THROWS_AS(negdelta.validate(), InvalidInput);

    FiniteInstance shapes = inst;
    shapes.f.pop_back();
    CHECK_THROWS_AS(shapes.validate(), InvalidInput);
}

TEST_CASE("JSON serialization round-trips instances") {
    FiniteInstance inst = line_instance(4, 0.6, 2.0);
    const std::string text = finite_instance_to_json(inst);
    const FiniteInstance back = finite_instance_from_json(text);
    REQUIRE(back.size() == inst.size());
    CHECK(back.delta == doctest::Approx(inst.delta));
    for (std::size_t i = 0; i < inst.size(); ++i) {
        CHECK(back.support[i] == doctest::Approx(inst.support[i]));
        CHECK(back.f[i] == doctest::Approx(inst.f[i]));
    }
    for (std::size_t i = 0; i < inst.cost.size(); ++i) {
        CHECK(back.cost[i] == doctest::Approx(inst.cost[i]));
    }
    CHECK_THROWS_AS(finite_instance_from_json("{"), ParseError);
    CHECK_THROWS_AS(finite_instance_from_json("{\"mu\": [1.0]}"), ParseError);
}

TEST_CASE("index-space helpers expose the instance to the generic dual") {
    FiniteInstance inst = line_instance(5, 0.8);
    FiniteInstance validated = inst;
    validated.validate();
    const auto mu = make_index_measure(validated);
    const auto inner = make_index_inner(validated);
    const DualSolution via_generic = minimize_dual(inner, mu, validated.delta);
    const DualSolution direct = solve_dual(inst);
    CHECK(via_generic.value == doctest::Approx(direct.value).epsilon(1e-9));
}
