#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "otrisk/coupling.hpp"
#include "otrisk/errors.hpp"
#include "otrisk/measures.hpp"
#include "otrisk/numerics.hpp"

namespace otrisk {

/**
 * @brief One inner-supremum problem phi_lambda(x) = sup_y { f(y) - lambda c(x,y) }.
 *
 * Two evaluation strategies:
 *  - FiniteEnumeration: sup over an explicit candidate list (must contain every
 *    atom of the baseline measure so that phi_lambda >= f holds pointwise);
 *  - ClosedForm: a registered analytic formula (model tag + callable), used on
 *    path spaces where enumeration is meaningless.
 */
template <class State>
struct InnerProblem {
    struct FiniteEnumeration {
        std::vector<State> candidates;
    };
    struct ClosedForm {
        std::string tag;
        std::function<double(const State&, double)> phi; ///< (x, lambda) -> phi_lambda(x)
    };

    std::function<double(const State&)> f;
    std::function<double(const State&, const State&)> cost; ///< c(x, y) >= 0, c(x,x) = 0
    std::variant<FiniteEnumeration, ClosedForm> strategy;
};

/// Builds a finite-enumeration inner problem whose candidates are the atoms of
/// `mu` plus `extra` points.
template <class State>
InnerProblem<State> make_finite_inner(std::function<double(const State&)> f,
                                      std::function<double(const State&, const State&)> cost,
                                      const EmpiricalMeasure<State>& mu,
                                      std::vector<State> extra = {}) {
    typename InnerProblem<State>::FiniteEnumeration fe;
    fe.candidates = mu.points();
    fe.candidates.insert(fe.candidates.end(), extra.begin(), extra.end());
    return InnerProblem<State>{std::move(f), std::move(cost), std::move(fe)};
}

/**
 * @brief phi_lambda(x): the inner supremum at penalty lambda >= 0.
 *
 * May return +infinity (closed forms at lambda = 0, or unbounded growth).
 */
template <class State>
double phi_lambda(const InnerProblem<State>& prob, const State& x, double lambda) {
    if (!(lambda >= 0.0)) throw InvalidInput("phi_lambda: lambda must be >= 0");
    if (const auto* fe = std::get_if<typename InnerProblem<State>::FiniteEnumeration>(&prob.strategy)) {
        if (fe->candidates.empty())
            throw InvalidInput("phi_lambda: empty candidate set");
        double best = -std::numeric_limits<double>::infinity();
        for (const State& y : fe->candidates) {
            const double v = prob.f(y) - lambda * prob.cost(x, y);
            best = std::max(best, v);
        }
        return best;
    }
    const auto& cf = std::get<typename InnerProblem<State>::ClosedForm>(prob.strategy);
    if (!cf.phi) throw Unsupported("phi_lambda: no formula registered for tag '" + cf.tag + "'");
    return cf.phi(x, lambda);
}

/**
 * @brief Dual objective J(lambda) = lambda * delta + E_mu[phi_lambda].
 *
 * +infinity propagates: if any atom has infinite inner value the objective is
 * +infinity.  The weighted sum uses pairwise reduction.
 */
template <class State>
double dual_objective(const InnerProblem<State>& prob,
                      const EmpiricalMeasure<State>& mu,
                      double delta, double lambda) {
    if (!(delta >= 0.0)) throw InvalidInput("dual_objective: delta must be >= 0");
    std::vector<double> vals(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double v = phi_lambda(prob, mu.point(i), lambda);
        if (std::isinf(v)) return std::numeric_limits<double>::infinity();
        vals[i] = v;
    }
    return lambda * delta + pairwise_dot(mu.weights(), vals);
}

/// Result of the univariate dual minimization.
struct DualSolution {
    double lambda_star = 0.0;
    double value = 0.0;
    bool attained_at_zero = false;
    std::size_t iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double tolerance = 0.0; ///< relative tolerance the solve was run at
};

struct DualOptions {
    double tol = 1e-8;            ///< relative tolerance on the value
    double lambda_max_hint = 0.0; ///< optional upper bound for the search
};

namespace detail {

/// Shared search logic on a scalar convex J; throws UnboundedDual when J is
/// +infinity everywhere it is probed.
DualSolution minimize_convex_dual(const std::function<double(double)>& J,
                                  double expected_lower_bound_slope, // delta
                                  double mean_f,                     // E_mu[f], lower-envelope anchor
                                  const DualOptions& opts);

} // namespace detail

/**
 * @brief Minimizes J(lambda) over lambda >= 0 (strong-duality outer problem).
 *
 * For delta > 0 and finite J(0) the minimizer lies in
 * [0, (J(0) - E_mu[f]) / delta]; otherwise the bracket is found by geometric
 * expansion.  Golden-section search then shrinks it.  Throws UnboundedDual if
 * J is +infinity at every probed lambda.
 */
template <class State>
DualSolution minimize_dual(const InnerProblem<State>& prob,
                           const EmpiricalMeasure<State>& mu,
                           double delta,
                           const DualOptions& opts = {}) {
    if (!(delta >= 0.0)) throw InvalidInput("minimize_dual: delta must be >= 0");
    const double mean_f = mu.expectation(prob.f);
    auto J = [&](double lam) { return dual_objective(prob, mu, delta, lam); };
    return detail::minimize_convex_dual(J, delta, mean_f, opts);
}

/// Complementary-slackness diagnostics for a coupling at a candidate lambda.
struct SlacknessReport {
    double slack1_violation = 0.0; ///< max over support of phi - (f - lambda c)
    double slack2_violation = 0.0; ///< |lambda * (transport cost - delta)|
    bool ok = false;
};

/**
 * @brief Checks the two optimality conditions for (pi, lambda_star):
 * mass only where f(y) - lambda c(x,y) attains phi_lambda(x), and
 * lambda_star * (cost(pi) - delta) = 0.  `targets` are the column states of pi.
 */
template <class State>
SlacknessReport check_slackness(const CouplingMatrix& pi,
                                double lambda_star,
                                const InnerProblem<State>& prob,
                                const EmpiricalMeasure<State>& mu,
                                const std::vector<State>& targets,
                                double delta, double tol = 1e-8) {
    if (pi.rows() != mu.size() || pi.cols() != targets.size())
        throw InvalidInput("check_slackness: coupling shape mismatch");
    SlacknessReport rep;
    double total_cost = 0.0;
    const double support_tol = 1e-12;
    for (std::size_t i = 0; i < pi.rows(); ++i) {
        const double phi = phi_lambda(prob, mu.point(i), lambda_star);
        for (std::size_t j = 0; j < pi.cols(); ++j) {
            const double mass = pi.at(i, j);
            if (mass <= support_tol) continue;
            const double cij = prob.cost(mu.point(i), targets[j]);
            total_cost += mass * cij;
            const double gap = phi - (prob.f(targets[j]) - lambda_star * cij);
            rep.slack1_violation = std::max(rep.slack1_violation, gap);
        }
    }
    rep.slack2_violation = std::abs(lambda_star * (total_cost - delta));
    rep.ok = rep.slack1_violation <= tol && rep.slack2_violation <= tol;
    return rep;
}

/// Epsilon-optimality certificate: both nonnegative terms and their total.
struct EpsilonOptimality {
    double pairing_gap = 0.0;  ///< integral of phi - (f - lambda c) under pi
    double budget_gap = 0.0;   ///< lambda * (delta - transport cost)
    double total = 0.0;
    bool certified = false;
};

/**
 * @brief Theorem-style epsilon-optimality: a feasible pi is epsilon-optimal
 * iff pairing_gap + budget_gap <= epsilon.  Both terms are nonnegative for a
 * feasible coupling up to roundoff.
 */
template <class State>
EpsilonOptimality epsilon_optimality_check(const CouplingMatrix& pi,
                                           double lambda_star,
                                           const InnerProblem<State>& prob,
                                           const EmpiricalMeasure<State>& mu,
                                           const std::vector<State>& targets,
                                           double delta, double epsilon) {
    if (pi.rows() != mu.size() || pi.cols() != targets.size())
        throw InvalidInput("epsilon_optimality_check: coupling shape mismatch");
    EpsilonOptimality rep;
    double total_cost = 0.0;
    for (std::size_t i = 0; i < pi.rows(); ++i) {
        const double phi = phi_lambda(prob, mu.point(i), lambda_star);
        for (std::size_t j = 0; j < pi.cols(); ++j) {
            const double mass = pi.at(i, j);
            if (mass == 0.0) continue;
            const double cij = prob.cost(mu.point(i), targets[j]);
            total_cost += mass * cij;
            rep.pairing_gap += mass * (phi - (prob.f(targets[j]) - lambda_star * cij));
        }
    }
    rep.budget_gap = lambda_star * (delta - total_cost);
    rep.total = rep.pairing_gap + rep.budget_gap;
    rep.certified = rep.total <= epsilon;
    return rep;
}

/// Closed-form inner supremum for the vertical-shift model on path spaces:
/// shifting a path x by b changes f by slope * b at transport cost b^2, so
/// phi_lambda(x) = f(x) + slope^2 / (4 lambda), +infinity at lambda = 0.
template <class State>
InnerProblem<State> make_vertical_shift_quadratic_inner(
        std::function<double(const State&)> f, double slope) {
    typename InnerProblem<State>::ClosedForm cf;
    cf.tag = "vertical_shift_quadratic";
    const double s = slope;
    std::function<double(const State&)> f_copy = f;
    cf.phi = [f_copy, s](const State& x, double lambda) {
        if (lambda == 0.0)
            return s == 0.0 ? f_copy(x) : std::numeric_limits<double>::infinity();
        return f_copy(x) + s * s / (4.0 * lambda);
    };
    return InnerProblem<State>{std::move(f),
                               [](const State&, const State&) -> double {
                                   throw Unsupported("vertical_shift_quadratic: pointwise cost not used");
                               },
                               std::move(cf)};
}

} // namespace otrisk
