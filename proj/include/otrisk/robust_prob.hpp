#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/measures.hpp"
#include "otrisk/numerics.hpp"
#include "otrisk/rng.hpp"

namespace otrisk {

/**
 * @brief Sorted profile of set distances under the baseline measure: pairs
 * (d_k, w_k) with distinct distances ascending and w_k the total mass at d_k.
 *
 * Everything the worst-case probability of a set needs from the measure is in
 * this profile: h(u) = sum_{d_k <= u} w_k d_k and the mass CDF.
 */
class DistanceProfile {
public:
    struct Group {
        double distance = 0.0;
        double weight = 0.0;
    };

    /// From raw (distance, weight) data; equal distances are merged.
    DistanceProfile(std::vector<double> distances, std::vector<double> weights);

    const std::vector<Group>& groups() const noexcept { return groups_; }
    double total_weight() const noexcept { return total_weight_; }
    /// sum_k w_k d_k — the full transport cost of moving everything into the set.
    double total_cost() const noexcept { return total_cost_; }
    /// Baseline probability of the set, mu{d = 0}.
    double mass_at_zero() const noexcept;

    /// h(u) = sum_{d_k <= u} w_k d_k (right-continuous, nondecreasing).
    double h_of_u(double u) const;

    /// mu{d <= u} and mu{d < u}.
    double mass_at_most(double u) const;
    double mass_below(double u) const;

    /// CSV export with header "distance,weight".
    std::string to_csv() const;

private:
    std::vector<Group> groups_;
    std::vector<double> cum_cost_;   ///< cumulative w*d by group
    std::vector<double> cum_weight_; ///< cumulative w by group
    double total_weight_ = 0.0;
    double total_cost_ = 0.0;
};

/// Profile of set distances over the atoms of `mu` under `set_distance`.
template <class State>
DistanceProfile build_profile(const EmpiricalMeasure<State>& mu,
                              const std::function<double(const State&)>& set_distance) {
    std::vector<double> d(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        d[i] = set_distance(mu.point(i));
        if (!(d[i] >= 0.0) || !std::isfinite(d[i]))
            throw InvalidInput("build_profile: set distances must be finite and >= 0");
    }
    return DistanceProfile(std::move(d), mu.weights());
}

/// Threshold calibration h^{-1}(delta).
struct ThresholdResult {
    double u_star = 0.0;      ///< inf{u >= 0 : h(u) >= delta}; +inf when delta > total cost
    double lambda_star = 0.0; ///< 1/u_star; +inf sentinel at delta = 0 with mass off the set
};

/**
 * @brief u* = inf{u : h(u) >= delta} by a scan over the distinct distances;
 * lambda* = 1/u*.  delta = 0 gives u* = 0 (lambda* = +inf sentinel); delta
 * beyond the total cost gives u* = +inf, lambda* = 0.
 */
ThresholdResult calibrate_threshold(const DistanceProfile& profile, double delta);

/// Exact worst-case probability of the set and its dual diagnostics.
struct WorstCaseProbability {
    double value = 0.0;        ///< sup over the ambiguity set of P(A); exact dual value
    double lambda_star = 0.0;  ///< minimizer of the piecewise-linear dual (+inf at delta = 0)
    double u_star = 0.0;
    double c_lower = 0.0;      ///< mass-weighted cost strictly inside the threshold
    double c_upper = 0.0;      ///< ... including the threshold group
    double inflated_set_prob = 0.0; ///< mu{d <= u*}; interpretation-only companion value
    double randomization_p = 1.0;   ///< Bernoulli parameter for the threshold group
};

/**
 * @brief sup{ P_nu(A) : d_c(mu, nu) <= delta } for the set behind `profile`.
 *
 * Evaluates the piecewise-linear dual  min_{lambda >= 0} lambda delta +
 * sum_k w_k (1 - lambda d_k)^+  exactly over its breakpoint candidates.
 * The inflated-set probability mu{d <= u*} is reported alongside but the
 * returned value is always the dual optimum.
 */
WorstCaseProbability worst_case_probability(const DistanceProfile& profile, double delta);

/// (c_lower, c_upper) bounds at a positive threshold lambda.
std::pair<double, double> cbar_bounds(const DistanceProfile& profile, double lambda_star);

/**
 * @brief Streams draws from a worst-case coupling: X from mu and Y* equal to
 * the projection of X onto the set (distance below threshold), X itself
 * (above), or a Bernoulli(p) mix at the threshold.
 *
 * The projection contract — projection(x) in A and cost(x, projection(x)) =
 * set_distance(x) — is checked on every moved draw; violations raise
 * InvalidProjection.  The stream is deterministic given (seed, atom order).
 */
template <class State>
class WorstCaseCouplingSampler {
public:
    WorstCaseCouplingSampler(EmpiricalMeasure<State> mu,
                             std::function<double(const State&)> set_distance,
                             std::function<State(const State&)> projection,
                             std::function<double(const State&, const State&)> cost,
                             double delta,
                             std::uint64_t seed,
                             double contract_tol = 1e-9)
        : mu_(std::move(mu)),
          set_distance_(std::move(set_distance)),
          projection_(std::move(projection)),
          cost_(std::move(cost)),
          engine_(make_engine(seed, 0)),
          contract_tol_(contract_tol) {
        if (!(delta >= 0.0)) throw InvalidInput("coupling sampler: delta must be >= 0");
        distances_.resize(mu_.size());
        for (std::size_t i = 0; i < mu_.size(); ++i) {
            distances_[i] = set_distance_(mu_.point(i));
            if (!(distances_[i] >= 0.0) || !std::isfinite(distances_[i]))
                throw InvalidInput("coupling sampler: set distances must be finite and >= 0");
        }
        DistanceProfile profile(distances_, mu_.weights());
        const WorstCaseProbability wc = worst_case_probability(profile, delta);
        u_star_ = wc.u_star;
        move_prob_at_threshold_ = wc.randomization_p;
        cdf_.resize(mu_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < mu_.size(); ++i) {
            acc += mu_.weight(i);
            cdf_[i] = acc;
        }
        cdf_.back() = 1.0;
    }

    struct Draw {
        State x;
        State y;
        bool moved = false;
        double cost = 0.0;
    };

    Draw next() {
        const double u = uniform_open(engine_);
        const std::size_t i = static_cast<std::size_t>(
            std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
        const State& x = mu_.point(i);
        const double d = distances_[i];
        bool move;
        if (d < u_star_) {
            move = true;
        } else if (d > u_star_) {
            move = false;
        } else {
            move = uniform_open(engine_) < move_prob_at_threshold_;
        }
        if (!move || d == 0.0) return Draw{x, x, false, 0.0};
        State y = projection_(x);
        const double dy = set_distance_(y);
        const double cxy = cost_(x, y);
        if (std::abs(dy) > contract_tol_)
            throw InvalidProjection("coupling sampler: projection left the target set (distance " +
                                    std::to_string(dy) + ")");
        if (std::abs(cxy - d) > contract_tol_ * (1.0 + std::abs(d)))
            throw InvalidProjection("coupling sampler: projection cost " + std::to_string(cxy) +
                                    " differs from set distance " + std::to_string(d));
        return Draw{x, std::move(y), true, cxy};
    }

    double u_star() const noexcept { return u_star_; }
    double threshold_move_probability() const noexcept { return move_prob_at_threshold_; }

private:
    EmpiricalMeasure<State> mu_;
    std::function<double(const State&)> set_distance_;
    std::function<State(const State&)> projection_;
    std::function<double(const State&, const State&)> cost_;
    std::vector<double> distances_;
    std::vector<double> cdf_;
    std::mt19937_64 engine_;
    double u_star_ = 0.0;
    double move_prob_at_threshold_ = 1.0;
    double contract_tol_ = 1e-9;
};

} // namespace otrisk
