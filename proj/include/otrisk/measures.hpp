#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/numerics.hpp"

namespace otrisk {

/**
 * @brief Finitely supported probability measure over an arbitrary state type.
 *
 * Atoms are stored as (point, weight) with weights > 0 renormalized once at
 * construction; `total_weight()` is 1 up to pairwise-summation accuracy
 * (<= 1e-12 for up to 1e7 atoms).  States may be scalars, vectors or whole
 * path grids — the measure never inspects them.
 */
template <class State>
class EmpiricalMeasure {
public:
    /// Uniform weights 1/n over `points`.
    static EmpiricalMeasure from_samples(std::vector<State> points) {
        if (points.empty()) throw InvalidInput("EmpiricalMeasure: no atoms");
        std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
        return EmpiricalMeasure(std::move(points), std::move(w), /*renormalize=*/false);
    }

    /// Explicit weights; must be positive, renormalized to total 1.
    EmpiricalMeasure(std::vector<State> points, std::vector<double> weights)
        : EmpiricalMeasure(std::move(points), std::move(weights), /*renormalize=*/true) {}

    std::size_t size() const noexcept { return points_.size(); }
    const State& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<State>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    double total_weight() const { return pairwise_sum(weights_); }

    /// Weighted expectation of g over the atoms (pairwise reduction).
    double expectation(const std::function<double(const State&)>& g) const {
        std::vector<double> vals(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) vals[i] = g(points_[i]);
        return pairwise_dot(weights_, vals);
    }

private:
    EmpiricalMeasure(std::vector<State> points, std::vector<double> weights, bool renormalize)
        : points_(std::move(points)), weights_(std::move(weights)) {
        if (points_.empty()) throw InvalidInput("EmpiricalMeasure: no atoms");
        if (points_.size() != weights_.size())
            throw InvalidInput("EmpiricalMeasure: points/weights size mismatch");
        for (double w : weights_) {
            if (!(w > 0.0) || !std::isfinite(w))
                throw InvalidInput("EmpiricalMeasure: weights must be positive and finite");
        }
        if (renormalize) {
            const double total = pairwise_sum(weights_);
            if (!(total > 0.0)) throw InvalidInput("EmpiricalMeasure: zero total weight");
            for (double& w : weights_) w /= total;
        }
    }

    std::vector<State> points_;
    std::vector<double> weights_;
};

/// Base metric entering a transport cost c(x,y) = metric(x,y)^p.
enum class BaseMetric {
    Euclidean,
    WeightedEuclidean,   ///< sqrt(sum_k weight_k (x_k - y_k)^2)
    SupNormPath,         ///< sup_t |x(t) - y(t)| on merged grids
    J1UpperBoundPath,    ///< identity-time-change upper bound of the J1 metric
};

/**
 * @brief Transport cost specification: metric choice, power p >= 1 and budget
 * delta >= 0.
 */
struct CostSpec {
    BaseMetric metric = BaseMetric::Euclidean;
    double p = 1.0;
    double delta = 0.0;
    std::vector<double> metric_weights; ///< WeightedEuclidean only

    void validate() const {
        if (!(p >= 1.0)) throw InvalidInput("CostSpec: p must be >= 1");
        if (!(delta >= 0.0)) throw InvalidInput("CostSpec: delta must be >= 0");
        if (metric == BaseMetric::WeightedEuclidean) {
            if (metric_weights.empty())
                throw InvalidInput("CostSpec: weighted metric needs weights");
            for (double w : metric_weights)
                if (!(w > 0.0)) throw InvalidInput("CostSpec: metric weights must be > 0");
        }
    }

    /// Cost function on scalar states: |x - y|^p (Euclidean only).
    std::function<double(double, double)> scalar_cost() const {
        validate();
        if (metric != BaseMetric::Euclidean)
            throw Unsupported("CostSpec: scalar cost requires the Euclidean metric");
        const double pw = p;
        return [pw](double x, double y) { return std::pow(std::abs(x - y), pw); };
    }

    /// Cost function on vector states.
    std::function<double(const std::vector<double>&, const std::vector<double>&)>
    vector_cost() const;
};

/**
 * @brief Cramer-Lundberg claim model: Poisson claim rate, safety loadings and
 * the first two claim moments.
 *
 * `eta` is the insurer's premium loading; `theta` (optional) the reinsurance
 * premium loading and must exceed `eta` when present.  `horizon` is the time
 * horizon T and `p` the transport-cost power.
 */
struct ClaimModel {
    double claim_rate = 1.0; ///< nu
    double eta = 0.1;
    std::optional<double> theta;
    double m1 = 0.0;         ///< E[X]
    double m2 = 0.0;         ///< E[X^2]
    double horizon = 100.0;  ///< T
    double p = 2.0;

    void validate() const {
        if (!(claim_rate > 0.0)) throw InvalidInput("ClaimModel: claim_rate must be > 0");
        if (!(eta > 0.0)) throw InvalidInput("ClaimModel: eta must be > 0");
        if (theta && !(*theta > eta))
            throw InvalidInput("ClaimModel: theta must exceed eta");
        if (!(m1 > 0.0)) throw InvalidInput("ClaimModel: m1 must be > 0");
        if (!(m2 >= m1 * m1))
            throw InvalidInput("ClaimModel: m2 must be >= m1^2");
        if (!(horizon > 0.0)) throw InvalidInput("ClaimModel: horizon must be > 0");
        if (!(p >= 1.0)) throw InvalidInput("ClaimModel: p must be >= 1");
    }

    double premium_rate() const { return (1.0 + eta) * claim_rate * m1; }
    double surrogate_drift() const { return eta * claim_rate * m1; }       ///< drift of the ruin functional
    double surrogate_vol() const { return std::sqrt(claim_rate * m2); }    ///< sqrt(nu m2)
};

/// First two sample moments (m1, m2) of claim sizes; claims must be positive.
std::pair<double, double> estimate_moments(const std::vector<double>& claims);

/**
 * @brief Read one claim size per row from a CSV / text stream.
 *
 * An optional single header row is skipped when its first field is not
 * numeric.  Blank rows are ignored; any non-numeric data row raises
 * ParseError with its 1-based row number; an empty file raises InvalidInput.
 */
std::vector<double> read_claims_csv(std::istream& in);
std::vector<double> read_claims_csv_file(const std::string& path);

} // namespace otrisk
