#pragma once

#include <cstdint>
#include <vector>

#include "otrisk/measures.hpp"

namespace otrisk {

/**
 * Proportional reinsurance on the Brownian surrogate: the cedent retains a
 * fraction b of every claim and pays the reinsurer a loaded premium at safety
 * loading theta.  The retained aggregate loss, centered by the net premium,
 * is the running maximum of a drifted Brownian motion with
 *
 *   drift a1(b) = (b * theta - (theta - eta)) * nu * m1   (subtracted), and
 *   volatility a2(b) = b * sqrt(nu * m2).
 *
 * The model's theta must be set.
 */
double retained_drift(const ClaimModel& model, double b);
double retained_vol(const ClaimModel& model, double b);

enum class ExpectedMaxMethod {
    TailIntegration, ///< integrate the crossing probability (needs a1 >= 0)
    MonteCarlo       ///< exact running-maximum sampling via per-step bridge maxima
};

struct ExpectedMaxOptions {
    ExpectedMaxMethod method = ExpectedMaxMethod::TailIntegration;
    std::size_t n_paths = 20000;
    std::size_t n_steps = 1024;
    std::uint64_t seed = 1;
    double tail_tol = 1e-10; ///< adaptive-quadrature tolerance for tail integration
};

struct ExpectedMaxResult {
    double value = 0.0;
    double std_error = 0.0; ///< 0 for tail integration
    ExpectedMaxMethod method_used = ExpectedMaxMethod::TailIntegration;
};

/**
 * @brief E[sup_{t<=T} (a2 B(t) - a1 t)].
 *
 * Tail integration computes the integral of the level-crossing probability
 * and is exact up to quadrature error; it requires a nonnegative drift and
 * silently falls back to Monte Carlo otherwise.  The Monte Carlo estimator
 * samples each per-step maximum from the exact Brownian-bridge law, so it is
 * unbiased at any step count, and uses one RNG stream per path so estimates
 * share randomness across b (common random numbers).
 */
ExpectedMaxResult expected_max_loss(const ClaimModel& model, double b,
                                    const ExpectedMaxOptions& options = {});

/// Worst-case expected retained loss over the ambiguity ball of radius delta:
/// expected_max_loss + a2(b) * sqrt(delta).
ExpectedMaxResult robust_loss(const ClaimModel& model, double b, double delta,
                              const ExpectedMaxOptions& options = {});

struct OptimizeBOptions {
    double b_min = 0.0;
    double b_max = 1.0;
    double coarse_step = 0.02; ///< grid pitch of the bracketing scan
    double refine_tol = 1e-3;  ///< golden-section width on the bracketed interval
    /// Relative flatness tolerance: retentions whose loss is within
    /// flat_tol * (1 + |min|) of the minimum are treated as ties, and the
    /// smallest such b is reported.  The objective is often flat near its
    /// minimum relative to the Monte Carlo standard error, and ceding more
    /// risk is the conservative way to break such ties.  Set to 0 to report
    /// the raw sampled argmin instead.
    double flat_tol = 1e-3;
    ExpectedMaxOptions inner;  ///< Monte Carlo settings shared across all b
};

struct OptimizeBResult {
    double b_star = 0.0;
    double value = 0.0; ///< robust loss at b_star
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::size_t evaluations = 0;
};

/**
 * @brief Minimizes the robust retained loss over the retention fraction b.
 *
 * Scans a coarse grid, then golden-sections the bracketing interval.  All
 * evaluations use the Monte Carlo estimator with common random numbers, so
 * the sampled objective is a smooth (in fact convex) function of b and the
 * argmin is stable.  Finally the flat-basin tie rule of OptimizeBOptions is
 * applied: the reported b_star is the smallest retention whose sampled loss
 * is within flat_tol (relative) of the minimum.
 */
OptimizeBResult optimize_b(const ClaimModel& model, double delta,
                           const OptimizeBOptions& options = {});

struct ShiftCheckResult {
    double max_deviation = 0.0;
    std::size_t n_paths = 0;
};

/**
 * @brief Verifies the vertical-shift reduction of the inner maximization.
 *
 * For the running-maximum loss under squared sup-norm cost, the inner
 * problem sup_y { f(y) - lambda * cost(x, y)^2 } is attained on constant
 * vertical shifts of x and equals f(x) + a2^2 / (4 lambda).  This check
 * enumerates shifts around the analytic maximizer a2 / (2 lambda) on sampled
 * paths and reports the worst absolute deviation from the closed form.
 */
ShiftCheckResult verify_shift_reduction(const ClaimModel& model, double b,
                                        const std::vector<double>& lambdas,
                                        std::size_t n_paths, std::size_t n_steps,
                                        double shift_step, std::uint64_t seed);

} // namespace otrisk
