#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/measures.hpp"
#include "otrisk/paths.hpp"

namespace otrisk {

/**
 * @brief Standard Brownian motion sampled on a uniform grid, generated lazily.
 *
 * `value(k)` returns B(k * step) and extends the path on demand (the consumer
 * never sees path exhaustion; a fixed-values variant for tests throws
 * InvalidInput instead of extending).
 */
class BrownianSource {
public:
    BrownianSource(double step, std::uint64_t seed);
    /// Fixed node values (tests); value(k) beyond the data throws.
    BrownianSource(double step, std::vector<double> values);

    double step() const noexcept { return step_; }
    double value(std::size_t k);
    std::size_t generated() const noexcept { return values_.size(); }

private:
    double step_;
    bool generative_;
    std::mt19937_64 eng_;
    std::vector<double> values_;
};

/// Output of the drawdown embedding of a compensated compound process into a
/// Brownian path (both returned with the final sign flip applied).  Crossings
/// sharing a model-clock coordinate appear individually in the diagnostic
/// vectors but merge into a single jump node of `z`.
struct EmbeddingResult {
    PathGrid z;        ///< compensated claims path: jumps +X_j at jump_times, slope -m1
    PathGrid brownian; ///< the coupled Brownian source path on its own clock
    std::vector<double> tau;        ///< drawdown crossing times (Brownian clock)
    std::vector<double> jump_times; ///< jump times of z (model clock)
    std::vector<double> claims_used;
    double horizon = 0.0;           ///< covered model-time horizon
    /// Largest source drawdown over the walk.  Under the time change that
    /// matches the two clocks, the coupled paths agree except for the current
    /// drawdown, so this is exactly their sup-distance (per unit volatility).
    double max_drawdown = 0.0;
};

/**
 * @brief Embeds the compensated compound process with the given claims into
 * the Brownian source: tau_{j+1} is the first time the running-max drawdown
 * since tau_j reaches claim j+1 (located by linear interpolation inside the
 * bracketing grid cell), and the model clock runs along
 * A = cumulative claims + current excursion maximum, at rate m1.
 *
 * The vector overload consumes every claim and ends at the last jump; the
 * provider overload embeds until the model clock covers `horizon`.  A claim
 * at or below grid_tol cannot be resolved on the grid (ResolutionError).
 */
EmbeddingResult skorokhod_embed(BrownianSource& source,
                                const std::vector<double>& claims,
                                double m1, double grid_tol = 1e-9);
EmbeddingResult skorokhod_embed(BrownianSource& source,
                                const std::function<double()>& claim_provider,
                                double m1, double horizon, double grid_tol = 1e-9);

/// Lean single-crossing walk: model-clock spacing to the first jump.
/// (Equals the excursion-maximum growth divided by m1.)
double first_jump_spacing(BrownianSource& source, double claim, double m1,
                          double grid_tol = 1e-9);

/**
 * @brief Estimated transport cost between the embedded claims reserve and
 * its Brownian surrogate, to the p-th power.
 *
 * The coupling compares the paths at matched clocks (the embedding's time
 * change).  There the premium terms cancel and the paths differ exactly by
 * the source's current drawdown scaled by sqrt(m2), so the constructed pair
 * certifies the sup-distance from above by U = sqrt(m2) * max_drawdown.  No
 * continuous path can track a jump closer than half its size, which
 * certifies U/2 from below; the returned estimate is the geometric midpoint
 * of that bracket, (U/sqrt 2)^p.  The embedding must run on normalized
 * claims X/sqrt(m2) with slope m1/sqrt(m2) over the unit-rate horizon
 * nu * T.
 */
double coupling_cost(const EmbeddingResult& embedding, const ClaimModel& model);

struct CalibrationConfig {
    std::size_t replications = 500;
    double confidence = 0.95;
    double grid_step = 1e-3; ///< Brownian grid step for the embedding
    std::uint64_t seed = 1;
    double grid_tol = 1e-9;
};

struct CalibrationResult {
    double delta_hat = 0.0;    ///< median coupling cost (the calibrated radius)
    double ci_lo = 0.0;        ///< distribution-free CI for the median, lower end
    double ci_hi = 0.0;        ///< distribution-free CI for the median, upper end
    double median_cost = 0.0;  ///< sample median of the per-replication costs
    double mean_cost = 0.0;    ///< diagnostics: sample mean of the costs
    double sd_cost = 0.0;      ///< diagnostics: sample standard deviation
    std::size_t replications = 0;
    double confidence = 0.95;
    std::uint64_t seed = 0;
    std::vector<double> costs; ///< per-replication coupling costs
};

/**
 * @brief Aggregates per-replication coupling costs into an ambiguity radius
 * (separable for testing).
 *
 * delta_hat is the sample *median* cost.  Coupling costs of heavy-tailed
 * claims inherit the claim tail (the sup-distance is driven by the largest
 * claim), so the sample mean need not satisfy a CLT and can sit far above
 * the typical coupling discrepancy; the median is the assumption-free
 * location estimate.  A distribution-free confidence interval for the median
 * is reported alongside (ranks from the normal approximation to the
 * Binomial(n, 1/2) order statistics, clamped to the sample range — small n
 * therefore yields [min, max]), together with the sample mean and standard
 * deviation as diagnostics.
 */
CalibrationResult delta_from_costs(const std::vector<double>& costs,
                                   double confidence, std::uint64_t seed);

/**
 * @brief Ambiguity radius from repeated embeddings: runs `replications`
 * independent couplings of the claim process against a Brownian surrogate and
 * returns the median transport-cost estimate with its confidence interval.
 */
CalibrationResult estimate_delta(const ClaimModel& model,
                                 const std::function<double(std::mt19937_64&)>& claim_sampler,
                                 const CalibrationConfig& config);

} // namespace otrisk
