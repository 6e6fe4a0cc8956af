#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/measures.hpp"

namespace otrisk {

enum class PathKind {
    PiecewiseConstantRcll, ///< holds the node value until the next node
    PiecewiseLinear,       ///< interpolates between nodes
};

/**
 * @brief A cadlag path sampled on a strictly increasing grid starting at 0.
 *
 * Between nodes the path is constant or linear according to `kind`.  A node
 * may additionally carry a pre-jump (left-limit) value in `pre_jump`
 * (NaN = no jump); this represents piecewise-linear-between-jumps paths
 * (compensated claims, reserves) exactly.  Sup/inf functionals over such a
 * grid are exact when evaluated at node values and left limits, because the
 * path is affine between consecutive nodes.
 */
struct PathGrid {
    std::vector<double> times;
    std::vector<double> values;
    PathKind kind = PathKind::PiecewiseLinear;
    std::vector<double> pre_jump; ///< empty or aligned with times; NaN where continuous

    void validate() const;
    double horizon() const { return times.back(); }

    /// Right-continuous value at t (t must lie inside [0, horizon]).
    double value_at(double t) const;
    /// Left limit at t; equals value_at away from jump nodes.
    double left_limit_at(double t) const;
};

/// Two-component path on a common grid.
struct Path2Grid {
    std::vector<double> times;
    std::vector<double> v1;
    std::vector<double> v2;
    PathKind kind = PathKind::PiecewiseLinear;

    void validate() const;
    double horizon() const { return times.back(); }
};

/// CSV exports with headers "t,value" / "t,v1,v2".
std::string path_to_csv(const PathGrid& path);
std::string path_to_csv(const Path2Grid& path);

/// Uniform grid with n_steps+1 nodes carrying  vol * B(t) - drift * t.
PathGrid simulate_brownian(double horizon, std::size_t n_steps,
                           double drift, double vol, std::uint64_t seed);

/**
 * @brief Reserve path R(t) = u0 + (1+eta) nu m1 t - sum_{i <= N_t} X_i with
 * Poisson(nu) jump times and claims drawn from `claim_sampler`.
 *
 * Returned as a piecewise-constant grid sampled at jump times plus a uniform
 * premium-sampling grid (step `sample_step`, default horizon/4096); jump nodes
 * carry the pre-jump reserve as left limit.
 */
PathGrid simulate_compound_poisson_risk(const ClaimModel& model,
                                        const std::function<double(std::mt19937_64&)>& claim_sampler,
                                        double u0, std::uint64_t seed,
                                        double sample_step = 0.0);

/**
 * @brief Identity-time-change upper bound of the J1 distance, raised to p:
 * (sup_t |x(t) - y(t)|)^p over the merged grid, kind-aware, including left
 * limits at jump nodes.  Horizons must agree.
 */
double j1_upper_bound(const PathGrid& x, const PathGrid& y, double p);
double j1_upper_bound(const Path2Grid& x, const Path2Grid& y, double p);

/// One-dimensional ruin set {x : sup_t (scale x(t) - drift t) >= level}.
struct RuinSet1D {
    double level = 0.0; ///< u >= 0
    double scale = 1.0; ///< sqrt(nu m2) > 0
    double drift = 0.0; ///< eta nu m1 >= 0
    double p = 2.0;

    void validate() const;
    static RuinSet1D for_model(double u, const ClaimModel& model) {
        return {u, model.surrogate_vol(), model.surrogate_drift(), model.p};
    }
};

/// sup_t (scale x(t) - drift t) over the grid (nodes and left limits).
double drifted_sup(const PathGrid& path, double scale, double drift);

/// J1^p distance of a path to the ruin set: 0 on the set, else (level - sup)^p.
double ruin_set_distance_1d(const PathGrid& path, const RuinSet1D& set);

/**
 * @brief P( sup_{t <= T} (vol B(t) - drift t) >= level ), by the reflection
 * formula; exact for Brownian paths.  level <= 0 returns 1; vol = 0 collapses
 * to the deterministic ramp indicator.
 */
double brownian_crossing_prob(double level, double drift, double vol, double horizon);

/// Robust one-dimensional ruin bound at budget delta.
struct PsiRob1D {
    double psi_rob = 0.0;     ///< crossing probability at the shifted level
    double u_tilde = 0.0;     ///< u - (1/lambda*)^{1/p}
    double lambda_star = 0.0; ///< threshold from the sampled profile
    double u_star = 0.0;      ///< h^{-1}(delta)
    double dual_value = 0.0;  ///< exact piecewise-linear dual on the sampled profile
    double psi_baseline = 0.0;///< crossing probability at the original level
};

/**
 * @brief Worst-case ruin probability over the delta-ball: calibrates the
 * threshold on the sampled distance profile and evaluates the closed-form
 * crossing probability at the shifted level u~ = u - (1/lambda*)^{1/p}.
 *
 * The exact dual value on the sampled profile is reported alongside; the two
 * differ by the sampling and discretization error of the profile.
 */
PsiRob1D psi_rob_1d(double u, const ClaimModel& model, double delta,
                    const std::vector<PathGrid>& mu_samples);

/// Same, from precomputed drifted sups of the baseline sample.
PsiRob1D psi_rob_from_sups(double u, const ClaimModel& model, double delta,
                           const std::vector<double>& sups);

/// Symmetric two-line ruin set parameter; ruin when inf_t (beta x1 + x2) <= 0
/// or inf_t (x1 + beta x2) <= 0.
struct RuinSet2D {
    double beta = 0.0; ///< in [0, 1]
    void validate() const;
};

/// The two half-space functionals (inf_t of each linear form) over the grid.
std::array<double, 2> half_space_infima(const Path2Grid& path, double beta);

/// J1^2 distance to the two-line ruin set:
/// (1+beta^2)^{-1} min_i (inf_t L_i x)^2, zero on the set.
double ruin_set_distance_2d(const Path2Grid& path, const RuinSet2D& set);

/// Threshold on the linear-form infimum implied by lambda*: sqrt((1+beta^2)/lambda*).
double inflated_level_2d(double lambda_star, double beta);

/// Binomial Monte Carlo estimate with a normal-approximation CI.
struct BinomialEstimate {
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n = 0;
};

/// Configuration of the two-dimensional first-passage simulation
/// dR(t) = m dt + chol(sigma) dB(t), R(0) = u * b.
struct FirstPassage2DConfig {
    double u = 0.0;
    std::array<double, 2> b{0.5, 0.5};
    std::array<double, 2> drift{0.0, 0.0};
    std::array<std::array<double, 2>, 2> sigma{{{1.0, 0.0}, {0.0, 1.0}}}; ///< covariance
    double beta = 0.0;
    double level = 0.0; ///< passage threshold on min_i inf_t L_i R
    double horizon = 1.0;
    std::size_t n_steps = 0;  ///< 0 = default resolution
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double confidence = 0.95;

    void validate() const;
};

/// P( min_i inf_t L_i R(t) <= level ) by Monte Carlo.
BinomialEstimate first_passage_prob_2d(const FirstPassage2DConfig& config);

/// Default grid resolution: 2^12 steps per horizon ratio T/100 (minimum 64).
std::size_t default_n_steps(double horizon);

} // namespace otrisk
