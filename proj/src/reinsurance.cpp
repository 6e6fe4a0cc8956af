#include "otrisk/reinsurance.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/numerics.hpp"
#include "otrisk/paths.hpp"
#include "otrisk/rng.hpp"

namespace otrisk {

namespace {

void require_reinsurance_model(const ClaimModel& model, double b) {
    model.validate();
    if (!model.theta.has_value()) {
        throw InvalidInput("reinsurance: the model needs a reinsurance loading theta");
    }
    if (!(std::isfinite(b) && b >= 0.0 && b <= 1.0)) {
        throw InvalidInput("reinsurance: retention b must lie in [0, 1]");
    }
}

/// Exact draw of max over one step of a Brownian bridge from a to b with
/// variance vol^2 * h, by inverting the bridge-maximum CDF at a uniform.
double bridge_max(double a, double b, double vol2h, double u) {
    const double d = b - a;
    return 0.5 * (a + b + std::sqrt(d * d - 2.0 * vol2h * std::log(u)));
}

/// One exact sample of sup_{t<=T} (a2 B(t) - a1 t) using n_steps bridge maxima.
double sample_sup(double a1, double a2, double horizon, std::size_t n_steps,
                  std::mt19937_64& eng) {
    const double h = horizon / static_cast<double>(n_steps);
    const double vol2h = a2 * a2 * h;
    const double sqrt_h = std::sqrt(h);
    double x = 0.0;
    double best = 0.0; // X(0) = 0
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double x_next = x + a2 * sqrt_h * normal_draw(eng) - a1 * h;
        const double m = bridge_max(x, x_next, vol2h, uniform_open(eng));
        best = std::max(best, m);
        x = x_next;
    }
    return best;
}

ExpectedMaxResult expected_max_mc(double a1, double a2, double horizon,
                                  const ExpectedMaxOptions& opts) {
    if (opts.n_paths < 2) {
        throw InvalidInput("expected_max_loss: need at least two Monte Carlo paths");
    }
    if (opts.n_steps == 0) {
        throw InvalidInput("expected_max_loss: n_steps must be positive");
    }
    std::vector<double> sups(opts.n_paths);
    for (std::size_t i = 0; i < opts.n_paths; ++i) {
        auto eng = make_engine(opts.seed, i);
        sups[i] = sample_sup(a1, a2, horizon, opts.n_steps, eng);
    }
    const MeanSd ms = mean_sd(sups);
    ExpectedMaxResult r;
    r.value = ms.mean;
    r.std_error = ms.sd / std::sqrt(static_cast<double>(ms.n));
    r.method_used = ExpectedMaxMethod::MonteCarlo;
    return r;
}

ExpectedMaxResult expected_max_tail(double a1, double a2, double horizon, double tol) {
    auto tail = [&](double u) { return brownian_crossing_prob(u, a1, a2, horizon); };
    double upper = std::max(1.0, 4.0 * a2 * std::sqrt(horizon));
    double total = adaptive_simpson(tail, 0.0, upper, tol);
    for (int i = 0; i < 60; ++i) {
        const double piece = adaptive_simpson(tail, upper, 2.0 * upper, tol);
        total += piece;
        upper *= 2.0;
        if (piece <= tol * (1.0 + total) && tail(upper) < 1e-16) {
            ExpectedMaxResult r;
            r.value = total;
            r.std_error = 0.0;
            r.method_used = ExpectedMaxMethod::TailIntegration;
            return r;
        }
    }
    throw SolverError("expected_max_loss: tail integration failed to converge");
}

} // namespace

double retained_drift(const ClaimModel& model, double b) {
    require_reinsurance_model(model, b);
    const double theta = *model.theta;
    return (b * theta - (theta - model.eta)) * model.claim_rate * model.m1;
}

double retained_vol(const ClaimModel& model, double b) {
    require_reinsurance_model(model, b);
    return b * std::sqrt(model.claim_rate * model.m2);
}

ExpectedMaxResult expected_max_loss(const ClaimModel& model, double b,
                                    const ExpectedMaxOptions& options) {
    const double a1 = retained_drift(model, b);
    const double a2 = retained_vol(model, b);
    if (a2 == 0.0) {
        // Deterministic path: the supremum of -a1 t is attained at 0 or T.
        ExpectedMaxResult r;
        r.value = std::max(0.0, -a1 * model.horizon);
        r.std_error = 0.0;
        r.method_used = options.method;
        return r;
    }
    if (options.method == ExpectedMaxMethod::TailIntegration) {
        // The closed-form crossing probability needs nonnegative drift to stay
        // integrable over levels; otherwise the Monte Carlo path is exact too.
        if (a1 >= 0.0) {
            return expected_max_tail(a1, a2, model.horizon, options.tail_tol);
        }
        return expected_max_mc(a1, a2, model.horizon, options);
    }
    return expected_max_mc(a1, a2, model.horizon, options);
}

ExpectedMaxResult robust_loss(const ClaimModel& model, double b, double delta,
                              const ExpectedMaxOptions& options) {
    if (!(std::isfinite(delta) && delta >= 0.0)) {
        throw InvalidInput("robust_loss: delta must be nonnegative and finite");
    }
    ExpectedMaxResult r = expected_max_loss(model, b, options);
    r.value += retained_vol(model, b) * std::sqrt(delta);
    return r;
}

OptimizeBResult optimize_b(const ClaimModel& model, double delta,
                           const OptimizeBOptions& options) {
    require_reinsurance_model(model, std::clamp(options.b_min, 0.0, 1.0));
    if (!(std::isfinite(delta) && delta >= 0.0)) {
        throw InvalidInput("optimize_b: delta must be nonnegative and finite");
    }
    if (!(options.b_min >= 0.0 && options.b_max <= 1.0 && options.b_min < options.b_max)) {
        throw InvalidInput("optimize_b: need 0 <= b_min < b_max <= 1");
    }
    if (!(options.coarse_step > 0.0 && options.refine_tol > 0.0)) {
        throw InvalidInput("optimize_b: steps and tolerances must be positive");
    }

    // All evaluations share RNG streams (the seed is fixed per path index), so
    // the sampled objective varies smoothly in b.
    ExpectedMaxOptions inner = options.inner;
    inner.method = ExpectedMaxMethod::MonteCarlo;
    std::size_t evaluations = 0;
    auto loss = [&](double b) {
        ++evaluations;
        return robust_loss(model, b, delta, inner).value;
    };

    const double lo = options.b_min;
    const double hi = options.b_max;
    const auto n_cells = static_cast<std::size_t>(std::ceil((hi - lo) / options.coarse_step));
    std::vector<double> grid;
    grid.reserve(n_cells + 1);
    for (std::size_t i = 0; i <= n_cells; ++i) {
        grid.push_back(std::min(hi, lo + static_cast<double>(i) * options.coarse_step));
    }
    std::vector<double> vals(grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = loss(grid[i]);
        if (vals[i] < vals[best]) best = i;
    }

    const double bracket_lo = grid[best == 0 ? 0 : best - 1];
    const double bracket_hi = grid[std::min(best + 1, grid.size() - 1)];
    const GoldenResult g =
        golden_section_min(loss, bracket_lo, bracket_hi, options.refine_tol);

    double sel_b = g.x;
    double sel_v = g.value;
    if (vals[best] < sel_v) {
        sel_b = grid[best];
        sel_v = vals[best];
    }

    if (options.flat_tol > 0.0) {
        // Under common random numbers every per-path supremum is convex in b
        // (each bridge maximum is a norm of a linear map of the drift and
        // volatility), so the sampled objective is convex and the tie set
        // { b : loss(b) <= threshold } is an interval.  Bisect for its left
        // edge and report that edge: the smallest statistically
        // indistinguishable retention.
        const double threshold = sel_v + options.flat_tol * (1.0 + std::abs(sel_v));
        double edge_hi = sel_b; // tied by construction
        double edge_hi_val = sel_v;
        double edge_lo = std::max(options.b_min, sel_b - options.coarse_step);
        for (std::size_t i = 0; i < grid.size() && grid[i] < sel_b; ++i) {
            if (vals[i] <= threshold) {
                edge_hi = grid[i];
                edge_hi_val = vals[i];
                edge_lo = (i == 0) ? grid[0] : grid[i - 1];
                break;
            }
        }
        while (edge_hi - edge_lo > options.refine_tol) {
            const double mid = 0.5 * (edge_lo + edge_hi);
            const double v = loss(mid);
            if (v <= threshold) {
                edge_hi = mid;
                edge_hi_val = v;
            } else {
                edge_lo = mid;
            }
        }
        sel_b = edge_hi;
        sel_v = edge_hi_val;
    }

    OptimizeBResult res;
    res.b_star = sel_b;
    res.value = sel_v;
    res.delta = delta;
    res.seed = inner.seed;
    res.evaluations = evaluations;
    return res;
}

ShiftCheckResult verify_shift_reduction(const ClaimModel& model, double b,
                                        const std::vector<double>& lambdas,
                                        std::size_t n_paths, std::size_t n_steps,
                                        double shift_step, std::uint64_t seed) {
    const double a1 = retained_drift(model, b);
    const double a2 = retained_vol(model, b);
    if (lambdas.empty()) {
        throw InvalidInput("verify_shift_reduction: no lambda values given");
    }
    for (double l : lambdas) {
        if (!(std::isfinite(l) && l > 0.0)) {
            throw InvalidInput("verify_shift_reduction: lambdas must be positive");
        }
    }
    if (n_paths == 0 || n_steps == 0 || !(shift_step > 0.0)) {
        throw InvalidInput("verify_shift_reduction: paths, steps and shift_step must be positive");
    }

    ShiftCheckResult out;
    out.n_paths = n_paths;
    const double T = model.horizon;
    const double h = T / static_cast<double>(n_steps);
    const double sqrt_h = std::sqrt(h);
    for (std::size_t i = 0; i < n_paths; ++i) {
        auto eng = make_engine(seed, i);
        // Grid supremum of the loss functional along one sampled path.  Both
        // sides of the identity are evaluated on the same discrete path, so
        // discretization does not enter the comparison.
        double x = 0.0;
        double f_x = 0.0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            x += a2 * sqrt_h * normal_draw(eng) - a1 * h;
            f_x = std::max(f_x, x);
        }
        for (double lambda : lambdas) {
            const double closed = f_x + a2 * a2 / (4.0 * lambda);
            const double s_center = a2 / (2.0 * lambda);
            // A vertical shift s moves the functional by a2 * s at cost s^2.
            double enumerated = f_x;
            const long half_window = 2000;
            for (long j = -half_window; j <= half_window; ++j) {
                const double s = s_center + static_cast<double>(j) * shift_step;
                enumerated = std::max(enumerated, f_x + a2 * s - lambda * s * s);
            }
            out.max_deviation = std::max(out.max_deviation, std::abs(enumerated - closed));
        }
    }
    return out;
}

} // namespace otrisk
