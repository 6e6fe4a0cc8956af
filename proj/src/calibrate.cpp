#include "otrisk/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "otrisk/numerics.hpp"
#include "otrisk/rng.hpp"

namespace otrisk {

namespace {

constexpr std::size_t kMaxGridNodes = 100'000'000;

} // namespace

BrownianSource::BrownianSource(double step, std::uint64_t seed)
    : step_(step), generative_(true), eng_(make_engine(seed, 0x6272)), values_{0.0} {
    if (!(std::isfinite(step) && step > 0.0)) {
        throw InvalidInput("BrownianSource: step must be positive and finite");
    }
}

BrownianSource::BrownianSource(double step, std::vector<double> values)
    : step_(step), generative_(false), eng_(), values_(std::move(values)) {
    if (!(std::isfinite(step) && step > 0.0)) {
        throw InvalidInput("BrownianSource: step must be positive and finite");
    }
    if (values_.empty() || values_.front() != 0.0) {
        throw InvalidInput("BrownianSource: fixed values must start at 0");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw InvalidInput("BrownianSource: fixed values must be finite");
        }
    }
}

double BrownianSource::value(std::size_t k) {
    if (k < values_.size()) {
        return values_[k];
    }
    if (!generative_) {
        throw InvalidInput("BrownianSource: fixed path exhausted at node " + std::to_string(k));
    }
    if (k >= kMaxGridNodes) {
        throw SolverError("BrownianSource: grid exceeded " + std::to_string(kMaxGridNodes) +
                          " nodes without terminating");
    }
    const double sqrt_h = std::sqrt(step_);
    while (values_.size() <= k) {
        values_.push_back(values_.back() + sqrt_h * normal_draw(eng_));
    }
    return values_.back();
}

namespace {

struct WalkResult {
    std::vector<double> tau;        // crossing times, Brownian clock
    std::vector<double> a_at_tau;   // model-clock coordinate A(tau_j)
    std::vector<double> psi_after;  // cumulative claims after each crossing
    std::vector<double> claims;
    double s_end = 0.0;             // Brownian time reached
    double a_end = 0.0;             // model-clock coordinate reached
    double max_drawdown = 0.0;      // largest drawdown seen (crossed or partial)
};

void validate_claim(double c, double grid_tol) {
    if (!(std::isfinite(c) && c > 0.0)) {
        throw InvalidInput("skorokhod_embed: claims must be positive and finite");
    }
    if (c <= grid_tol) {
        throw ResolutionError("skorokhod_embed: claim " + std::to_string(c) +
                              " is below the grid tolerance " + std::to_string(grid_tol));
    }
}

/**
 * Walks the Brownian grid cell by cell.  Within each linear cell the running
 * excursion maximum either tracks the path upward (no crossing possible) or
 * stays flat while the drawdown grows, in which case every claim-sized
 * drawdown crossing inside the cell is located exactly on the interpolant.
 * A = psi + excursion max is continuous and nondecreasing; with a_target > 0
 * the walk stops exactly where A reaches it.
 */
WalkResult embed_walk(BrownianSource& src,
                      const std::function<std::optional<double>()>& next_claim,
                      double a_target, double grid_tol) {
    WalkResult out;
    const double h = src.step();

    std::optional<double> claim = next_claim();
    if (!claim) {
        if (a_target > 0.0) {
            throw InvalidInput("skorokhod_embed: no claims supplied for a positive horizon");
        }
        throw InvalidInput("skorokhod_embed: no claims to embed");
    }
    validate_claim(*claim, grid_tol);

    double psi = 0.0; // cumulative embedded claims
    double m = 0.0;   // running maximum of the current excursion

    for (std::size_t k = 1;; ++k) {
        if (k >= kMaxGridNodes) {
            throw SolverError("skorokhod_embed: failed to terminate within the node budget");
        }
        const double b0 = src.value(k - 1);
        const double b1 = src.value(k);
        double s_cur = static_cast<double>(k - 1) * h;
        double b_cur = b0;
        const double s1 = static_cast<double>(k) * h;

        // Several crossings can occur inside one falling cell.
        for (;;) {
            if (a_target > 0.0 && psi + m >= a_target) {
                out.s_end = s_cur;
                out.a_end = a_target;
                return out;
            }
            if (b1 >= b_cur) {
                const double new_m = std::max(m, b1);
                if (a_target > 0.0 && psi + new_m >= a_target) {
                    const double target_m = a_target - psi;
                    double s_star = s_cur;
                    if (target_m > m) {
                        // b must rise through target_m inside (s_cur, s1].
                        s_star = s_cur + (s1 - s_cur) * (target_m - b_cur) / (b1 - b_cur);
                    }
                    out.s_end = s_star;
                    out.a_end = a_target;
                    return out;
                }
                m = new_m;
                break; // next cell
            }

            // Falling: the excursion maximum is frozen, the drawdown grows.
            const double dd_end = m - b1;
            if (dd_end < *claim) {
                // Drawdown peaks at the cell end (the fall is monotone); a
                // rise resets it, so partial peaks are only visible here.
                out.max_drawdown = std::max(out.max_drawdown, dd_end);
                break; // no crossing in the remainder of this cell
            }
            const double level = m - *claim;
            out.max_drawdown = std::max(out.max_drawdown, *claim);
            const double s_star = s_cur + (s1 - s_cur) * (b_cur - level) / (b_cur - b1);
            psi += *claim;
            m = level; // a new excursion starts at its own maximum
            out.tau.push_back(s_star);
            out.psi_after.push_back(psi);
            out.claims.push_back(*claim);
            out.a_at_tau.push_back(psi + m);

            claim = next_claim();
            if (!claim) {
                if (a_target > 0.0) {
                    throw InvalidInput(
                        "skorokhod_embed: claims exhausted before covering the horizon");
                }
                out.s_end = s_star;
                out.a_end = psi + m;
                return out;
            }
            validate_claim(*claim, grid_tol);
            s_cur = s_star;
            b_cur = level;
        }
    }
}

EmbeddingResult build_result(BrownianSource& src, const WalkResult& walk, double m1) {
    EmbeddingResult res;
    res.tau = walk.tau;
    res.claims_used = walk.claims;
    res.horizon = walk.a_end / m1;
    res.max_drawdown = walk.max_drawdown;
    res.jump_times.reserve(walk.a_at_tau.size());
    for (double a : walk.a_at_tau) {
        res.jump_times.push_back(a / m1);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::size_t n_jumps = res.jump_times.size();

    // Compensated claims path: starts at 0, decays at rate m1, jumps by the
    // claim sizes at the embedded jump times.  Crossings inside one monotone
    // fall of the source share a model-clock coordinate (the excursion max
    // never grew in between); they are one jump of the path and merge into a
    // single node.
    PathGrid z;
    z.kind = PathKind::PiecewiseLinear;
    z.times.push_back(0.0);
    z.values.push_back(0.0);
    z.pre_jump.push_back(nan);
    for (std::size_t j = 0; j < n_jumps; ++j) {
        const double t = res.jump_times[j];
        const double value = walk.psi_after[j] - m1 * t;
        if (t <= z.times.back() * (1.0 + 1e-12)) {
            // Grow the jump already recorded at this time.  The seed node at
            // t = 0 starts as a continuous node; absorbing a jump turns it
            // into a jump node whose left limit is the pre-merge value.
            if (std::isnan(z.pre_jump.back())) z.pre_jump.back() = z.values.back();
            z.values.back() = value;
            continue;
        }
        const double psi_before = (j == 0) ? 0.0 : walk.psi_after[j - 1];
        z.times.push_back(t);
        z.values.push_back(value);
        z.pre_jump.push_back(psi_before - m1 * t);
    }
    const double psi_total = n_jumps == 0 ? 0.0 : walk.psi_after.back();
    if (res.horizon > z.times.back()) {
        z.times.push_back(res.horizon);
        z.values.push_back(psi_total - m1 * res.horizon);
        z.pre_jump.push_back(nan);
    }
    z.validate();
    res.z = std::move(z);

    // The coupled Brownian path on the same clock, sign-flipped to match z.
    PathGrid b;
    b.kind = PathKind::PiecewiseLinear;
    const double h = src.step();
    const auto n_whole = static_cast<std::size_t>(res.horizon / h);
    for (std::size_t k = 0; k <= n_whole; ++k) {
        b.times.push_back(static_cast<double>(k) * h);
        b.values.push_back(-src.value(k));
    }
    if (res.horizon > b.times.back()) {
        const double frac = (res.horizon - b.times.back()) / h;
        const double tail =
            src.value(n_whole) + frac * (src.value(n_whole + 1) - src.value(n_whole));
        b.times.push_back(res.horizon);
        b.values.push_back(-tail);
    }
    b.validate();
    res.brownian = std::move(b);
    return res;
}

void validate_embed_args(double m1, double grid_tol) {
    if (!(std::isfinite(m1) && m1 > 0.0)) {
        throw InvalidInput("skorokhod_embed: m1 must be positive and finite");
    }
    if (!(std::isfinite(grid_tol) && grid_tol >= 0.0)) {
        throw InvalidInput("skorokhod_embed: grid_tol must be nonnegative and finite");
    }
}

} // namespace

EmbeddingResult skorokhod_embed(BrownianSource& source, const std::vector<double>& claims,
                                double m1, double grid_tol) {
    validate_embed_args(m1, grid_tol);
    std::size_t next = 0;
    auto provider = [&]() -> std::optional<double> {
        if (next >= claims.size()) {
            return std::nullopt;
        }
        return claims[next++];
    };
    const WalkResult walk = embed_walk(source, provider, 0.0, grid_tol);
    return build_result(source, walk, m1);
}

EmbeddingResult skorokhod_embed(BrownianSource& source,
                                const std::function<double()>& claim_provider,
                                double m1, double horizon, double grid_tol) {
    validate_embed_args(m1, grid_tol);
    if (!(std::isfinite(horizon) && horizon > 0.0)) {
        throw InvalidInput("skorokhod_embed: horizon must be positive and finite");
    }
    auto provider = [&]() -> std::optional<double> { return claim_provider(); };
    const WalkResult walk = embed_walk(source, provider, m1 * horizon, grid_tol);
    return build_result(source, walk, m1);
}

double first_jump_spacing(BrownianSource& source, double claim, double m1, double grid_tol) {
    validate_embed_args(m1, grid_tol);
    bool given = false;
    auto provider = [&]() -> std::optional<double> {
        if (given) {
            return std::nullopt;
        }
        given = true;
        return claim;
    };
    const WalkResult walk = embed_walk(source, provider, 0.0, grid_tol);
    return walk.a_end / m1;
}

double coupling_cost(const EmbeddingResult& embedding, const ClaimModel& model) {
    model.validate();
    if (!(std::isfinite(embedding.max_drawdown) && embedding.max_drawdown >= 0.0)) {
        throw InvalidInput("coupling_cost: embedding carries an invalid max_drawdown");
    }
    // At matched clocks the premium terms of the two reserves cancel and the
    // paths differ exactly by the source's current drawdown (scaled back from
    // normalized claims by sqrt(m2)), so U = sqrt(m2) * max_drawdown is the
    // sup-distance this particular coupling achieves.  No continuous
    // surrogate can stay closer than half the largest jump, so the transport
    // distance itself lies in [U/2, U]; the estimate takes the geometric
    // midpoint U/sqrt(2) of that bracket.  (Comparing the paths on unmatched
    // clocks instead pays for Brownian fluctuation over the accumulated
    // clock gap, which inherits the claim tail and swamps the coupling
    // discrepancy.)
    const double s_m2 = std::sqrt(model.m2);
    static const double inv_sqrt2 = 0.7071067811865475244;
    return std::pow(s_m2 * embedding.max_drawdown * inv_sqrt2, model.p);
}

CalibrationResult delta_from_costs(const std::vector<double>& costs, double confidence,
                                   std::uint64_t seed) {
    if (costs.size() < 2) {
        throw InvalidInput("delta_from_costs: need at least two replications");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw InvalidInput("delta_from_costs: confidence must lie in (0, 1)");
    }
    for (double c : costs) {
        if (!(std::isfinite(c) && c >= 0.0)) {
            throw InvalidInput("delta_from_costs: costs must be nonnegative and finite");
        }
    }
    std::vector<double> sorted = costs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double nd = static_cast<double>(n);

    // Distribution-free CI for the median: order-statistic ranks from the
    // normal approximation to Binomial(n, 1/2), clamped to the sample range.
    const double z = normal_quantile(0.5 * (1.0 + confidence));
    const double lo_rank_real = std::floor(0.5 * (nd - z * std::sqrt(nd)));
    const auto lo_rank = static_cast<std::size_t>(std::max(1.0, lo_rank_real)); // 1-based
    const std::size_t hi_rank = n + 1 - std::min(lo_rank, n);

    const MeanSd ms = mean_sd(costs);
    CalibrationResult res;
    res.median_cost =
        (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    res.mean_cost = ms.mean;
    res.sd_cost = ms.sd;
    res.ci_lo = sorted[lo_rank - 1];
    res.ci_hi = sorted[hi_rank - 1];
    res.delta_hat = res.median_cost;
    res.replications = n;
    res.confidence = confidence;
    res.seed = seed;
    res.costs = costs;
    return res;
}

CalibrationResult estimate_delta(const ClaimModel& model,
                                 const std::function<double(std::mt19937_64&)>& claim_sampler,
                                 const CalibrationConfig& config) {
    model.validate();
    if (config.replications < 2) {
        throw InvalidInput("estimate_delta: need at least two replications");
    }
    if (!(std::isfinite(config.grid_step) && config.grid_step > 0.0)) {
        throw InvalidInput("estimate_delta: grid_step must be positive and finite");
    }
    if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
        throw InvalidInput("estimate_delta: confidence must lie in (0, 1)");
    }
    if (!claim_sampler) {
        throw InvalidInput("estimate_delta: claim sampler is required");
    }

    const double s_m2 = std::sqrt(model.m2);
    const double m1_unit = model.m1 / s_m2; // compensator slope of normalized claims
    const double horizon_unit = model.claim_rate * model.horizon;

    std::vector<double> costs;
    costs.reserve(config.replications);
    for (std::size_t r = 0; r < config.replications; ++r) {
        auto claim_eng = make_engine(config.seed, 2 * r);
        BrownianSource source(config.grid_step, derive_seed(config.seed, 2 * r + 1));
        auto provider = [&]() {
            const double x = claim_sampler(claim_eng);
            if (!(std::isfinite(x) && x > 0.0)) {
                throw InvalidInput("estimate_delta: claim sampler produced a nonpositive value");
            }
            return x / s_m2;
        };
        const EmbeddingResult emb =
            skorokhod_embed(source, provider, m1_unit, horizon_unit, config.grid_tol);
        costs.push_back(coupling_cost(emb, model));
    }
    return delta_from_costs(costs, config.confidence, config.seed);
}

} // namespace otrisk
