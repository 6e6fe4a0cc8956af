#include "otrisk/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "otrisk/numerics.hpp"
#include "otrisk/rng.hpp"
#include "otrisk/robust_prob.hpp"

namespace otrisk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_times(const std::vector<double>& times, std::size_t n_values) {
    if (times.size() < 2) throw InvalidInput("PathGrid: need at least two nodes");
    if (times.size() != n_values) throw InvalidInput("PathGrid: times/values size mismatch");
    if (times.front() != 0.0) throw InvalidInput("PathGrid: grid must start at t = 0");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1]))
            throw InvalidInput("PathGrid: times must be strictly increasing");
    }
}

/// Index of the segment containing t: largest k with times[k] <= t.
std::size_t segment_index(const std::vector<double>& times, double t) {
    if (!(t >= times.front() && t <= times.back()))
        throw InvalidInput("PathGrid: evaluation time outside the grid");
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

} // namespace

void PathGrid::validate() const {
    validate_times(times, values.size());
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidInput("PathGrid: values must be finite");
    if (!pre_jump.empty() && pre_jump.size() != times.size())
        throw InvalidInput("PathGrid: pre_jump must be empty or aligned with times");
}

double PathGrid::value_at(double t) const {
    const std::size_t k = segment_index(times, t);
    if (kind == PathKind::PiecewiseConstantRcll || t == times[k]) return values[k];
    // linear segment from values[k] toward the left limit at the next node
    const double t0 = times[k], t1 = times[k + 1];
    double v1 = values[k + 1];
    if (!pre_jump.empty() && std::isfinite(pre_jump[k + 1])) v1 = pre_jump[k + 1];
    const double w = (t - t0) / (t1 - t0);
    return values[k] * (1.0 - w) + v1 * w;
}

double PathGrid::left_limit_at(double t) const {
    const std::size_t k = segment_index(times, t);
    if (t != times[k]) return value_at(t); // interior of a segment: no jump
    if (k == 0) return values[0];
    if (!pre_jump.empty() && std::isfinite(pre_jump[k])) return pre_jump[k];
    return kind == PathKind::PiecewiseConstantRcll ? values[k - 1] : values[k];
}

void Path2Grid::validate() const {
    validate_times(times, v1.size());
    if (v2.size() != times.size()) throw InvalidInput("Path2Grid: component size mismatch");
    for (std::size_t k = 0; k < times.size(); ++k)
        if (!std::isfinite(v1[k]) || !std::isfinite(v2[k]))
            throw InvalidInput("Path2Grid: values must be finite");
}

std::string path_to_csv(const PathGrid& path) {
    std::ostringstream out;
    out.precision(17);
    out << "t,value\n";
    for (std::size_t k = 0; k < path.times.size(); ++k)
        out << path.times[k] << "," << path.values[k] << "\n";
    return out.str();
}

std::string path_to_csv(const Path2Grid& path) {
    std::ostringstream out;
    out.precision(17);
    out << "t,v1,v2\n";
    for (std::size_t k = 0; k < path.times.size(); ++k)
        out << path.times[k] << "," << path.v1[k] << "," << path.v2[k] << "\n";
    return out.str();
}

PathGrid simulate_brownian(double horizon, std::size_t n_steps,
                           double drift, double vol, std::uint64_t seed) {
    if (!(horizon > 0.0)) throw InvalidInput("simulate_brownian: horizon must be > 0");
    if (n_steps < 1) throw InvalidInput("simulate_brownian: need at least one step");
    if (!(vol >= 0.0)) throw InvalidInput("simulate_brownian: vol must be >= 0");
    PathGrid path;
    path.kind = PathKind::PiecewiseLinear;
    path.times.resize(n_steps + 1);
    path.values.resize(n_steps + 1);
    const double h = horizon / static_cast<double>(n_steps);
    const double sqrt_h = std::sqrt(h);
    auto eng = make_engine(seed, 0);
    double w = 0.0;
    path.times[0] = 0.0;
    path.values[0] = 0.0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        w += sqrt_h * normal_draw(eng);
        const double t = (k == n_steps) ? horizon : h * static_cast<double>(k);
        path.times[k] = t;
        path.values[k] = vol * w - drift * t;
    }
    return path;
}

PathGrid simulate_compound_poisson_risk(const ClaimModel& model,
                                        const std::function<double(std::mt19937_64&)>& claim_sampler,
                                        double u0, std::uint64_t seed,
                                        double sample_step) {
    model.validate();
    if (!claim_sampler) throw InvalidInput("simulate_compound_poisson_risk: no claim sampler");
    const double T = model.horizon;
    if (sample_step == 0.0) sample_step = T / 4096.0;
    if (!(sample_step > 0.0))
        throw InvalidInput("simulate_compound_poisson_risk: sample_step must be > 0");
    auto eng = make_engine(seed, 0);
    std::vector<std::pair<double, double>> jumps; // (time, claim)
    double t = 0.0;
    while (true) {
        t += -std::log(uniform_open(eng)) / model.claim_rate;
        if (t >= T) break;
        const double claim = claim_sampler(eng);
        if (!(claim > 0.0) || !std::isfinite(claim))
            throw InvalidInput("simulate_compound_poisson_risk: claims must be positive");
        jumps.emplace_back(t, claim);
    }
    // merged node set: uniform premium samples plus the jump times
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(T / sample_step) + jumps.size() + 2);
    for (double s = 0.0; s < T; s += sample_step) nodes.push_back(s);
    nodes.push_back(T);
    for (const auto& [tj, c] : jumps) nodes.push_back(tj);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    PathGrid path;
    path.kind = PathKind::PiecewiseConstantRcll;
    path.times = std::move(nodes);
    path.values.resize(path.times.size());
    path.pre_jump.assign(path.times.size(), kNaN);
    const double premium = model.premium_rate();
    std::size_t j = 0;
    double claims_so_far = 0.0;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        const double tk = path.times[k];
        const bool jump_here = j < jumps.size() && jumps[j].first == tk;
        if (jump_here) path.pre_jump[k] = u0 + premium * tk - claims_so_far;
        while (j < jumps.size() && jumps[j].first == tk) {
            claims_so_far += jumps[j].second;
            ++j;
        }
        path.values[k] = u0 + premium * tk - claims_so_far;
    }
    return path;
}

namespace {

double merged_sup_abs_diff(const std::vector<double>& merged,
                           const PathGrid& x, const PathGrid& y) {
    double sup = 0.0;
    for (std::size_t k = 0; k < merged.size(); ++k) {
        const double s = merged[k];
        sup = std::max(sup, std::abs(x.value_at(s) - y.value_at(s)));
        if (k > 0)
            sup = std::max(sup, std::abs(x.left_limit_at(s) - y.left_limit_at(s)));
    }
    return sup;
}

std::vector<double> merge_times(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

} // namespace

double j1_upper_bound(const PathGrid& x, const PathGrid& y, double p) {
    if (!(p >= 1.0)) throw InvalidInput("j1_upper_bound: p must be >= 1");
    x.validate();
    y.validate();
    if (std::abs(x.horizon() - y.horizon()) > 1e-12 * (1.0 + x.horizon()))
        throw InvalidInput("j1_upper_bound: mismatched horizons");
    const std::vector<double> merged = merge_times(x.times, y.times);
    return std::pow(merged_sup_abs_diff(merged, x, y), p);
}

double j1_upper_bound(const Path2Grid& x, const Path2Grid& y, double p) {
    if (!(p >= 1.0)) throw InvalidInput("j1_upper_bound: p must be >= 1");
    x.validate();
    y.validate();
    if (std::abs(x.horizon() - y.horizon()) > 1e-12 * (1.0 + x.horizon()))
        throw InvalidInput("j1_upper_bound: mismatched horizons");
    const std::vector<double> merged = merge_times(x.times, y.times);
    PathGrid x1{x.times, x.v1, x.kind, {}};
    PathGrid x2{x.times, x.v2, x.kind, {}};
    PathGrid y1{y.times, y.v1, y.kind, {}};
    PathGrid y2{y.times, y.v2, y.kind, {}};
    double sup2 = 0.0;
    for (const double s : merged) {
        const double d1 = x1.value_at(s) - y1.value_at(s);
        const double d2 = x2.value_at(s) - y2.value_at(s);
        sup2 = std::max(sup2, d1 * d1 + d2 * d2);
    }
    return std::pow(std::sqrt(sup2), p);
}

void RuinSet1D::validate() const {
    if (!(level >= 0.0)) throw InvalidInput("RuinSet1D: level must be >= 0");
    if (!(scale > 0.0)) throw InvalidInput("RuinSet1D: scale must be > 0");
    if (!(drift >= 0.0)) throw InvalidInput("RuinSet1D: drift must be >= 0");
    if (!(p >= 1.0)) throw InvalidInput("RuinSet1D: p must be >= 1");
}

double drifted_sup(const PathGrid& path, double scale, double drift) {
    path.validate();
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        const double t = path.times[k];
        sup = std::max(sup, scale * path.values[k] - drift * t);
        if (!path.pre_jump.empty() && std::isfinite(path.pre_jump[k]))
            sup = std::max(sup, scale * path.pre_jump[k] - drift * t);
    }
    return sup;
}

double ruin_set_distance_1d(const PathGrid& path, const RuinSet1D& set) {
    set.validate();
    const double sup = drifted_sup(path, set.scale, set.drift);
    if (sup >= set.level) return 0.0;
    return std::pow(set.level - sup, set.p);
}

double brownian_crossing_prob(double level, double drift, double vol, double horizon) {
    if (!(horizon > 0.0)) throw InvalidInput("brownian_crossing_prob: horizon must be > 0");
    if (!(vol >= 0.0)) throw InvalidInput("brownian_crossing_prob: vol must be >= 0");
    if (level <= 0.0) return 1.0; // the supremum starts at 0
    if (vol == 0.0) return std::max(0.0, -drift * horizon) >= level ? 1.0 : 0.0;
    const double sT = vol * std::sqrt(horizon);
    const double a = (level + drift * horizon) / sT;
    const double b = (level - drift * horizon) / sT;
    // The reflection factor can overflow for negative drift while the paired
    // tail underflows; combining them in log space keeps the product finite.
    const double log_reflect = -2.0 * drift * level / (vol * vol);
    const double p = normal_upper_tail(a) + std::exp(log_reflect + log_normal_upper_tail(b));
    return std::min(p, 1.0);
}

PsiRob1D psi_rob_from_sups(double u, const ClaimModel& model, double delta,
                           const std::vector<double>& sups) {
    model.validate();
    if (!(u >= 0.0)) throw InvalidInput("psi_rob_1d: u must be >= 0");
    if (!(delta >= 0.0)) throw InvalidInput("psi_rob_1d: delta must be >= 0");
    if (sups.empty()) throw InvalidInput("psi_rob_1d: empty baseline sample");
    std::vector<double> distances(sups.size());
    for (std::size_t i = 0; i < sups.size(); ++i)
        distances[i] = sups[i] >= u ? 0.0 : std::pow(u - sups[i], model.p);
    std::vector<double> weights(sups.size(), 1.0 / static_cast<double>(sups.size()));
    DistanceProfile profile(std::move(distances), std::move(weights));

    PsiRob1D out;
    const WorstCaseProbability wc = worst_case_probability(profile, delta);
    out.lambda_star = wc.lambda_star;
    out.u_star = wc.u_star;
    out.dual_value = wc.value;
    out.psi_baseline = brownian_crossing_prob(u, model.surrogate_drift(),
                                              model.surrogate_vol(), model.horizon);
    if (std::isinf(wc.u_star)) {
        out.u_tilde = -std::numeric_limits<double>::infinity();
        out.psi_rob = 1.0;
        return out;
    }
    out.u_tilde = u - std::pow(wc.u_star, 1.0 / model.p);
    out.psi_rob = brownian_crossing_prob(out.u_tilde, model.surrogate_drift(),
                                         model.surrogate_vol(), model.horizon);
    return out;
}

PsiRob1D psi_rob_1d(double u, const ClaimModel& model, double delta,
                    const std::vector<PathGrid>& mu_samples) {
    if (mu_samples.empty()) throw InvalidInput("psi_rob_1d: empty baseline sample");
    std::vector<double> sups(mu_samples.size());
    const double scale = model.surrogate_vol();
    const double drift = model.surrogate_drift();
    for (std::size_t i = 0; i < mu_samples.size(); ++i)
        sups[i] = drifted_sup(mu_samples[i], scale, drift);
    return psi_rob_from_sups(u, model, delta, sups);
}

void RuinSet2D::validate() const {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidInput("RuinSet2D: beta must lie in [0, 1]");
}

std::array<double, 2> half_space_infima(const Path2Grid& path, double beta) {
    path.validate();
    double g1 = std::numeric_limits<double>::infinity();
    double g2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        g1 = std::min(g1, beta * path.v1[k] + path.v2[k]);
        g2 = std::min(g2, path.v1[k] + beta * path.v2[k]);
    }
    return {g1, g2};
}

double ruin_set_distance_2d(const Path2Grid& path, const RuinSet2D& set) {
    set.validate();
    const auto [g1, g2] = half_space_infima(path, set.beta);
    const double g = std::min(g1, g2);
    if (g <= 0.0) return 0.0;
    return g * g / (1.0 + set.beta * set.beta);
}

double inflated_level_2d(double lambda_star, double beta) {
    if (!(lambda_star > 0.0))
        throw InvalidInput("inflated_level_2d: lambda_star must be > 0");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidInput("inflated_level_2d: beta must lie in [0, 1]");
    return std::sqrt((1.0 + beta * beta) / lambda_star);
}

void FirstPassage2DConfig::validate() const {
    if (!(u >= 0.0)) throw InvalidInput("first_passage_2d: u must be >= 0");
    if (!(b[0] > 0.0 && b[1] > 0.0))
        throw InvalidInput("first_passage_2d: allocation b must be positive");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidInput("first_passage_2d: beta must lie in [0, 1]");
    if (!(horizon > 0.0)) throw InvalidInput("first_passage_2d: horizon must be > 0");
    if (n_paths < 1) throw InvalidInput("first_passage_2d: need at least one path");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw InvalidInput("first_passage_2d: confidence must be in (0,1)");
}

namespace {

/// Cholesky factor of a symmetric positive-definite 2x2 matrix.
std::array<std::array<double, 2>, 2> cholesky2(const std::array<std::array<double, 2>, 2>& s) {
    if (std::abs(s[0][1] - s[1][0]) > 1e-12 * (1.0 + std::abs(s[0][1])))
        throw InvalidInput("first_passage_2d: sigma must be symmetric");
    const double a = s[0][0];
    if (!(a > 0.0)) throw InvalidInput("first_passage_2d: sigma is not positive definite");
    const double l11 = std::sqrt(a);
    const double l21 = s[1][0] / l11;
    const double d = s[1][1] - l21 * l21;
    if (!(d > 0.0)) throw InvalidInput("first_passage_2d: sigma is not positive definite");
    return {{{l11, 0.0}, {l21, std::sqrt(d)}}};
}

} // namespace

BinomialEstimate first_passage_prob_2d(const FirstPassage2DConfig& config) {
    config.validate();
    const auto chol = cholesky2(config.sigma);
    const std::size_t n_steps = config.n_steps ? config.n_steps : default_n_steps(config.horizon);
    const double h = config.horizon / static_cast<double>(n_steps);
    const double sqrt_h = std::sqrt(h);
    std::size_t hits = 0;
    for (std::size_t path = 0; path < config.n_paths; ++path) {
        auto eng = make_engine(config.seed, path);
        double r1 = config.u * config.b[0];
        double r2 = config.u * config.b[1];
        double g = std::min(config.beta * r1 + r2, r1 + config.beta * r2);
        for (std::size_t k = 1; k <= n_steps && g > config.level; ++k) {
            const double z1 = normal_draw(eng);
            const double z2 = normal_draw(eng);
            r1 += config.drift[0] * h + sqrt_h * (chol[0][0] * z1);
            r2 += config.drift[1] * h + sqrt_h * (chol[1][0] * z1 + chol[1][1] * z2);
            g = std::min({g, config.beta * r1 + r2, r1 + config.beta * r2});
        }
        if (g <= config.level) ++hits;
    }
    BinomialEstimate est;
    est.n = config.n_paths;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(config.n_paths);
    const MeanSd ms{est.p_hat,
                    std::sqrt(std::max(est.p_hat * (1.0 - est.p_hat), 0.0) *
                              static_cast<double>(config.n_paths) /
                              std::max<double>(1.0, static_cast<double>(config.n_paths - 1))),
                    config.n_paths};
    const double hw = mean_ci_halfwidth(ms, config.confidence);
    est.ci_lo = std::max(0.0, est.p_hat - hw);
    est.ci_hi = std::min(1.0, est.p_hat + hw);
    return est;
}

std::size_t default_n_steps(double horizon) {
    if (!(horizon > 0.0)) throw InvalidInput("default_n_steps: horizon must be > 0");
    const double steps = 4096.0 * horizon / 100.0;
    return static_cast<std::size_t>(std::max(64.0, std::ceil(steps)));
}

} // namespace otrisk
