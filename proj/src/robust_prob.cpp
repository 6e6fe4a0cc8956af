#include "otrisk/robust_prob.hpp"

#include <numeric>
#include <sstream>

namespace otrisk {

DistanceProfile::DistanceProfile(std::vector<double> distances, std::vector<double> weights) {
    if (distances.empty() || distances.size() != weights.size())
        throw InvalidInput("DistanceProfile: need matching nonempty distances and weights");
    std::vector<std::size_t> order(distances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return distances[a] < distances[b];
    });
    for (std::size_t k : order) {
        const double d = distances[k];
        const double w = weights[k];
        if (!(d >= 0.0) || !std::isfinite(d))
            throw InvalidInput("DistanceProfile: distances must be finite and >= 0");
        if (!(w > 0.0) || !std::isfinite(w))
            throw InvalidInput("DistanceProfile: weights must be positive and finite");
        if (!groups_.empty() && groups_.back().distance == d) {
            groups_.back().weight += w;
        } else {
            groups_.push_back({d, w});
        }
    }
    cum_cost_.resize(groups_.size());
    cum_weight_.resize(groups_.size());
    double cost_acc = 0.0, w_acc = 0.0;
    for (std::size_t k = 0; k < groups_.size(); ++k) {
        cost_acc += groups_[k].distance * groups_[k].weight;
        w_acc += groups_[k].weight;
        cum_cost_[k] = cost_acc;
        cum_weight_[k] = w_acc;
    }
    total_cost_ = cost_acc;
    total_weight_ = w_acc;
}

double DistanceProfile::mass_at_zero() const noexcept {
    return (!groups_.empty() && groups_.front().distance == 0.0) ? groups_.front().weight : 0.0;
}

namespace {

// index of the last group with distance <= u, or -1
std::ptrdiff_t last_group_at_most(const std::vector<DistanceProfile::Group>& groups, double u) {
    std::ptrdiff_t lo = 0, hi = static_cast<std::ptrdiff_t>(groups.size()) - 1, ans = -1;
    while (lo <= hi) {
        const std::ptrdiff_t mid = (lo + hi) / 2;
        if (groups[static_cast<std::size_t>(mid)].distance <= u) {
            ans = mid;
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return ans;
}

} // namespace

double DistanceProfile::h_of_u(double u) const {
    if (!(u >= 0.0)) throw InvalidInput("h_of_u: u must be >= 0");
    const std::ptrdiff_t k = last_group_at_most(groups_, u);
    return k < 0 ? 0.0 : cum_cost_[static_cast<std::size_t>(k)];
}

double DistanceProfile::mass_at_most(double u) const {
    const std::ptrdiff_t k = last_group_at_most(groups_, u);
    return k < 0 ? 0.0 : cum_weight_[static_cast<std::size_t>(k)];
}

double DistanceProfile::mass_below(double u) const {
    const std::ptrdiff_t k = last_group_at_most(groups_, u);
    if (k < 0) return 0.0;
    const auto uk = static_cast<std::size_t>(k);
    return groups_[uk].distance == u ? cum_weight_[uk] - groups_[uk].weight
                                     : cum_weight_[uk];
}

std::string DistanceProfile::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "distance,weight\n";
    for (const Group& g : groups_) out << g.distance << "," << g.weight << "\n";
    return out.str();
}

ThresholdResult calibrate_threshold(const DistanceProfile& profile, double delta) {
    if (!(delta >= 0.0)) throw InvalidInput("calibrate_threshold: delta must be >= 0");
    const double inf = std::numeric_limits<double>::infinity();
    if (delta == 0.0) {
        // h(0) = 0 >= 0: the threshold collapses onto the set itself.
        return {0.0, inf};
    }
    if (delta > profile.total_cost()) {
        return {inf, 0.0};
    }
    const auto& groups = profile.groups();
    double acc = 0.0;
    for (const auto& g : groups) {
        acc += g.distance * g.weight;
        if (acc >= delta) {
            return {g.distance, g.distance > 0.0 ? 1.0 / g.distance : inf};
        }
    }
    // delta == total_cost with roundoff: threshold is the largest distance
    const double d_max = groups.back().distance;
    return {d_max, d_max > 0.0 ? 1.0 / d_max : inf};
}

WorstCaseProbability worst_case_probability(const DistanceProfile& profile, double delta) {
    if (!(delta >= 0.0)) throw InvalidInput("worst_case_probability: delta must be >= 0");
    WorstCaseProbability out;
    const ThresholdResult thr = calibrate_threshold(profile, delta);
    out.u_star = thr.u_star;
    out.lambda_star = thr.lambda_star;

    // Dual objective J(lambda) = lambda delta + sum_k w_k (1 - lambda d_k)^+.
    auto J = [&](double lambda) {
        double s = lambda * delta;
        for (const auto& g : profile.groups()) {
            const double t = 1.0 - lambda * g.distance;
            if (t > 0.0) s += g.weight * t;
        }
        return s;
    };
    // Piecewise linear in lambda with breakpoints at 1/d_k; the minimum is
    // attained at a breakpoint or at lambda = 0.
    double best = J(0.0);
    for (const auto& g : profile.groups()) {
        if (g.distance <= 0.0) continue;
        best = std::min(best, J(1.0 / g.distance));
    }
    out.value = best;

    if (std::isinf(thr.u_star)) { // budget beyond saturation: everything moves
        out.c_lower = profile.total_cost();
        out.c_upper = profile.total_cost();
        out.inflated_set_prob = 1.0;
        out.randomization_p = 1.0;
        out.value = std::min(best, 1.0);
        return out;
    }

    out.c_lower = [&] {
        double s = 0.0;
        for (const auto& g : profile.groups()) {
            if (g.distance < thr.u_star) s += g.distance * g.weight;
        }
        return s;
    }();
    out.c_upper = profile.h_of_u(thr.u_star);
    out.inflated_set_prob = profile.mass_at_most(thr.u_star);
    out.randomization_p = out.c_upper > out.c_lower
                              ? std::clamp((delta - out.c_lower) / (out.c_upper - out.c_lower), 0.0, 1.0)
                              : 1.0;
    return out;
}

std::pair<double, double> cbar_bounds(const DistanceProfile& profile, double lambda_star) {
    if (!(lambda_star > 0.0))
        throw InvalidInput("cbar_bounds: lambda_star must be > 0");
    const double u = 1.0 / lambda_star;
    double lower = 0.0;
    for (const auto& g : profile.groups()) {
        if (g.distance < u) lower += g.distance * g.weight;
    }
    return {lower, profile.h_of_u(u)};
}

} // namespace otrisk
