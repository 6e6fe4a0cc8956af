#include "otrisk/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "otrisk/calibrate.hpp"
#include "otrisk/errors.hpp"
#include "otrisk/finite_lp.hpp"
#include "otrisk/measures.hpp"
#include "otrisk/numerics.hpp"
#include "otrisk/paths.hpp"
#include "otrisk/reinsurance.hpp"
#include "otrisk/rng.hpp"
#include "otrisk/robust_prob.hpp"

namespace otrisk {

namespace {

using ojson = nlohmann::ordered_json;

ojson parse_config(const std::string& text) {
    if (text.empty()) {
        return ojson::object();
    }
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("config: ") + e.what(), 0);
    }
    if (!j.is_object()) {
        throw InvalidInput("config: top level must be a JSON object");
    }
    return j;
}

void check_keys(const ojson& j, const std::set<std::string>& allowed,
                const std::string& command) {
    for (const auto& item : j.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw InvalidInput("config: unknown key '" + item.key() + "' for " + command);
        }
    }
}

double num_or(const ojson& j, const std::string& key, double def) {
    if (!j.contains(key)) {
        return def;
    }
    if (!j.at(key).is_number()) {
        throw InvalidInput("config: '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

std::size_t count_or(const ojson& j, const std::string& key, std::size_t def) {
    if (!j.contains(key)) {
        return def;
    }
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) {
        throw InvalidInput("config: '" + key + "' must be a nonnegative integer");
    }
    const auto v = j.at(key).get<long long>();
    if (v < 0) {
        throw InvalidInput("config: '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
}

std::uint64_t seed_or(const ojson& j, const std::string& key, std::uint64_t def) {
    if (!j.contains(key)) {
        return def;
    }
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) {
        throw InvalidInput("config: '" + key + "' must be an integer seed");
    }
    return j.at(key).get<std::uint64_t>();
}

std::vector<double> vec_or(const ojson& j, const std::string& key,
                           std::vector<double> def) {
    if (!j.contains(key)) {
        return def;
    }
    const auto& a = j.at(key);
    if (!a.is_array() || a.empty()) {
        throw InvalidInput("config: '" + key + "' must be a nonempty array of numbers");
    }
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& v : a) {
        if (!v.is_number()) {
            throw InvalidInput("config: '" + key + "' must contain only numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Claims distribution: sampler plus its exact (or sample) moments.
struct ClaimSampler {
    std::function<double(std::mt19937_64&)> draw;
    double m1 = 0.0;
    double m2 = 0.0;
    ojson resolved;
};

ClaimSampler make_claim_sampler(const ojson& spec) {
    ClaimSampler cs;
    const std::string kind = spec.contains("kind") ? spec.at("kind").get<std::string>() : "pareto";
    if (kind == "pareto") {
        check_keys(spec, {"kind", "alpha", "xm"}, "claims");
        const double alpha = num_or(spec, "alpha", 2.2);
        const double xm = num_or(spec, "xm", 1.0);
        if (!(alpha > 2.0)) {
            throw InvalidInput("claims: pareto needs alpha > 2 for a finite second moment");
        }
        if (!(xm > 0.0)) {
            throw InvalidInput("claims: pareto scale xm must be > 0");
        }
        cs.draw = [alpha, xm](std::mt19937_64& eng) { return xm * pareto_draw(eng, alpha); };
        cs.m1 = xm * alpha / (alpha - 1.0);
        cs.m2 = xm * xm * alpha / (alpha - 2.0);
        cs.resolved = {{"kind", "pareto"}, {"alpha", alpha}, {"xm", xm}};
    } else if (kind == "exponential") {
        check_keys(spec, {"kind", "mean"}, "claims");
        const double mean = num_or(spec, "mean", 1.0);
        if (!(mean > 0.0)) {
            throw InvalidInput("claims: exponential mean must be > 0");
        }
        cs.draw = [mean](std::mt19937_64& eng) { return -mean * std::log(uniform_open(eng)); };
        cs.m1 = mean;
        cs.m2 = 2.0 * mean * mean;
        cs.resolved = {{"kind", "exponential"}, {"mean", mean}};
    } else if (kind == "fixed") {
        check_keys(spec, {"kind", "value"}, "claims");
        const double value = num_or(spec, "value", 1.0);
        if (!(value > 0.0)) {
            throw InvalidInput("claims: fixed value must be > 0");
        }
        cs.draw = [value](std::mt19937_64&) { return value; };
        cs.m1 = value;
        cs.m2 = value * value;
        cs.resolved = {{"kind", "fixed"}, {"value", value}};
    } else if (kind == "empirical") {
        check_keys(spec, {"kind", "file"}, "claims");
        if (!spec.contains("file")) {
            throw InvalidInput("claims: empirical needs a 'file'");
        }
        const std::string file = spec.at("file").get<std::string>();
        auto data = read_claims_csv_file(file);
        const auto moments = estimate_moments(data);
        cs.m1 = moments.first;
        cs.m2 = moments.second;
        auto shared = std::make_shared<std::vector<double>>(std::move(data));
        cs.draw = [shared](std::mt19937_64& eng) {
            const auto n = shared->size();
            auto idx = static_cast<std::size_t>(uniform_open(eng) * static_cast<double>(n));
            if (idx >= n) {
                idx = n - 1;
            }
            return (*shared)[idx];
        };
        cs.resolved = {{"kind", "empirical"},
                       {"file", file},
                       {"n", shared->size()}};
    } else {
        throw InvalidInput("claims: unknown kind '" + kind + "'");
    }
    return cs;
}

/// Claim model resolution: explicit moments win, then the claims distribution,
/// then the library defaults (unit-rate Pareto book).
ClaimModel model_from_json(const ojson& j, const ClaimSampler* claims, ojson& resolved) {
    check_keys(j, {"claim_rate", "eta", "theta", "m1", "m2", "horizon", "p"}, "model");
    ClaimModel m;
    m.claim_rate = num_or(j, "claim_rate", 1.0);
    m.eta = num_or(j, "eta", 0.1);
    if (j.contains("theta")) {
        m.theta = num_or(j, "theta", 0.0);
    }
    const double def_m1 = claims ? claims->m1 : 11.0 / 6.0;
    const double def_m2 = claims ? claims->m2 : 11.0;
    m.m1 = num_or(j, "m1", def_m1);
    m.m2 = num_or(j, "m2", def_m2);
    m.horizon = num_or(j, "horizon", 100.0);
    m.p = num_or(j, "p", 2.0);
    m.validate();
    resolved = {{"claim_rate", m.claim_rate}, {"eta", m.eta}};
    if (m.theta) {
        resolved["theta"] = *m.theta;
    }
    resolved["m1"] = m.m1;
    resolved["m2"] = m.m2;
    resolved["horizon"] = m.horizon;
    resolved["p"] = m.p;
    return m;
}

ojson report_shell(const std::string& command, ojson config) {
    ojson r;
    r["schema"] = "otrisk/v1";
    r["command"] = command;
    r["config"] = std::move(config);
    return r;
}

/// Non-finite doubles serialize as JSON null; reports rely on that for
/// sentinel values (lambda* = +inf at delta = 0, u~ = -inf at saturation).
ojson jnum(double v) { return ojson(v); }

// ---------------------------------------------------------------- verify-duality

FiniteInstance random_instance(std::size_t n, double delta_scale, std::mt19937_64& eng,
                               double p_power) {
    FiniteInstance inst;
    inst.support.resize(n);
    inst.mu.resize(n);
    inst.f.resize(n);
    inst.cost.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        inst.support[i] =
            (static_cast<double>(i) + 0.8 * uniform_open(eng)) / static_cast<double>(n);
        inst.mu[i] = 0.1 + uniform_open(eng);
        inst.f[i] = 2.0 * uniform_open(eng);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i != k) {
                inst.cost[i * n + k] =
                    std::pow(std::abs(inst.support[i] - inst.support[k]), p_power);
            }
        }
    }
    inst.delta = delta_scale * uniform_open(eng);
    return inst;
}

struct DualityCase {
    double delta = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    double lambda_star = 0.0;
    bool slack_ok = false;
    bool eps_ok = false;
};

DualityCase run_duality_case(const FiniteInstance& inst, double tol) {
    DualityCase c;
    c.delta = inst.delta;
    const PrimalSolution primal = solve_primal_lp(inst);
    const DualSolution dual = solve_dual(inst);
    c.primal = primal.value;
    c.dual = dual.value;
    c.gap = std::abs(primal.value - dual.value);
    c.lambda_star = dual.lambda_star;
    c.slack_ok = check_instance_slackness(inst, primal.coupling, dual.lambda_star, tol).ok;
    c.eps_ok = check_instance_epsilon_optimality(inst, primal.coupling, dual.lambda_star,
                                                 tol * (1.0 + std::abs(primal.value)))
                   .certified;
    return c;
}

ExperimentOutput verify_duality_impl(const std::string& config_json) {
    const ojson cfg = parse_config(config_json);
    check_keys(cfg, {"mode", "n", "count", "delta", "deltas", "seed", "gap_tol", "instance"},
               "verify-duality");
    const bool has_instance = cfg.contains("instance");
    const std::string mode =
        cfg.contains("mode") ? cfg.at("mode").get<std::string>()
                             : (has_instance ? std::string("instance") : std::string("random"));
    const double gap_tol = num_or(cfg, "gap_tol", 1e-6);
    if (!(gap_tol > 0.0)) {
        throw InvalidInput("verify-duality: gap_tol must be > 0");
    }

    std::vector<DualityCase> cases;
    ojson resolved;
    resolved["mode"] = mode;
    resolved["gap_tol"] = gap_tol;

    if (mode == "random") {
        const std::size_t n = count_or(cfg, "n", 8);
        const std::size_t count = count_or(cfg, "count", 50);
        const double delta_scale = num_or(cfg, "delta", 0.25);
        const std::uint64_t seed = seed_or(cfg, "seed", 1);
        if (n < 2 || n > FiniteInstance::kDefaultMaxSupport) {
            throw InvalidInput("verify-duality: n must lie in [2, 512]");
        }
        if (count == 0) {
            throw InvalidInput("verify-duality: count must be positive");
        }
        resolved["n"] = n;
        resolved["count"] = count;
        resolved["delta"] = delta_scale;
        resolved["seed"] = seed;
        for (std::size_t k = 0; k < count; ++k) {
            auto eng = make_engine(seed, k);
            const double p_power = (k % 2 == 0) ? 1.0 : 2.0;
            FiniteInstance inst = random_instance(n, delta_scale, eng, p_power);
            cases.push_back(run_duality_case(inst, gap_tol));
        }
    } else if (mode == "instance") {
        if (!has_instance) {
            throw InvalidInput("verify-duality: instance mode needs an 'instance' object");
        }
        FiniteInstance inst = finite_instance_from_json(cfg.at("instance").dump());
        std::vector<double> deltas = vec_or(cfg, "deltas", {inst.delta});
        resolved["instance"] = ojson::parse(finite_instance_to_json(inst));
        resolved["deltas"] = deltas;
        for (double d : deltas) {
            FiniteInstance run = inst;
            run.delta = d;
            cases.push_back(run_duality_case(run, gap_tol));
        }
    } else {
        throw InvalidInput("verify-duality: mode must be 'random' or 'instance'");
    }

    double max_gap = 0.0;
    bool all_ok = true;
    ojson rows = ojson::array();
    std::string csv = "case,delta,primal,dual,gap\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const DualityCase& c = cases[i];
        max_gap = std::max(max_gap, c.gap);
        const bool ok =
            c.gap <= gap_tol * (1.0 + std::abs(c.primal)) && c.slack_ok && c.eps_ok;
        all_ok = all_ok && ok;
        rows.push_back({{"case", i},
                        {"delta", c.delta},
                        {"primal", c.primal},
                        {"dual", c.dual},
                        {"gap", c.gap},
                        {"lambda_star", jnum(c.lambda_star)},
                        {"slack_ok", c.slack_ok},
                        {"eps_ok", c.eps_ok},
                        {"ok", ok}});
        csv += std::to_string(i) + "," + fmt(c.delta) + "," + fmt(c.primal) + "," +
               fmt(c.dual) + "," + fmt(c.gap) + "\n";
    }

    ojson report = report_shell("verify-duality", std::move(resolved));
    report["results"] = {{"count", cases.size()},
                         {"max_gap", max_gap},
                         {"all_ok", all_ok},
                         {"cases", std::move(rows)}};
    return {report.dump(2) + "\n", std::move(csv)};
}

// ------------------------------------------------------------------------ ruin1d

ExperimentOutput ruin1d_impl(const std::string& config_json) {
    const ojson cfg = parse_config(config_json);
    check_keys(cfg, {"u_values", "model", "delta", "n_paths", "n_steps", "seed"}, "ruin1d");
    const std::vector<double> u_values =
        vec_or(cfg, "u_values", {50.0, 100.0, 150.0, 200.0, 250.0});
    const double delta = num_or(cfg, "delta", 0.0);
    const std::size_t n_paths = count_or(cfg, "n_paths", 2000);
    const std::size_t n_steps = count_or(cfg, "n_steps", 4096);
    const std::uint64_t seed = seed_or(cfg, "seed", 1);
    if (!(delta >= 0.0)) {
        throw InvalidInput("ruin1d: delta must be >= 0");
    }
    if (n_paths < 2 || n_steps == 0) {
        throw InvalidInput("ruin1d: n_paths and n_steps must be positive");
    }
    ojson model_resolved;
    const ClaimModel model =
        model_from_json(cfg.contains("model") ? cfg.at("model") : ojson::object(), nullptr,
                        model_resolved);

    // One standard-Brownian baseline sample reused for every level u.
    const double scale = model.surrogate_vol();
    const double drift = model.surrogate_drift();
    std::vector<double> sups(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        const PathGrid w = simulate_brownian(model.horizon, n_steps, 0.0, 1.0,
                                             derive_seed(seed, i));
        sups[i] = drifted_sup(w, scale, drift);
    }

    ojson rows = ojson::array();
    std::string csv = "u,psi_B,u_tilde,psi_rob\n";
    for (double u : u_values) {
        const PsiRob1D r = psi_rob_from_sups(u, model, delta, sups);
        rows.push_back({{"u", u},
                        {"psi_B", r.psi_baseline},
                        {"u_tilde", jnum(r.u_tilde)},
                        {"psi_rob", r.psi_rob},
                        {"lambda_star", jnum(r.lambda_star)},
                        {"u_star", jnum(r.u_star)},
                        {"dual_value", r.dual_value}});
        csv += fmt(u) + "," + fmt(r.psi_baseline) + "," + fmt(r.u_tilde) + "," +
               fmt(r.psi_rob) + "\n";
    }

    ojson resolved;
    resolved["u_values"] = u_values;
    resolved["model"] = std::move(model_resolved);
    resolved["delta"] = delta;
    resolved["n_paths"] = n_paths;
    resolved["n_steps"] = n_steps;
    resolved["seed"] = seed;
    ojson report = report_shell("ruin1d", std::move(resolved));
    report["results"] = {{"rows", std::move(rows)}};
    return {report.dump(2) + "\n", std::move(csv)};
}

// ------------------------------------------------------------------------ ruin2d

std::array<double, 3> cholesky2x2(const std::array<std::array<double, 2>, 2>& sigma) {
    const double a = sigma[0][0];
    const double b = sigma[0][1];
    const double c = sigma[1][1];
    if (std::abs(b - sigma[1][0]) > 1e-12 * (1.0 + std::abs(b))) {
        throw InvalidInput("ruin2d: sigma must be symmetric");
    }
    if (!(a > 0.0)) {
        throw InvalidInput("ruin2d: sigma must be positive definite");
    }
    const double l11 = std::sqrt(a);
    const double l21 = b / l11;
    const double rest = c - l21 * l21;
    if (!(rest > 0.0)) {
        throw InvalidInput("ruin2d: sigma must be positive definite");
    }
    return {l11, l21, std::sqrt(rest)};
}

ExperimentOutput ruin2d_impl(const std::string& config_json) {
    const ojson cfg = parse_config(config_json);
    check_keys(cfg,
               {"beta", "b", "drift", "sigma", "horizon", "n_paths", "n_steps", "seed",
                "target", "deltas", "u_hi"},
               "ruin2d");
    const double beta = num_or(cfg, "beta", 0.0);
    RuinSet2D set{beta};
    set.validate();
    const std::vector<double> b = vec_or(cfg, "b", {0.5, 0.5});
    const std::vector<double> drift = vec_or(cfg, "drift", {0.3, 0.3});
    if (b.size() != 2 || drift.size() != 2) {
        throw InvalidInput("ruin2d: 'b' and 'drift' must have two components");
    }
    std::array<std::array<double, 2>, 2> sigma{{{1.0, 0.2}, {0.2, 1.0}}};
    if (cfg.contains("sigma")) {
        const auto& s = cfg.at("sigma");
        if (!s.is_array() || s.size() != 2 || !s[0].is_array() || s[0].size() != 2 ||
            !s[1].is_array() || s[1].size() != 2) {
            throw InvalidInput("ruin2d: 'sigma' must be a 2x2 matrix");
        }
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 2; ++k) {
                sigma[i][k] = s[i][k].get<double>();
            }
        }
    }
    const double horizon = num_or(cfg, "horizon", 10.0);
    const std::size_t n_paths = count_or(cfg, "n_paths", 4000);
    const std::size_t n_steps = count_or(cfg, "n_steps", 2048);
    const std::uint64_t seed = seed_or(cfg, "seed", 1);
    const double target = num_or(cfg, "target", 0.01);
    const std::vector<double> deltas = vec_or(cfg, "deltas", {0.0, 0.05, 0.1, 0.2});
    const double u_hi0 = num_or(cfg, "u_hi", 64.0);
    if (!(horizon > 0.0)) {
        throw InvalidInput("ruin2d: horizon must be > 0");
    }
    if (n_paths < 2 || n_steps == 0) {
        throw InvalidInput("ruin2d: n_paths and n_steps must be positive");
    }
    if (!(target > 0.0 && target < 1.0)) {
        throw InvalidInput("ruin2d: target must lie in (0, 1)");
    }
    for (double d : deltas) {
        if (!(d >= 0.0)) {
            throw InvalidInput("ruin2d: deltas must be >= 0");
        }
    }
    const double lb1 = beta * b[0] + b[1];
    const double lb2 = b[0] + beta * b[1];
    if (!(lb1 > 0.0 && lb2 > 0.0)) {
        throw InvalidInput("ruin2d: capital allocation b must load both half-spaces");
    }

    // Per-path infima of the two linear forms along S(t) = drift t + chol dB;
    // every level u then prices instantly as u * (L_i . b) + inf L_i S.
    const auto chol = cholesky2x2(sigma);
    const double h = horizon / static_cast<double>(n_steps);
    const double sqrt_h = std::sqrt(h);
    std::vector<double> inf1(n_paths), inf2(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        auto eng = make_engine(seed, i);
        double s1 = 0.0;
        double s2 = 0.0;
        double g1 = 0.0; // L1 . S at t=0
        double g2 = 0.0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double z1 = normal_draw(eng);
            const double z2 = normal_draw(eng);
            s1 += drift[0] * h + chol[0] * sqrt_h * z1;
            s2 += drift[1] * h + chol[1] * sqrt_h * z1 + chol[2] * sqrt_h * z2;
            g1 = std::min(g1, beta * s1 + s2);
            g2 = std::min(g2, s1 + beta * s2);
        }
        inf1[i] = g1;
        inf2[i] = g2;
    }

    const double one_plus_b2 = 1.0 + beta * beta;
    const double uniform_w = 1.0 / static_cast<double>(n_paths);
    auto worst_case_at = [&](double u, double delta) {
        std::vector<double> dist(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            const double g = std::min(u * lb1 + inf1[i], u * lb2 + inf2[i]);
            dist[i] = g > 0.0 ? g * g / one_plus_b2 : 0.0;
        }
        DistanceProfile profile(std::move(dist), std::vector<double>(n_paths, uniform_w));
        return worst_case_probability(profile, delta);
    };

    ojson rows = ojson::array();
    std::string csv = "delta,u_required\n";
    for (double delta : deltas) {
        double lo = 0.0;
        double hi = u_hi0;
        int expand = 0;
        while (worst_case_at(hi, delta).value > target) {
            hi *= 2.0;
            if (++expand > 40) {
                throw SolverError("ruin2d: target probability unreachable within the bracket");
            }
        }
        while (hi - lo > 1e-9 * (1.0 + hi)) {
            const double mid = 0.5 * (lo + hi);
            if (worst_case_at(mid, delta).value <= target) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        const WorstCaseProbability wc = worst_case_at(hi, delta);
        double inflated = std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(wc.lambda_star) && wc.lambda_star > 0.0) {
            inflated = inflated_level_2d(wc.lambda_star, beta);
        }
        rows.push_back({{"delta", delta},
                        {"u_required", hi},
                        {"worst_case_prob", wc.value},
                        {"lambda_star", jnum(wc.lambda_star)},
                        {"inflated_level", jnum(inflated)}});
        csv += fmt(delta) + "," + fmt(hi) + "\n";
    }

    ojson resolved;
    resolved["beta"] = beta;
    resolved["b"] = b;
    resolved["drift"] = drift;
    resolved["sigma"] = {{sigma[0][0], sigma[0][1]}, {sigma[1][0], sigma[1][1]}};
    resolved["horizon"] = horizon;
    resolved["n_paths"] = n_paths;
    resolved["n_steps"] = n_steps;
    resolved["seed"] = seed;
    resolved["target"] = target;
    resolved["deltas"] = deltas;
    resolved["u_hi"] = u_hi0;
    ojson report = report_shell("ruin2d", std::move(resolved));
    report["results"] = {{"rows", std::move(rows)}};
    return {report.dump(2) + "\n", std::move(csv)};
}

// ------------------------------------------------------------------- reinsurance

ExperimentOutput reinsurance_impl(const std::string& config_json) {
    const ojson cfg = parse_config(config_json);
    check_keys(cfg,
               {"model", "claims", "delta", "calibration", "optimize", "n_paths", "n_steps",
                "seed", "curve_points"},
               "reinsurance");
    if (cfg.contains("delta") && cfg.contains("calibration")) {
        throw InvalidInput("reinsurance: give either 'delta' or 'calibration', not both");
    }

    ClaimSampler claims;
    bool have_claims = false;
    if (cfg.contains("claims")) {
        claims = make_claim_sampler(cfg.at("claims"));
        have_claims = true;
    }

    ojson model_json = cfg.contains("model") ? cfg.at("model") : ojson::object();
    if (!model_json.contains("theta")) {
        model_json["theta"] = 0.3;
    }
    ojson model_resolved;
    const ClaimModel model =
        model_from_json(model_json, have_claims ? &claims : nullptr, model_resolved);

    const std::size_t n_paths = count_or(cfg, "n_paths", 20000);
    const std::size_t n_steps = count_or(cfg, "n_steps", 1024);
    const std::uint64_t seed = seed_or(cfg, "seed", 1);

    double delta = num_or(cfg, "delta", 0.0);
    ojson calibration_block;
    if (cfg.contains("calibration")) {
        const ojson& cal = cfg.at("calibration");
        check_keys(cal, {"replications", "confidence", "grid_step", "grid_tol", "seed"},
                   "reinsurance.calibration");
        if (!have_claims) {
            claims = make_claim_sampler(ojson::object());
            have_claims = true;
        }
        CalibrationConfig cc;
        cc.replications = count_or(cal, "replications", 500);
        cc.confidence = num_or(cal, "confidence", 0.95);
        cc.grid_step = num_or(cal, "grid_step", 1e-3);
        cc.grid_tol = num_or(cal, "grid_tol", 1e-9);
        cc.seed = seed_or(cal, "seed", seed);
        const CalibrationResult cr = estimate_delta(model, claims.draw, cc);
        delta = cr.delta_hat;
        calibration_block = {{"replications", cr.replications},
                             {"confidence", cr.confidence},
                             {"grid_step", cc.grid_step},
                             {"seed", cr.seed},
                             {"delta_hat", cr.delta_hat},
                             {"ci", {cr.ci_lo, cr.ci_hi}},
                             {"median_cost", cr.median_cost},
                             {"mean_cost", cr.mean_cost},
                             {"sd", cr.sd_cost}};
    }
    if (!(delta >= 0.0)) {
        throw InvalidInput("reinsurance: delta must be >= 0");
    }

    OptimizeBOptions opts;
    if (cfg.contains("optimize")) {
        const ojson& o = cfg.at("optimize");
        check_keys(o, {"b_min", "b_max", "coarse_step", "refine_tol", "flat_tol"},
                   "reinsurance.optimize");
        opts.b_min = num_or(o, "b_min", opts.b_min);
        opts.b_max = num_or(o, "b_max", opts.b_max);
        opts.coarse_step = num_or(o, "coarse_step", opts.coarse_step);
        opts.refine_tol = num_or(o, "refine_tol", opts.refine_tol);
        opts.flat_tol = num_or(o, "flat_tol", opts.flat_tol);
    }
    opts.inner.n_paths = n_paths;
    opts.inner.n_steps = n_steps;
    opts.inner.seed = seed;

    const OptimizeBResult best = optimize_b(model, delta, opts);

    const std::size_t curve_points = count_or(cfg, "curve_points", 21);
    std::string csv = "b,loss\n";
    if (curve_points >= 2) {
        ExpectedMaxOptions inner = opts.inner;
        inner.method = ExpectedMaxMethod::MonteCarlo;
        for (std::size_t i = 0; i < curve_points; ++i) {
            const double bb = opts.b_min + (opts.b_max - opts.b_min) * static_cast<double>(i) /
                                               static_cast<double>(curve_points - 1);
            csv += fmt(bb) + "," + fmt(robust_loss(model, bb, delta, inner).value) + "\n";
        }
    }

    ojson resolved;
    resolved["model"] = std::move(model_resolved);
    if (have_claims) {
        resolved["claims"] = claims.resolved;
    }
    resolved["delta"] = delta;
    resolved["optimize"] = {{"b_min", opts.b_min},
                            {"b_max", opts.b_max},
                            {"coarse_step", opts.coarse_step},
                            {"refine_tol", opts.refine_tol},
                            {"flat_tol", opts.flat_tol}};
    resolved["n_paths"] = n_paths;
    resolved["n_steps"] = n_steps;
    resolved["seed"] = seed;
    resolved["curve_points"] = curve_points;
    ojson report = report_shell("reinsurance", std::move(resolved));
    ojson results = {{"b_star", best.b_star},
                     {"value", best.value},
                     {"delta", best.delta},
                     {"method", "monte-carlo-crn"},
                     {"seed", best.seed},
                     {"evaluations", best.evaluations}};
    if (!calibration_block.is_null()) {
        results["calibration"] = std::move(calibration_block);
    }
    report["results"] = std::move(results);
    return {report.dump(2) + "\n", std::move(csv)};
}

// --------------------------------------------------------------------- calibrate

ExperimentOutput calibrate_impl(const std::string& config_json) {
    const ojson cfg = parse_config(config_json);
    check_keys(cfg,
               {"model", "claims", "replications", "confidence", "grid_step", "grid_tol",
                "seed"},
               "calibrate");
    const ClaimSampler claims =
        make_claim_sampler(cfg.contains("claims") ? cfg.at("claims") : ojson::object());
    ojson model_resolved;
    const ClaimModel model = model_from_json(
        cfg.contains("model") ? cfg.at("model") : ojson::object(), &claims, model_resolved);

    CalibrationConfig cc;
    cc.replications = count_or(cfg, "replications", 500);
    cc.confidence = num_or(cfg, "confidence", 0.95);
    cc.grid_step = num_or(cfg, "grid_step", 1e-3);
    cc.grid_tol = num_or(cfg, "grid_tol", 1e-9);
    cc.seed = seed_or(cfg, "seed", 1);

    const CalibrationResult cr = estimate_delta(model, claims.draw, cc);

    std::string csv = "replication,cost\n";
    for (std::size_t i = 0; i < cr.costs.size(); ++i) {
        csv += std::to_string(i) + "," + fmt(cr.costs[i]) + "\n";
    }

    ojson resolved;
    resolved["model"] = std::move(model_resolved);
    resolved["claims"] = claims.resolved;
    resolved["replications"] = cc.replications;
    resolved["confidence"] = cc.confidence;
    resolved["grid_step"] = cc.grid_step;
    resolved["grid_tol"] = cc.grid_tol;
    resolved["seed"] = cc.seed;
    ojson report = report_shell("calibrate", std::move(resolved));
    report["results"] = {{"delta_hat", cr.delta_hat},
                         {"ci", {cr.ci_lo, cr.ci_hi}},
                         {"n", cr.replications},
                         {"median_cost", cr.median_cost},
                         {"mean_cost", cr.mean_cost},
                         {"sd", cr.sd_cost},
                         {"seed", cr.seed}};
    return {report.dump(2) + "\n", std::move(csv)};
}

} // namespace

ExperimentOutput run_verify_duality(const std::string& config_json) {
    return verify_duality_impl(config_json);
}
ExperimentOutput run_ruin1d(const std::string& config_json) { return ruin1d_impl(config_json); }
ExperimentOutput run_ruin2d(const std::string& config_json) { return ruin2d_impl(config_json); }
ExperimentOutput run_reinsurance(const std::string& config_json) {
    return reinsurance_impl(config_json);
}
ExperimentOutput run_calibrate(const std::string& config_json) {
    return calibrate_impl(config_json);
}

ExperimentOutput run_experiment(const std::string& command, const std::string& config_json) {
    if (command == "verify-duality") {
        return run_verify_duality(config_json);
    }
    if (command == "ruin1d") {
        return run_ruin1d(config_json);
    }
    if (command == "ruin2d") {
        return run_ruin2d(config_json);
    }
    if (command == "reinsurance") {
        return run_reinsurance(config_json);
    }
    if (command == "calibrate") {
        return run_calibrate(config_json);
    }
    throw InvalidInput("unknown experiment command '" + command + "'");
}

} // namespace otrisk
