#include "otrisk/finite_lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace otrisk {

void FiniteInstance::validate(std::size_t max_support) {
    const std::size_t n = mu.size();
    if (n == 0) throw InvalidInput("FiniteInstance: empty instance");
    if (n > max_support) {
        std::ostringstream msg;
        msg << "FiniteInstance: support size " << n << " exceeds limit " << max_support;
        throw InvalidInput(msg.str());
    }
    if (f.size() != n || cost.size() != n * n)
        throw InvalidInput("FiniteInstance: shape mismatch between mu, f and cost");
    if (!support.empty() && support.size() != n)
        throw InvalidInput("FiniteInstance: support label count mismatch");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw InvalidInput("FiniteInstance: delta must be finite and >= 0");
    double total = 0.0;
    for (double w : mu) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw InvalidInput("FiniteInstance: mu weights must be positive and finite");
        total += w;
    }
    for (double v : f)
        if (!std::isfinite(v)) throw InvalidInput("FiniteInstance: f must be finite");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = cost[i * n + j];
            if (!std::isfinite(c) || c < 0.0)
                throw InvalidInput("FiniteInstance: costs must be finite and >= 0");
            if (i == j && c != 0.0)
                throw InvalidInput("FiniteInstance: cost diagonal must be zero");
            if (i != j && !(c > 0.0))
                throw InvalidInput("FiniteInstance: off-diagonal costs must be strictly positive");
        }
    }
    for (double& w : mu) w /= total;
}

FiniteInstance finite_instance_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance JSON: ") + e.what(), 0);
    }
    FiniteInstance inst;
    try {
        inst.support = j.value("support", std::vector<double>{});
        inst.mu = j.at("mu").get<std::vector<double>>();
        inst.f = j.at("f").get<std::vector<double>>();
        inst.delta = j.at("delta").get<double>();
        const auto& rows = j.at("cost");
        for (const auto& row : rows) {
            const auto r = row.get<std::vector<double>>();
            inst.cost.insert(inst.cost.end(), r.begin(), r.end());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("instance JSON: ") + e.what(), 0);
    }
    inst.validate();
    return inst;
}

std::string finite_instance_to_json(const FiniteInstance& inst) {
    nlohmann::json j;
    j["support"] = inst.support;
    j["mu"] = inst.mu;
    j["f"] = inst.f;
    j["delta"] = inst.delta;
    const std::size_t n = inst.size();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(std::vector<double>(inst.cost.begin() + i * n,
                                           inst.cost.begin() + (i + 1) * n));
    }
    j["cost"] = rows;
    return j.dump(2);
}

FiniteInstance finite_instance_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("finite_instance_from_json_file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return finite_instance_from_json(ss.str());
}

namespace {

/// Revised simplex working state.  Rows 0..n-1 are the marginal constraints,
/// row n is the budget row (with slack variable index n*n).
class SimplexSolver {
public:
    explicit SimplexSolver(const FiniteInstance& inst)
        : inst_(inst), n_(inst.size()), m_(n_ + 1), slack_(n_ * n_),
          basis_(m_), x_basis_(m_), binv_(m_ * m_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            basis_[i] = i * n_ + i; // identity coupling
            x_basis_[i] = inst_.mu[i];
        }
        basis_[n_] = slack_;
        x_basis_[n_] = inst_.delta;
        for (std::size_t k = 0; k < m_; ++k) binv_[k * m_ + k] = 1.0;
        double fmax = 0.0;
        for (double v : inst_.f) fmax = std::max(fmax, std::abs(v));
        opt_tol_ = 1e-10 * (1.0 + fmax);
    }

    PrimalSolution solve() {
        const std::size_t iter_cap = 100000;
        const std::size_t stall_limit = 4 * (m_ + 16);
        std::size_t stall = 0;
        bool bland = false;
        double best_obj = objective();
        std::size_t it = 0;
        for (; it < iter_cap; ++it) {
            compute_duals();
            const std::ptrdiff_t entering = price(bland);
            if (entering < 0) break; // optimal
            if (!pivot(static_cast<std::size_t>(entering)))
                throw SolverError("simplex: no positive pivot in ratio test (unbounded direction)");
            if ((it + 1) % 64 == 0) refactorize();
            const double obj = objective();
            if (obj > best_obj + 1e-13 * (1.0 + std::abs(best_obj))) {
                best_obj = obj;
                stall = 0;
                bland = false;
            } else if (++stall > stall_limit) {
                bland = true; // anti-cycling
            }
        }
        if (it == iter_cap)
            throw SolverError("simplex: iteration cap reached");
        return extract(it);
    }

private:
    double obj_coeff(std::size_t v) const {
        return v == slack_ ? 0.0 : inst_.f[v % n_];
    }

    double objective() const {
        double s = 0.0;
        for (std::size_t k = 0; k < m_; ++k) s += obj_coeff(basis_[k]) * x_basis_[k];
        return s;
    }

    void compute_duals() {
        y_.assign(m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            const double c = obj_coeff(basis_[k]);
            if (c == 0.0) continue;
            const double* row = binv_.data() + k * m_;
            for (std::size_t r = 0; r < m_; ++r) y_[r] += c * row[r];
        }
    }

    double reduced_cost(std::size_t v) const {
        if (v == slack_) return -y_[n_];
        const std::size_t i = v / n_;
        const std::size_t j = v % n_;
        return inst_.f[j] - y_[i] - y_[n_] * inst_.cost[i * n_ + j];
    }

    /// Entering variable: most positive reduced cost (Dantzig) or the first
    /// positive one (Bland).  Returns -1 when none exceeds the tolerance.
    std::ptrdiff_t price(bool bland) const {
        std::ptrdiff_t best = -1;
        double best_rc = opt_tol_;
        const std::size_t total = n_ * n_ + 1;
        for (std::size_t v = 0; v < total; ++v) {
            const double rc = reduced_cost(v);
            if (rc > best_rc) {
                best = static_cast<std::ptrdiff_t>(v);
                if (bland) return best;
                best_rc = rc;
            }
        }
        return best;
    }

    void entering_column(std::size_t v, std::vector<double>& d) const {
        d.assign(m_, 0.0);
        if (v == slack_) {
            for (std::size_t k = 0; k < m_; ++k) d[k] = binv_[k * m_ + n_];
            return;
        }
        const std::size_t i = v / n_;
        const double c = inst_.cost[i * n_ + (v % n_)];
        for (std::size_t k = 0; k < m_; ++k)
            d[k] = binv_[k * m_ + i] + c * binv_[k * m_ + n_];
    }

    bool pivot(std::size_t entering) {
        entering_column(entering, d_);
        const double pivot_tol = 1e-11;
        std::ptrdiff_t leave = -1;
        double best_ratio = 0.0;
        for (std::size_t k = 0; k < m_; ++k) {
            if (d_[k] <= pivot_tol) continue;
            const double ratio = std::max(x_basis_[k], 0.0) / d_[k];
            if (leave < 0) {
                leave = static_cast<std::ptrdiff_t>(k);
                best_ratio = ratio;
                continue;
            }
            const double tie_tol = 1e-12 * (1.0 + best_ratio);
            // Strictly better ratio wins; ties go to the lowest variable index
            // (Bland-style) to keep degenerate pivots from cycling.
            if (ratio < best_ratio - tie_tol ||
                (ratio <= best_ratio + tie_tol && basis_[k] < basis_[static_cast<std::size_t>(leave)])) {
                leave = static_cast<std::ptrdiff_t>(k);
                best_ratio = std::min(best_ratio, ratio);
            }
        }
        if (leave < 0) return false;
        const std::size_t r = static_cast<std::size_t>(leave);
        const double theta = best_ratio;
        for (std::size_t k = 0; k < m_; ++k) {
            x_basis_[k] -= theta * d_[k];
            if (x_basis_[k] < 0.0 && x_basis_[k] > -1e-12) x_basis_[k] = 0.0;
        }
        x_basis_[r] = theta;
        // row-reduce the explicit inverse
        double* prow = binv_.data() + r * m_;
        const double inv_pivot = 1.0 / d_[r];
        for (std::size_t c = 0; c < m_; ++c) prow[c] *= inv_pivot;
        for (std::size_t k = 0; k < m_; ++k) {
            if (k == r || d_[k] == 0.0) continue;
            double* krow = binv_.data() + k * m_;
            const double factor = d_[k];
            for (std::size_t c = 0; c < m_; ++c) krow[c] -= factor * prow[c];
        }
        basis_[r] = entering;
        return true;
    }

    /// Rebuilds the explicit inverse from the basis columns (Gauss-Jordan with
    /// partial pivoting) to keep roundoff from accumulating.
    void refactorize() {
        std::vector<double> a(m_ * m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            const std::size_t v = basis_[k];
            if (v == slack_) {
                a[n_ * m_ + k] = 1.0;
            } else {
                const std::size_t i = v / n_;
                a[i * m_ + k] = 1.0;
                a[n_ * m_ + k] += inst_.cost[i * n_ + (v % n_)];
            }
        }
        std::vector<double> inv(m_ * m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) inv[k * m_ + k] = 1.0;
        for (std::size_t col = 0; col < m_; ++col) {
            std::size_t piv = col;
            double best = std::abs(a[col * m_ + col]);
            for (std::size_t r = col + 1; r < m_; ++r) {
                const double v = std::abs(a[r * m_ + col]);
                if (v > best) { best = v; piv = r; }
            }
            if (best < 1e-12)
                throw SolverError("simplex: singular basis during refactorization (pivot < 1e-12)");
            if (piv != col) {
                for (std::size_t c = 0; c < m_; ++c) {
                    std::swap(a[piv * m_ + c], a[col * m_ + c]);
                    std::swap(inv[piv * m_ + c], inv[col * m_ + c]);
                }
            }
            const double ip = 1.0 / a[col * m_ + col];
            for (std::size_t c = 0; c < m_; ++c) {
                a[col * m_ + c] *= ip;
                inv[col * m_ + c] *= ip;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double factor = a[r * m_ + col];
                if (factor == 0.0) continue;
                for (std::size_t c = 0; c < m_; ++c) {
                    a[r * m_ + c] -= factor * a[col * m_ + c];
                    inv[r * m_ + c] -= factor * inv[col * m_ + c];
                }
            }
        }
        binv_ = std::move(inv);
        // refresh basic values: x_B = Binv * b
        std::vector<double> b(m_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) b[i] = inst_.mu[i];
        b[n_] = inst_.delta;
        for (std::size_t k = 0; k < m_; ++k) {
            double s = 0.0;
            const double* row = binv_.data() + k * m_;
            for (std::size_t r = 0; r < m_; ++r) s += row[r] * b[r];
            x_basis_[k] = std::max(s, 0.0);
        }
    }

    PrimalSolution extract(std::size_t iterations) const {
        PrimalSolution sol{0.0, 0.0, CouplingMatrix(n_, n_), iterations};
        for (std::size_t k = 0; k < m_; ++k) {
            const std::size_t v = basis_[k];
            if (v == slack_) continue;
            const double mass = std::max(x_basis_[k], 0.0);
            sol.coupling.at(v / n_, v % n_) += mass;
        }
        std::vector<double> fcol(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) fcol[i * n_ + j] = inst_.f[j];
        sol.value = pairwise_dot(sol.coupling.values(), fcol);
        sol.transport_cost = sol.coupling.transport_cost(inst_.cost);
        sol.coupling.validate_feasible(inst_.mu, inst_.cost, inst_.delta);
        return sol;
    }

    const FiniteInstance& inst_;
    std::size_t n_, m_, slack_;
    std::vector<std::size_t> basis_;
    std::vector<double> x_basis_;
    std::vector<double> binv_; // row-major m x m
    std::vector<double> y_;
    std::vector<double> d_;
    double opt_tol_ = 1e-10;
};

} // namespace

PrimalSolution solve_primal_lp(const FiniteInstance& inst) {
    FiniteInstance checked = inst;
    checked.validate();
    SimplexSolver solver(checked);
    return solver.solve();
}

InnerProblem<std::size_t> make_index_inner(const FiniteInstance& inst) {
    const std::size_t n = inst.size();
    std::vector<std::size_t> candidates(n);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    const std::vector<double> f = inst.f;
    const std::vector<double> cost = inst.cost;
    InnerProblem<std::size_t> prob;
    prob.f = [f](const std::size_t& j) { return f[j]; };
    prob.cost = [cost, n](const std::size_t& i, const std::size_t& j) {
        return cost[i * n + j];
    };
    prob.strategy = typename InnerProblem<std::size_t>::FiniteEnumeration{std::move(candidates)};
    return prob;
}

EmpiricalMeasure<std::size_t> make_index_measure(const FiniteInstance& inst) {
    std::vector<std::size_t> idx(inst.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return EmpiricalMeasure<std::size_t>(std::move(idx), inst.mu);
}

DualSolution solve_dual(const FiniteInstance& inst, const DualOptions& opts) {
    FiniteInstance checked = inst;
    checked.validate();
    return minimize_dual(make_index_inner(checked), make_index_measure(checked),
                         checked.delta, opts);
}

GapReport duality_gap(const FiniteInstance& inst, const DualOptions& opts) {
    GapReport rep;
    rep.primal = solve_primal_lp(inst).value;
    rep.dual = solve_dual(inst, opts).value;
    rep.gap = std::abs(rep.primal - rep.dual);
    return rep;
}

SlacknessReport check_instance_slackness(const FiniteInstance& inst,
                                         const CouplingMatrix& pi,
                                         double lambda_star, double tol) {
    FiniteInstance checked = inst;
    checked.validate();
    std::vector<std::size_t> targets(checked.size());
    std::iota(targets.begin(), targets.end(), std::size_t{0});
    return check_slackness(pi, lambda_star, make_index_inner(checked),
                           make_index_measure(checked), targets, checked.delta, tol);
}

EpsilonOptimality check_instance_epsilon_optimality(const FiniteInstance& inst,
                                                    const CouplingMatrix& pi,
                                                    double lambda_star, double epsilon) {
    FiniteInstance checked = inst;
    checked.validate();
    std::vector<std::size_t> targets(checked.size());
    std::iota(targets.begin(), targets.end(), std::size_t{0});
    return epsilon_optimality_check(pi, lambda_star, make_index_inner(checked),
                                    make_index_measure(checked), targets,
                                    checked.delta, epsilon);
}

} // namespace otrisk
