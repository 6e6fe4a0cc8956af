#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otrisk/coupling.hpp"
#include "otrisk/duality.hpp"
#include "otrisk/errors.hpp"
#include "otrisk/measures.hpp"

namespace otrisk {

/**
 * @brief A fully enumerated instance of the robust bound on a finite space:
 * maximize  sum_ij pi_ij f_j  over couplings pi with row sums mu and
 * sum_ij pi_ij c_ij <= delta.
 *
 * `support` carries the state labels (for reports and JSON round trips); the
 * solver only uses `mu`, `f`, `cost` and `delta`.  Costs must have a zero
 * diagonal and strictly positive off-diagonal entries.
 */
struct FiniteInstance {
    std::vector<double> support;
    std::vector<double> mu;       ///< weights, renormalized at validation
    std::vector<double> f;
    std::vector<double> cost;     ///< row-major n x n
    double delta = 0.0;

    std::size_t size() const noexcept { return mu.size(); }

    /// Checks shapes, signs and the cost-structure requirements; renormalizes mu.
    void validate(std::size_t max_support = kDefaultMaxSupport);

    static constexpr std::size_t kDefaultMaxSupport = 512;
};

/// Serialization: {"support": [...], "mu": [...], "f": [...], "cost": [[...]], "delta": x}
FiniteInstance finite_instance_from_json(const std::string& json_text);
std::string finite_instance_to_json(const FiniteInstance& inst);
FiniteInstance finite_instance_from_json_file(const std::string& path);

struct PrimalSolution {
    double value = 0.0;
    double transport_cost = 0.0;
    CouplingMatrix coupling;
    std::size_t iterations = 0;
};

/**
 * @brief Exact primal solve by revised simplex (dense, explicit basis inverse,
 * Dantzig pricing with Bland's-rule fallback against cycling).
 *
 * The identity coupling plus a budget slack is an immediate feasible basis, so
 * no phase-1 is needed.  The returned coupling passes the feasibility
 * certificate at 1e-9 and the value is optimal to the LP tolerance.
 */
PrimalSolution solve_primal_lp(const FiniteInstance& inst);

/// Index-space inner problem for the instance (candidates = all atoms).
InnerProblem<std::size_t> make_index_inner(const FiniteInstance& inst);

/// Baseline measure over atom indices with the instance weights.
EmpiricalMeasure<std::size_t> make_index_measure(const FiniteInstance& inst);

/// Univariate dual solve for the instance.
DualSolution solve_dual(const FiniteInstance& inst, const DualOptions& opts = {});

struct GapReport {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0; ///< |primal - dual|
};

/// Solves both sides and reports the absolute duality gap.
GapReport duality_gap(const FiniteInstance& inst, const DualOptions& opts = {});

/// Slackness / epsilon-optimality wrappers on the instance's index space.
SlacknessReport check_instance_slackness(const FiniteInstance& inst,
                                         const CouplingMatrix& pi,
                                         double lambda_star, double tol = 1e-8);
EpsilonOptimality check_instance_epsilon_optimality(const FiniteInstance& inst,
                                                    const CouplingMatrix& pi,
                                                    double lambda_star, double epsilon);

} // namespace otrisk
