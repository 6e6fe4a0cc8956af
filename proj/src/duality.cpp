#include "otrisk/duality.hpp"

#include <cmath>

namespace otrisk {
namespace detail {

DualSolution minimize_convex_dual(const std::function<double(double)>& J,
                                  double delta,
                                  double mean_f,
                                  const DualOptions& opts) {
    if (!(opts.tol > 0.0)) throw InvalidInput("minimize_dual: tol must be > 0");
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t evals = 0;
    auto eval = [&](double lam) {
        ++evals;
        return J(lam);
    };

    const double j0 = eval(0.0);

    double lo = 0.0;
    double hi = 0.0;
    if (std::isfinite(j0) && delta > 0.0) {
        // phi_lambda >= f gives J(lam) >= lam*delta + mean_f, so any minimizer
        // satisfies lam <= (J(0) - mean_f) / delta.
        hi = std::max((j0 - mean_f) / delta, 0.0) * (1.0 + 1e-9) + 1e-12;
        if (opts.lambda_max_hint > 0.0) hi = std::min(hi, opts.lambda_max_hint);
    } else {
        // J(0) infinite (closed forms) or delta = 0 (monotone tail): find a
        // finite probe, then expand geometrically until J stops decreasing.
        double probe = opts.lambda_max_hint > 0.0 ? opts.lambda_max_hint : 1.0;
        double j_probe = eval(probe);
        int tries = 0;
        while (std::isinf(j_probe) && tries < 80) {
            probe *= 2.0;
            j_probe = eval(probe);
            ++tries;
        }
        if (std::isinf(j_probe))
            throw UnboundedDual("minimize_dual: dual objective is +infinity on the search range");
        // left edge: shrink toward 0 while values stay finite
        lo = std::isfinite(j0) ? 0.0 : probe / 1024.0;
        while (!std::isfinite(eval(lo)) && lo < probe) lo = std::min(probe, lo * 4.0);
        // right edge: double until no further decrease
        hi = probe;
        double j_hi = j_probe;
        for (int i = 0; i < 80; ++i) {
            const double next = hi * 2.0;
            const double j_next = eval(next);
            const bool still_decreasing =
                j_next < j_hi - opts.tol * (1.0 + std::abs(j_hi)) * 1e-3;
            hi = next;
            j_hi = j_next;
            if (!still_decreasing && delta > 0.0) break;
            if (!still_decreasing && delta == 0.0 && i > 4) break; // plateau reached
        }
    }
    if (hi <= lo) hi = lo + 1.0;

    const double x_tol = std::max((hi - lo) * 1e-12, 1e-300);
    GoldenResult g = golden_section_min(eval, lo, hi, x_tol);

    DualSolution sol;
    sol.lambda_star = g.x;
    sol.value = g.value;
    sol.iterations = evals + g.iterations;
    sol.bracket_lo = g.bracket_lo;
    sol.bracket_hi = g.bracket_hi;
    sol.tolerance = opts.tol;
    const double tol_abs = opts.tol * (1.0 + std::abs(sol.value));
    if (std::isfinite(j0) && j0 <= sol.value + tol_abs) {
        sol.attained_at_zero = true;
        sol.lambda_star = 0.0;
        sol.value = std::min(sol.value, j0);
    }
    return sol;
}

} // namespace detail
} // namespace otrisk
