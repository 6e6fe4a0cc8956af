#include "otrisk/coupling.hpp"

#include <cmath>
#include <sstream>

namespace otrisk {

void CouplingMatrix::validate_feasible(std::span<const double> marginals,
                                       std::span<const double> cost_row_major,
                                       double delta,
                                       double marginal_tol,
                                       double budget_tol,
                                       double entry_tol) const {
    if (marginals.size() != rows_)
        throw InvalidInput("CouplingMatrix: marginal size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= -entry_tol) || !std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "coupling entry " << i / cols_ << "," << i % cols_
                << " = " << values_[i] << " is negative beyond tolerance";
            throw InfeasibleCoupling(msg.str());
        }
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        const double rs = row_sum(i);
        if (std::abs(rs - marginals[i]) > marginal_tol) {
            std::ostringstream msg;
            msg << "row " << i << " sum " << rs << " differs from marginal "
                << marginals[i] << " by " << std::abs(rs - marginals[i]);
            throw InfeasibleCoupling(msg.str());
        }
    }
    const double cost = transport_cost(cost_row_major);
    if (cost > delta + budget_tol) {
        std::ostringstream msg;
        msg << "transport cost " << cost << " exceeds budget " << delta;
        throw InfeasibleCoupling(msg.str());
    }
}

} // namespace otrisk
