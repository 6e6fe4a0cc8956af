#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/numerics.hpp"

namespace otrisk {

/**
 * @brief Dense coupling (transport plan) between the atoms of a source
 * measure (rows) and a set of target points (columns).
 *
 * Entry (i, j) is the mass moved from source atom i to target j.  A feasible
 * coupling has nonnegative entries, row sums equal to the source weights and
 * transport cost within the budget.
 */
class CouplingMatrix {
public:
    CouplingMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0)
            throw InvalidInput("CouplingMatrix: empty dimensions");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }

    double row_sum(std::size_t i) const { return pairwise_sum(row(i)); }

    /// Total transported mass.
    double total_mass() const { return pairwise_sum(values_); }

    /// sum_ij pi_ij * cost(i, j) for a row-major cost table of the same shape.
    double transport_cost(std::span<const double> cost_row_major) const {
        if (cost_row_major.size() != values_.size())
            throw InvalidInput("CouplingMatrix: cost table shape mismatch");
        return pairwise_dot(values_, cost_row_major);
    }

    /**
     * @brief Feasibility certificate: entries >= -entry_tol, row sums match
     * `marginals` within marginal_tol, transport cost <= delta + budget_tol.
     * Throws InfeasibleCoupling with the failing quantity otherwise.
     */
    void validate_feasible(std::span<const double> marginals,
                           std::span<const double> cost_row_major,
                           double delta,
                           double marginal_tol = 1e-9,
                           double budget_tol = 1e-9,
                           double entry_tol = 1e-12) const;

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_; // row-major
};

} // namespace otrisk
