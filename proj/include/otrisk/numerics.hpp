#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace otrisk {

/// Pairwise (cascade) summation.  Deterministic for a fixed element order and
/// O(log n) error growth, which keeps 1e7-atom weight totals inside 1e-12.
double pairwise_sum(std::span<const double> x);

/// Pairwise summation of x[i] * y[i].
double pairwise_dot(std::span<const double> x, std::span<const double> y);

/// Standard normal upper tail P(N > z) = erfc(z / sqrt 2) / 2.
double normal_upper_tail(double z);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal density.
double normal_pdf(double z);

/// Inverse standard normal CDF (quantile), p in (0,1).
double normal_quantile(double p);

/// log P(N > z), accurate far into the right tail (asymptotic expansion once
/// erfc underflows).  Lets reflection terms exp(k) * tail(z) be evaluated as
/// exp(k + log tail) without overflow.
double log_normal_upper_tail(double z);

struct GoldenResult {
    double x = 0.0;          ///< argmin
    double value = 0.0;      ///< f(argmin)
    std::size_t iterations = 0;
    double bracket_lo = 0.0; ///< final bracket
    double bracket_hi = 0.0;
};

/**
 * @brief Golden-section minimization of a unimodal (convex) function on [lo, hi].
 *
 * Shrinks the bracket until its width is below `x_tol` (absolute) or until
 * `max_iter` evaluations.  Handles +infinity function values by keeping the
 * finite side of the bracket.
 */
GoldenResult golden_section_min(const std::function<double(double)>& f,
                                double lo, double hi,
                                double x_tol, std::size_t max_iter = 400);

/**
 * @brief Adaptive Simpson quadrature of f on [a, b].
 *
 * `tol` is an absolute tolerance on the integral.  Recursion depth is capped;
 * intended for smooth, monotone-tailed integrands (crossing probabilities).
 */
double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double tol, int max_depth = 40);

/// One-sample Kolmogorov-Smirnov statistic of `sorted_sample` against a CDF.
double ks_statistic(std::span<const double> sorted_sample,
                    const std::function<double(double)>& cdf);

/// Asymptotic KS critical value c(alpha)/sqrt(n) for alpha in {0.01, 0.05}.
double ks_critical_value(std::size_t n, double alpha);

/// SplitMix64 step; used to derive independent sub-stream seeds from a master
/// seed without correlation between streams.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for sub-stream `stream` of master seed `master` (stable mapping).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Mean and (unbiased) standard deviation of a sample.
struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};
MeanSd mean_sd(std::span<const double> x);

/// Two-sided normal-approximation CI half-width for a sample mean.
double mean_ci_halfwidth(const MeanSd& ms, double confidence);

} // namespace otrisk
