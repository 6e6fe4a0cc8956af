#include "otrisk/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otrisk {

namespace {

// Recursive cascade over a contiguous block; switches to a simple loop below
// a small block size (error there is negligible and the loop is faster).
double pairwise_block(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_block(x, half) + pairwise_block(x + half, n - half);
}

double pairwise_dot_block(const double* x, const double* y, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_dot_block(x, y, half) + pairwise_dot_block(x + half, y + half, n - half);
}

double simpson_rule(double fa, double fm, double fb, double h) {
    return (h / 6.0) * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f,
                            double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, m - a);
    const double right = simpson_rule(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double pairwise_sum(std::span<const double> x) {
    return x.empty() ? 0.0 : pairwise_block(x.data(), x.size());
}

double pairwise_dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return x.empty() ? 0.0 : pairwise_dot_block(x.data(), y.data(), x.size());
}

double normal_upper_tail(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double log_normal_upper_tail(double z) {
    if (z < 20.0) {
        return std::log(normal_upper_tail(z)); // erfc is exact enough here
    }
    // Asymptotic: log tail = -z^2/2 - log(z sqrt(2 pi)) + log(1 - 1/z^2 + 3/z^4 - ...)
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(z) - 0.9189385332046727418 + std::log(series);
}

GoldenResult golden_section_min(const std::function<double(double)>& f,
                                double lo, double hi,
                                double x_tol, std::size_t max_iter) {
    if (!(lo <= hi)) throw std::invalid_argument("golden_section_min: lo > hi");
    static const double phi = (std::sqrt(5.0) - 1.0) / 2.0; // 0.618...
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    std::size_t it = 2;
    while (b - a > x_tol && it < max_iter) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
        ++it;
    }
    GoldenResult r;
    r.x = (f1 <= f2) ? x1 : x2;
    r.value = std::min(f1, f2);
    r.iterations = it;
    r.bracket_lo = a;
    r.bracket_hi = b;
    // Endpoints can beat the interior probes when the minimum sits on the
    // boundary of the original interval.
    const double fa = f(a);
    if (fa < r.value) { r.x = a; r.value = fa; }
    const double fb = f(b);
    if (fb < r.value) { r.x = b; r.value = fb; }
    return r;
}

double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson_rule(fa, fm, fb, b - a);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double ks_statistic(std::span<const double> sorted_sample,
                    const std::function<double(double)>& cdf) {
    const std::size_t n = sorted_sample.size();
    if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf(sorted_sample[i]);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - F;
        const double lo = F - static_cast<double>(i) / static_cast<double>(n);
        d = std::max({d, hi, lo});
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha) {
    double c;
    if (alpha == 0.01) c = 1.62762;
    else if (alpha == 0.05) c = 1.35810;
    else c = std::sqrt(-0.5 * std::log(alpha / 2.0)); // asymptotic inverse
    return c / std::sqrt(static_cast<double>(n));
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0xA5A5A5A55A5A5A5AULL + stream * 0x9E3779B97F4A7C15ULL);
    (void)splitmix64(s);
    return splitmix64(s);
}

MeanSd mean_sd(std::span<const double> x) {
    MeanSd r;
    r.n = x.size();
    if (r.n == 0) return r;
    r.mean = pairwise_sum(x) / static_cast<double>(r.n);
    if (r.n == 1) return r;
    double ss = 0.0;
    for (double v : x) {
        const double d = v - r.mean;
        ss += d * d;
    }
    r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
    return r;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    // Solve normal_upper_tail(z) = 1 - p by Newton; symmetric around 0.
    const double alpha = std::min(p, 1.0 - p);
    double z = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double f = normal_upper_tail(z) - alpha;
        const double df = -normal_pdf(z);
        const double step = f / df;
        z -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return p < 0.5 ? -z : z;
}

double mean_ci_halfwidth(const MeanSd& ms, double confidence) {
    if (ms.n < 2) return 0.0;
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("mean_ci_halfwidth: confidence must be in (0,1)");
    const double z = normal_quantile(0.5 * (1.0 + confidence));
    return z * ms.sd / std::sqrt(static_cast<double>(ms.n));
}

} // namespace otrisk
