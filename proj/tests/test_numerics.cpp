#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "otrisk/numerics.hpp"
#include "otrisk/rng.hpp"

using namespace otrisk;

TEST_CASE("pairwise sum matches exact values and beats naive accumulation") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(pairwise_sum(v) == 10.0);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);

    // 1e6 copies of 0.1 summed pairwise stay within 1e-9 of the exact value.
    std::vector<double> many(1'000'000, 0.1);
    CHECK(std::abs(pairwise_sum(many) - 100'000.0) < 1e-9);
}

TEST_CASE("pairwise dot product") {
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{4.0, 5.0, 6.0};
    CHECK(pairwise_dot(x, y) == 32.0);
}

TEST_CASE("normal tail, cdf and density reference values") {
    CHECK(normal_upper_tail(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_upper_tail(2.0) == doctest::Approx(0.02275013194817921).epsilon(1e-12));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    for (double p : {0.01, 0.2, 0.6, 0.99, 0.999}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("log tail agrees with the direct tail and extends beyond underflow") {
    for (double z : {-3.0, 0.0, 1.5, 5.0, 12.0, 19.5}) {
        CHECK(log_normal_upper_tail(z) ==
              doctest::Approx(std::log(normal_upper_tail(z))).epsilon(1e-10));
    }
    // Across the switch to the asymptotic branch the values stay consistent.
    CHECK(log_normal_upper_tail(20.0 + 1e-9) ==
          doctest::Approx(log_normal_upper_tail(20.0 - 1e-9)).epsilon(1e-6));
    // Far beyond double underflow the log tail is still finite and ordered.
    const double l50 = log_normal_upper_tail(50.0);
    const double l60 = log_normal_upper_tail(60.0);
    CHECK(std::isfinite(l50));
    CHECK(l60 < l50);
    CHECK(l50 == doctest::Approx(-0.5 * 50.0 * 50.0 - std::log(50.0) - 0.918938533).epsilon(1e-3));
}

TEST_CASE("golden section finds the minimum of a convex function") {
    auto f = [](double x) { return (x - 1.3) * (x - 1.3) + 0.25; };
    const GoldenResult r = golden_section_min(f, 0.0, 5.0, 1e-10);
    CHECK(r.x == doctest::Approx(1.3).epsilon(1e-7));
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("golden section handles boundary minima and infinite plateaus") {
    // Increasing function: the minimum is the left endpoint.
    auto inc = [](double x) { return 2.0 * x + 1.0; };
    const GoldenResult left = golden_section_min(inc, 1.0, 4.0, 1e-10);
    CHECK(left.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(left.value == doctest::Approx(3.0).epsilon(1e-9));

    // +infinity on the left half must not trap the bracket.
    auto partial = [](double x) {
        return x < 1.0 ? std::numeric_limits<double>::infinity() : (x - 2.0) * (x - 2.0);
    };
    const GoldenResult r = golden_section_min(partial, 0.0, 5.0, 1e-10);
    CHECK(r.x == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("adaptive Simpson integrates smooth functions to tolerance") {
    auto cubic = [](double x) { return x * x * x; };
    CHECK(adaptive_simpson(cubic, 0.0, 1.0, 1e-12) == doctest::Approx(0.25).epsilon(1e-12));

    auto gauss = [](double x) { return std::exp(-x * x); };
    CHECK(adaptive_simpson(gauss, 0.0, 2.0, 1e-12) ==
          doctest::Approx(0.8820813907624215).epsilon(1e-10));
}

TEST_CASE("Kolmogorov-Smirnov statistic and critical values") {
    auto uniform_cdf = [](double x) { return x; };
    const std::vector<double> sample{0.2, 0.6};
    CHECK(ks_statistic(sample, uniform_cdf) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(ks_critical_value(100, 0.01) == doctest::Approx(0.162762).epsilon(1e-6));
    CHECK(ks_critical_value(100, 0.05) == doctest::Approx(0.135810).epsilon(1e-6));
}

TEST_CASE("seed derivation is deterministic and separates streams") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));

    auto a = make_engine(7, 3);
    auto b = make_engine(7, 3);
    CHECK(a() == b());
}

TEST_CASE("uniform draws stay strictly inside (0, 1)") {
    auto eng = make_engine(11, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform_open(eng);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal draws have the right first two moments") {
    auto eng = make_engine(5, 0);
    const int n = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = normal_draw(eng);
        s1 += z;
        s2 += z * z;
    }
    CHECK(std::abs(s1 / n) < 0.01);           // ~4.5 sigma of the mean estimate
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("mean, standard deviation and confidence half-width") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const MeanSd ms = mean_sd(x);
    CHECK(ms.mean == doctest::Approx(2.5));
    CHECK(ms.sd == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));

    MeanSd fixed;
    fixed.mean = 0.0;
    fixed.sd = 2.0;
    fixed.n = 100;
    // z(97.5%) = 1.95996...; half-width = z * sd / sqrt(n)
    CHECK(mean_ci_halfwidth(fixed, 0.95) ==
          doctest::Approx(0.39199279690801086).epsilon(1e-9));
}
