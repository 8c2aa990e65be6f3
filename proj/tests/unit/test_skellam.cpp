#include "doctest.h"

#include "garchint/skellam.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef GARCHINT_HAVE_BOOST_MATH
#include <boost/math/special_functions/bessel.hpp>
#endif

using namespace garchint;

namespace {

// Poisson pmf table up to mean + 12 sd, by the multiplicative recurrence.
std::vector<double> poisson_table(double mean) {
    const int n = static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean) + 30.0));
    std::vector<double> p(static_cast<std::size_t>(n) + 1);
    p[0] = std::exp(-mean);
    for (int k = 1; k <= n; ++k) {
        p[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k - 1)] * mean / k;
    }
    return p;
}

double convolution_pmf(long m, double a, double b) {
    const auto pa = poisson_table(a);
    const auto pb = poisson_table(b);
    double sum = 0.0;
    for (std::size_t j = 0; j < pb.size(); ++j) {
        const long i = m + static_cast<long>(j);
        if (i >= 0 && static_cast<std::size_t>(i) < pa.size()) {
            sum += pa[static_cast<std::size_t>(i)] * pb[j];
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("bessel_i at the origin and a series value") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(1, 0.0) == 0.0);
    CHECK(bessel_i(0, 2.0) == doctest::Approx(2.2795853023360673).epsilon(1e-14));
    CHECK_THROWS_AS(bessel_i(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_i(-1, 1.0), std::domain_error);
}

TEST_CASE("log_bessel_i against high-precision reference values") {
    // Reference values computed with 50-digit arithmetic.
    struct Case {
        int n;
        double x;
        double expected;
    };
    const Case cases[] = {
        {1, 0.5, -1.3552054470253345},  {5, 30.0, 26.961886249246192},    {0, 50.0, 47.127575501874180},
        {3, 100.0, 96.734508690490961}, {20, 700.0, 695.51980082970923},  {100, 40.0, -60.278956494141331},
        {0, 700.0, 695.80569999844345}, {7, 1e-3, -61.731478546609991},   {50, 2000.0, 1994.6555490128131},
    };
    for (const Case& c : cases) {
        CAPTURE(c.n);
        CAPTURE(c.x);
        CHECK(log_bessel_i(c.n, c.x) == doctest::Approx(c.expected).epsilon(1e-13));
    }
    CHECK(log_bessel_i(3, 0.0) == -INFINITY);
    CHECK(log_bessel_i(0, 0.0) == 0.0);
}

TEST_CASE("bessel_i overflows only beyond the double range") {
    CHECK(std::isfinite(bessel_i(0, 700.0)));
    CHECK_THROWS_AS(bessel_i(0, 800.0), std::overflow_error);
    CHECK(std::isfinite(log_bessel_i(0, 1e6)));
}

#ifdef GARCHINT_HAVE_BOOST_MATH
TEST_CASE("bessel_i matches an independent implementation on a grid") {
    for (int n : {0, 1, 2, 5, 10, 30, 80}) {
        for (double x : {0.01, 0.3, 1.0, 4.5, 12.0, 29.9, 30.1, 55.0, 120.0, 400.0, 699.0}) {
            CAPTURE(n);
            CAPTURE(x);
            const double ref = boost::math::cyl_bessel_i(n, x);
            if (ref > 1e-300) {
                CHECK(bessel_i(n, x) == doctest::Approx(ref).epsilon(1e-12));
            }
        }
    }
}
#endif

TEST_CASE("skellam_pmf examples") {
    CHECK(skellam_pmf(0, {1.0, 1.0}) == doctest::Approx(0.30850832255367104).epsilon(1e-13));
    CHECK(skellam_pmf(1, {2.0, 1.0}) == doctest::Approx(0.238463438486297).epsilon(1e-13));
    CHECK(skellam_pmf(2, {1.5, 0.5}) == doctest::Approx(skellam_pmf(-2, {0.5, 1.5})).epsilon(1e-15));
}

TEST_CASE("skellam_pmf equals the Poisson-difference convolution") {
    for (double a : {0.3, 1.0, 3.0}) {
        for (double b : {0.3, 1.0, 3.0}) {
            for (long m = -10; m <= 10; ++m) {
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(m);
                CHECK(std::abs(skellam_pmf(m, {a, b}) - convolution_pmf(m, a, b)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("skellam normalization and moments") {
    for (double a : {0.3, 2.0, 7.5}) {
        for (double b : {0.5, 4.0, 12.0}) {
            double total = 0.0;
            double mean = 0.0;
            double second = 0.0;
            for (long m = -200; m <= 200; ++m) {
                const double p = skellam_pmf(m, {a, b});
                total += p;
                mean += static_cast<double>(m) * p;
                second += static_cast<double>(m * m) * p;
            }
            CHECK(std::abs(total - 1.0) <= 1e-10);
            CHECK(std::abs(mean - (a - b)) <= 1e-8);
            CHECK(std::abs(second - mean * mean - (a + b)) <= 1e-8);
        }
    }
}

TEST_CASE("skellam log pmf is consistent and survives large means") {
    for (double a : {0.05, 1.0, 17.0, 300.0}) {
        for (double b : {0.02, 2.5, 40.0}) {
            for (long m = -60; m <= 60; m += 3) {
                const double p = skellam_pmf(m, {a, b});
                if (p > 1e-280) {
                    CHECK(std::exp(skellam_log_pmf(m, {a, b})) == doctest::Approx(p).epsilon(1e-12));
                }
            }
        }
    }
    // Means in the thousands: the direct form overflows, the log form does not.
    const double lp = skellam_log_pmf(10, {2500.0, 2400.0});
    CHECK(std::isfinite(lp));
    CHECK(lp < 0.0);
    double total = 0.0;
    for (long m = -400; m <= 600; ++m) {
        total += std::exp(skellam_log_pmf(m, {2500.0, 2400.0}));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("skellam parameters are validated") {
    CHECK_THROWS(skellam_pmf(0, {0.0, 1.0}));
    CHECK_THROWS(skellam_pmf(0, {1.0, -1.0}));
    CHECK_THROWS(skellam_log_pmf(0, {NAN, 1.0}));
    CHECK_THROWS(skellam_log_pmf(0, {1.0, INFINITY}));
}
