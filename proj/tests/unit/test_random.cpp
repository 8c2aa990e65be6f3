#include "doctest.h"

#include "garchint/random.hpp"

#include <cmath>
#include <vector>

using namespace garchint;

TEST_CASE("philox4x32-10 known-answer vectors") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are pure functions of (seed, index)") {
    PhiloxStream a = derive_substream(42, 7);
    PhiloxStream b = derive_substream(42, 7);
    PhiloxStream c = derive_substream(43, 7);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs = differs || x != c();
    }
    CHECK(differs);
}

TEST_CASE("neighbouring substreams are uncorrelated") {
    const int n = 10000;
    for (std::uint64_t j : {1ull, 2ull, 1000ull, 1ull << 40}) {
        PhiloxStream a = derive_substream(2024, 0);
        PhiloxStream b = derive_substream(2024, j);
        double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
        for (int i = 0; i < n; ++i) {
            const double x = a.uniform();
            const double y = b.uniform();
            sa += x;
            sb += y;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
        const double cov = sab / n - (sa / n) * (sb / n);
        const double rho = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
        CAPTURE(j);
        CHECK(std::abs(rho) < 0.05);
    }
}

TEST_CASE("uniform ranges") {
    PhiloxStream rng(1, 2);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("Poisson sampler matches the Poisson law") {
    // Chi-square goodness of fit on both sides of the inversion / PTRS switch.
    for (double mean : {0.05, 1.3, 9.5, 10.0, 37.0, 2500.0}) {
        CAPTURE(mean);
        PhiloxStream rng(17, static_cast<std::uint64_t>(mean * 100));
        const int n = 200000;
        const double sd = std::sqrt(mean);
        const long lo = std::max(0L, static_cast<long>(std::floor(mean - 4.0 * sd)));
        const long hi = static_cast<long>(std::ceil(mean + 4.0 * sd)) + 2;
        std::vector<double> observed(static_cast<std::size_t>(hi - lo + 2), 0.0);
        for (int i = 0; i < n; ++i) {
            const long k = static_cast<long>(sample_poisson(rng, mean));
            const long idx = k < lo ? 0 : (k > hi ? hi - lo + 1 : k - lo);
            observed[static_cast<std::size_t>(idx)] += 1.0;
        }
        // Expected counts from log pmf, with tails lumped into the end bins.
        std::vector<double> expected(observed.size(), 0.0);
        double below = 0.0;
        for (long k = 0; k < lo; ++k) {
            below += std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
        }
        double inside = 0.0;
        for (long k = lo; k <= hi; ++k) {
            const double p = std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
            expected[static_cast<std::size_t>(k - lo)] = p;
            inside += p;
        }
        expected[0] += below;
        expected.back() = std::max(0.0, 1.0 - below - inside);
        double chi = 0.0;
        int bins = 0;
        double pooled_obs = 0.0;
        double pooled_exp = 0.0;
        for (std::size_t i = 0; i < observed.size(); ++i) {
            pooled_obs += observed[i];
            pooled_exp += expected[i] * n;
            if (pooled_exp >= 20.0) {
                chi += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
                ++bins;
                pooled_obs = 0.0;
                pooled_exp = 0.0;
            }
        }
        if (pooled_exp > 0.0) {
            chi += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / std::max(pooled_exp, 1.0);
        }
        const int df = bins - 1;
        // Wilson-Hilferty approximation of the 0.999 chi-square quantile.
        const double z = 3.0902;
        const double crit = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
        CAPTURE(df);
        CHECK(chi < crit);
    }
    PhiloxStream rng(1, 1);
    CHECK(sample_poisson(rng, 0.0) == 0);
}

TEST_CASE("continuous samplers have the right first two moments") {
    PhiloxStream rng(3, 3);
    const int n = 400000;
    double se = 0, se2 = 0, sn = 0, sn2 = 0, sg = 0, sg2 = 0;
    for (int i = 0; i < n; ++i) {
        const double e = sample_exponential(rng, 2.0);
        const double z = sample_standard_normal(rng);
        const double g = sample_gamma(rng, 0.7, 3.0);
        se += e;
        se2 += e * e;
        sn += z;
        sn2 += z * z;
        sg += g;
        sg2 += g * g;
    }
    CHECK(std::abs(se / n - 2.0) < 3.0 * 2.0 / std::sqrt(n));
    CHECK(se2 / n == doctest::Approx(8.0).epsilon(0.02));
    CHECK(std::abs(sn / n) < 3.0 / std::sqrt(n));
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(sg / n - 2.1) < 3.0 * std::sqrt(0.7 * 9.0 / n));
    CHECK(sg2 / n == doctest::Approx(0.7 * 1.7 * 9.0).epsilon(0.03));
}
