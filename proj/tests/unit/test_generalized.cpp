#include "doctest.h"

#include "garchint/errors.hpp"
#include "garchint/generalized.hpp"
#include "garchint/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace garchint;

namespace {

using Dist = JumpSizeDistribution;

ModelParams garch_params(double delta) {
    ModelParams p;
    p.delta = delta;
    p.recursion = RecursionKind::Garch;
    p.plus = {0.5, 20.0, 0.8, 0.0};
    p.minus = {0.6, 25.0, 0.8, 0.0};
    return p;
}

}  // namespace

TEST_CASE("jump moments") {
    const JumpMoments d = jump_moments(Dist::degenerate(0.002, JumpSide::Up));
    CHECK(d.mean == 0.002);
    CHECK(d.second_moment == doctest::Approx(4e-6).epsilon(1e-15));
    CHECK(d.phi == doctest::Approx(std::exp(0.002)).epsilon(1e-15));

    const JumpMoments e = jump_moments(Dist::exponential(0.5, JumpSide::Up));
    CHECK(e.phi == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.second_moment == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(jump_moments(Dist::exponential(0.5, JumpSide::Down)).phi == doctest::Approx(1.0 / 1.5).epsilon(1e-15));

    const JumpMoments g = jump_moments(Dist::gamma(2.0, 0.1, JumpSide::Up));
    CHECK(g.mean == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(g.second_moment == doctest::Approx(2.0 * 3.0 * 0.01).epsilon(1e-15));
    CHECK(g.phi == doctest::Approx(std::pow(0.9, -2.0)).epsilon(1e-14));
    CHECK(jump_moments(Dist::gamma(2.0, 0.1, JumpSide::Down)).phi == doctest::Approx(std::pow(1.1, -2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(jump_moments(Dist::exponential(1.5, JumpSide::Up)), DivergentMoment);
    CHECK_THROWS_AS(jump_moments(Dist::gamma(0.5, 1.0, JumpSide::Up)), DivergentMoment);
    CHECK_NOTHROW(jump_moments(Dist::exponential(1.5, JumpSide::Down)));
    CHECK_THROWS_AS(jump_moments(Dist::exponential(-1.0, JumpSide::Down)), PreconditionError);
}

TEST_CASE("sampled jump sizes match the stated moments") {
    for (const Dist& d : {Dist::exponential(0.01, JumpSide::Up), Dist::gamma(0.4, 0.02, JumpSide::Up),
                          Dist::gamma(3.0, 0.005, JumpSide::Down)}) {
        const JumpMoments m = jump_moments(d);
        PhiloxStream rng(31, 7);
        const int n = 400000;
        double s = 0.0;
        double s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = sample_jump_size(d, rng);
            REQUIRE(x > 0.0);
            s += x;
            s2 += x * x;
        }
        const double var = m.second_moment - m.mean * m.mean;
        CHECK(std::abs(s / n - m.mean) <= 3.0 * std::sqrt(var / n));
        CHECK(s2 / n == doctest::Approx(m.second_moment).epsilon(0.02));
    }
}

TEST_CASE("conditional moments of the compound model") {
    const IntensityState s{10.0, 10.0, 0.0};
    const auto e = general_conditional_moments(s, Dist::exponential(0.01, JumpSide::Up),
                                               Dist::exponential(0.01, JumpSide::Down), 1.0);
    CHECK(std::abs(e.mean) <= 1e-18);
    CHECK(e.variance == doctest::Approx(4e-3).epsilon(1e-14));

    ModelParams p;
    p.delta = 0.003;
    p.dt = 0.25;
    const IntensityState t{40.0, 25.0, 0.0};
    const auto base = conditional_moments(t, p);
    const auto red = general_conditional_moments(t, Dist::degenerate(0.003, JumpSide::Up),
                                                 Dist::degenerate(0.003, JumpSide::Down), 0.25);
    CHECK(red.mean == doctest::Approx(base.mean).epsilon(1e-12));
    CHECK(red.variance == doctest::Approx(base.variance).epsilon(1e-12));

    const ReturnDecomposition bd = decompose(t, p, 0.01);
    const ReturnDecomposition gd = general_decompose(t, Dist::degenerate(0.003, JumpSide::Up),
                                                     Dist::degenerate(0.003, JumpSide::Down), 0.25, 0.01);
    CHECK(gd.mu == doctest::Approx(bd.mu).epsilon(1e-12));
    CHECK(gd.gamma == doctest::Approx(bd.gamma).epsilon(1e-12));
    CHECK(gd.eps == doctest::Approx(bd.eps).epsilon(1e-12));
}

TEST_CASE("compound-Poisson draws match the conditional moments") {
    const IntensityState s{12.0, 9.0, 0.0};
    const Dist up = Dist::exponential(0.01, JumpSide::Up);
    const Dist down = Dist::gamma(2.0, 0.006, JumpSide::Down);
    const auto m = general_conditional_moments(s, up, down, 1.0);
    const int n = 1'000'000;
    double sum = 0.0;
    double sum2 = 0.0;
    double c2 = 0.0;
    double c4 = 0.0;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        PhiloxStream rng = derive_substream(404, static_cast<std::uint64_t>(i));
        const auto nu = sample_poisson(rng, s.lambda_plus);
        const auto nd = sample_poisson(rng, s.lambda_minus);
        double x = 0.0;
        for (std::uint64_t j = 0; j < nu; ++j) x += sample_jump_size(up, rng);
        for (std::uint64_t j = 0; j < nd; ++j) x -= sample_jump_size(down, rng);
        xs[static_cast<std::size_t>(i)] = x;
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    for (double x : xs) {
        const double d = (x - mean) * (x - mean);
        c2 += d;
        c4 += d * d;
    }
    const double var = c2 / (n - 1);
    const double var_se = std::sqrt((c4 / n - var * var) / n);
    CHECK(std::abs(mean - m.mean) <= 3.0 * std::sqrt(var / n));
    CHECK(std::abs(var - m.variance) <= 3.0 * var_se);
}

TEST_CASE("generalized drift equation") {
    // Exponential laws chosen so that the exponential moments are 1.02 and 0.99.
    GeneralMeasureSpec spec;
    spec.lambda_policy = MeasurePolicy::variance_preserving(0.05);
    spec.f_tilde_plus = Dist::exponential(1.0 - 1.0 / 1.02, JumpSide::Up);
    spec.f_tilde_minus = Dist::exponential(1.0 / 0.99 - 1.0, JumpSide::Down);
    const IntensityPair t = solve_general_risk_neutral_intensities({60.0, 40.0, 0.0}, spec, 1.0);
    CHECK(t.plus == doctest::Approx(35.0).epsilon(1e-12));
    CHECK(t.minus == doctest::Approx(65.0).epsilon(1e-12));

    spec.f_tilde_plus = Dist::exponential(1.0 - 1.0 / 1.001, JumpSide::Up);
    spec.f_tilde_minus = Dist::exponential(1.0 / 0.999 - 1.0, JumpSide::Down);
    spec.lambda_policy = MeasurePolicy::variance_preserving(1.0);
    CHECK_THROWS_AS(solve_general_risk_neutral_intensities({5.0, 5.0, 0.0}, spec, 1.0), InfeasibleDrift);

    // Per-step right-hand side multiplies r by dt.
    spec.f_tilde_plus = Dist::exponential(1.0 - 1.0 / 1.02, JumpSide::Up);
    spec.f_tilde_minus = Dist::exponential(1.0 / 0.99 - 1.0, JumpSide::Down);
    spec.lambda_policy = MeasurePolicy::variance_preserving(0.1);
    spec.rhs = DriftRhs::PerStep;
    const IntensityPair h = solve_general_risk_neutral_intensities({60.0, 40.0, 0.0}, spec, 0.5);
    CHECK(h.plus == doctest::Approx(35.0).epsilon(1e-12));
}

TEST_CASE("degenerate laws reduce to the base measure change") {
    const ModelParams p = garch_params(0.004);
    const IntensityState s{30.0, 20.0, 0.0};
    for (double r : {0.0, 0.01, 0.05}) {
        const MeasurePolicy policy = MeasurePolicy::volatility_scaled(r, 1.1);
        const IntensityPair base = solve_risk_neutral_intensities(s, p, policy);
        GeneralMeasureSpec spec{policy, Dist::degenerate(0.004, JumpSide::Up), Dist::degenerate(0.004, JumpSide::Down),
                                DriftRhs::PerUnitTime};
        const IntensityPair gen = solve_general_risk_neutral_intensities(s, spec, 1.0);
        CHECK(gen.plus == doctest::Approx(base.plus).epsilon(1e-12));
        CHECK(gen.minus == doctest::Approx(base.minus).epsilon(1e-12));

        const JumpLaws laws{Dist::degenerate(0.004, JumpSide::Up), Dist::degenerate(0.004, JumpSide::Down)};
        const std::vector<double> ups(3, 0.004);
        const std::vector<double> downs(5, 0.004);
        RadonNikodymAccumulator acc;
        acc.log_z = 0.25;
        const auto a = rn_step(acc, s, base, 3, 5, 1.0);
        const auto b = general_rn_step(acc, s, base, ups, downs, laws, laws, 1.0);
        CHECK(a.log_z == b.log_z);
    }
}

TEST_CASE("general_rn_step with a tilted exponential law") {
    const JumpLaws phys{Dist::exponential(0.01, JumpSide::Up), Dist::exponential(0.01, JumpSide::Down)};
    const JumpLaws same = phys;
    const JumpLaws tilted{Dist::exponential(0.012, JumpSide::Up), Dist::exponential(0.01, JumpSide::Down)};
    const IntensityState lambda{10.0, 10.0, 0.0};
    const std::vector<double> up{0.01};
    const std::vector<double> none;
    RadonNikodymAccumulator acc;
    CHECK(general_rn_step(acc, lambda, {10.0, 10.0}, up, up, phys, same, 1.0).log_z == 0.0);
    // log f(0.01) - log f~(0.01) evaluated in 50-digit arithmetic.
    CHECK(general_rn_step(acc, lambda, {10.0, 10.0}, up, none, phys, tilted, 1.0).log_z ==
          doctest::Approx(-0.015654890127287960).epsilon(1e-13));

    const JumpLaws point{Dist::degenerate(0.002, JumpSide::Up), Dist::degenerate(0.002, JumpSide::Down)};
    const JumpLaws moved{Dist::degenerate(0.003, JumpSide::Up), Dist::degenerate(0.002, JumpSide::Down)};
    const std::vector<double> at{0.002};
    CHECK_THROWS_AS(general_rn_step(acc, lambda, {10.0, 10.0}, at, none, point, moved, 1.0), DensityMismatch);
    CHECK_THROWS_AS(log_density_ratio(phys.plus, point.plus, 0.002), DensityMismatch);
}

TEST_CASE("mean correction") {
    const IntensityState s{20.0, 20.0, 0.0};
    const auto ex = mean_correction_check(
        s, {Dist::exponential(0.005, JumpSide::Up), Dist::exponential(0.005, JumpSide::Down)}, 1.0, 1'000'000, 8);
    CHECK(ex.pass);
    const auto dg = mean_correction_check(
        s, {Dist::degenerate(0.002, JumpSide::Up), Dist::degenerate(0.002, JumpSide::Down)}, 1.0, 100'000, 8);
    ModelParams p;
    p.delta = 0.002;
    CHECK(dg.expected == doctest::Approx(std::exp(decompose(s, p, 0.0).gamma)).epsilon(1e-14));
    CHECK(dg.pass);
    CHECK_THROWS_AS(mean_correction_check(s, {Dist::exponential(0.005, JumpSide::Up),
                                              Dist::exponential(0.005, JumpSide::Down)},
                                          1.0, 10, 1),
                    PreconditionError);
}

TEST_CASE("negative skew when down jumps are heavier") {
    const IntensityState s{10.0, 10.0, 0.0};
    const Dist up = Dist::exponential(0.01, JumpSide::Up);
    const Dist down = Dist::exponential(0.02, JumpSide::Down);
    const int n = 200000;
    std::vector<double> xs(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        PhiloxStream rng = derive_substream(55, static_cast<std::uint64_t>(i));
        const auto nu = sample_poisson(rng, s.lambda_plus);
        const auto nd = sample_poisson(rng, s.lambda_minus);
        double x = 0.0;
        for (std::uint64_t j = 0; j < nu; ++j) x += sample_jump_size(up, rng);
        for (std::uint64_t j = 0; j < nd; ++j) x -= sample_jump_size(down, rng);
        xs[static_cast<std::size_t>(i)] = x;
        mean += x / n;
    }
    double m3 = 0.0;
    double m3sq = 0.0;
    for (double x : xs) {
        const double c = (x - mean) * (x - mean) * (x - mean);
        m3 += c / n;
        m3sq += c * c / n;
    }
    const double se = std::sqrt((m3sq - m3 * m3) / n);
    CHECK(m3 + 3.0 * se < 0.0);
}

TEST_CASE("Z-weighted up-jump sizes follow the risk-neutral law") {
    // One step with P-laws, weights Z; the weighted empirical CDF of the up-jump sizes
    // must match the tilted exponential law.
    const IntensityState lambda{4.0, 4.0, 0.0};
    const JumpLaws phys{Dist::exponential(0.01, JumpSide::Up), Dist::exponential(0.01, JumpSide::Down)};
    const JumpLaws rn{Dist::exponential(0.013, JumpSide::Up), Dist::exponential(0.009, JumpSide::Down)};
    const GeneralMeasureSpec spec{MeasurePolicy::variance_preserving(0.0), rn.plus, rn.minus, DriftRhs::PerUnitTime};
    const IntensityPair tilde = solve_general_risk_neutral_intensities(lambda, spec, 1.0);

    struct Sample {
        double x;
        double w;
    };
    std::vector<Sample> samples;
    double z_sum = 0.0;
    const int n_paths = 30000;
    for (int i = 0; i < n_paths; ++i) {
        PhiloxStream rng = derive_substream(606, static_cast<std::uint64_t>(i));
        std::vector<double> ups(sample_poisson(rng, lambda.lambda_plus));
        std::vector<double> downs(sample_poisson(rng, lambda.lambda_minus));
        for (double& x : ups) x = sample_jump_size(phys.plus, rng);
        for (double& x : downs) x = sample_jump_size(phys.minus, rng);
        const double z = std::exp(general_rn_step({}, lambda, tilde, ups, downs, phys, rn, 1.0).log_z);
        z_sum += z;
        for (double x : ups) samples.push_back({x, z});
    }
    CHECK(z_sum / n_paths == doctest::Approx(1.0).epsilon(0.02));
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
    double total = 0.0;
    double total_sq = 0.0;
    for (const Sample& s : samples) {
        total += s.w;
        total_sq += s.w * s.w;
    }
    double cum = 0.0;
    double ks = 0.0;
    for (const Sample& s : samples) {
        const double cdf = -std::expm1(-s.x / rn.plus.mean);
        ks = std::max(ks, std::abs(cum / total - cdf));
        cum += s.w;
        ks = std::max(ks, std::abs(cum / total - cdf));
    }
    const double n_eff = total * total / total_sq;
    CHECK(samples.size() > 100000);
    // Kolmogorov-Smirnov critical value at significance 0.001.
    CHECK(ks < 1.9495 / std::sqrt(n_eff));
}

TEST_CASE("generalized Z is a P-martingale") {
    SimulationSpec spec;
    spec.params = garch_params(0.01);
    spec.measure = SimulationSpec::Measure::Physical;
    spec.policy = MeasurePolicy::variance_preserving(0.001);
    spec.jumps = GeneralizedJumps{{Dist::exponential(0.01, JumpSide::Up), Dist::exponential(0.012, JumpSide::Down)},
                                  {Dist::exponential(0.011, JumpSide::Up), Dist::exponential(0.012, JumpSide::Down)},
                                  DriftRhs::PerUnitTime};
    spec.horizon_steps = 20;
    spec.n_paths = 100000;
    spec.seed = 99;
    const SimulationResult sim = simulate(spec, 1);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < sim.paths.size(); ++i) {
        const double z = std::exp(sim.paths[i].log_z);
        const double d = z - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (z - mean);
    }
    const double se = std::sqrt(m2 / (sim.paths.size() - 1.0) / sim.paths.size());
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}
