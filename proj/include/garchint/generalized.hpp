#pragma once

#include "garchint/measure.hpp"
#include "garchint/model.hpp"
#include "garchint/random.hpp"

#include <cstdint>
#include <span>

namespace garchint {

enum class JumpSide { Up, Down };

// I.i.d. law of the absolute log-price jump size on one side.
struct JumpSizeDistribution {
    enum class Kind { Degenerate, Exponential, Gamma };

    Kind kind = Kind::Degenerate;
    JumpSide side = JumpSide::Up;
    double delta = 0.002;  // Degenerate: the point mass location
    double mean = 0.01;    // Exponential
    double shape = 1.0;    // Gamma
    double scale = 0.01;   // Gamma

    static JumpSizeDistribution degenerate(double delta, JumpSide side) {
        return {Kind::Degenerate, side, delta};
    }
    static JumpSizeDistribution exponential(double mean, JumpSide side) {
        JumpSizeDistribution d{Kind::Exponential, side};
        d.mean = mean;
        return d;
    }
    static JumpSizeDistribution gamma(double shape, double scale, JumpSide side) {
        JumpSizeDistribution d{Kind::Gamma, side};
        d.shape = shape;
        d.scale = scale;
        return d;
    }

    // Parameter positivity and, for the up side, finiteness of E[exp(X)].
    void validate() const;

    // Log density at x > 0. Degenerate laws have no density; they are handled
    // by log_density_ratio.
    double log_pdf(double x) const;
};

struct JumpMoments {
    double mean;           // E[X]
    double second_moment;  // E[X^2]
    double phi;            // E[exp(X)] on the up side, E[exp(-X)] on the down side
    double phi_minus_one;  // phi - 1 without cancellation
};

double sample_jump_size(const JumpSizeDistribution& d, PhiloxStream& rng);

// Throws DivergentMoment when the side's exponential moment does not exist.
JumpMoments jump_moments(const JumpSizeDistribution& d);

// log(f(x) / f_tilde(x)) at a realized jump size. Throws DensityMismatch when
// f_tilde vanishes where f does not.
double log_density_ratio(const JumpSizeDistribution& f, const JumpSizeDistribution& f_tilde, double x);

// Whether the drift equation's right-hand side is r (per unit time) or r * dt.
enum class DriftRhs { PerUnitTime, PerStep };

struct GeneralMeasureSpec {
    MeasurePolicy lambda_policy;
    JumpSizeDistribution f_tilde_plus;
    JumpSizeDistribution f_tilde_minus;
    DriftRhs rhs = DriftRhs::PerUnitTime;

    // Checks that the risk-neutral laws are equivalent to the physical ones.
    void validate(const JumpSizeDistribution& f_plus, const JumpSizeDistribution& f_minus) const;
};

ConditionalMoments general_conditional_moments(const IntensityState& state, const JumpSizeDistribution& up,
                                               const JumpSizeDistribution& down, double dt);

// mu and gamma of the compound-Poisson decomposition X = mu - gamma + eps.
ReturnDecomposition general_decompose(const IntensityState& state, const JumpSizeDistribution& up,
                                      const JumpSizeDistribution& down, double dt, double realized_log_return);

IntensityPair solve_general_risk_neutral_intensities(const IntensityState& state, const GeneralMeasureSpec& spec,
                                                     double dt = 1.0);

struct JumpLaws {
    JumpSizeDistribution plus;
    JumpSizeDistribution minus;
};

// log Z increment -kappa dt - Q for one step with the realized jump sizes.
RadonNikodymAccumulator general_rn_step(const RadonNikodymAccumulator& acc, const IntensityState& lambda,
                                        const IntensityPair& lambda_tilde, std::span<const double> jump_sizes_up,
                                        std::span<const double> jump_sizes_down, const JumpLaws& physical,
                                        const JumpLaws& risk_neutral, double dt);

struct MeanCorrectionResult {
    double estimate;   // sample mean of exp(eps)
    double std_error;
    double expected;   // exp(gamma)
    bool pass;         // |estimate - expected| <= 3 std_error
};

// Monte Carlo check of E[exp(eps) | F] = exp(gamma). Requires n_draws >= 10^4.
MeanCorrectionResult mean_correction_check(const IntensityState& state, const JumpLaws& laws, double dt,
                                           std::int64_t n_draws, std::uint64_t seed);

}  // namespace garchint
