#pragma once

#include "garchint/model.hpp"

#include <cstdint>

namespace garchint {

// How the risk-neutral intensities are pinned down. The drift equation
//   (e^delta - 1) lt+ + (e^-delta - 1) lt- = r
// has two unknowns; the policy supplies the second equation.
struct MeasurePolicy {
    enum class Kind {
        VariancePreserving,  // lt+ + lt- = l+ + l-
        VolatilityScaled,    // lt+ + lt- = scale * (l+ + l-)
        Explicit,            // lt- = minus_scale * l- + minus_offset
    };

    Kind kind = Kind::VariancePreserving;
    double rate = 0.0;  // risk-free rate per unit time
    double scale = 1.0;
    double minus_scale = 1.0;
    double minus_offset = 0.0;

    void validate() const;

    static MeasurePolicy variance_preserving(double rate) { return {Kind::VariancePreserving, rate}; }
    static MeasurePolicy volatility_scaled(double rate, double c) {
        return {Kind::VolatilityScaled, rate, c};
    }
    static MeasurePolicy explicit_minus(double rate, double minus_scale, double minus_offset) {
        return {Kind::Explicit, rate, 1.0, minus_scale, minus_offset};
    }
};

struct IntensityPair {
    double plus;
    double minus;
};

// Solves up_coef * a + down_coef * b = rhs under the policy's closing equation,
// given the physical intensities. up_coef > 0 > down_coef. Throws InfeasibleDrift
// when either solution component is not strictly positive.
IntensityPair solve_drift_equation(double up_coef, double down_coef, double rhs, const IntensityState& state,
                                   const MeasurePolicy& policy);

IntensityPair solve_risk_neutral_intensities(const IntensityState& state, const ModelParams& params,
                                             const MeasurePolicy& policy);

// Running log Z(t). The last step's components are kept for auditing.
struct RadonNikodymAccumulator {
    double log_z = 0.0;
    double last_d = 0.0;  // intensity-sum difference D, per unit time
    double last_u = 0.0;  // jump-count log-ratio term U

    double z() const;
};

RadonNikodymAccumulator rn_step(const RadonNikodymAccumulator& acc, const IntensityState& lambda,
                                const IntensityPair& lambda_tilde, std::uint64_t up, std::uint64_t down,
                                double dt);

struct MartingaleEstimate {
    double mean;
    double std_error;
};

// Simulates n_paths physical paths of horizon_steps steps, carries Z alongside and
// reports the sample mean of Z(T) and its standard error.
MartingaleEstimate rn_expectation_check(const ModelParams& params, const MeasurePolicy& policy,
                                        int horizon_steps, std::int64_t n_paths, std::uint64_t seed,
                                        unsigned threads = 0);

}  // namespace garchint
