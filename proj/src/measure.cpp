#include "garchint/measure.hpp"

#include "garchint/errors.hpp"

#include <cmath>
#include <sstream>

namespace garchint {

void MeasurePolicy::validate() const {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw PreconditionError("measure.rate must be finite and >= 0");
    }
    if (kind == Kind::VolatilityScaled && (!(scale > 0.0) || !std::isfinite(scale))) {
        throw PreconditionError("measure.scale must be finite and > 0");
    }
    if (kind == Kind::Explicit) {
        if (!(minus_scale >= 0.0) || !std::isfinite(minus_scale) || !std::isfinite(minus_offset)) {
            throw PreconditionError("measure.explicit must have finite minus_scale >= 0 and finite minus_offset");
        }
    }
}

IntensityPair solve_drift_equation(double up_coef, double down_coef, double rhs, const IntensityState& state,
                                   const MeasurePolicy& policy) {
    IntensityPair out{};
    switch (policy.kind) {
        case MeasurePolicy::Kind::VariancePreserving:
        case MeasurePolicy::Kind::VolatilityScaled: {
            const double total = (policy.kind == MeasurePolicy::Kind::VolatilityScaled ? policy.scale : 1.0) *
                                 (state.lambda_plus + state.lambda_minus);
            out.minus = (up_coef * total - rhs) / (up_coef - down_coef);
            out.plus = total - out.minus;
            break;
        }
        case MeasurePolicy::Kind::Explicit:
            out.minus = policy.minus_scale * state.lambda_minus + policy.minus_offset;
            out.plus = (rhs - down_coef * out.minus) / up_coef;
            break;
    }
    if (!(out.plus > 0.0) || !(out.minus > 0.0) || !std::isfinite(out.plus) || !std::isfinite(out.minus)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "risk-neutral intensities (" << out.plus << ", " << out.minus << ") are not positive for rate "
            << rhs << " at physical intensities (" << state.lambda_plus << ", " << state.lambda_minus << ")";
        throw InfeasibleDrift(msg.str());
    }
    return out;
}

IntensityPair solve_risk_neutral_intensities(const IntensityState& state, const ModelParams& params,
                                             const MeasurePolicy& policy) {
    return solve_drift_equation(std::expm1(params.delta), std::expm1(-params.delta), policy.rate, state, policy);
}

double RadonNikodymAccumulator::z() const { return std::exp(log_z); }

RadonNikodymAccumulator rn_step(const RadonNikodymAccumulator& acc, const IntensityState& lambda,
                                const IntensityPair& lambda_tilde, std::uint64_t up, std::uint64_t down,
                                double dt) {
    RadonNikodymAccumulator next;
    next.last_d = lambda.lambda_plus + lambda.lambda_minus - lambda_tilde.plus - lambda_tilde.minus;
    next.last_u = 0.0;
    if (up > 0) {
        next.last_u += static_cast<double>(up) * std::log(lambda_tilde.plus / lambda.lambda_plus);
    }
    if (down > 0) {
        next.last_u += static_cast<double>(down) * std::log(lambda_tilde.minus / lambda.lambda_minus);
    }
    next.log_z = acc.log_z + next.last_d * dt + next.last_u;
    return next;
}

}  // namespace garchint
