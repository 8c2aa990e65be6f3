#include "garchint/model.hpp"

#include "garchint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace garchint {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }
bool nonnegative_finite(double v) { return v >= 0.0 && std::isfinite(v); }

void validate_side(const SideCoefficients& s, const char* side, RecursionKind kind) {
    const std::string prefix = std::string("model.") + side + ".";
    if (!positive_finite(s.omega)) {
        throw PreconditionError(prefix + "omega must be finite and > 0");
    }
    if (!nonnegative_finite(s.alpha)) {
        throw PreconditionError(prefix + "alpha must be finite and >= 0");
    }
    if (!(s.beta >= 0.0 && s.beta < 1.0)) {
        throw PreconditionError(prefix + "beta must lie in [0, 1)");
    }
    if (!nonnegative_finite(s.gamma)) {
        throw PreconditionError(prefix + "gamma must be finite and >= 0");
    }
    if (kind == RecursionKind::Garch && s.gamma != 0.0) {
        throw PreconditionError(prefix + "gamma must be 0 for the garch recursion");
    }
}

double next_lambda(const SideCoefficients& s, double lambda, double eps) {
    const double leverage = eps < 0.0 ? s.gamma : 0.0;
    return s.omega + (s.alpha + leverage) * eps * eps + s.beta * lambda;
}

}  // namespace

void ModelParams::validate() const {
    if (!positive_finite(delta)) {
        throw PreconditionError("model.delta must be finite and > 0");
    }
    if (!positive_finite(dt)) {
        throw PreconditionError("model.dt must be finite and > 0");
    }
    validate_side(plus, "plus", recursion);
    validate_side(minus, "minus", recursion);
}

ModelParams ModelParams::table1() {
    ModelParams p;
    p.delta = 2.0e-3;
    p.dt = 1.0;
    p.recursion = RecursionKind::Gjr;
    p.plus = {8.50e-2, 9.79e2, 9.39e-1, 1.09e4};
    p.minus = {7.28e-2, 8.49e2, 9.42e-1, 1.07e4};
    return p;
}

void IntensityState::validate() const {
    if (!positive_finite(lambda_plus)) {
        throw PreconditionError("IntensityState.lambda_plus must be finite and > 0");
    }
    if (!positive_finite(lambda_minus)) {
        throw PreconditionError("IntensityState.lambda_minus must be finite and > 0");
    }
}

IntensityState stationary_state(const ModelParams& params) {
    return {params.plus.omega / (1.0 - params.plus.beta), params.minus.omega / (1.0 - params.minus.beta), 0.0};
}

ConditionalMoments conditional_moments(const IntensityState& state, const ModelParams& params) {
    const double d = params.delta;
    return {d * (state.lambda_plus - state.lambda_minus) * params.dt,
            d * d * (state.lambda_plus + state.lambda_minus) * params.dt};
}

LatticeCoefficients LatticeCoefficients::of(double delta) { return {std::expm1(delta), std::expm1(-delta)}; }

ReturnDecomposition decompose(const IntensityState& state, const ModelParams& params,
                              double realized_log_return) {
    return decompose(state, params, realized_log_return, LatticeCoefficients::of(params.delta));
}

ReturnDecomposition decompose(const IntensityState& state, const ModelParams& params,
                              double realized_log_return, const LatticeCoefficients& coef) {
    const double d = params.delta;
    const double up = coef.up;
    const double down = coef.down;
    const double lp = state.lambda_plus;
    const double lm = state.lambda_minus;
    ReturnDecomposition out;
    out.mu = (up * lp + down * lm) * params.dt;
    out.gamma = ((up - d) * lp + (down + d) * lm) * params.dt;
    out.eps = realized_log_return - d * (lp - lm) * params.dt;
    return out;
}

IntensityState step_intensity(const IntensityState& state, const ModelParams& params, double eps) {
    return {next_lambda(params.plus, state.lambda_plus, eps), next_lambda(params.minus, state.lambda_minus, eps),
            eps};
}

VarianceRecursionCheck variance_recursion_check(const ModelParams& params, const IntensityState& state,
                                                double eps) {
    if (params.recursion != RecursionKind::Garch) {
        throw PreconditionError("variance_recursion_check requires the garch recursion");
    }
    if (params.plus.beta != params.minus.beta) {
        throw PreconditionError("variance_recursion_check requires model.plus.beta == model.minus.beta");
    }
    const double d2 = params.delta * params.delta;
    const double h = d2 * (state.lambda_plus + state.lambda_minus);
    const double h_next = d2 * (params.plus.omega + params.minus.omega) + params.plus.beta * h +
                          d2 * (params.plus.alpha + params.minus.alpha) * eps * eps;
    const IntensityState next = step_intensity(state, params, eps);
    const double h_direct = d2 * (next.lambda_plus + next.lambda_minus);
    const bool consistent = std::abs(h_next - h_direct) <= 1e-12 * std::max(std::abs(h_direct), 1e-300);
    return {h_next, h_direct, consistent};
}

}  // namespace garchint
