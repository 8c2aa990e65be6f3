#include "garchint/generalized.hpp"

#include "garchint/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace garchint {

namespace {

const char* side_name(JumpSide side) { return side == JumpSide::Up ? "up" : "down"; }

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void JumpSizeDistribution::validate() const {
    const std::string where = std::string("jump law (") + side_name(side) + ")";
    switch (kind) {
        case Kind::Degenerate:
            if (!positive_finite(delta)) {
                throw PreconditionError(where + ": degenerate delta must be finite and > 0");
            }
            break;
        case Kind::Exponential:
            if (!positive_finite(mean)) {
                throw PreconditionError(where + ": exponential mean must be finite and > 0");
            }
            break;
        case Kind::Gamma:
            if (!positive_finite(shape) || !positive_finite(scale)) {
                throw PreconditionError(where + ": gamma shape and scale must be finite and > 0");
            }
            break;
    }
}

double JumpSizeDistribution::log_pdf(double x) const {
    if (!(x > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    switch (kind) {
        case Kind::Exponential:
            return -std::log(mean) - x / mean;
        case Kind::Gamma:
            return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
        case Kind::Degenerate:
            break;
    }
    throw DensityMismatch("degenerate jump law has no density");
}

double sample_jump_size(const JumpSizeDistribution& d, PhiloxStream& rng) {
    switch (d.kind) {
        case JumpSizeDistribution::Kind::Degenerate:
            return d.delta;
        case JumpSizeDistribution::Kind::Exponential:
            return sample_exponential(rng, d.mean);
        case JumpSizeDistribution::Kind::Gamma:
            return sample_gamma(rng, d.shape, d.scale);
    }
    return d.delta;
}

JumpMoments jump_moments(const JumpSizeDistribution& d) {
    d.validate();
    const bool up = d.side == JumpSide::Up;
    JumpMoments m{};
    switch (d.kind) {
        case JumpSizeDistribution::Kind::Degenerate:
            m.mean = d.delta;
            m.second_moment = d.delta * d.delta;
            m.phi_minus_one = std::expm1(up ? d.delta : -d.delta);
            break;
        case JumpSizeDistribution::Kind::Exponential:
            m.mean = d.mean;
            m.second_moment = 2.0 * d.mean * d.mean;
            if (up && d.mean >= 1.0) {
                throw DivergentMoment("E[exp(X)] is infinite for an exponential up-jump law with mean >= 1");
            }
            m.phi_minus_one = up ? d.mean / (1.0 - d.mean) : -d.mean / (1.0 + d.mean);
            break;
        case JumpSizeDistribution::Kind::Gamma:
            m.mean = d.shape * d.scale;
            m.second_moment = d.shape * d.scale * d.scale * (1.0 + d.shape);
            if (up && d.scale >= 1.0) {
                throw DivergentMoment("E[exp(X)] is infinite for a gamma up-jump law with scale >= 1");
            }
            m.phi_minus_one = std::expm1(-d.shape * std::log1p(up ? -d.scale : d.scale));
            break;
    }
    m.phi = 1.0 + m.phi_minus_one;
    return m;
}

double log_density_ratio(const JumpSizeDistribution& f, const JumpSizeDistribution& f_tilde, double x) {
    using Kind = JumpSizeDistribution::Kind;
    const bool f_point = f.kind == Kind::Degenerate;
    const bool ft_point = f_tilde.kind == Kind::Degenerate;
    if (f_point || ft_point) {
        if (f_point && ft_point && f.delta == f_tilde.delta) {
            return 0.0;
        }
        throw DensityMismatch("risk-neutral jump law puts no mass at the realized jump size " + std::to_string(x));
    }
    const double lf = f.log_pdf(x);
    const double lft = f_tilde.log_pdf(x);
    if (std::isinf(lft) && lft < 0.0 && !(std::isinf(lf) && lf < 0.0)) {
        throw DensityMismatch("risk-neutral density vanishes at the realized jump size " + std::to_string(x));
    }
    return lf - lft;
}

void GeneralMeasureSpec::validate(const JumpSizeDistribution& f_plus, const JumpSizeDistribution& f_minus) const {
    lambda_policy.validate();
    f_tilde_plus.validate();
    f_tilde_minus.validate();
    const auto compatible = [](const JumpSizeDistribution& f, const JumpSizeDistribution& ft) {
        using Kind = JumpSizeDistribution::Kind;
        if (f.kind == Kind::Degenerate || ft.kind == Kind::Degenerate) {
            return f.kind == ft.kind && f.delta == ft.delta;
        }
        return true;
    };
    if (!compatible(f_plus, f_tilde_plus)) {
        throw PreconditionError("jumps.up_tilde must be equivalent to jumps.up (matching point mass or both continuous)");
    }
    if (!compatible(f_minus, f_tilde_minus)) {
        throw PreconditionError(
            "jumps.down_tilde must be equivalent to jumps.down (matching point mass or both continuous)");
    }
}

ConditionalMoments general_conditional_moments(const IntensityState& state, const JumpSizeDistribution& up,
                                               const JumpSizeDistribution& down, double dt) {
    const JumpMoments mu = jump_moments(up);
    const JumpMoments md = jump_moments(down);
    return {(mu.mean * state.lambda_plus - md.mean * state.lambda_minus) * dt,
            (mu.second_moment * state.lambda_plus + md.second_moment * state.lambda_minus) * dt};
}

ReturnDecomposition general_decompose(const IntensityState& state, const JumpSizeDistribution& up,
                                      const JumpSizeDistribution& down, double dt, double realized_log_return) {
    const JumpMoments mu = jump_moments(up);
    const JumpMoments md = jump_moments(down);
    const double lp = state.lambda_plus;
    const double lm = state.lambda_minus;
    ReturnDecomposition out;
    out.mu = (mu.phi_minus_one * lp + md.phi_minus_one * lm) * dt;
    // Down jumps enter X with a negative sign, hence + mean on that side.
    out.gamma = ((mu.phi_minus_one - mu.mean) * lp + (md.phi_minus_one + md.mean) * lm) * dt;
    out.eps = realized_log_return - (mu.mean * lp - md.mean * lm) * dt;
    return out;
}

IntensityPair solve_general_risk_neutral_intensities(const IntensityState& state, const GeneralMeasureSpec& spec,
                                                     double dt) {
    const JumpMoments up = jump_moments(spec.f_tilde_plus);
    const JumpMoments down = jump_moments(spec.f_tilde_minus);
    if (!(up.phi_minus_one > 0.0) || !(down.phi_minus_one < 0.0)) {
        throw PreconditionError("risk-neutral jump laws must satisfy phi_up > 1 and phi_down < 1");
    }
    const double rhs = spec.rhs == DriftRhs::PerStep ? spec.lambda_policy.rate * dt : spec.lambda_policy.rate;
    return solve_drift_equation(up.phi_minus_one, down.phi_minus_one, rhs, state, spec.lambda_policy);
}

RadonNikodymAccumulator general_rn_step(const RadonNikodymAccumulator& acc, const IntensityState& lambda,
                                        const IntensityPair& lambda_tilde, std::span<const double> jump_sizes_up,
                                        std::span<const double> jump_sizes_down, const JumpLaws& physical,
                                        const JumpLaws& risk_neutral, double dt) {
    // Same floating-point order as rn_step so degenerate laws reproduce it exactly.
    RadonNikodymAccumulator next;
    next.last_d = lambda.lambda_plus + lambda.lambda_minus - lambda_tilde.plus - lambda_tilde.minus;
    double u = 0.0;
    if (!jump_sizes_up.empty()) {
        u += static_cast<double>(jump_sizes_up.size()) * std::log(lambda_tilde.plus / lambda.lambda_plus);
    }
    if (!jump_sizes_down.empty()) {
        u += static_cast<double>(jump_sizes_down.size()) * std::log(lambda_tilde.minus / lambda.lambda_minus);
    }
    for (const double x : jump_sizes_up) {
        u -= log_density_ratio(physical.plus, risk_neutral.plus, x);
    }
    for (const double x : jump_sizes_down) {
        u -= log_density_ratio(physical.minus, risk_neutral.minus, x);
    }
    next.last_u = u;
    next.log_z = acc.log_z + next.last_d * dt + next.last_u;
    return next;
}

MeanCorrectionResult mean_correction_check(const IntensityState& state, const JumpLaws& laws, double dt,
                                           std::int64_t n_draws, std::uint64_t seed) {
    if (n_draws < 10'000) {
        throw PreconditionError("mean_correction_check requires n_draws >= 10000");
    }
    state.validate();
    const ReturnDecomposition ref = general_decompose(state, laws.plus, laws.minus, dt, 0.0);
    const double conditional_mean = -ref.eps;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < n_draws; ++i) {
        PhiloxStream rng = derive_substream(seed, static_cast<std::uint64_t>(i));
        const std::uint64_t up = sample_poisson(rng, state.lambda_plus * dt);
        const std::uint64_t down = sample_poisson(rng, state.lambda_minus * dt);
        double x = 0.0;
        for (std::uint64_t j = 0; j < up; ++j) {
            x += sample_jump_size(laws.plus, rng);
        }
        for (std::uint64_t j = 0; j < down; ++j) {
            x -= sample_jump_size(laws.minus, rng);
        }
        const double value = std::exp(x - conditional_mean);
        const double diff = value - mean;
        mean += diff / static_cast<double>(i + 1);
        m2 += diff * (value - mean);
    }
    const double n = static_cast<double>(n_draws);
    MeanCorrectionResult out;
    out.estimate = mean;
    out.std_error = std::sqrt(m2 / (n - 1.0) / n);
    out.expected = std::exp(ref.gamma);
    out.pass = std::abs(out.estimate - out.expected) <= 3.0 * out.std_error;
    return out;
}

}  // namespace garchint
