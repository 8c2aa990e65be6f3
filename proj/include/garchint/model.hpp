#pragma once

#include <optional>

namespace garchint {

enum class RecursionKind { Garch, Gjr };

// Coefficients of one side's intensity recursion
//   lambda' = omega + (alpha + gamma * I[eps < 0]) * eps^2 + beta * lambda.
struct SideCoefficients {
    double omega = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

struct ModelParams {
    double delta = 0.002;  // log-price jump size
    double dt = 1.0;       // step length
    SideCoefficients plus;
    SideCoefficients minus;
    RecursionKind recursion = RecursionKind::Gjr;

    // Throws PreconditionError naming the first offending field.
    void validate() const;

    // The parameter set of the bundled GJR smile example (dt = 1 day).
    static ModelParams table1();
};

// Intensities are per unit time; last_eps is in log-return units.
struct IntensityState {
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    double last_eps = 0.0;

    void validate() const;
};

// Fixed point of the recursion at eps = 0: omega / (1 - beta) per side.
IntensityState stationary_state(const ModelParams& params);

struct ConditionalMoments {
    double mean;
    double variance;
};

ConditionalMoments conditional_moments(const IntensityState& state, const ModelParams& params);

// One-step log-return split as X = mu - gamma + eps.
struct ReturnDecomposition {
    double mu;     // drift: log E[exp X | F]
    double gamma;  // Ito correction
    double eps;    // shock X - E[X | F]
};

ReturnDecomposition decompose(const IntensityState& state, const ModelParams& params,
                              double realized_log_return);

// e^delta - 1 and e^-delta - 1, for callers that decompose many returns.
struct LatticeCoefficients {
    double up;
    double down;

    static LatticeCoefficients of(double delta);
};

ReturnDecomposition decompose(const IntensityState& state, const ModelParams& params,
                              double realized_log_return, const LatticeCoefficients& coef);

IntensityState step_intensity(const IntensityState& state, const ModelParams& params, double eps);

struct VarianceRecursionCheck {
    double h_next;
    double h_from_intensities;
    bool consistent;
};

// Evaluates h' = delta^2 (omega+ + omega-) + beta h + delta^2 (alpha+ + alpha-) eps^2 and
// compares it to delta^2 (lambda+' + lambda-') from step_intensity. Requires a plain
// GARCH recursion with a shared beta.
VarianceRecursionCheck variance_recursion_check(const ModelParams& params, const IntensityState& state,
                                                double eps);

}  // namespace garchint
