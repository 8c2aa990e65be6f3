#include "garchint/verify.hpp"

#include "garchint/errors.hpp"
#include "garchint/format.hpp"
#include "garchint/pricing.hpp"

#include <cmath>
#include <ostream>

namespace garchint {

namespace {

// Monte Carlo agreement within three standard errors. The absolute floor only
// absorbs rounding when the estimator is (numerically) deterministic.
bool within_three_se(double estimate, double target, double se) {
    return std::abs(estimate - target) <= 3.0 * se + 1e-12 * std::max(1.0, std::abs(target));
}

std::string stat_detail(double estimate, double target, double se) {
    return "estimate=" + format_double(estimate) + " target=" + format_double(target) + " stderr=" +
           format_double(se);
}

}  // namespace

std::vector<CheckResult> run_verification(const SimulationSpec& spec, std::int64_t audit_paths, unsigned threads) {
    if (!spec.policy) {
        throw PreconditionError("verify needs a measure policy");
    }
    spec.validate();
    std::vector<CheckResult> checks;
    const double rate = spec.policy->rate;
    const double maturity = spec.maturity();

    SimulationSpec physical = spec;
    physical.measure = SimulationSpec::Measure::Physical;
    physical.record = SimulationSpec::Record::TerminalOnly;
    const SimulationResult p_sim = simulate(physical, threads);

    SimulationSpec risk_neutral = spec;
    risk_neutral.measure = SimulationSpec::Measure::RiskNeutral;
    risk_neutral.record = SimulationSpec::Record::TerminalOnly;
    const SimulationResult q_sim = simulate(risk_neutral, threads);

    {
        double mean = 0.0;
        double m2 = 0.0;
        std::int64_t n = 0;
        for (const PathRecord& rec : p_sim.paths) {
            const double z = std::exp(rec.log_z);
            ++n;
            const double diff = z - mean;
            mean += diff / static_cast<double>(n);
            m2 += diff * (z - mean);
        }
        const double se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
        checks.push_back({"radon_nikodym_martingale", within_three_se(mean, 1.0, se), stat_detail(mean, 1.0, se)});
    }
    {
        const PriceEstimate q = discounted_terminal_mean(q_sim.paths, maturity, rate);
        checks.push_back({"discounted_price_q_martingale", within_three_se(q.price, spec.s0, q.std_error),
                          stat_detail(q.price, spec.s0, q.std_error)});
    }
    {
        const PriceEstimate z = discounted_terminal_mean(p_sim.paths, maturity, rate, Weighting::RadonNikodym);
        checks.push_back({"discounted_price_z_weighted", within_three_se(z.price, spec.s0, z.std_error),
                          stat_detail(z.price, spec.s0, z.std_error)});
    }
    {
        const OptionSpec atm{OptionKind::Call, spec.s0, maturity, rate};
        const PriceEstimate q = price_european(q_sim.paths, atm);
        const PriceEstimate z = price_european(p_sim.paths, atm, Weighting::RadonNikodym);
        const double pooled = std::sqrt(q.std_error * q.std_error + z.std_error * z.std_error);
        checks.push_back({"atm_call_q_vs_z_weighted_p", within_three_se(q.price, z.price, pooled),
                          "q_price=" + format_double(q.price) + " p_weighted_price=" + format_double(z.price) +
                              " pooled_stderr=" + format_double(pooled)});
    }
    {
        const AuditReport audit = audit_measure_change(risk_neutral, audit_paths);
        const std::string steps = " steps=" + std::to_string(audit.steps_checked);
        checks.push_back({"drift_equation_residual", audit.max_drift_residual <= 1e-10,
                          "max_relative_residual=" + format_double(audit.max_drift_residual) + steps});
        if (spec.policy->kind != MeasurePolicy::Kind::Explicit) {
            checks.push_back({spec.policy->kind == MeasurePolicy::Kind::VariancePreserving
                                  ? "variance_preservation"
                                  : "volatility_scaling",
                              audit.max_sum_residual <= 1e-10,
                              "max_relative_sum_residual=" + format_double(audit.max_sum_residual) + steps});
        }
        checks.push_back({"return_decomposition", audit.max_decomposition_error <= 1e-12,
                          "max_abs_error=" + format_double(audit.max_decomposition_error) + steps});
    }
    return checks;
}

void write_verification_report(const std::vector<CheckResult>& checks, std::ostream& out) {
    for (const CheckResult& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << c.detail << '\n';
    }
}

}  // namespace garchint
