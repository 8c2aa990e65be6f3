#include "garchint/pricing.hpp"

#include "garchint/errors.hpp"
#include "garchint/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace garchint {

namespace {

double payoff(OptionKind kind, double s, double k) {
    return kind == OptionKind::Call ? std::max(s - k, 0.0) : std::max(k - s, 0.0);
}

// Ordered Welford reduction; the result depends only on path order.
template <typename Sample>
PriceEstimate discounted_mean(std::span<const PathRecord> paths, double discount, Weighting weighting,
                              Sample&& sample) {
    if (paths.empty()) {
        throw EmptySample("no simulated paths to price");
    }
    double mean = 0.0;
    double m2 = 0.0;
    std::int64_t n = 0;
    for (const PathRecord& rec : paths) {
        double value = sample(std::exp(rec.terminal_log_price));
        if (weighting == Weighting::RadonNikodym) {
            value *= std::exp(rec.log_z);
        }
        ++n;
        const double diff = value - mean;
        mean += diff / static_cast<double>(n);
        m2 += diff * (value - mean);
    }
    const double count = static_cast<double>(n);
    const double variance = n > 1 ? m2 / (count - 1.0) : 0.0;
    return {discount * mean, discount * std::sqrt(variance / count)};
}

}  // namespace

void OptionSpec::validate() const {
    if (!(strike >= 0.0) || !std::isfinite(strike)) {
        throw PreconditionError("option.strike must be finite and >= 0");
    }
    if (!(maturity >= 0.0) || !std::isfinite(maturity)) {
        throw PreconditionError("option.maturity must be finite and >= 0");
    }
    if (!std::isfinite(rate)) {
        throw PreconditionError("option.rate must be finite");
    }
}

PriceEstimate price_european(std::span<const PathRecord> paths, const OptionSpec& opt, Weighting weighting) {
    opt.validate();
    return discounted_mean(paths, std::exp(-opt.rate * opt.maturity), weighting,
                           [&](double s) { return payoff(opt.kind, s, opt.strike); });
}

PriceEstimate discounted_terminal_mean(std::span<const PathRecord> paths, double maturity, double rate,
                                       Weighting weighting) {
    return discounted_mean(paths, std::exp(-rate * maturity), weighting, [](double s) { return s; });
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_price(double s, double k, double r, double sigma, double t, OptionKind kind) {
    const double discounted_strike = k * std::exp(-r * t);
    if (sigma <= 0.0 || t <= 0.0 || k <= 0.0) {
        return payoff(kind, s, discounted_strike);
    }
    const double vol = sigma * std::sqrt(t);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * t) / vol;
    const double d2 = d1 - vol;
    if (kind == OptionKind::Call) {
        return s * normal_cdf(d1) - discounted_strike * normal_cdf(d2);
    }
    return discounted_strike * normal_cdf(-d2) - s * normal_cdf(-d1);
}

double bs_vega(double s, double k, double r, double sigma, double t) {
    if (sigma <= 0.0 || t <= 0.0 || k <= 0.0) {
        return 0.0;
    }
    const double vol = sigma * std::sqrt(t);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * t) / vol;
    return s * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi) * std::sqrt(t);
}

double implied_vol(double price, double s, double k, double r, double t, OptionKind kind) {
    if (!std::isfinite(price) || !(s > 0.0) || !(k > 0.0) || !(t > 0.0) || !std::isfinite(r)) {
        throw PreconditionError("implied_vol: price, s, k, t must be finite with s, k, t > 0");
    }
    const double discounted_strike = k * std::exp(-r * t);
    const double lower = payoff(kind, s, discounted_strike);
    const double upper = kind == OptionKind::Call ? s : discounted_strike;
    if (!(price > lower) || !(price < upper)) {
        throw OutOfBand("price " + format_double(price) + " outside the no-arbitrage band (" +
                        format_double(lower) + ", " + format_double(upper) + ")");
    }
    double lo = kImpliedVolLow;
    double hi = kImpliedVolHigh;
    if (bs_price(s, k, r, lo, t, kind) > price) {
        throw NoConvergence("implied volatility below " + format_double(lo));
    }
    if (bs_price(s, k, r, hi, t, kind) < price) {
        throw NoConvergence("implied volatility above " + format_double(hi));
    }
    const double tolerance = 1e-12 * std::max(1.0, price);
    // Brenner-Subrahmanyam start, clipped into the bracket.
    double sigma = std::clamp(std::sqrt(2.0 * std::numbers::pi / t) * price / s, 0.05, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        const double diff = bs_price(s, k, r, sigma, t, kind) - price;
        if (std::abs(diff) <= tolerance) {
            return sigma;
        }
        if (diff < 0.0) {
            lo = sigma;
        } else {
            hi = sigma;
        }
        const double vega = bs_vega(s, k, r, sigma, t);
        double next = vega > 0.0 ? sigma - diff / vega : lo - 1.0;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            if (std::abs(diff) <= 1e-10) {
                return sigma;
            }
            break;
        }
        sigma = next;
    }
    throw NoConvergence("implied volatility iteration budget exhausted at price " + format_double(price));
}

SmileTable build_smile(const SimulationSpec& base, std::span<const int> maturities,
                       std::span<const double> moneyness, SmileOptionStyle style, unsigned threads) {
    if (maturities.empty() || moneyness.empty()) {
        throw PreconditionError("smile grids must be nonempty");
    }
    if (!base.policy) {
        throw PreconditionError("smile pricing needs a measure policy");
    }
    SmileTable table;
    for (const int steps : maturities) {
        if (steps < 1) {
            throw PreconditionError("smile.maturities must be >= 1 step");
        }
        SimulationSpec spec = base;
        spec.measure = SimulationSpec::Measure::RiskNeutral;
        spec.record = SimulationSpec::Record::TerminalOnly;
        spec.horizon_steps = steps;
        const SimulationResult sim = simulate(spec, threads);
        const double maturity = spec.maturity();
        const double rate = base.policy->rate;
        for (const double m : moneyness) {
            if (!(m > 0.0) || !std::isfinite(m)) {
                throw PreconditionError("smile.moneyness entries must be finite and > 0");
            }
            SmileRow row{};
            row.maturity_steps = steps;
            row.moneyness = m;
            row.strike = m * spec.s0;
            switch (style) {
                case SmileOptionStyle::Call: row.kind = OptionKind::Call; break;
                case SmileOptionStyle::Put: row.kind = OptionKind::Put; break;
                case SmileOptionStyle::Otm: row.kind = m < 1.0 ? OptionKind::Put : OptionKind::Call; break;
            }
            const PriceEstimate est = price_european(sim.paths, {row.kind, row.strike, maturity, rate});
            row.price = est.price;
            row.std_error = est.std_error;
            try {
                const double vol = implied_vol(est.price, spec.s0, row.strike, rate, maturity, row.kind);
                row.implied_vol = vol;
                const double vega = bs_vega(spec.s0, row.strike, rate, vol, maturity);
                if (vega > 0.0) {
                    row.implied_vol_error = est.std_error / vega;
                }
            } catch (const DomainError&) {
                // OutOfBand / NoConvergence rows keep an empty vol.
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

SmileTable build_smile(const ModelParams& params, const MeasurePolicy& policy, std::span<const int> maturities,
                       std::span<const double> moneyness, std::int64_t n_paths, std::uint64_t seed,
                       SmileOptionStyle style, unsigned threads) {
    SimulationSpec spec;
    spec.params = params;
    spec.policy = policy;
    spec.n_paths = n_paths;
    spec.seed = seed;
    return build_smile(spec, maturities, moneyness, style, threads);
}

void write_smile_csv(const SmileTable& table, std::ostream& out) {
    out << "maturity_steps,moneyness,strike,price,stderr,implied_vol\n";
    for (const SmileRow& row : table.rows) {
        out << row.maturity_steps << ',' << format_double(row.moneyness) << ',' << format_double(row.strike)
            << ',' << format_double(row.price) << ',' << format_double(row.std_error) << ',';
        if (row.implied_vol) {
            out << format_double(*row.implied_vol);
        }
        out << '\n';
    }
}

}  // namespace garchint
