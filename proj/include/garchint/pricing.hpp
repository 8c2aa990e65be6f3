#pragma once

#include "garchint/measure.hpp"
#include "garchint/montecarlo.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace garchint {

enum class OptionKind { Call, Put };

struct OptionSpec {
    OptionKind kind = OptionKind::Call;
    double strike = 100.0;
    double maturity = 1.0;  // model time units, horizon_steps * dt
    double rate = 0.0;      // per unit time

    void validate() const;
};

struct PriceEstimate {
    double price;
    double std_error;
};

enum class Weighting {
    None,           // paths were simulated under the pricing measure
    RadonNikodym,   // physical paths, payoffs weighted by Z(T)
};

PriceEstimate price_european(std::span<const PathRecord> paths, const OptionSpec& opt,
                             Weighting weighting = Weighting::None);

// Discounted mean of S(T) (Z-weighted when requested), with its standard error.
PriceEstimate discounted_terminal_mean(std::span<const PathRecord> paths, double maturity, double rate,
                                       Weighting weighting = Weighting::None);

double normal_cdf(double x);

double bs_price(double s, double k, double r, double sigma, double t, OptionKind kind);
double bs_vega(double s, double k, double r, double sigma, double t);

inline constexpr double kImpliedVolLow = 1e-6;
inline constexpr double kImpliedVolHigh = 5.0;

// Bracketed Newton on [1e-6, 5]. Throws OutOfBand outside the no-arbitrage band
// and NoConvergence when the root is not bracketed or the budget runs out.
double implied_vol(double price, double s, double k, double r, double t, OptionKind kind);

// Which option the smile row prices. Otm uses puts below the spot and calls at
// and above it.
enum class SmileOptionStyle { Call, Put, Otm };

struct SmileRow {
    int maturity_steps;
    double moneyness;  // K / S0
    double strike;
    OptionKind kind;
    double price;
    double std_error;
    std::optional<double> implied_vol;        // per unit time
    std::optional<double> implied_vol_error;  // std_error / vega
};

struct SmileTable {
    std::vector<SmileRow> rows;
};

// One simulation per maturity (base.horizon_steps is replaced), reused for every
// strike. base.policy must be set; base.measure is forced to RiskNeutral.
SmileTable build_smile(const SimulationSpec& base, std::span<const int> maturities,
                       std::span<const double> moneyness, SmileOptionStyle style = SmileOptionStyle::Otm,
                       unsigned threads = 0);

SmileTable build_smile(const ModelParams& params, const MeasurePolicy& policy, std::span<const int> maturities,
                       std::span<const double> moneyness, std::int64_t n_paths, std::uint64_t seed,
                       SmileOptionStyle style = SmileOptionStyle::Otm, unsigned threads = 0);

// Header: maturity_steps,moneyness,strike,price,stderr,implied_vol
void write_smile_csv(const SmileTable& table, std::ostream& out);

}  // namespace garchint
