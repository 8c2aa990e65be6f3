#pragma once

#include "garchint/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace garchint {

// Log-returns quantized onto the delta lattice, m_i = round(X_i / delta).
struct ReturnSeries {
    std::vector<std::int64_t> observations;
    double delta = 0.002;
    double dt = 1.0;
    double max_residual = 0.0;  // max |X_i - m_i delta| over ingested returns

    std::size_t count() const { return observations.size(); }
};

// Throws EmptyInput on an empty list and NonFinite naming the first bad index.
ReturnSeries ingest_returns(std::span<const double> raw_log_returns, double delta, double dt);

// One log-return per line, or date,return with the date ignored. Blank lines and
// lines starting with '#' are skipped; the first line may be a header. Errors
// carry the 1-based line number.
std::vector<double> read_returns_csv(std::istream& in);
std::vector<double> read_returns_csv_file(const std::string& path);

// Skellam intensity filter: from lambda0 (default: stationary point of params)
// accumulate log f(m_i | lambda dt), then advance the intensities with the shock.
double log_likelihood(const ReturnSeries& series, const ModelParams& params,
                      std::optional<IntensityState> lambda0 = std::nullopt);

// Per-observation log-likelihood terms along the filter path.
std::vector<double> log_likelihood_terms(const ReturnSeries& series, const ModelParams& params,
                                         std::optional<IntensityState> lambda0 = std::nullopt);

// Names accepted in FitSettings::free: plus.omega, plus.alpha, plus.beta,
// plus.gamma and the same for minus.
struct FitSettings {
    std::vector<std::string> free;  // empty: all of omega, alpha, beta (and gamma for gjr)
    int max_iterations = 2000;
    double tolerance = 1e-6;  // simplex log-likelihood spread
    std::size_t min_count = 50;
};

struct FitResult {
    ModelParams params;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    std::vector<double> best_trace;  // best log-likelihood after each iteration
    std::optional<std::vector<double>> stderr_estimates;
};

// Nelder-Mead over transformed parameters: omega = exp(t), alpha and gamma = t^2,
// beta = t^2 / (1 + t^2). delta and dt are held fixed. Returns the best point
// with converged = false when the iteration budget runs out.
FitResult fit_mle(const ReturnSeries& series, const ModelParams& init, const FitSettings& settings = {});

// JSON document describing a fit.
void write_fit_result_json(const FitResult& fit, std::ostream& out);

}  // namespace garchint
