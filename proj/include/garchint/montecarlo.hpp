#pragma once

#include "garchint/generalized.hpp"
#include "garchint/measure.hpp"
#include "garchint/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace garchint {

// Random jump-size laws under both measures for the compound-Poisson model.
struct GeneralizedJumps {
    JumpLaws physical;
    JumpLaws risk_neutral;
    DriftRhs rhs = DriftRhs::PerUnitTime;
};

struct SimulationSpec {
    enum class Measure { Physical, RiskNeutral };
    // Which intensities define the shock that drives the intensity recursion.
    // Physical keeps the recursion the same path functional under P and Q.
    enum class Shock { Physical, Simulating };
    enum class Record { TerminalOnly, FullPaths };

    ModelParams params;
    Measure measure = Measure::RiskNeutral;
    // Under RiskNeutral, the simulating measure. Under Physical, an optional
    // companion measure whose Radon-Nikodym density is carried along each path.
    std::optional<MeasurePolicy> policy;
    std::optional<GeneralizedJumps> jumps;
    Shock shock = Shock::Physical;
    std::optional<IntensityState> initial;  // defaults to stationary_state(params)
    int horizon_steps = 30;
    std::int64_t n_paths = 10'000;
    std::uint64_t seed = 1;
    double s0 = 100.0;
    Record record = Record::TerminalOnly;

    void validate() const;
    double maturity() const { return horizon_steps * params.dt; }
};

// FullPaths storage cap in step records; larger runs keep terminal records only.
inline constexpr std::int64_t kMaxStoredSteps = 100'000'000;

struct PathRecord {
    double terminal_log_price;
    double log_z;  // log Z(T) for physical paths with a companion measure, else 0
};

struct StepRecord {
    std::uint64_t up;
    std::uint64_t down;
    double log_price;  // after the step
};

struct SimulationResult {
    std::vector<PathRecord> paths;
    std::vector<StepRecord> steps;  // path-major, horizon_steps per path, FullPaths only
    int horizon_steps = 0;
    double s0 = 0.0;
    bool full_paths = false;
    bool full_paths_dropped = false;  // FullPaths requested but above kMaxStoredSteps

    std::span<const StepRecord> path_steps(std::size_t path) const;
};

// Bit-identical output for identical specs regardless of the worker count.
// threads == 0 uses the hardware concurrency.
SimulationResult simulate(const SimulationSpec& spec, unsigned threads = 0);

// Per-step measure-change audit over the first n_paths paths of `spec`.
struct AuditReport {
    std::int64_t steps_checked = 0;
    double max_drift_residual = 0.0;  // |drift - rhs| / max(1, rhs)
    double max_sum_residual = 0.0;    // |sum tilde - target sum| / target sum (sum-closing policies)
    double max_decomposition_error = 0.0;  // |mu - gamma + eps - X|
};

AuditReport audit_measure_change(const SimulationSpec& spec, std::int64_t n_paths);

}  // namespace garchint
