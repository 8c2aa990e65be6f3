#include "garchint/montecarlo.hpp"

#include "garchint/errors.hpp"
#include "garchint/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace garchint {

namespace {

constexpr std::int64_t kBlockSize = 1024;

struct StepView {
    int step;
    const IntensityState& lambda;
    const IntensityPair* tilde;  // null without a policy
    double log_return;
    const ReturnDecomposition& decomposition;
};

struct NoObserver {
    void operator()(const StepView&) const {}
};

// Everything that is fixed across paths.
struct PathContext {
    const SimulationSpec& spec;
    bool risk_neutral;
    std::optional<JumpMoments> phys_up, phys_down, rn_up, rn_down;
    std::optional<GeneralMeasureSpec> general_measure;
    LatticeCoefficients lattice;

    explicit PathContext(const SimulationSpec& s)
        : spec(s),
          risk_neutral(s.measure == SimulationSpec::Measure::RiskNeutral),
          lattice(LatticeCoefficients::of(s.params.delta)) {
        if (s.jumps) {
            phys_up = jump_moments(s.jumps->physical.plus);
            phys_down = jump_moments(s.jumps->physical.minus);
            rn_up = jump_moments(s.jumps->risk_neutral.plus);
            rn_down = jump_moments(s.jumps->risk_neutral.minus);
            if (s.policy) {
                general_measure = GeneralMeasureSpec{*s.policy, s.jumps->risk_neutral.plus,
                                                     s.jumps->risk_neutral.minus, s.jumps->rhs};
            }
        }
    }
};

template <typename Observer>
PathRecord simulate_path(const PathContext& ctx, std::uint64_t path, StepRecord* steps_out, Observer&& observe,
                         std::vector<double>& up_sizes, std::vector<double>& down_sizes) {
    const SimulationSpec& spec = ctx.spec;
    const ModelParams& params = spec.params;
    const double dt = params.dt;
    PhiloxStream rng = derive_substream(spec.seed, path);
    IntensityState state = spec.initial ? *spec.initial : stationary_state(params);
    RadonNikodymAccumulator acc;
    const double log_s0 = std::log(spec.s0);
    double log_price = log_s0;
    std::int64_t net_jumps = 0;

    for (int step = 0; step < spec.horizon_steps; ++step) {
        IntensityPair tilde{};
        if (spec.policy) {
            try {
                tilde = ctx.general_measure ? solve_general_risk_neutral_intensities(state, *ctx.general_measure, dt)
                                            : solve_drift_equation(ctx.lattice.up, ctx.lattice.down, spec.policy->rate, state,
                                                                   *spec.policy);
            } catch (const InfeasibleDrift& e) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "path " << path << " step " << step << " (lambda+ = " << state.lambda_plus
                    << ", lambda- = " << state.lambda_minus << "): " << e.what();
                throw InfeasibleDrift(msg.str());
            }
        }
        const double mean_up = (ctx.risk_neutral ? tilde.plus : state.lambda_plus) * dt;
        const double mean_down = (ctx.risk_neutral ? tilde.minus : state.lambda_minus) * dt;
        const std::uint64_t up = sample_poisson(rng, mean_up);
        const std::uint64_t down = sample_poisson(rng, mean_down);

        double x;
        if (spec.jumps) {
            const JumpLaws& laws = ctx.risk_neutral ? spec.jumps->risk_neutral : spec.jumps->physical;
            up_sizes.clear();
            down_sizes.clear();
            x = 0.0;
            for (std::uint64_t j = 0; j < up; ++j) {
                up_sizes.push_back(sample_jump_size(laws.plus, rng));
                x += up_sizes.back();
            }
            for (std::uint64_t j = 0; j < down; ++j) {
                down_sizes.push_back(sample_jump_size(laws.minus, rng));
                x -= down_sizes.back();
            }
        } else {
            const auto net = static_cast<std::int64_t>(up) - static_cast<std::int64_t>(down);
            net_jumps += net;
            x = params.delta * static_cast<double>(net);
        }

        if (!ctx.risk_neutral && spec.policy) {
            acc = spec.jumps ? general_rn_step(acc, state, tilde, up_sizes, down_sizes, spec.jumps->physical,
                                               spec.jumps->risk_neutral, dt)
                             : rn_step(acc, state, tilde, up, down, dt);
        }

        const bool shock_under_q = ctx.risk_neutral && spec.shock == SimulationSpec::Shock::Simulating;
        const IntensityState shock_state =
            shock_under_q ? IntensityState{tilde.plus, tilde.minus, state.last_eps} : state;
        ReturnDecomposition dec;
        if (spec.jumps) {
            const JumpLaws& laws = shock_under_q ? spec.jumps->risk_neutral : spec.jumps->physical;
            dec = general_decompose(shock_state, laws.plus, laws.minus, dt, x);
        } else {
            dec = decompose(shock_state, params, x, ctx.lattice);
        }
        observe(StepView{step, state, spec.policy ? &tilde : nullptr, x, dec});

        state = step_intensity(state, params, dec.eps);
        log_price = spec.jumps ? log_price + x : log_s0 + params.delta * static_cast<double>(net_jumps);
        if (steps_out != nullptr) {
            steps_out[step] = StepRecord{up, down, log_price};
        }
    }
    return PathRecord{log_price, acc.log_z};
}

}  // namespace

void SimulationSpec::validate() const {
    params.validate();
    if (horizon_steps < 0) {
        throw PreconditionError("simulation.horizon_steps must be >= 0");
    }
    if (n_paths < 1) {
        throw PreconditionError("simulation.n_paths must be >= 1");
    }
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
        throw PreconditionError("simulation.s0 must be finite and > 0");
    }
    if (measure == Measure::RiskNeutral && !policy) {
        throw PreconditionError("a risk-neutral simulation needs a measure policy");
    }
    if (policy) {
        policy->validate();
    }
    if (initial) {
        initial->validate();
    }
    if (jumps) {
        for (const auto* d : {&jumps->physical.plus, &jumps->physical.minus, &jumps->risk_neutral.plus,
                              &jumps->risk_neutral.minus}) {
            jump_moments(*d);
        }
        if (jumps->physical.plus.side != JumpSide::Up || jumps->risk_neutral.plus.side != JumpSide::Up ||
            jumps->physical.minus.side != JumpSide::Down || jumps->risk_neutral.minus.side != JumpSide::Down) {
            throw PreconditionError("jump laws must be tagged up for plus and down for minus");
        }
        GeneralMeasureSpec{policy.value_or(MeasurePolicy{}), jumps->risk_neutral.plus, jumps->risk_neutral.minus,
                           jumps->rhs}
            .validate(jumps->physical.plus, jumps->physical.minus);
    }
}

std::span<const StepRecord> SimulationResult::path_steps(std::size_t path) const {
    if (!full_paths) {
        return {};
    }
    const auto h = static_cast<std::size_t>(horizon_steps);
    return std::span<const StepRecord>(steps).subspan(path * h, h);
}

SimulationResult simulate(const SimulationSpec& spec, unsigned threads) {
    spec.validate();
    const PathContext ctx(spec);
    SimulationResult result;
    result.horizon_steps = spec.horizon_steps;
    result.s0 = spec.s0;
    result.paths.resize(static_cast<std::size_t>(spec.n_paths));
    if (spec.record == SimulationSpec::Record::FullPaths) {
        const std::int64_t total = spec.n_paths * static_cast<std::int64_t>(spec.horizon_steps);
        if (total <= kMaxStoredSteps) {
            result.full_paths = true;
            result.steps.resize(static_cast<std::size_t>(total));
        } else {
            result.full_paths_dropped = true;
        }
    }

    const std::int64_t n_blocks = (spec.n_paths + kBlockSize - 1) / kBlockSize;
    std::atomic<std::int64_t> next_block{0};
    std::mutex error_mutex;
    std::int64_t error_path = spec.n_paths;
    std::exception_ptr error;

    auto worker = [&] {
        std::vector<double> up_sizes;
        std::vector<double> down_sizes;
        for (;;) {
            const std::int64_t block = next_block.fetch_add(1);
            if (block >= n_blocks) {
                return;
            }
            const std::int64_t begin = block * kBlockSize;
            const std::int64_t end = std::min(spec.n_paths, begin + kBlockSize);
            for (std::int64_t p = begin; p < end; ++p) {
                StepRecord* steps_out =
                    result.full_paths ? result.steps.data() + p * spec.horizon_steps : nullptr;
                try {
                    result.paths[static_cast<std::size_t>(p)] = simulate_path(
                        ctx, static_cast<std::uint64_t>(p), steps_out, NoObserver{}, up_sizes, down_sizes);
                } catch (...) {
                    // Report the lowest failing path so the error is independent of scheduling.
                    std::lock_guard lock(error_mutex);
                    if (p < error_path) {
                        error_path = p;
                        error = std::current_exception();
                    }
                    break;
                }
            }
        }
    };

    unsigned n_workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_workers = static_cast<unsigned>(std::min<std::int64_t>(n_workers, n_blocks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return result;
}

AuditReport audit_measure_change(const SimulationSpec& spec, std::int64_t n_paths) {
    spec.validate();
    if (!spec.policy) {
        throw PreconditionError("audit_measure_change needs a measure policy");
    }
    const PathContext ctx(spec);
    const MeasurePolicy& policy = *spec.policy;
    double up_coef = std::expm1(spec.params.delta);
    double down_coef = std::expm1(-spec.params.delta);
    double rhs = policy.rate;
    if (spec.jumps) {
        up_coef = ctx.rn_up->phi_minus_one;
        down_coef = ctx.rn_down->phi_minus_one;
        if (spec.jumps->rhs == DriftRhs::PerStep) {
            rhs *= spec.params.dt;
        }
    }
    AuditReport report;
    auto observe = [&](const StepView& v) {
        const double drift = up_coef * v.tilde->plus + down_coef * v.tilde->minus;
        report.max_drift_residual =
            std::max(report.max_drift_residual, std::abs(drift - rhs) / std::max(1.0, std::abs(rhs)));
        if (policy.kind != MeasurePolicy::Kind::Explicit) {
            const double factor = policy.kind == MeasurePolicy::Kind::VolatilityScaled ? policy.scale : 1.0;
            const double target = factor * (v.lambda.lambda_plus + v.lambda.lambda_minus);
            const double sum = v.tilde->plus + v.tilde->minus;
            report.max_sum_residual = std::max(report.max_sum_residual, std::abs(sum - target) / target);
        }
        const double rebuilt = v.decomposition.mu - v.decomposition.gamma + v.decomposition.eps;
        report.max_decomposition_error =
            std::max(report.max_decomposition_error, std::abs(rebuilt - v.log_return));
        ++report.steps_checked;
    };
    std::vector<double> up_sizes;
    std::vector<double> down_sizes;
    const std::int64_t n = std::min(n_paths, spec.n_paths);
    for (std::int64_t p = 0; p < n; ++p) {
        simulate_path(ctx, static_cast<std::uint64_t>(p), nullptr, observe, up_sizes, down_sizes);
    }
    return report;
}

MartingaleEstimate rn_expectation_check(const ModelParams& params, const MeasurePolicy& policy,
                                        int horizon_steps, std::int64_t n_paths, std::uint64_t seed,
                                        unsigned threads) {
    if (n_paths < 100) {
        throw PreconditionError("rn_expectation_check requires n_paths >= 100");
    }
    if (horizon_steps < 1) {
        throw PreconditionError("rn_expectation_check requires horizon_steps >= 1");
    }
    SimulationSpec spec;
    spec.params = params;
    spec.measure = SimulationSpec::Measure::Physical;
    spec.policy = policy;
    spec.horizon_steps = horizon_steps;
    spec.n_paths = n_paths;
    spec.seed = seed;
    const SimulationResult sim = simulate(spec, threads);
    double mean = 0.0;
    double m2 = 0.0;
    std::int64_t count = 0;
    for (const PathRecord& rec : sim.paths) {
        const double z = std::exp(rec.log_z);
        ++count;
        const double diff = z - mean;
        mean += diff / static_cast<double>(count);
        m2 += diff * (z - mean);
    }
    const double n = static_cast<double>(count);
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

}  // namespace garchint
