#include "garchint/calibration.hpp"

#include "garchint/errors.hpp"
#include "garchint/format.hpp"
#include "garchint/skellam.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace garchint {

ReturnSeries ingest_returns(std::span<const double> raw_log_returns, double delta, double dt) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw PreconditionError("calibration delta must be finite and > 0");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw PreconditionError("calibration dt must be finite and > 0");
    }
    if (raw_log_returns.empty()) {
        throw EmptyInput("return series is empty");
    }
    ReturnSeries series;
    series.delta = delta;
    series.dt = dt;
    series.observations.reserve(raw_log_returns.size());
    for (std::size_t i = 0; i < raw_log_returns.size(); ++i) {
        const double x = raw_log_returns[i];
        if (!std::isfinite(x)) {
            throw NonFinite("return " + std::to_string(i) + " is not finite");
        }
        const double m = std::round(x / delta);
        const double residual = std::abs(x - m * delta);
        if (!(residual <= 0.5 * delta + 1e-12)) {
            throw NonFinite("return " + std::to_string(i) + " does not quantize onto the delta lattice");
        }
        series.max_residual = std::max(series.max_residual, residual);
        series.observations.push_back(static_cast<std::int64_t>(m));
    }
    return series;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

bool parse_double(const std::string& token, double& out) {
    if (token.empty()) {
        return false;
    }
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<double> read_returns_csv(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto comma = t.find(',');
        std::string token = comma == std::string::npos ? t : trim(std::string_view(t).substr(comma + 1));
        if (comma != std::string::npos && token.find(',') != std::string::npos) {
            throw IoError("returns file line " + std::to_string(line_no) + ": expected one or two columns");
        }
        double value = 0.0;
        if (!parse_double(token, value)) {
            if (!seen_content) {
                seen_content = true;  // header
                continue;
            }
            throw IoError("returns file line " + std::to_string(line_no) + ": cannot parse '" + token +
                          "' as a number");
        }
        seen_content = true;
        out.push_back(value);
    }
    return out;
}

std::vector<double> read_returns_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open returns file '" + path + "'");
    }
    return read_returns_csv(in);
}

namespace {

template <typename Sink>
void run_filter(const ReturnSeries& series, const ModelParams& params, std::optional<IntensityState> lambda0,
                Sink&& sink) {
    IntensityState state = lambda0 ? *lambda0 : stationary_state(params);
    const double d = params.delta;
    const double dt = params.dt;
    for (const std::int64_t m : series.observations) {
        sink(skellam_log_pmf(static_cast<long>(m), {state.lambda_plus * dt, state.lambda_minus * dt}));
        const double eps = static_cast<double>(m) * d - d * (state.lambda_plus - state.lambda_minus) * dt;
        state = step_intensity(state, params, eps);
    }
}

void check_series_matches(const ReturnSeries& series, const ModelParams& params) {
    if (series.delta != params.delta) {
        throw PreconditionError("return series delta differs from model.delta");
    }
    if (series.dt != params.dt) {
        throw PreconditionError("return series dt differs from model.dt");
    }
}

}  // namespace

double log_likelihood(const ReturnSeries& series, const ModelParams& params, std::optional<IntensityState> lambda0) {
    params.validate();
    check_series_matches(series, params);
    if (series.observations.empty()) {
        throw EmptyInput("return series is empty");
    }
    double total = 0.0;
    run_filter(series, params, lambda0, [&](double term) { total += term; });
    return total;
}

std::vector<double> log_likelihood_terms(const ReturnSeries& series, const ModelParams& params,
                                         std::optional<IntensityState> lambda0) {
    params.validate();
    check_series_matches(series, params);
    std::vector<double> terms;
    terms.reserve(series.count());
    run_filter(series, params, lambda0, [&](double term) { terms.push_back(term); });
    return terms;
}

namespace {

enum class Transform { Log, Square, BetaRatio };

struct FreeParameter {
    std::string name;
    double* (*slot)(ModelParams&);
    Transform transform;
};

double* plus_omega(ModelParams& p) { return &p.plus.omega; }
double* plus_alpha(ModelParams& p) { return &p.plus.alpha; }
double* plus_beta(ModelParams& p) { return &p.plus.beta; }
double* plus_gamma(ModelParams& p) { return &p.plus.gamma; }
double* minus_omega(ModelParams& p) { return &p.minus.omega; }
double* minus_alpha(ModelParams& p) { return &p.minus.alpha; }
double* minus_beta(ModelParams& p) { return &p.minus.beta; }
double* minus_gamma(ModelParams& p) { return &p.minus.gamma; }

const std::array<FreeParameter, 8> kParameters{{
    {"plus.omega", plus_omega, Transform::Log},
    {"plus.alpha", plus_alpha, Transform::Square},
    {"plus.beta", plus_beta, Transform::BetaRatio},
    {"plus.gamma", plus_gamma, Transform::Square},
    {"minus.omega", minus_omega, Transform::Log},
    {"minus.alpha", minus_alpha, Transform::Square},
    {"minus.beta", minus_beta, Transform::BetaRatio},
    {"minus.gamma", minus_gamma, Transform::Square},
}};

double to_internal(Transform t, double v) {
    switch (t) {
        case Transform::Log: return std::log(v);
        case Transform::Square: return std::sqrt(v);
        case Transform::BetaRatio: return std::sqrt(v / (1.0 - v));
    }
    return v;
}

double to_external(Transform t, double u) {
    switch (t) {
        case Transform::Log: return std::exp(u);
        case Transform::Square: return u * u;
        case Transform::BetaRatio: return u * u / (1.0 + u * u);
    }
    return u;
}

double initial_step(Transform t, double u, double delta) {
    switch (t) {
        case Transform::Log: return 0.25;
        // alpha * delta^2 is the dimensionless size of the shock feedback.
        case Transform::Square: return std::max(0.25 * std::abs(u), 0.1 / delta);
        case Transform::BetaRatio: return std::max(0.25 * std::abs(u), 0.5);
    }
    return 0.1;
}

}  // namespace

FitResult fit_mle(const ReturnSeries& series, const ModelParams& init, const FitSettings& settings) {
    init.validate();
    check_series_matches(series, init);
    if (series.count() < settings.min_count) {
        throw PreconditionError("calibration needs at least " + std::to_string(settings.min_count) +
                                " observations, got " + std::to_string(series.count()));
    }
    if (settings.max_iterations < 1 || !(settings.tolerance > 0.0)) {
        throw PreconditionError("calibration.max_iterations must be >= 1 and calibration.tolerance > 0");
    }

    std::vector<const FreeParameter*> free;
    for (const FreeParameter& p : kParameters) {
        const bool is_gamma = p.name.ends_with(".gamma");
        const bool selected = settings.free.empty()
                                  ? !(is_gamma && init.recursion == RecursionKind::Garch)
                                  : std::find(settings.free.begin(), settings.free.end(), p.name) != settings.free.end();
        if (selected) {
            if (is_gamma && init.recursion == RecursionKind::Garch) {
                throw PreconditionError("calibration.free: gamma is fixed at 0 for the garch recursion");
            }
            free.push_back(&p);
        }
    }
    for (const std::string& name : settings.free) {
        if (std::none_of(kParameters.begin(), kParameters.end(), [&](const FreeParameter& p) { return p.name == name; })) {
            throw PreconditionError("calibration.free: unknown parameter '" + name + "'");
        }
    }
    const std::size_t dim = free.size();
    if (dim == 0) {
        throw PreconditionError("calibration.free selects no parameters");
    }

    ModelParams work = init;
    auto unpack = [&](const std::vector<double>& u) {
        ModelParams p = init;
        for (std::size_t i = 0; i < dim; ++i) {
            *free[i]->slot(p) = to_external(free[i]->transform, u[i]);
        }
        return p;
    };
    FitResult result;
    // Minimize the negative log-likelihood; invalid or non-finite points score +inf.
    auto objective = [&](const std::vector<double>& u) {
        ++result.evaluations;
        const ModelParams p = unpack(u);
        try {
            p.validate();
            const double ll = log_likelihood(series, p);
            return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> start(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        start[i] = to_internal(free[i]->transform, *free[i]->slot(work));
    }

    std::vector<std::vector<double>> simplex(dim + 1, start);
    std::vector<double> values(dim + 1);
    auto build_simplex = [&](const std::vector<double>& centre) {
        simplex.assign(dim + 1, centre);
        for (std::size_t i = 0; i < dim; ++i) {
            simplex[i + 1][i] += initial_step(free[i]->transform, centre[i], init.delta);
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            values[i] = objective(simplex[i]);
        }
    };
    build_simplex(start);

    std::vector<std::size_t> order(dim + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s(dim + 1);
        std::vector<double> v(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            s[i] = simplex[order[i]];
            v[i] = values[order[i]];
        }
        simplex.swap(s);
        values.swap(v);
    };

    int restarts_left = 2;
    double restart_best = std::numeric_limits<double>::infinity();
    sort_simplex();
    while (result.iterations < settings.max_iterations) {
        ++result.iterations;
        const double spread = values[dim] - values[0];
        if (std::isfinite(spread) && spread < settings.tolerance) {
            // Restart from the best vertex until a fresh simplex stops improving.
            const bool improved = values[0] < restart_best - settings.tolerance;
            if (!improved || restarts_left == 0) {
                result.converged = true;
                result.best_trace.push_back(-values[0]);
                break;
            }
            restart_best = values[0];
            --restarts_left;
            const std::vector<double> best = simplex[0];
            build_simplex(best);
            sort_simplex();
            result.best_trace.push_back(-values[0]);
            continue;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                centroid[j] += simplex[i][j] / static_cast<double>(dim);
            }
        }
        auto along = [&](double coef) {
            std::vector<double> p(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                p[j] = centroid[j] + coef * (simplex[dim][j] - centroid[j]);
            }
            return p;
        };
        const std::vector<double> reflected = along(-1.0);
        const double f_reflected = objective(reflected);
        if (f_reflected < values[0]) {
            const std::vector<double> expanded = along(-2.0);
            const double f_expanded = objective(expanded);
            if (f_expanded < f_reflected) {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
        } else if (f_reflected < values[dim - 1]) {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
        } else {
            const bool outside = f_reflected < values[dim];
            const std::vector<double> contracted = along(outside ? -0.5 : 0.5);
            const double f_contracted = objective(contracted);
            if (f_contracted < std::min(f_reflected, values[dim])) {
                simplex[dim] = contracted;
                values[dim] = f_contracted;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j) {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = objective(simplex[i]);
                }
            }
        }
        sort_simplex();
        result.best_trace.push_back(-values[0]);
    }

    result.params = unpack(simplex[0]);
    result.log_likelihood = -values[0];
    return result;
}

void write_fit_result_json(const FitResult& fit, std::ostream& out) {
    const ModelParams& p = fit.params;
    auto side = [](const SideCoefficients& s) {
        return nlohmann::ordered_json{{"omega", s.omega}, {"alpha", s.alpha}, {"beta", s.beta}, {"gamma", s.gamma}};
    };
    nlohmann::ordered_json doc;
    doc["params"] = {{"delta", p.delta},
                     {"dt", p.dt},
                     {"recursion", p.recursion == RecursionKind::Garch ? "garch" : "gjr"},
                     {"plus", side(p.plus)},
                     {"minus", side(p.minus)}};
    doc["log_likelihood"] = fit.log_likelihood;
    doc["converged"] = fit.converged;
    doc["iterations"] = fit.iterations;
    doc["evaluations"] = fit.evaluations;
    doc["stderr_estimates"] = nullptr;
    out << doc.dump(2) << '\n';
}

}  // namespace garchint
