#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "garchint/calibration.hpp"
#include "garchint/cli.hpp"
#include "garchint/errors.hpp"
#include "garchint/measure.hpp"
#include "garchint/model.hpp"
#include "garchint/montecarlo.hpp"
#include "garchint/pricing.hpp"
#include "garchint/skellam.hpp"

#include <sstream>

namespace py = pybind11;
using namespace garchint;

namespace {

OptionKind parse_kind(const std::string& kind) {
    if (kind == "call") return OptionKind::Call;
    if (kind == "put") return OptionKind::Put;
    throw PreconditionError("option kind must be 'call' or 'put'");
}

py::dict simulation_dict(const SimulationResult& result) {
    const std::size_t n = result.paths.size();
    const py::array::ShapeContainer shape{static_cast<py::ssize_t>(n)};
    py::array_t<double> log_price(shape);
    py::array_t<double> log_z(shape);
    auto lp = log_price.mutable_unchecked<1>();
    auto lz = log_z.mutable_unchecked<1>();
    for (std::size_t i = 0; i < n; ++i) {
        lp(static_cast<py::ssize_t>(i)) = result.paths[i].terminal_log_price;
        lz(static_cast<py::ssize_t>(i)) = result.paths[i].log_z;
    }
    py::dict out;
    out["terminal_log_price"] = log_price;
    out["log_z"] = log_z;
    return out;
}

SimulationSpec make_spec(const ModelParams& params, const MeasurePolicy& policy, bool risk_neutral, int horizon,
                         std::int64_t n_paths, std::uint64_t seed, double s0) {
    SimulationSpec spec;
    spec.params = params;
    spec.policy = policy;
    spec.measure = risk_neutral ? SimulationSpec::Measure::RiskNeutral : SimulationSpec::Measure::Physical;
    spec.horizon_steps = horizon;
    spec.n_paths = n_paths;
    spec.seed = seed;
    spec.s0 = s0;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GARCH-intensity option pricing engine";

    static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            domain_error(e.what());
        }
    });

    py::class_<SideCoefficients>(m, "SideCoefficients")
        .def(py::init([](double omega, double alpha, double beta, double gamma) {
                 return SideCoefficients{omega, alpha, beta, gamma};
             }),
             py::arg("omega") = 1.0, py::arg("alpha") = 0.0, py::arg("beta") = 0.0, py::arg("gamma") = 0.0)
        .def_readwrite("omega", &SideCoefficients::omega)
        .def_readwrite("alpha", &SideCoefficients::alpha)
        .def_readwrite("beta", &SideCoefficients::beta)
        .def_readwrite("gamma", &SideCoefficients::gamma);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double delta, double dt, SideCoefficients plus, SideCoefficients minus,
                         const std::string& recursion) {
                 ModelParams p;
                 p.delta = delta;
                 p.dt = dt;
                 p.plus = plus;
                 p.minus = minus;
                 if (recursion == "garch") {
                     p.recursion = RecursionKind::Garch;
                 } else if (recursion == "gjr") {
                     p.recursion = RecursionKind::Gjr;
                 } else {
                     throw PreconditionError("recursion must be 'garch' or 'gjr'");
                 }
                 p.validate();
                 return p;
             }),
             py::arg("delta") = 0.002, py::arg("dt") = 1.0, py::arg("plus") = SideCoefficients{},
             py::arg("minus") = SideCoefficients{}, py::arg("recursion") = "gjr")
        .def_static("table1", &ModelParams::table1)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("dt", &ModelParams::dt)
        .def_readwrite("plus", &ModelParams::plus)
        .def_readwrite("minus", &ModelParams::minus)
        .def("validate", &ModelParams::validate);

    py::class_<MeasurePolicy>(m, "MeasurePolicy")
        .def_static("variance_preserving", &MeasurePolicy::variance_preserving, py::arg("rate"))
        .def_static("volatility_scaled", &MeasurePolicy::volatility_scaled, py::arg("rate"), py::arg("scale"))
        .def_static("explicit_minus", &MeasurePolicy::explicit_minus, py::arg("rate"), py::arg("minus_scale"),
                    py::arg("minus_offset"))
        .def_readwrite("rate", &MeasurePolicy::rate);

    m.def("bessel_i", &bessel_i, py::arg("order"), py::arg("x"));
    m.def("log_bessel_i", &log_bessel_i, py::arg("order"), py::arg("x"));
    m.def(
        "skellam_pmf",
        [](long k, double lambda_plus, double lambda_minus) {
            return skellam_pmf(k, SkellamParams{lambda_plus, lambda_minus});
        },
        py::arg("k"), py::arg("lambda_plus"), py::arg("lambda_minus"));
    m.def(
        "skellam_log_pmf",
        [](long k, double lambda_plus, double lambda_minus) {
            return skellam_log_pmf(k, SkellamParams{lambda_plus, lambda_minus});
        },
        py::arg("k"), py::arg("lambda_plus"), py::arg("lambda_minus"));

    m.def(
        "risk_neutral_intensities",
        [](double lambda_plus, double lambda_minus, const ModelParams& params, const MeasurePolicy& policy) {
            const IntensityPair t =
                solve_risk_neutral_intensities(IntensityState{lambda_plus, lambda_minus, 0.0}, params, policy);
            return py::make_tuple(t.plus, t.minus);
        },
        py::arg("lambda_plus"), py::arg("lambda_minus"), py::arg("params"), py::arg("policy"));

    m.def(
        "simulate",
        [](const ModelParams& params, const MeasurePolicy& policy, bool risk_neutral, int horizon_steps,
           std::int64_t n_paths, std::uint64_t seed, double s0, unsigned threads) {
            const SimulationSpec spec = make_spec(params, policy, risk_neutral, horizon_steps, n_paths, seed, s0);
            SimulationResult result;
            {
                py::gil_scoped_release release;
                result = simulate(spec, threads);
            }
            return simulation_dict(result);
        },
        py::arg("params"), py::arg("policy"), py::arg("risk_neutral") = true, py::arg("horizon_steps") = 30,
        py::arg("n_paths") = 10000, py::arg("seed") = 1, py::arg("s0") = 100.0, py::arg("threads") = 0);

    m.def(
        "price_european",
        [](const ModelParams& params, const MeasurePolicy& policy, const std::string& kind, double strike,
           int horizon_steps, std::int64_t n_paths, std::uint64_t seed, double s0, bool z_weighted,
           unsigned threads) {
            const SimulationSpec spec =
                make_spec(params, policy, !z_weighted, horizon_steps, n_paths, seed, s0);
            OptionSpec opt{parse_kind(kind), strike, spec.maturity(), policy.rate};
            PriceEstimate est{};
            {
                py::gil_scoped_release release;
                const SimulationResult result = simulate(spec, threads);
                est = price_european(result.paths, opt, z_weighted ? Weighting::RadonNikodym : Weighting::None);
            }
            return py::make_tuple(est.price, est.std_error);
        },
        py::arg("params"), py::arg("policy"), py::arg("kind") = "call", py::arg("strike") = 100.0,
        py::arg("horizon_steps") = 30, py::arg("n_paths") = 10000, py::arg("seed") = 1, py::arg("s0") = 100.0,
        py::arg("z_weighted") = false, py::arg("threads") = 0);

    m.def(
        "bs_price",
        [](double s, double k, double r, double sigma, double t, const std::string& kind) {
            return bs_price(s, k, r, sigma, t, parse_kind(kind));
        },
        py::arg("s"), py::arg("k"), py::arg("r"), py::arg("sigma"), py::arg("t"), py::arg("kind") = "call");
    m.def(
        "implied_vol",
        [](double price, double s, double k, double r, double t, const std::string& kind) {
            return implied_vol(price, s, k, r, t, parse_kind(kind));
        },
        py::arg("price"), py::arg("s"), py::arg("k"), py::arg("r"), py::arg("t"), py::arg("kind") = "call");

    m.def(
        "build_smile",
        [](const ModelParams& params, const MeasurePolicy& policy, const std::vector<int>& maturities,
           const std::vector<double>& moneyness, std::int64_t n_paths, std::uint64_t seed, unsigned threads) {
            SmileTable table;
            {
                py::gil_scoped_release release;
                table = build_smile(params, policy, maturities, moneyness, n_paths, seed, SmileOptionStyle::Otm,
                                    threads);
            }
            py::list rows;
            for (const SmileRow& r : table.rows) {
                py::dict row;
                row["maturity_steps"] = r.maturity_steps;
                row["moneyness"] = r.moneyness;
                row["strike"] = r.strike;
                row["kind"] = r.kind == OptionKind::Call ? "call" : "put";
                row["price"] = r.price;
                row["stderr"] = r.std_error;
                row["implied_vol"] = r.implied_vol ? py::object(py::float_(*r.implied_vol)) : py::none();
                rows.append(row);
            }
            return rows;
        },
        py::arg("params"), py::arg("policy"), py::arg("maturities"), py::arg("moneyness"),
        py::arg("n_paths") = 100000, py::arg("seed") = 1, py::arg("threads") = 0);

    m.def(
        "log_likelihood",
        [](const std::vector<double>& returns, const ModelParams& params) {
            return log_likelihood(ingest_returns(returns, params.delta, params.dt), params);
        },
        py::arg("returns"), py::arg("params"));

    m.def(
        "fit_mle",
        [](const std::vector<double>& returns, const ModelParams& init, const std::vector<std::string>& free,
           int max_iterations) {
            FitSettings settings;
            settings.free = free;
            settings.max_iterations = max_iterations;
            const ReturnSeries series = ingest_returns(returns, init.delta, init.dt);
            FitResult fit;
            {
                py::gil_scoped_release release;
                fit = fit_mle(series, init, settings);
            }
            py::dict out;
            out["params"] = fit.params;
            out["log_likelihood"] = fit.log_likelihood;
            out["converged"] = fit.converged;
            out["iterations"] = fit.iterations;
            return out;
        },
        py::arg("returns"), py::arg("init"), py::arg("free") = std::vector<std::string>{},
        py::arg("max_iterations") = 2000);

    m.def(
        "run",
        [](const std::string& command, const std::string& config_path, const std::vector<std::string>& overrides,
           const std::string& output_dir, unsigned threads) {
            std::ostringstream err;
            int status;
            {
                py::gil_scoped_release release;
                status = run(parse_command(command), config_path, overrides, RunOptions{output_dir, threads}, err);
            }
            return py::make_tuple(status, err.str());
        },
        py::arg("command"), py::arg("config_path"), py::arg("overrides") = std::vector<std::string>{},
        py::arg("output_dir") = "", py::arg("threads") = 0);
}
