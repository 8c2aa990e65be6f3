#include "garchint/cli.hpp"

#include "garchint/calibration.hpp"
#include "garchint/config.hpp"
#include "garchint/errors.hpp"
#include "garchint/format.hpp"
#include "garchint/pricing.hpp"
#include "garchint/verify.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace garchint {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file '" + path.string() + "'");
    }
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) {
        throw IoError("failed writing output file '" + path.string() + "'");
    }
}

void run_simulate(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
    const SimulationResult result = simulate(cfg.simulation, threads);
    {
        const fs::path path = dir / "terminal.csv";
        std::ofstream out = open_output(path);
        out << "path,terminal_log_price,log_z\n";
        for (std::size_t i = 0; i < result.paths.size(); ++i) {
            out << i << ',' << format_double(result.paths[i].terminal_log_price) << ','
                << format_double(result.paths[i].log_z) << '\n';
        }
        close_output(out, path);
    }
    if (result.full_paths) {
        const fs::path path = dir / "paths.csv";
        std::ofstream out = open_output(path);
        out << "path,step,up,down,log_price\n";
        for (std::size_t i = 0; i < result.paths.size(); ++i) {
            const auto steps = result.path_steps(i);
            for (std::size_t k = 0; k < steps.size(); ++k) {
                out << i << ',' << k + 1 << ',' << steps[k].up << ',' << steps[k].down << ','
                    << format_double(steps[k].log_price) << '\n';
            }
        }
        close_output(out, path);
    }
}

void run_price(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
    const SimulationResult result = simulate(cfg.simulation, threads);
    const Weighting weighting = cfg.simulation.measure == SimulationSpec::Measure::Physical
                                    ? Weighting::RadonNikodym
                                    : Weighting::None;
    const PriceEstimate est = price_european(result.paths, cfg.option, weighting);
    const fs::path path = dir / "price.csv";
    std::ofstream out = open_output(path);
    out << "kind,strike,maturity,rate,price,stderr\n";
    out << (cfg.option.kind == OptionKind::Call ? "call" : "put") << ',' << format_double(cfg.option.strike)
        << ',' << format_double(cfg.option.maturity) << ',' << format_double(cfg.option.rate) << ','
        << format_double(est.price) << ',' << format_double(est.std_error) << '\n';
    close_output(out, path);
}

void run_smile(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
    const SmileTable table =
        build_smile(cfg.simulation, cfg.smile_maturities, cfg.smile_moneyness, cfg.smile_style, threads);
    const fs::path path = dir / "smile.csv";
    std::ofstream out = open_output(path);
    write_smile_csv(table, out);
    close_output(out, path);
}

void run_calibrate(const RunConfig& cfg, const fs::path& dir) {
    if (cfg.calibration_input.empty()) {
        throw ConfigError("config key 'calibration.input' must name a returns CSV for calibrate");
    }
    const std::vector<double> raw = read_returns_csv_file(cfg.calibration_input);
    const ModelParams& init = cfg.simulation.params;
    const ReturnSeries series = ingest_returns(raw, init.delta, init.dt);
    const FitResult fit = fit_mle(series, init, cfg.fit);
    const fs::path path = dir / "fit_result.json";
    std::ofstream out = open_output(path);
    write_fit_result_json(fit, out);
    close_output(out, path);
}

bool run_verify(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
    const std::vector<CheckResult> checks = run_verification(cfg.simulation, cfg.verify_audit_paths, threads);
    const fs::path path = dir / "verify_report.txt";
    std::ofstream out = open_output(path);
    write_verification_report(checks, out);
    close_output(out, path);
    bool all = true;
    for (const CheckResult& c : checks) {
        all = all && c.pass;
    }
    return all;
}

}  // namespace

Command parse_command(const std::string& name) {
    if (name == "simulate") return Command::Simulate;
    if (name == "price") return Command::Price;
    if (name == "smile") return Command::Smile;
    if (name == "calibrate") return Command::Calibrate;
    if (name == "verify") return Command::Verify;
    throw ConfigError("unknown command '" + name + "' (expected simulate, price, smile, calibrate or verify)");
}

int run(Command command, const std::string& config_path, const std::vector<std::string>& overrides,
        const RunOptions& options, std::ostream& err) {
    try {
        const nlohmann::ordered_json resolved = resolve_config(config_path, overrides);
        const RunConfig cfg = parse_config(resolved);

        fs::path dir = options.output_dir;
        if (dir.empty()) {
            const char* env = std::getenv("GARCHINT_OUTPUT_DIR");
            dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("out");
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
        }
        {
            const fs::path path = dir / "resolved_config.json";
            std::ofstream out = open_output(path);
            out << resolved.dump(2) << '\n';
            close_output(out, path);
        }

        switch (command) {
            case Command::Simulate:
                run_simulate(cfg, dir, options.threads);
                break;
            case Command::Price:
                run_price(cfg, dir, options.threads);
                break;
            case Command::Smile:
                run_smile(cfg, dir, options.threads);
                break;
            case Command::Calibrate:
                run_calibrate(cfg, dir);
                break;
            case Command::Verify:
                if (!run_verify(cfg, dir, options.threads)) {
                    err << "verify: one or more checks failed, see " << (dir / "verify_report.txt").string()
                        << '\n';
                    return 1;
                }
                break;
        }
        return 0;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        err << "error: ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: IoError: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "error: PreconditionError: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace garchint
