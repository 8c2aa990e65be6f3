#pragma once

#include "garchint/calibration.hpp"
#include "garchint/montecarlo.hpp"
#include "garchint/pricing.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace garchint {

// Everything one batch run needs. Built from a JSON document layered over
// default_config_json(); every key is validated before any computation.
struct RunConfig {
    SimulationSpec simulation;  // includes model params, policy and jump laws
    MeasurePolicy policy;
    OptionSpec option;          // maturity and rate are derived from simulation/policy

    std::vector<int> smile_maturities;
    std::vector<double> smile_moneyness;
    SmileOptionStyle smile_style = SmileOptionStyle::Otm;

    std::string calibration_input;
    FitSettings fit;

    std::int64_t verify_audit_paths = 1000;
};

nlohmann::ordered_json default_config_json();

// Applies dotted-key overrides ("model.plus.omega=0.1"); values parse as JSON
// when possible and as strings otherwise.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

// Defaults + file + overrides, unknown keys rejected. Throws IoError when the
// file cannot be read and ConfigError on any invalid entry.
nlohmann::ordered_json resolve_config(const std::string& path, const std::vector<std::string>& overrides);

RunConfig parse_config(const nlohmann::ordered_json& resolved);

}  // namespace garchint
