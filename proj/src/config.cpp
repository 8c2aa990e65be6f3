#include "garchint/config.hpp"

#include "garchint/errors.hpp"

#include <fstream>
#include <sstream>

namespace garchint {

using nlohmann::ordered_json;

ordered_json default_config_json() {
    const ModelParams t1 = ModelParams::table1();
    auto side = [](const SideCoefficients& s) {
        return ordered_json{{"omega", s.omega}, {"alpha", s.alpha}, {"beta", s.beta}, {"gamma", s.gamma}};
    };
    ordered_json doc;
    doc["model"] = {{"delta", t1.delta},       {"dt", t1.dt},
                    {"recursion", "gjr"},      {"plus", side(t1.plus)},
                    {"minus", side(t1.minus)}, {"lambda0", nullptr}};
    doc["measure"] = {{"policy", "variance_preserving"},
                      {"rate", 0.0},
                      {"scale", 1.0},
                      {"minus_scale", 1.0},
                      {"minus_offset", 0.0},
                      {"shock", "physical"}};
    doc["jumps"] = nullptr;
    doc["simulation"] = {{"measure", "risk_neutral"}, {"horizon_steps", 30}, {"n_paths", 100000},
                         {"seed", 20240601},           {"s0", 100.0},        {"record", "terminal"}};
    doc["option"] = {{"kind", "call"}, {"strike", 100.0}};
    doc["smile"] = {{"maturities", {30, 60}},
                    {"moneyness", {0.9, 0.92, 0.94, 0.96, 0.98, 1.0, 1.02, 1.04, 1.06, 1.08, 1.1}},
                    {"option", "otm"}};
    doc["calibration"] = {{"input", ""},
                          {"free", ordered_json::array()},
                          {"max_iterations", 2000},
                          {"tolerance", 1e-6},
                          {"min_count", 50}};
    doc["verify"] = {{"audit_paths", 1000}};
    return doc;
}

namespace {

ordered_json default_jump_law(const char* kind) {
    if (std::string(kind) == "degenerate") {
        return {{"kind", "degenerate"}, {"delta", 0.002}};
    }
    if (std::string(kind) == "gamma") {
        return {{"kind", "gamma"}, {"shape", 1.0}, {"scale", 0.01}};
    }
    return {{"kind", "exponential"}, {"mean", 0.01}};
}

// Recursively overlays `src` on `dst`, rejecting keys that `dst` does not define.
// Null-valued defaults (optional sections) accept any object.
void merge_checked(ordered_json& dst, const ordered_json& src, const std::string& where) {
    if (!src.is_object()) {
        throw ConfigError("config key '" + where + "' must be an object");
    }
    for (const auto& [key, value] : src.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        if (!dst.contains(key)) {
            throw ConfigError("unknown config key '" + path + "'");
        }
        ordered_json& slot = dst[key];
        if (slot.is_object() && value.is_object()) {
            merge_checked(slot, value, path);
        } else {
            slot = value;
        }
    }
}

void fill_jump_defaults(ordered_json& doc) {
    ordered_json& jumps = doc["jumps"];
    if (jumps.is_null()) {
        return;
    }
    if (!jumps.is_object()) {
        throw ConfigError("config key 'jumps' must be an object or null");
    }
    ordered_json filled = {{"up", default_jump_law("exponential")},
                           {"down", default_jump_law("exponential")},
                           {"up_tilde", nullptr},
                           {"down_tilde", nullptr},
                           {"rhs", "per_unit_time"}};
    for (const auto& [key, value] : jumps.items()) {
        if (!filled.contains(key)) {
            throw ConfigError("unknown config key 'jumps." + key + "'");
        }
        if (value.is_object() && key != "rhs") {
            // A partial law keeps the defaults of its kind.
            const std::string kind = value.contains("kind") && value["kind"].is_string()
                                         ? value["kind"].get<std::string>()
                                         : "exponential";
            ordered_json law = default_jump_law(kind.c_str());
            law.update(value);
            filled[key] = law;
        } else {
            filled[key] = value;
        }
    }
    if (filled["up_tilde"].is_null()) {
        filled["up_tilde"] = filled["up"];
    }
    if (filled["down_tilde"].is_null()) {
        filled["down_tilde"] = filled["down"];
    }
    jumps = filled;
}

const ordered_json& at_path(const ordered_json& doc, const std::string& key) {
    const ordered_json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(part)) {
            throw ConfigError("missing config key '" + key + "'");
        }
        node = &(*node)[part];
        if (dot == std::string::npos) {
            return *node;
        }
        start = dot + 1;
    }
}

double get_number(const ordered_json& doc, const std::string& key) {
    const ordered_json& v = at_path(doc, key);
    if (!v.is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::int64_t get_integer(const ordered_json& doc, const std::string& key) {
    const ordered_json& v = at_path(doc, key);
    if (!v.is_number_integer()) {
        throw ConfigError("config key '" + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

std::string get_string(const ordered_json& doc, const std::string& key) {
    const ordered_json& v = at_path(doc, key);
    if (!v.is_string()) {
        throw ConfigError("config key '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

[[noreturn]] void bad_choice(const std::string& key, const std::string& value, const std::string& allowed) {
    throw ConfigError("config key '" + key + "' has invalid value '" + value + "' (expected " + allowed + ")");
}

JumpSizeDistribution parse_jump_law(const ordered_json& doc, const std::string& key, JumpSide side) {
    const std::string kind = get_string(doc, key + ".kind");
    const ordered_json& node = at_path(doc, key);
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : node.items()) {
            bool ok = false;
            for (const char* allowed : keys) {
                ok = ok || k == allowed;
            }
            if (!ok) {
                throw ConfigError("unknown config key '" + key + "." + k + "' for a " + kind + " jump law");
            }
        }
    };
    JumpSizeDistribution d;
    if (kind == "degenerate") {
        allow({"kind", "delta"});
        d = JumpSizeDistribution::degenerate(get_number(doc, key + ".delta"), side);
    } else if (kind == "exponential") {
        allow({"kind", "mean"});
        d = JumpSizeDistribution::exponential(get_number(doc, key + ".mean"), side);
    } else if (kind == "gamma") {
        allow({"kind", "shape", "scale"});
        d = JumpSizeDistribution::gamma(get_number(doc, key + ".shape"), get_number(doc, key + ".scale"), side);
    } else {
        bad_choice(key + ".kind", kind, "degenerate, exponential or gamma");
    }
    try {
        d.validate();
        jump_moments(d);
    } catch (const std::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
    return d;
}

}  // namespace

void apply_override(ordered_json& doc, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' must have the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    ordered_json value = ordered_json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    ordered_json patch = value;
    std::size_t end = key.size();
    while (true) {
        const std::size_t dot = key.rfind('.', end - 1);
        const std::string part =
            dot == std::string::npos ? key.substr(0, end) : key.substr(dot + 1, end - dot - 1);
        if (part.empty()) {
            throw ConfigError("override key '" + key + "' is malformed");
        }
        patch = ordered_json{{part, patch}};
        if (dot == std::string::npos) {
            break;
        }
        end = dot;
    }
    // Overriding inside a null optional section (jumps, model.lambda0) creates it.
    const std::size_t first_dot = key.find('.');
    const std::string head = key.substr(0, first_dot);
    if (first_dot != std::string::npos && doc.contains(head) && doc[head].is_null()) {
        doc[head] = ordered_json::object();
    }
    if (key.starts_with("model.lambda0.") && doc["model"]["lambda0"].is_null()) {
        doc["model"]["lambda0"] = ordered_json::object();
    }
    ordered_json base = doc;
    std::function<void(ordered_json&, const ordered_json&, const std::string&)> overlay =
        [&](ordered_json& dst, const ordered_json& src, const std::string& where) {
            for (const auto& [k, v] : src.items()) {
                const std::string path = where.empty() ? k : where + "." + k;
                if (dst.is_object() && !dst.contains(k) && where != "jumps" && where.rfind("jumps.", 0) != 0 &&
                    where != "model.lambda0") {
                    throw ConfigError("unknown config key '" + path + "'");
                }
                if (dst[k].is_object() && v.is_object()) {
                    overlay(dst[k], v, path);
                } else {
                    dst[k] = v;
                }
            }
        };
    overlay(base, patch, "");
    doc = base;
}

ordered_json resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("config file '" + path + "' not found or unreadable");
    }
    ordered_json file;
    try {
        file = ordered_json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    ordered_json doc = default_config_json();
    merge_checked(doc, file, "");
    fill_jump_defaults(doc);
    for (const std::string& o : overrides) {
        apply_override(doc, o);
        fill_jump_defaults(doc);
    }
    parse_config(doc);
    return doc;
}

RunConfig parse_config(const ordered_json& doc) {
    RunConfig cfg;
    SimulationSpec& sim = cfg.simulation;
    ModelParams& m = sim.params;

    m.delta = get_number(doc, "model.delta");
    m.dt = get_number(doc, "model.dt");
    const std::string recursion = get_string(doc, "model.recursion");
    if (recursion == "garch") {
        m.recursion = RecursionKind::Garch;
    } else if (recursion == "gjr") {
        m.recursion = RecursionKind::Gjr;
    } else {
        bad_choice("model.recursion", recursion, "garch or gjr");
    }
    for (const char* side : {"plus", "minus"}) {
        SideCoefficients& s = std::string(side) == "plus" ? m.plus : m.minus;
        const std::string prefix = std::string("model.") + side + ".";
        s.omega = get_number(doc, prefix + "omega");
        s.alpha = get_number(doc, prefix + "alpha");
        s.beta = get_number(doc, prefix + "beta");
        s.gamma = get_number(doc, prefix + "gamma");
    }
    const ordered_json& lambda0 = at_path(doc, "model.lambda0");
    if (!lambda0.is_null()) {
        sim.initial = IntensityState{get_number(doc, "model.lambda0.plus"), get_number(doc, "model.lambda0.minus"), 0.0};
    }

    MeasurePolicy& policy = cfg.policy;
    const std::string kind = get_string(doc, "measure.policy");
    if (kind == "variance_preserving") {
        policy.kind = MeasurePolicy::Kind::VariancePreserving;
    } else if (kind == "volatility_scaled") {
        policy.kind = MeasurePolicy::Kind::VolatilityScaled;
    } else if (kind == "explicit") {
        policy.kind = MeasurePolicy::Kind::Explicit;
    } else {
        bad_choice("measure.policy", kind, "variance_preserving, volatility_scaled or explicit");
    }
    policy.rate = get_number(doc, "measure.rate");
    policy.scale = get_number(doc, "measure.scale");
    policy.minus_scale = get_number(doc, "measure.minus_scale");
    policy.minus_offset = get_number(doc, "measure.minus_offset");
    const std::string shock = get_string(doc, "measure.shock");
    if (shock == "physical") {
        sim.shock = SimulationSpec::Shock::Physical;
    } else if (shock == "simulating") {
        sim.shock = SimulationSpec::Shock::Simulating;
    } else {
        bad_choice("measure.shock", shock, "physical or simulating");
    }
    sim.policy = policy;

    if (!at_path(doc, "jumps").is_null()) {
        GeneralizedJumps jumps;
        jumps.physical.plus = parse_jump_law(doc, "jumps.up", JumpSide::Up);
        jumps.physical.minus = parse_jump_law(doc, "jumps.down", JumpSide::Down);
        jumps.risk_neutral.plus = parse_jump_law(doc, "jumps.up_tilde", JumpSide::Up);
        jumps.risk_neutral.minus = parse_jump_law(doc, "jumps.down_tilde", JumpSide::Down);
        const std::string rhs = get_string(doc, "jumps.rhs");
        if (rhs == "per_unit_time") {
            jumps.rhs = DriftRhs::PerUnitTime;
        } else if (rhs == "per_step") {
            jumps.rhs = DriftRhs::PerStep;
        } else {
            bad_choice("jumps.rhs", rhs, "per_unit_time or per_step");
        }
        sim.jumps = jumps;
    }

    const std::string measure = get_string(doc, "simulation.measure");
    if (measure == "risk_neutral") {
        sim.measure = SimulationSpec::Measure::RiskNeutral;
    } else if (measure == "physical") {
        sim.measure = SimulationSpec::Measure::Physical;
    } else {
        bad_choice("simulation.measure", measure, "risk_neutral or physical");
    }
    const std::int64_t horizon = get_integer(doc, "simulation.horizon_steps");
    if (horizon < 0 || horizon > 1'000'000) {
        throw ConfigError("config key 'simulation.horizon_steps' must be in [0, 1000000]");
    }
    sim.horizon_steps = static_cast<int>(horizon);
    sim.n_paths = get_integer(doc, "simulation.n_paths");
    const ordered_json& seed = at_path(doc, "simulation.seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        throw ConfigError("config key 'simulation.seed' must be a nonnegative integer");
    }
    sim.seed = seed.get<std::uint64_t>();
    sim.s0 = get_number(doc, "simulation.s0");
    const std::string record = get_string(doc, "simulation.record");
    if (record == "terminal") {
        sim.record = SimulationSpec::Record::TerminalOnly;
    } else if (record == "full") {
        sim.record = SimulationSpec::Record::FullPaths;
    } else {
        bad_choice("simulation.record", record, "terminal or full");
    }

    const std::string option_kind = get_string(doc, "option.kind");
    if (option_kind == "call") {
        cfg.option.kind = OptionKind::Call;
    } else if (option_kind == "put") {
        cfg.option.kind = OptionKind::Put;
    } else {
        bad_choice("option.kind", option_kind, "call or put");
    }
    cfg.option.strike = get_number(doc, "option.strike");
    cfg.option.maturity = sim.maturity();
    cfg.option.rate = policy.rate;

    const ordered_json& maturities = at_path(doc, "smile.maturities");
    const ordered_json& moneyness = at_path(doc, "smile.moneyness");
    if (!maturities.is_array() || maturities.empty()) {
        throw ConfigError("config key 'smile.maturities' must be a nonempty array of step counts");
    }
    if (!moneyness.is_array() || moneyness.empty()) {
        throw ConfigError("config key 'smile.moneyness' must be a nonempty array of numbers");
    }
    for (const auto& v : maturities) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
            throw ConfigError("config key 'smile.maturities' entries must be integers >= 1");
        }
        cfg.smile_maturities.push_back(v.get<int>());
    }
    for (const auto& v : moneyness) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
            throw ConfigError("config key 'smile.moneyness' entries must be numbers > 0");
        }
        cfg.smile_moneyness.push_back(v.get<double>());
    }
    const std::string style = get_string(doc, "smile.option");
    if (style == "otm") {
        cfg.smile_style = SmileOptionStyle::Otm;
    } else if (style == "call") {
        cfg.smile_style = SmileOptionStyle::Call;
    } else if (style == "put") {
        cfg.smile_style = SmileOptionStyle::Put;
    } else {
        bad_choice("smile.option", style, "otm, call or put");
    }

    cfg.calibration_input = get_string(doc, "calibration.input");
    const ordered_json& free = at_path(doc, "calibration.free");
    if (!free.is_array()) {
        throw ConfigError("config key 'calibration.free' must be an array of parameter names");
    }
    for (const auto& v : free) {
        if (!v.is_string()) {
            throw ConfigError("config key 'calibration.free' entries must be strings");
        }
        cfg.fit.free.push_back(v.get<std::string>());
    }
    const std::int64_t max_iterations = get_integer(doc, "calibration.max_iterations");
    if (max_iterations < 1 || max_iterations > 10'000'000) {
        throw ConfigError("config key 'calibration.max_iterations' must be in [1, 10000000]");
    }
    cfg.fit.max_iterations = static_cast<int>(max_iterations);
    cfg.fit.tolerance = get_number(doc, "calibration.tolerance");
    if (!(cfg.fit.tolerance > 0.0)) {
        throw ConfigError("config key 'calibration.tolerance' must be > 0");
    }
    const std::int64_t min_count = get_integer(doc, "calibration.min_count");
    if (min_count < 1) {
        throw ConfigError("config key 'calibration.min_count' must be >= 1");
    }
    cfg.fit.min_count = static_cast<std::size_t>(min_count);
    cfg.verify_audit_paths = get_integer(doc, "verify.audit_paths");
    if (cfg.verify_audit_paths < 0) {
        throw ConfigError("config key 'verify.audit_paths' must be >= 0");
    }

    try {
        sim.validate();
        cfg.option.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

}  // namespace garchint
