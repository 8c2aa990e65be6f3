#pragma once

#include "garchint/montecarlo.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace garchint {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

// Martingale, measure-change and variance-preservation checks for the measure
// described by spec.policy (and spec.jumps, when present). spec.measure is
// ignored; each check simulates under the measure it needs.
std::vector<CheckResult> run_verification(const SimulationSpec& spec, std::int64_t audit_paths,
                                          unsigned threads = 0);

void write_verification_report(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace garchint
