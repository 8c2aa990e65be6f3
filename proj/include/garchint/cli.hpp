#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace garchint {

enum class Command { Simulate, Price, Smile, Calibrate, Verify };

// Throws ConfigError for an unknown name.
Command parse_command(const std::string& name);

struct RunOptions {
    std::string output_dir;  // empty: $GARCHINT_OUTPUT_DIR, else "out"
    unsigned threads = 0;    // 0: hardware concurrency
};

// Runs one subcommand end to end and returns the process exit status:
// 0 success, 1 domain error (or a failed verification), 2 config or I/O error.
// Diagnostics go to `err`; nothing is thrown.
int run(Command command, const std::string& config_path, const std::vector<std::string>& overrides,
        const RunOptions& options, std::ostream& err);

}  // namespace garchint
