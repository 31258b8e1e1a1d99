#pragma once

// Command-line front end shared by the `rramsim` binary and the tests.
//
//   rramsim device                         single-device or netlist transient
//   rramsim experiment <name>              ron-roff | dynamics | leakage | thresholds
//   rramsim gate <family> <study>          IMPLY | MAGIC | FELIX | TMSL, correctness | stable-time
//
// Every run writes `<out>/<command>/<label or UTC timestamp>/` containing
// manifest.json (resolved configuration), summary.json and CSV data files.

#include <iosfwd>

namespace rram {

/// Runs one command. Returns the process exit code: 0 on success, 2 on
/// configuration or validation errors (a JSON error record goes to `err`),
/// 1 on any other failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rram
