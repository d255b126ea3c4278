#pragma once

#include <iosfwd>
#include <string>

namespace clamped::cli {

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kUsage = 2, kSolverFailed = 3 };

/// Everything a subcommand may read. Flags override values from --config,
/// which override these defaults.
struct RunConfig {
  std::string subcommand;
  std::string domain;  // path to a JSON domain spec
  int d = 2;
  double volume = 1.0;
  int resolution = 0;  // 0: keep the spec's value
  std::string dims = "4..9";
  std::string out;     // empty: stdout
  std::string format;  // csv | columns; empty: csv for tables, columns for profiles
  std::string field;   // vector field (shape-deriv) or CSV path (rearrange)
  std::string source;  // CSV path for talenti; empty means f = 1
  std::string mode = "schwarz";
  std::string quantity = "u";
  int points = 200;
  bool exact_g = false;
  double tol = 1e-12;
  double criticality_factor = 10.0;  // tolerance = factor * h
};

/// Parses argv and runs one subcommand. Reports go to `out`; failures print
/// one line "error code=<n> kind=<kind> message=<text>" to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clamped::cli
