#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qwflow {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExitCode : int {
  Ok = 0,
  Usage = 2,
  Numeric = 3,
  Io = 4,
};

enum class Command { Simulate, Reduced, Spectrum, MixingTime, Pulsation, Sweep };

std::optional<Command> parse_command(std::string_view name);
const char* command_name(Command c);

// Parameter keys accepted by a command (flag names without the leading --).
const std::vector<std::string>& allowed_keys(Command c);

// A command plus raw key/value parameters as given on the command line.
// A "config" entry names a JSON file whose keys fill in anything not given
// explicitly; defaults apply last.
struct RunSpec {
  Command command = Command::Simulate;
  std::map<std::string, std::string> params;
};

// Validates, runs and writes artifacts. Data goes to params["output"] when
// set, otherwise to `out`; diagnostics go to `err`.
ExitCode run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace qwflow
