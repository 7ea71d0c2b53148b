// Command-line front end: parses flags into a RunSpec and hands it to run().

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qwflow/run.hpp"

namespace {

struct Registered {
  qwflow::Command command;
  CLI::App* app;
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

struct Flag {
  const char* key;
  const char* help;
};

const std::vector<Flag>& flag_help() {
  static const std::vector<Flag> flags{
      {"n", "number of vertices N of K_N"},
      {"t-max", "last time step"},
      {"marked", "index of the marked vertex"},
      {"tail-mode", "source-sink | truncated"},
      {"theta", "mixing threshold exponent (distance < e^-theta)"},
      {"horizon-factor", "scan horizon in units of N ln N (>= 2)"},
      {"eps-list", "comma-separated epsilons for the series fit"},
      {"n-list", "comma-separated vertex counts"},
      {"command", "sweep target: mixing-time | pulsation"},
      {"window", "moving-average width for the reported smoothed series"},
      {"jobs", "worker threads for sweeps (0: all processors)"},
      {"output", "output path (default: stdout)"},
      {"format", "csv | json"},
      {"config", "JSON file of parameter defaults"},
  };
  return flags;
}

const char* describe(qwflow::Command c) {
  using qwflow::Command;
  switch (c) {
    case Command::Simulate:
      return "full arc-space simulation";
    case Command::Reduced:
      return "three-dimensional reduced recursion";
    case Command::Spectrum:
      return "eigenvalues, eigenprojections and perturbation-series fits of T(eps)";
    case Command::MixingTime:
      return "l2 mixing time of the internal state";
    case Command::Pulsation:
      return "peak detection and pulsation-formula comparison";
    case Command::Sweep:
      return "run mixing-time or pulsation over a list of N";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  using qwflow::Command;
  CLI::App app{"Grover walk with in/out flow on K_N with one marked vertex"};
  app.require_subcommand(1);

  std::vector<Registered> subs;
  for (Command c : {Command::Simulate, Command::Reduced, Command::Spectrum, Command::MixingTime,
                    Command::Pulsation, Command::Sweep}) {
    Registered reg{c, app.add_subcommand(qwflow::command_name(c), describe(c)), {}};
    for (const std::string& key : qwflow::allowed_keys(c)) {
      std::string help;
      for (const Flag& f : flag_help()) {
        if (key == f.key) help = f.help;
      }
      reg.options.emplace_back(key, reg.app->add_option("--" + key)->description(help));
    }
    subs.push_back(std::move(reg));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(qwflow::ExitCode::Usage);
  }

  for (const Registered& reg : subs) {
    if (!reg.app->parsed()) continue;
    qwflow::RunSpec spec;
    spec.command = reg.command;
    for (const auto& [key, opt] : reg.options) {
      if (opt->count() > 0) spec.params[key] = opt->as<std::string>();
    }
    return static_cast<int>(qwflow::run(spec, std::cout, std::cerr));
  }
  return static_cast<int>(qwflow::ExitCode::Usage);
}
