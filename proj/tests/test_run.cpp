#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qwflow/run.hpp"

using namespace qwflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  ExitCode code;
  std::string out;
  std::string err;
};

Outcome invoke(Command c, std::map<std::string, std::string> params) {
  std::ostringstream out, err;
  const ExitCode code = run({c, std::move(params)}, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qwflow_test_run";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("command names round trip") {
  for (Command c : {Command::Simulate, Command::Reduced, Command::Spectrum, Command::MixingTime,
                    Command::Pulsation, Command::Sweep}) {
    CHECK(parse_command(command_name(c)) == c);
  }
  CHECK_FALSE(parse_command("walk").has_value());
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke(Command::Simulate, {{"n", "2"}}).code == ExitCode::Usage);
  CHECK(invoke(Command::Simulate, {{"n", "ten"}}).code == ExitCode::Usage);
  CHECK(invoke(Command::Simulate, {{"n", "10"}, {"t-max", "-1"}}).code == ExitCode::Usage);
  CHECK(invoke(Command::MixingTime, {{"theta", "0"}}).code == ExitCode::Usage);
  CHECK(invoke(Command::Simulate, {{"format", "xml"}}).code == ExitCode::Usage);
  CHECK(invoke(Command::Simulate, {{"tail-mode", "open"}}).code == ExitCode::Usage);

  const Outcome unknown = invoke(Command::Reduced, {{"theta", "3"}});
  CHECK(unknown.code == ExitCode::Usage);
  CHECK(unknown.err.find("theta") != std::string::npos);
}

TEST_CASE("csv is rejected for json-only commands") {
  CHECK(invoke(Command::MixingTime, {{"n", "50"}, {"format", "csv"}}).code == ExitCode::Usage);
  CHECK(invoke(Command::Spectrum, {{"format", "csv"}}).code == ExitCode::Usage);
}

TEST_CASE("mixing-time summary schema") {
  const Outcome o = invoke(Command::MixingTime, {{"n", "50"}, {"theta", "2"}});
  REQUIRE(o.code == ExitCode::Ok);
  const json j = json::parse(o.out);
  for (const char* k : {"command", "params", "results", "method", "tool_version"}) {
    CHECK(j.contains(k));
  }
  CHECK(j["command"] == "mixing-time");
  CHECK(j["params"]["theta"] == "2");
  CHECK(j["params"]["horizon-factor"] == "2");
  CHECK(j["results"]["n"] == 50);
  CHECK(j["results"]["converged"] == true);
}

TEST_CASE("config file precedence") {
  const fs::path cfg = scratch("cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"n": 20, "theta": "2.5"})";
  }
  const Outcome o = invoke(Command::MixingTime, {{"config", cfg.string()}, {"theta", "1.5"}});
  REQUIRE(o.code == ExitCode::Ok);
  const json j = json::parse(o.out);
  CHECK(j["params"]["n"] == "20");
  CHECK(j["params"]["theta"] == "1.5");
  CHECK_FALSE(j["params"].contains("config"));

  const fs::path bad = scratch("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"window": 3})";
  }
  CHECK(invoke(Command::MixingTime, {{"config", bad.string()}}).code == ExitCode::Usage);
  CHECK(invoke(Command::MixingTime, {{"config", "/nonexistent/cfg.json"}}).code == ExitCode::Io);
}

TEST_CASE("simulate csv and output file") {
  const Outcome o = invoke(Command::Simulate, {{"n", "5"}, {"t-max", "3"}});
  REQUIRE(o.code == ExitCode::Ok);
  CHECK(o.out.rfind("t,nu_marked,nu_unmarked,norm_kn\n", 0) == 0);
  const fs::path p = scratch("sim.csv");
  fs::remove(p);
  CHECK(invoke(Command::Simulate, {{"n", "5"}, {"t-max", "3"}, {"output", p.string()}}).code ==
        ExitCode::Ok);
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == o.out);
  CHECK(invoke(Command::Simulate, {{"n", "5"}, {"output", "/nonexistent/x.csv"}}).code ==
        ExitCode::Io);
}

TEST_CASE("other commands run") {
  CHECK(invoke(Command::Reduced, {{"n", "10"}, {"t-max", "5"}, {"format", "json"}}).code ==
        ExitCode::Ok);
  const Outcome s = invoke(Command::Spectrum, {{"n", "100"}});
  REQUIRE(s.code == ExitCode::Ok);
  CHECK(json::parse(s.out)["results"]["fits"].size() == 3);
  CHECK(invoke(Command::Spectrum, {{"eps-list", "0.001,0.002"}}).code == ExitCode::Numeric);
  CHECK(invoke(Command::Pulsation, {{"n", "100"}}).code == ExitCode::Ok);
  const Outcome sw = invoke(Command::Sweep, {{"n-list", "50,100"}, {"jobs", "2"}});
  REQUIRE(sw.code == ExitCode::Ok);
  CHECK(json::parse(sw.out)["results"]["rows"].size() == 2);
  CHECK(invoke(Command::Sweep, {{"command", "spectrum"}}).code == ExitCode::Usage);
}
