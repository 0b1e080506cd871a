#pragma once
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nphgsd/design.hpp"
#include "nphgsd/error.hpp"
#include "nphgsd/model.hpp"
#include "nphgsd/scenarios.hpp"
#include "nphgsd/sim.hpp"

namespace nphgsd {

// Configuration errors carry the JSON path of every offending field.
struct ConfigError : Error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

PiecewiseConstant parse_piecewise(const nlohmann::json& j, const std::string& path);
TrialModel parse_model(const nlohmann::json& j, const std::string& path = "model");
WeightSpec parse_weight(const nlohmann::json& j, const std::string& path);
SimTest parse_sim_test(const nlohmann::json& j, const std::string& path);
SpendingFunction parse_spending(const nlohmann::json& j, const std::string& path);

nlohmann::json model_to_json(const TrialModel& m);

enum class Command { Design, Power, Expect, Simulate, Scenarios };
std::optional<Command> parse_command(const std::string& s);

struct ScenarioRequest {
  std::vector<std::string> names;
  ScenarioConvention convention = ScenarioConvention::SurvivalAnchors;
  double n = 698, analysis_time = 36, alpha = 0.025;
  std::vector<SimTest> tests;
  bool simulate = false;
  long replicates = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct RunConfig {
  Command command = Command::Design;
  DesignConfig design;            // design, power
  std::string method = "auto";    // design: auto, nd, dn
  bool ceiling = false;           // design: round N up to an integer
  std::vector<double> grid;       // expect
  StudyConfig study;              // simulate
  ScenarioRequest scenarios;      // scenarios
  std::string format = "csv";     // output.format, overridden by --format
  std::string out_dir;            // output.path, overridden by --out
};

// Parses and validates a config for a command; throws ConfigError listing
// all problems (unknown keys, wrong types, invalid values).
RunConfig parse_run_config(const nlohmann::json& j, Command c);

}  // namespace nphgsd
