#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nphgsd/ahr.hpp"
#include "nphgsd/config.hpp"
#include "nphgsd/expect.hpp"
#include "nphgsd/report.hpp"

using namespace nphgsd;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, Usage = 1, Invalid = 2, Infeasible = 3, Failure = 4 };

struct Output {
  std::string csv, json;
  std::vector<std::pair<std::string, std::string>> extra;  // file name, content
};

json num(double x) {
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  return x;
}

bool all_logrank(const DesignConfig& d) {
  for (const auto& t : d.tests)
    for (const auto& w : t)
      if (!same_weight(w, Logrank{})) return false;
  return true;
}

Output run_design(const RunConfig& rc) {
  std::string method = rc.method;
  if (method == "auto") method = all_logrank(rc.design) ? "dn" : "nd";
  if (method == "dn" && !all_logrank(rc.design))
    throw ConfigError({"method: d-n sizing requires logrank at every analysis"});
  DesignSummary s = method == "dn" ? sample_size_dn(rc.design) : sample_size_nd(rc.design);
  if (rc.ceiling && std::abs(s.n - std::ceil(s.n)) > 1e-9) {
    DesignConfig d = rc.design;
    d.model = d.model.scaled(std::ceil(s.n) / d.model.total_enrollment());
    s = evaluate_design(d);
  }
  Output o{to_csv(s), to_json(s), {}};
  return o;
}

Output run_power(const RunConfig& rc) {
  DesignSummary s = evaluate_design(rc.design);
  return {to_csv(s), to_json(s), {}};
}

Output run_expect(const RunConfig& rc) {
  const TrialModel& m = rc.design.model;
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << "time,ahr,expected_events\n";
  json rows = json::array();
  for (double t : rc.grid) {
    double ev = t > 0 ? expected_events_total(m, t) : 0.0;
    double ahr = ev > 0 ? ahr_lr(m, t).ahr : 1.0;
    os << t << ',' << ahr << ',' << ev << '\n';
    rows.push_back({{"time", t}, {"ahr", ahr}, {"expected_events", ev}});
  }
  Output o{os.str(), json{{"rows", rows}}.dump(2), {}};
  double last = rc.grid.back();
  if (last > 0) {
    o.extra.push_back({"events_breakdown.csv", to_csv(expected_events(m, last))});
    o.extra.push_back({"ahr_intervals.csv", to_csv(ahr_lr(m, last))});
  }
  return o;
}

Output run_simulate(const RunConfig& rc) {
  SimReport r = run_study(rc.study);
  Output o{to_csv(r), to_json(r), {}};
  if (rc.study.keep_z) o.extra.push_back({"z_replicates.csv", z_dump_csv(r)});
  return o;
}

Output run_scenarios(const RunConfig& rc) {
  const ScenarioRequest& q = rc.scenarios;
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << "scenario,test,method,power,mc_se\n";
  json cells = json::array();
  for (const auto& name : q.names) {
    TrialModel m = scenario_model(name, q.n, q.convention);
    for (const auto& t : q.tests) {
      const bool asymptotic = std::holds_alternative<WlrTest>(t) || std::holds_alternative<MaxComboTest>(t);
      if (!asymptotic) continue;
      DesignConfig d;
      d.model = m;
      d.analysis_times = {q.analysis_time};
      d.tests = {std::holds_alternative<WlrTest>(t) ? std::vector<WeightSpec>{std::get<WlrTest>(t).weight}
                                                    : std::get<MaxComboTest>(t).weights};
      d.alpha_spending.total = q.alpha;
      DesignSummary s = evaluate_design(d);
      os << name << ",\"" << describe(t) << "\",asymptotic," << s.power << ",\n";
      cells.push_back({{"scenario", name}, {"test", describe(t)}, {"method", "asymptotic"}, {"power", s.power}});
    }
    if (q.simulate) {
      StudyConfig st;
      st.model = m;
      st.n = std::lround(q.n);
      st.tests = q.tests;
      st.cuts = {{false, q.analysis_time}};
      st.replicates = q.replicates;
      st.seed = q.seed;
      st.workers = q.workers;
      st.alpha = q.alpha;
      SimReport r = run_study(st);
      for (const auto& c : r.cells) {
        os << name << ",\"" << c.test << "\",simulation," << c.power << ',' << c.se << '\n';
        cells.push_back({{"scenario", name},
                         {"test", c.test},
                         {"method", "simulation"},
                         {"power", c.power},
                         {"mc_se", c.se},
                         {"replicates", r.replicates}});
      }
    }
  }
  json j{{"n", q.n}, {"analysis_time", q.analysis_time}, {"alpha", q.alpha}, {"cells", cells}};
  return {os.str(), j.dump(2), {}};
}

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << s;
  if (s.empty() || s.back() != '\n') f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group sequential design and simulation under non-proportional hazards"};
  std::string command, config_path, out_dir, format;
  int workers = 0;
  long long seed = -1;
  bool validate_only = false;
  app.add_option("command", command, "design | power | expect | simulate | scenarios")
      ->required()
      ->check(CLI::IsMember({"design", "power", "expect", "simulate", "scenarios"}));
  app.add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "directory for CSV and JSON reports");
  app.add_option("--format", format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", workers, "simulation threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "simulation seed")->check(CLI::NonNegativeNumber);
  app.add_flag("--validate-only", validate_only, "check the config and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Ok : Usage;
  }

  const Command cmd = *parse_command(command);
  RunConfig rc;
  try {
    std::ifstream in(config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError({std::string("config: ") + e.what()});
    }
    rc = parse_run_config(j, cmd);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& p : e.problems) std::cerr << "  " << p << '\n';
    return Invalid;
  }
  const TrialModel& model = cmd == Command::Simulate ? rc.study.model : rc.design.model;
  const ValidationReport report = validate(model);
  if (cmd != Command::Scenarios)
    for (const auto& w : report.warnings) std::cerr << "warning: " << w.field << ": " << w.message << '\n';
  if (seed >= 0) {
    rc.study.seed = static_cast<std::uint64_t>(seed);
    rc.scenarios.seed = static_cast<std::uint64_t>(seed);
  }
  if (workers > 0) {
    rc.study.workers = workers;
    rc.scenarios.workers = workers;
  }
  if (!format.empty()) rc.format = format;
  if (!out_dir.empty()) rc.out_dir = out_dir;
  if (validate_only) {
    std::cout << "valid\n";
    return Ok;
  }

  Output o;
  try {
    switch (cmd) {
      case Command::Design: o = run_design(rc); break;
      case Command::Power: o = run_power(rc); break;
      case Command::Expect: o = run_expect(rc); break;
      case Command::Simulate: o = run_simulate(rc); break;
      case Command::Scenarios: o = run_scenarios(rc); break;
    }
    if (!rc.out_dir.empty()) {
      std::filesystem::create_directories(rc.out_dir);
      std::filesystem::path dir(rc.out_dir);
      write_file(dir / (command + ".csv"), o.csv);
      write_file(dir / (command + ".json"), o.json);
      for (const auto& [name, content] : o.extra) write_file(dir / name, content);
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& p : e.problems) std::cerr << "  " << p << '\n';
    return Invalid;
  } catch (const UnattainableError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return Infeasible;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return Infeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Failure;
  }
  std::cout << (rc.format == "json" ? o.json + "\n" : o.csv);
  return Ok;
}
