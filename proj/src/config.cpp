#include "nphgsd/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "nphgsd/expect.hpp"

namespace nphgsd {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "\n") + x;
  return s;
}

// collects problems while parsing, so one run reports all of them
struct Checker {
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key())) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    return true;
  }

  std::optional<double> number(const json& j, const std::string& key, const std::string& path,
                               bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return std::nullopt;
    }
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v == "Inf" || v == "inf" || v == "Infinity"))
      return std::numeric_limits<double>::infinity();
    fail(path + "." + key, "expected a number");
    return std::nullopt;
  }

  std::vector<double> numbers(const json& j, const std::string& path) {
    std::vector<double> out;
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_number())
        out.push_back(j[i].get<double>());
      else if (j[i].is_string() && (j[i] == "Inf" || j[i] == "inf"))
        out.push_back(std::numeric_limits<double>::infinity());
      else
        fail(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    return out;
  }

  void finish() {
    if (!problems.empty()) throw ConfigError(problems);
  }
};

PiecewiseConstant piecewise(Checker& c, const json& j, const std::string& path) {
  if (j.is_number()) return PiecewiseConstant::constant(j.get<double>());
  if (!c.object(j, path, {"breakpoints", "durations", "values"})) return {};
  if (!j.contains("values")) {
    c.fail(path + ".values", "missing");
    return {};
  }
  std::vector<double> v = c.numbers(j["values"], path + ".values");
  try {
    if (j.contains("breakpoints") && j.contains("durations")) {
      c.fail(path, "give either breakpoints or durations, not both");
    } else if (j.contains("breakpoints")) {
      return PiecewiseConstant(c.numbers(j["breakpoints"], path + ".breakpoints"), v);
    } else if (j.contains("durations")) {
      return PiecewiseConstant::from_durations(c.numbers(j["durations"], path + ".durations"), v);
    } else if (v.size() == 1) {
      return PiecewiseConstant::constant(v[0]);
    } else {
      c.fail(path, "breakpoints or durations required for more than one value");
    }
  } catch (const Error& e) {
    c.fail(path, e.what());
  }
  return {};
}

std::array<PiecewiseConstant, 2> dropout(Checker& c, const json& j, const std::string& path) {
  if (j.is_object() && (j.contains("control") || j.contains("experimental"))) {
    c.object(j, path, {"control", "experimental"});
    PiecewiseConstant a, b;
    if (j.contains("control")) a = piecewise(c, j["control"], path + ".control");
    else c.fail(path + ".control", "missing");
    if (j.contains("experimental")) b = piecewise(c, j["experimental"], path + ".experimental");
    else c.fail(path + ".experimental", "missing");
    return {a, b};
  }
  PiecewiseConstant a = piecewise(c, j, path);
  return {a, a};
}

TrialModel model(Checker& c, const json& j, const std::string& path) {
  TrialModel m;
  if (!c.object(j, path, {"enroll_rate", "enroll_duration", "total_duration", "control_hazard",
                          "hazard_ratio", "dropout", "ratio", "strata"}))
    return m;
  for (const char* k : {"enroll_rate", "control_hazard"})
    if (!j.contains(k)) c.fail(path + "." + k, "missing");
  if (j.contains("enroll_rate")) m.enroll_rate = piecewise(c, j["enroll_rate"], path + ".enroll_rate");
  if (j.contains("control_hazard"))
    m.control_hazard = piecewise(c, j["control_hazard"], path + ".control_hazard");
  if (j.contains("hazard_ratio")) m.hazard_ratio = piecewise(c, j["hazard_ratio"], path + ".hazard_ratio");
  if (j.contains("dropout")) m.dropout = dropout(c, j["dropout"], path + ".dropout");
  if (auto v = c.number(j, "enroll_duration", path)) m.enroll_duration = *v;
  if (auto v = c.number(j, "total_duration", path)) m.total_duration = *v;
  if (j.contains("ratio")) {
    const json& r = j["ratio"];
    if (r.is_number()) {
      // allocation experimental:control
      double k = r.get<double>();
      m.ratio = {1 / (1 + k), k / (1 + k)};
    } else {
      auto v = c.numbers(r, path + ".ratio");
      if (v.size() == 2) m.ratio = {v[0], v[1]};
      else c.fail(path + ".ratio", "expected [p_control, p_experimental] or an allocation ratio");
    }
  }
  if (j.contains("strata")) {
    const json& s = j["strata"];
    if (!s.is_array()) {
      c.fail(path + ".strata", "expected an array");
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        std::string p = path + ".strata[" + std::to_string(i) + "]";
        Stratum st;
        if (!c.object(s[i], p, {"fraction", "control_hazard", "hazard_ratio", "dropout"})) continue;
        if (auto v = c.number(s[i], "fraction", p)) st.fraction = *v;
        if (s[i].contains("control_hazard")) st.control_hazard = piecewise(c, s[i]["control_hazard"], p + ".control_hazard");
        else c.fail(p + ".control_hazard", "missing");
        if (s[i].contains("hazard_ratio")) st.hazard_ratio = piecewise(c, s[i]["hazard_ratio"], p + ".hazard_ratio");
        st.dropout = s[i].contains("dropout") ? dropout(c, s[i]["dropout"], p + ".dropout") : m.dropout;
        m.strata.push_back(st);
      }
    }
  }
  if (c.problems.empty()) {
    ValidationReport r = validate(m);
    for (const auto& i : r.issues) c.fail(path + "." + i.field, i.message);
  }
  return m;
}

WeightSpec weight(Checker& c, const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    c.fail(path, "expected an object with a string 'type'");
    return Logrank{};
  }
  std::string t = j["type"];
  if (t == "logrank") {
    c.object(j, path, {"type"});
    return Logrank{};
  }
  if (t == "fh") {
    c.object(j, path, {"type", "p", "q"});
    FlemingHarrington f;
    if (auto v = c.number(j, "p", path)) f.p = *v;
    if (auto v = c.number(j, "q", path)) f.q = *v;
    if (f.p < 0 || f.q < 0) c.fail(path, "FH exponents must be nonnegative");
    return f;
  }
  if (t == "mb") {
    c.object(j, path, {"type", "t_star", "w_max"});
    MagirrBurman b;
    if (auto v = c.number(j, "t_star", path)) b.t_star = *v;
    if (auto v = c.number(j, "w_max", path, false)) b.w_max = *v;
    if (!(b.t_star > 0)) c.fail(path + ".t_star", "must be positive");
    if (!(b.w_max >= 1)) c.fail(path + ".w_max", "must be at least 1");
    return b;
  }
  if (t == "zero_early") {
    c.object(j, path, {"type", "t0"});
    ZeroEarly z;
    if (auto v = c.number(j, "t0", path)) z.t0 = *v;
    if (!(z.t0 >= 0)) c.fail(path + ".t0", "must be nonnegative");
    return z;
  }
  c.fail(path + ".type", "unknown weight '" + t + "'");
  return Logrank{};
}

// a test: a weight, or a MaxCombo of weights; RMST / milestone only when allowed
SimTest test(Checker& c, const json& j, const std::string& path, bool sim_only_ok) {
  if (j.is_object() && j.contains("type") && j["type"].is_string()) {
    std::string t = j["type"];
    if (t == "maxcombo") {
      c.object(j, path, {"type", "weights"});
      MaxComboTest m;
      if (!j.contains("weights") || !j["weights"].is_array() || j["weights"].empty()) {
        c.fail(path + ".weights", "expected a nonempty array of weights");
        return m;
      }
      for (std::size_t i = 0; i < j["weights"].size(); ++i)
        m.weights.push_back(weight(c, j["weights"][i], path + ".weights[" + std::to_string(i) + "]"));
      if (m.weights.size() < 2) c.fail(path + ".weights", "MaxCombo needs at least two weights");
      for (std::size_t a = 0; a < m.weights.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
          if (same_weight(m.weights[a], m.weights[b]))
            c.fail(path + ".weights[" + std::to_string(a) + "]", "duplicate weight");
      return m;
    }
    if (t == "rmst" || t == "milestone") {
      if (!sim_only_ok) {
        c.fail(path, t + " is simulation-only; no asymptotic power is available");
        return WlrTest{Logrank{}};
      }
      if (t == "rmst") {
        c.object(j, path, {"type", "horizon"});
        RmstTest r;
        if (auto v = c.number(j, "horizon", path)) r.horizon = *v;
        if (!(r.horizon > 0)) c.fail(path + ".horizon", "must be positive");
        return r;
      }
      c.object(j, path, {"type", "landmark"});
      MilestoneTest m;
      if (auto v = c.number(j, "landmark", path)) m.landmark = *v;
      if (!(m.landmark > 0)) c.fail(path + ".landmark", "must be positive");
      return m;
    }
  }
  return WlrTest{weight(c, j, path)};
}

std::vector<WeightSpec> weights_of(const SimTest& t) {
  if (auto* w = std::get_if<WlrTest>(&t)) return {w->weight};
  if (auto* m = std::get_if<MaxComboTest>(&t)) return m->weights;
  return {};
}

SpendingFunction spending(Checker& c, const json& j, const std::string& path) {
  SpendingFunction s;
  if (!c.object(j, path, {"family", "total", "param", "cumulative"})) return s;
  std::string fam = j.value("family", std::string("ldof"));
  if (fam == "ldof") s.family = SpendingFamily::LanDeMetsOBF;
  else if (fam == "ldpk") s.family = SpendingFamily::LanDeMetsPocock;
  else if (fam == "kim_demets") s.family = SpendingFamily::KimDeMetsPower;
  else if (fam == "hsd") s.family = SpendingFamily::HwangShihDeCani;
  else if (fam == "fixed") s.family = SpendingFamily::Fixed;
  else c.fail(path + ".family", "unknown spending family '" + fam + "'");
  if (auto v = c.number(j, "total", path)) s.total = *v;
  if (auto v = c.number(j, "param", path, false)) s.param = *v;
  if (s.family == SpendingFamily::KimDeMetsPower && !j.contains("param")) s.param = 2;
  if (j.contains("cumulative")) s.cumulative = c.numbers(j["cumulative"], path + ".cumulative");
  if (s.family == SpendingFamily::Fixed && s.cumulative.empty())
    c.fail(path + ".cumulative", "required for fixed spending");
  for (std::size_t i = 1; i < s.cumulative.size(); ++i)
    if (s.cumulative[i] < s.cumulative[i - 1]) c.fail(path + ".cumulative", "must be nondecreasing");
  if (s.family == SpendingFamily::KimDeMetsPower && !(s.param > 0))
    c.fail(path + ".param", "power must be positive");
  return s;
}

std::vector<double> schedule(Checker& c, const json& root, const TrialModel& m, bool need) {
  if (!root.contains("schedule")) {
    if (need) c.fail("schedule", "missing");
    return {};
  }
  const json& j = root["schedule"];
  if (!c.object(j, "schedule", {"times", "events"})) return {};
  std::vector<double> t;
  if (j.contains("times") == j.contains("events")) {
    c.fail("schedule", "give exactly one of times or events");
    return t;
  }
  if (j.contains("times")) {
    t = c.numbers(j["times"], "schedule.times");
  } else {
    std::vector<double> ev = c.numbers(j["events"], "schedule.events");
    if (c.problems.empty()) {
      for (double e : ev) {
        try {
          t.push_back(time_for_events(m, e));
        } catch (const Error& e2) {
          c.fail("schedule.events", e2.what());
        }
      }
    }
  }
  if (t.empty()) c.fail("schedule", "no analyses");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0)) c.fail("schedule", "analysis times must be positive");
    if (k > 0 && !(t[k] > t[k - 1])) c.fail("schedule", "analysis times must increase");
    if (t[k] > m.total_duration + 1e-9) c.fail("schedule", "analysis after total_duration");
  }
  return t;
}

std::vector<SimTest> test_list(Checker& c, const json& j, const std::string& path, bool sim_ok) {
  std::vector<SimTest> out;
  if (!j.is_array() || j.empty()) {
    c.fail(path, "expected a nonempty array of tests");
    return out;
  }
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(test(c, j[i], path + "[" + std::to_string(i) + "]", sim_ok));
  return out;
}

void parse_design(Checker& c, const json& j, RunConfig& rc, bool sizing) {
  // power accepts the sizing keys so one config serves both commands
  c.object(j, "", {"model", "schedule", "tests", "spending", "output", "targets", "method", "ceiling"});
  DesignConfig& d = rc.design;
  if (!j.contains("model")) c.fail("model", "missing");
  else d.model = model(c, j["model"], "model");
  d.analysis_times = schedule(c, j, d.model, true);
  if (!j.contains("tests")) {
    c.fail("tests", "missing");
  } else {
    auto ts = test_list(c, j["tests"], "tests", false);
    if (ts.size() == 1 && d.analysis_times.size() > 1) ts.assign(d.analysis_times.size(), ts[0]);
    if (!ts.empty() && ts.size() != d.analysis_times.size())
      c.fail("tests", "give one test, or one per analysis");
    for (const auto& t : ts) d.tests.push_back(weights_of(t));
  }
  if (!j.contains("spending")) {
    c.fail("spending", "missing");
  } else {
    const json& s = j["spending"];
    if (c.object(s, "spending", {"alpha", "beta", "binding", "fraction_mode"})) {
      if (s.contains("alpha")) d.alpha_spending = spending(c, s["alpha"], "spending.alpha");
      else c.fail("spending.alpha", "missing");
      if (s.contains("beta")) d.beta_spending = spending(c, s["beta"], "spending.beta");
      d.binding = s.value("binding", false);
      std::string fm = s.value("fraction_mode", std::string("all_weights"));
      if (fm == "all_weights") d.fraction_mode = FractionMode::AllWeights;
      else if (fm == "tested_weights") d.fraction_mode = FractionMode::TestedWeights;
      else c.fail("spending.fraction_mode", "expected all_weights or tested_weights");
    }
    if (!(d.alpha_spending.total > 0 && d.alpha_spending.total < 0.5))
      c.fail("spending.alpha.total", "alpha must lie in (0, 0.5)");
    if (d.beta_spending && !(d.beta_spending->total > 0 && d.beta_spending->total < 1))
      c.fail("spending.beta.total", "beta must lie in (0, 1)");
  }
  if (sizing || j.contains("targets")) {
    if (!j.contains("targets")) {
      c.fail("targets", "missing");
    } else if (c.object(j["targets"], "targets", {"power", "alpha"})) {
      if (auto v = c.number(j["targets"], "power", "targets")) d.target_power = *v;
      if (auto v = c.number(j["targets"], "alpha", "targets", false)) {
        if (!(*v > 0 && *v < 0.5)) c.fail("targets.alpha", "alpha must lie in (0, 0.5)");
        else if (std::abs(*v - d.alpha_spending.total) > 1e-12)
          c.fail("targets.alpha", "disagrees with spending.alpha.total");
      }
      if (!(d.target_power > 0 && d.target_power < 1)) c.fail("targets.power", "must lie in (0, 1)");
    }
    rc.method = j.value("method", std::string("auto"));
    if (rc.method != "auto" && rc.method != "nd" && rc.method != "dn")
      c.fail("method", "expected auto, nd or dn");
    rc.ceiling = j.value("ceiling", false);
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> p) : Error(join(p)), problems(std::move(p)) {}

PiecewiseConstant parse_piecewise(const json& j, const std::string& path) {
  Checker c;
  auto f = piecewise(c, j, path);
  c.finish();
  return f;
}

TrialModel parse_model(const json& j, const std::string& path) {
  Checker c;
  auto m = model(c, j, path);
  c.finish();
  return m;
}

WeightSpec parse_weight(const json& j, const std::string& path) {
  Checker c;
  auto w = weight(c, j, path);
  c.finish();
  return w;
}

SimTest parse_sim_test(const json& j, const std::string& path) {
  Checker c;
  auto t = test(c, j, path, true);
  c.finish();
  return t;
}

SpendingFunction parse_spending(const json& j, const std::string& path) {
  Checker c;
  auto s = spending(c, j, path);
  c.finish();
  return s;
}

std::optional<Command> parse_command(const std::string& s) {
  if (s == "design") return Command::Design;
  if (s == "power") return Command::Power;
  if (s == "expect") return Command::Expect;
  if (s == "simulate") return Command::Simulate;
  if (s == "scenarios") return Command::Scenarios;
  return std::nullopt;
}

RunConfig parse_run_config(const json& j, Command cmd) {
  Checker c;
  RunConfig rc;
  rc.command = cmd;
  if (!j.is_object()) {
    c.fail("", "config must be a JSON object");
    c.finish();
  }
  switch (cmd) {
    case Command::Design:
      parse_design(c, j, rc, true);
      break;
    case Command::Power:
      parse_design(c, j, rc, false);
      break;
    case Command::Expect: {
      c.object(j, "", {"model", "grid", "output"});
      TrialModel m;
      if (!j.contains("model")) c.fail("model", "missing");
      else m = model(c, j["model"], "model");
      rc.design.model = m;
      if (!j.contains("grid")) {
        c.fail("grid", "missing");
      } else if (j["grid"].is_array()) {
        rc.grid = c.numbers(j["grid"], "grid");
      } else if (c.object(j["grid"], "grid", {"from", "to", "by"})) {
        auto from = c.number(j["grid"], "from", "grid"), to = c.number(j["grid"], "to", "grid"),
             by = c.number(j["grid"], "by", "grid");
        if (from && to && by) {
          if (!(*by > 0)) c.fail("grid.by", "must be positive");
          else
            for (long i = 0; *from + i * *by <= *to + 1e-9; ++i) rc.grid.push_back(*from + i * *by);
        }
      }
      for (double t : rc.grid) {
        if (t < 0) c.fail("grid", "times must be nonnegative");
        if (c.problems.empty() && t > m.total_duration + 1e-9)
          c.fail("grid", "time " + std::to_string(t) + " is beyond total_duration");
      }
      if (rc.grid.empty()) c.fail("grid", "no times");
      break;
    }
    case Command::Simulate: {
      c.object(j, "", {"model", "schedule", "tests", "simulation", "output"});
      StudyConfig& s = rc.study;
      if (!j.contains("model")) c.fail("model", "missing");
      else s.model = model(c, j["model"], "model");
      if (j.contains("tests")) s.tests = test_list(c, j["tests"], "tests", true);
      else c.fail("tests", "missing");
      if (!j.contains("simulation")) {
        c.fail("simulation", "missing");
      } else if (c.object(j["simulation"], "simulation",
                          {"n", "replicates", "seed", "workers", "alpha", "dump_z"})) {
        const json& sj = j["simulation"];
        if (auto v = c.number(sj, "n", "simulation")) s.n = static_cast<long>(std::llround(*v));
        if (auto v = c.number(sj, "replicates", "simulation", false)) s.replicates = static_cast<long>(*v);
        if (auto v = c.number(sj, "seed", "simulation", false)) s.seed = static_cast<std::uint64_t>(*v);
        if (auto v = c.number(sj, "workers", "simulation", false)) s.workers = static_cast<int>(*v);
        if (auto v = c.number(sj, "alpha", "simulation", false)) s.alpha = *v;
        s.keep_z = sj.value("dump_z", false);
        if (s.n <= 0) c.fail("simulation.n", "must be positive");
        if (s.replicates <= 0) c.fail("simulation.replicates", "must be positive");
        if (!(s.alpha > 0 && s.alpha < 0.5)) c.fail("simulation.alpha", "must lie in (0, 0.5)");
      }
      if (j.contains("schedule")) {
        const json& sc = j["schedule"];
        if (c.object(sc, "schedule", {"times", "events"})) {
          if (sc.contains("times"))
            for (double t : c.numbers(sc["times"], "schedule.times")) s.cuts.push_back({false, t});
          if (sc.contains("events"))
            for (double e : c.numbers(sc["events"], "schedule.events")) s.cuts.push_back({true, e});
        }
      } else if (c.problems.empty()) {
        s.cuts.push_back({false, s.model.total_duration});
      }
      break;
    }
    case Command::Scenarios: {
      c.object(j, "", {"scenarios", "tests", "simulation", "output"});
      ScenarioRequest& r = rc.scenarios;
      bool sim = false;
      if (j.contains("simulation")) {
        const json& sj = j["simulation"];
        if (c.object(sj, "simulation", {"enabled", "replicates", "seed", "workers"})) {
          sim = sj.value("enabled", true);
          if (auto v = c.number(sj, "replicates", "simulation", false)) r.replicates = static_cast<long>(*v);
          if (auto v = c.number(sj, "seed", "simulation", false)) r.seed = static_cast<std::uint64_t>(*v);
          if (auto v = c.number(sj, "workers", "simulation", false)) r.workers = static_cast<int>(*v);
          if (r.replicates <= 0) c.fail("simulation.replicates", "must be positive");
        }
      }
      r.simulate = sim;
      if (!j.contains("scenarios")) {
        c.fail("scenarios", "missing");
      } else if (c.object(j["scenarios"], "scenarios", {"names", "convention", "n", "time", "alpha"})) {
        const json& sj = j["scenarios"];
        if (sj.contains("names")) {
          if (!sj["names"].is_array()) c.fail("scenarios.names", "expected an array");
          else
            for (const auto& x : sj["names"]) r.names.push_back(x.is_string() ? x.get<std::string>() : "");
        } else {
          r.names = {"ph", "delay3", "delay6", "crossing", "weak_null", "strong_null"};
        }
        for (const auto& nm : r.names) {
          try {
            scenario_model(nm);
          } catch (const Error& e) {
            c.fail("scenarios.names", e.what());
          }
        }
        std::string conv = sj.value("convention", std::string("survival_anchors"));
        if (conv == "survival_anchors") r.convention = ScenarioConvention::SurvivalAnchors;
        else if (conv == "exponential_control") r.convention = ScenarioConvention::ExponentialControl;
        else c.fail("scenarios.convention", "expected survival_anchors or exponential_control");
        if (auto v = c.number(sj, "n", "scenarios", false)) r.n = *v;
        if (auto v = c.number(sj, "time", "scenarios", false)) r.analysis_time = *v;
        if (auto v = c.number(sj, "alpha", "scenarios", false)) r.alpha = *v;
        if (!(r.n > 0)) c.fail("scenarios.n", "must be positive");
        if (!(r.alpha > 0 && r.alpha < 0.5)) c.fail("scenarios.alpha", "must lie in (0, 0.5)");
      }
      if (j.contains("tests")) r.tests = test_list(c, j["tests"], "tests", sim);
      else c.fail("tests", "missing");
      break;
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    if (c.object(o, "output", {"format", "path"})) {
      if (o.contains("format")) {
        if (o["format"] == "csv" || o["format"] == "json") rc.format = o["format"];
        else c.fail("output.format", "expected csv or json");
      }
      if (o.contains("path")) {
        if (o["path"].is_string()) rc.out_dir = o["path"];
        else c.fail("output.path", "expected a string");
      }
    }
  }
  c.finish();
  return rc;
}

namespace {

json pw_json(const PiecewiseConstant& f) { return {{"breakpoints", f.starts()}, {"values", f.values()}}; }

}  // namespace

json model_to_json(const TrialModel& m) {
  json j{{"enroll_rate", pw_json(m.enroll_rate)},
         {"enroll_duration", m.enroll_duration},
         {"total_duration", m.total_duration},
         {"control_hazard", pw_json(m.control_hazard)},
         {"hazard_ratio", pw_json(m.hazard_ratio)},
         {"dropout", {{"control", pw_json(m.dropout[0])}, {"experimental", pw_json(m.dropout[1])}}},
         {"ratio", {m.ratio[0], m.ratio[1]}}};
  return j;
}

}  // namespace nphgsd
