#include "nphgsd/scenarios.hpp"

#include <cmath>

#include "nphgsd/error.hpp"

namespace nphgsd {

namespace {

TrialModel base(double n) {
  TrialModel m;
  m.enroll_rate = PiecewiseConstant::constant(n / 12);
  m.enroll_duration = 12;
  m.total_duration = 36;
  m.dropout = {PiecewiseConstant::constant(0.001), PiecewiseConstant::constant(0.001)};
  return m;
}

}  // namespace

TrialModel scenario_model(const std::string& name, double n, ScenarioConvention conv) {
  const double lam0 = std::log(2.0) / 12;
  // cumulative hazard ratio giving S1(24) = 0.35 when S0(24) = 0.25
  const double hrc = std::log(0.35) / std::log(0.25);
  const bool anchors = conv == ScenarioConvention::SurvivalAnchors;
  TrialModel m = base(n);
  if (anchors)
    m.control_hazard = PiecewiseConstant({0, 24}, {lam0, std::log(0.25 / 0.20) / 12});
  else
    m.control_hazard = PiecewiseConstant::constant(lam0);

  // hazard ratio after a period [0, d) at ratio hh, reaching S1(24) = 0.35
  auto after = [&](double d, double hh) { return (-std::log(0.35) - hh * lam0 * d) / (lam0 * (24 - d)); };
  auto with_tail = [&](std::vector<double> s, std::vector<double> v) {
    if (anchors) {
      s.push_back(24);
      v.push_back(hrc);
    }
    return PiecewiseConstant(s, v).simplified();
  };

  if (name == "ph") {
    m.hazard_ratio = PiecewiseConstant::constant(hrc);
  } else if (name == "delay3") {
    m.hazard_ratio = with_tail({0, 3}, {1.0, after(3, 1.0)});
  } else if (name == "delay6") {
    m.hazard_ratio = with_tail({0, 6}, {1.0, after(6, 1.0)});
  } else if (name == "crossing") {
    m.hazard_ratio = with_tail({0, 3}, {1.3, after(3, 1.3)});
  } else if (name == "weak_null") {
    m.hazard_ratio = PiecewiseConstant::constant(1.0);
  } else if (name == "strong_null") {
    m.hazard_ratio = PiecewiseConstant({0, 3, 6}, {1.5, 0.5, 1.0});
  } else {
    throw ModelError("unknown scenario '" + name + "'");
  }
  return m;
}

std::vector<Scenario> benefit_scenarios(double n, ScenarioConvention c) {
  std::vector<Scenario> out;
  for (const char* s : {"ph", "delay3", "delay6", "crossing", "weak_null", "strong_null"})
    out.push_back({s, scenario_model(s, n, c)});
  return out;
}

TrialModel delayed_effect_example(double n) {
  TrialModel m = base(n);
  m.control_hazard = PiecewiseConstant::constant(std::log(2.0) / 15);
  m.hazard_ratio = PiecewiseConstant({0, 4}, {1.0, 0.6});
  return m;
}

}  // namespace nphgsd
