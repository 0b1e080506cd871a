#pragma once
#include <string>
#include <vector>

#include "nphgsd/model.hpp"

namespace nphgsd {

// How the "common benefit at 2 and 3 years" scenarios are completed.
// SurvivalAnchors: control exponential (median 12) to month 24, then a lower
// constant hazard with S0(36) = 0.20; the experimental arm keeps the month-24
// cumulative hazard ratio at month 36. ExponentialControl: control
// exponential throughout, experimental hazard ratio unchanged after month 24.
enum class ScenarioConvention { SurvivalAnchors, ExponentialControl };

struct Scenario {
  std::string name;
  TrialModel model;
};

// ph, delay3, delay6, crossing, weak_null, strong_null; uniform enrollment of
// n subjects over 12 months, 36-month study, dropout 0.001 per month
std::vector<Scenario> benefit_scenarios(double n = 698,
                                        ScenarioConvention c = ScenarioConvention::SurvivalAnchors);
TrialModel scenario_model(const std::string& name, double n = 698,
                          ScenarioConvention c = ScenarioConvention::SurvivalAnchors);

// delayed-effect group sequential example: 12-month enrollment, control
// median 15, HR 1 for 4 months then 0.6, 36-month study
TrialModel delayed_effect_example(double n = 643.5);

}  // namespace nphgsd
