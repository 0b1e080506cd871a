#pragma once
#include <array>
#include <string>
#include <vector>

#include "nphgsd/piecewise.hpp"

namespace nphgsd {

enum class Arm { Control = 0, Experimental = 1 };
inline int idx(Arm a) { return static_cast<int>(a); }

// A stratum shares the parent's enrollment process (scaled by fraction)
// and durations, with its own event and dropout rates.
struct Stratum {
  double fraction = 1.0;
  PiecewiseConstant control_hazard;
  PiecewiseConstant hazard_ratio = PiecewiseConstant::constant(1.0);
  std::array<PiecewiseConstant, 2> dropout;
};

struct TrialModel {
  PiecewiseConstant enroll_rate;     // subjects per unit time
  PiecewiseConstant control_hazard;
  PiecewiseConstant hazard_ratio = PiecewiseConstant::constant(1.0);  // experimental / control
  std::array<PiecewiseConstant, 2> dropout;  // control, experimental
  std::array<double, 2> ratio{0.5, 0.5};     // randomization probabilities
  double enroll_duration = 0.0;
  double total_duration = 0.0;
  std::vector<Stratum> strata;

  double p(Arm a) const { return ratio[idx(a)]; }
  PiecewiseConstant hazard(Arm a) const;
  double hazard(Arm a, double t) const;
  double cum_hazard(Arm a, double t) const;
  double survival(Arm a, double t) const;  // event-free, ignoring dropout
  double pooled_survival(double t) const;
  // cumulative enrollment G(t), constant after enroll_duration
  double enrolled(double t) const;
  double enroll_density(double t) const;
  double total_enrollment() const { return enrolled(enroll_duration); }

  // breakpoints of rates and enrollment (not shifted), below horizon
  std::vector<double> breakpoints(double horizon) const;

  // both arms share the randomization-weighted average hazard and dropout
  TrialModel null_model() const;
  // enrollment rates multiplied by c
  TrialModel scaled(double c) const;
  TrialModel stratum_model(std::size_t j) const;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const TrialModel& m);
// throws ModelError listing all issues
void require_valid(const TrialModel& m);

}  // namespace nphgsd
