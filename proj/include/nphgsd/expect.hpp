#pragma once
#include <cmath>
#include <vector>

#include "nphgsd/model.hpp"

namespace nphgsd {

// G(t); throws for negative t
double cumulative_enrollment(const TrialModel& m, double t);

struct EventsRow {
  double start, end;
  Arm arm;
  double events;
};

struct ExpectedEvents {
  double analysis_time = 0;
  std::vector<EventsRow> rows;  // per arm and interval of the merged grid
  double control = 0, experimental = 0;
  double total() const { return control + experimental; }
};

// Closed-form expected event counts per interval and arm at a calendar
// analysis time (strata are summed).
ExpectedEvents expected_events(const TrialModel& m, double analysis_time);
double expected_events_total(const TrialModel& m, double analysis_time);

// Interval grid on [0, analysis_time] on which every rate and the shifted
// enrollment rate g(analysis_time - t) are constant.
std::vector<double> analysis_grid(const TrialModel& m, double analysis_time,
                                  const std::vector<double>& extra = {});

// Probability that a subject enrolled by the analysis is still at risk at
// follow-up time t. Enrollment is normalized by G(min(analysis_time, enroll_duration)).
double at_risk_probability(const TrialModel& m, Arm a, double t, double analysis_time);
inline double at_risk_probability(const TrialModel& m, Arm a, double t) {
  return at_risk_probability(m, a, t, m.total_duration);
}

// v_j(t): probability that an enrolled subject has an observed event by
// follow-up time t, and its pooled version p0 v0 + p1 v1
double failure_probability(const TrialModel& m, Arm a, double t, double analysis_time);
double pooled_failure_probability(const TrialModel& m, double t, double analysis_time);

// Cached per-arm rates for repeated evaluation at one analysis time.
struct ModelEval {
  ModelEval(const TrialModel& m, double analysis_time);
  const TrialModel& m;
  double tk, nk;
  double p[2];
  PiecewiseConstant lam[2], eta[2];

  double hazard(int j, double t) const { return lam[j](t); }
  double survival(int j, double t) const { return std::exp(-lam[j].integral(t)); }
  double pooled_survival(double t) const { return p[0] * survival(0, t) + p[1] * survival(1, t); }
  double at_risk(int j, double t) const;
};

// subjects enrolled by the analysis
double enrolled_at(const TrialModel& m, double analysis_time);

// calendar time at which the pooled expected event count reaches `events`
double time_for_events(const TrialModel& m, double events, double max_time = 1000.0);

}  // namespace nphgsd
