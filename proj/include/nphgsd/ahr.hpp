#pragma once
#include <functional>
#include <vector>

#include "nphgsd/model.hpp"
#include "nphgsd/piecewise.hpp"
#include "nphgsd/wlr.hpp"

namespace nphgsd {

// one run of constant (control, experimental) hazards within a stratum
struct AhrInterval {
  int stratum = 0;
  double start = 0, end = 0;
  double hr = 1, log_hr = 0;
  double events_control = 0, events_experimental = 0;
  double weight = 0;  // [1/d0 + 1/d1]^-1, unnormalized
};

struct AhrResult {
  double analysis_time = 0;
  double log_ahr = 0, ahr = 1;
  double info_h0 = 0, info_h1 = 0;
  double events = 0;
  std::vector<AhrInterval> per_interval;
  double theta() const { return -log_ahr; }
};

AhrResult ahr_lr(const TrialModel& m, double analysis_time);
// AHR from interval rows (event-weighted log-HR average)
double estimate_ahr(const std::vector<AhrInterval>& rows);

// average hazard ratio implied by a weighted logrank test
double ahr_wlr(const TrialModel& m, const std::function<double(double)>& weight,
               double analysis_time, const std::vector<double>& weight_kinks = {});
double ahr_wlr(const TrialModel& m, const WeightSpec& w, double analysis_time);

// piecewise weight making ahr_wlr equal ahr_lr (unstratified models)
PiecewiseConstant bridge_weight(const TrialModel& m, double analysis_time);

}  // namespace nphgsd
