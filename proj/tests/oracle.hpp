#pragma once
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "nphgsd/model.hpp"

// Brute-force quadrature of the model quantities, written directly from the
// definitions and sharing no code with the library's closed forms.
namespace oracle {

using nphgsd::Arm;
using nphgsd::TrialModel;

template <class F>
double gk(const F& f, std::vector<double> cuts, double a, double b, unsigned depth = 0) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double s = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
    if (hi > lo) s += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, depth, 1e-13);
  }
  return s;
}

inline std::vector<double> all_breaks(const TrialModel& m) {
  std::vector<double> v;
  for (double s : m.control_hazard.starts()) v.push_back(s);
  for (double s : m.hazard_ratio.starts()) v.push_back(s);
  for (int j = 0; j < 2; ++j)
    for (double s : m.dropout[j].starts()) v.push_back(s);
  return v;
}

// probability of an observed event by follow-up time t: int_0^t lam S e^{-H}
inline double event_cdf(const TrialModel& m, int j, double t) {
  Arm a = j == 0 ? Arm::Control : Arm::Experimental;
  auto f = [&](double s) {
    double lam = m.control_hazard(s) * (j == 1 ? m.hazard_ratio(s) : 1.0);
    return lam * std::exp(-m.cum_hazard(a, s) - m.dropout[j].integral(s));
  };
  return gk(f, all_breaks(m), 0, t);
}

// expected events in arm j with follow-up time in [lo, hi) at calendar time tau
inline double expected_events(const TrialModel& m, int j, double tau, double lo = 0,
                              double hi = 1e300) {
  auto inner = [&](double u) {
    double top = std::min(hi, tau - u);
    if (top <= lo) return 0.0;
    return m.enroll_rate(u) * (event_cdf(m, j, top) - event_cdf(m, j, lo));
  };
  std::vector<double> cuts;
  for (double s : m.enroll_rate.starts()) cuts.push_back(s);
  for (double b : all_breaks(m)) cuts.push_back(tau - b);
  cuts.push_back(tau - lo);
  if (hi < tau) cuts.push_back(tau - hi);
  return m.ratio[j] * gk(inner, cuts, 0, std::min(tau, m.enroll_duration));
}

}  // namespace oracle
