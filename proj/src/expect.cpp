#include "nphgsd/expect.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "nphgsd/error.hpp"
#include "nphgsd/quadrature.hpp"

namespace nphgsd {

double cumulative_enrollment(const TrialModel& m, double t) {
  if (!(t >= 0)) throw ModelError("enrollment time must be nonnegative");
  return m.enrolled(t);
}

std::vector<double> analysis_grid(const TrialModel& m, double tk, const std::vector<double>& extra) {
  std::vector<double> v = m.breakpoints(tk);
  for (const auto& s : m.strata) {
    for (const auto* f : {&s.control_hazard, &s.hazard_ratio, &s.dropout[0], &s.dropout[1]})
      for (double b : f->starts()) v.push_back(b);
  }
  for (double e : m.enroll_rate.starts())
    if (e < m.enroll_duration) v.push_back(tk - e);
  v.push_back(tk - m.enroll_duration);
  v.insert(v.end(), extra.begin(), extra.end());
  return make_grid(v, 0.0, tk);
}

namespace {

// L - (1 - exp(-k L)) / k, stable for small k L
double ramp_term(double k, double L) {
  double x = k * L;
  if (x < 1e-4) return L * x * (0.5 - x / 6 + x * x / 24);
  return (L - (-std::expm1(-x)) / k);
}

void add_arm_events(const TrialModel& m, double tk, const std::vector<double>& grid, Arm arm,
                    ExpectedEvents& out) {
  PiecewiseConstant lam = m.hazard(arm);
  const PiecewiseConstant& eta = m.dropout[idx(arm)];
  double p = m.p(arm), logq = 0, sum = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = grid[i], b = grid[i + 1], L = b - a, mid = 0.5 * (a + b);
    double l = lam(mid), k = l + eta(mid), ev = 0;
    if (l > 0) {
      double q = std::exp(-logq);
      double full = m.enrolled(tk - b) * q * l / k * (-std::expm1(-k * L));
      double ramp = m.enroll_density(tk - mid) * q * l / k * ramp_term(k, L);
      ev = p * (full + ramp);
    }
    logq += k * L;
    sum += ev;
    out.rows.push_back({a, b, arm, ev});
  }
  (arm == Arm::Control ? out.control : out.experimental) += sum;
}

}  // namespace

ExpectedEvents expected_events(const TrialModel& m, double tk) {
  if (!(tk >= 0)) throw ModelError("analysis time must be nonnegative");
  ExpectedEvents out;
  out.analysis_time = tk;
  if (tk == 0) return out;
  if (m.strata.empty()) {
    std::vector<double> g = analysis_grid(m, tk);
    add_arm_events(m, tk, g, Arm::Control, out);
    add_arm_events(m, tk, g, Arm::Experimental, out);
    return out;
  }
  for (std::size_t j = 0; j < m.strata.size(); ++j) {
    TrialModel s = m.stratum_model(j);
    std::vector<double> g = analysis_grid(s, tk);
    add_arm_events(s, tk, g, Arm::Control, out);
    add_arm_events(s, tk, g, Arm::Experimental, out);
  }
  return out;
}

double expected_events_total(const TrialModel& m, double tk) { return expected_events(m, tk).total(); }

double enrolled_at(const TrialModel& m, double tk) { return m.enrolled(std::min(tk, m.enroll_duration)); }

ModelEval::ModelEval(const TrialModel& model, double analysis_time)
    : m(model), tk(analysis_time), nk(enrolled_at(model, analysis_time)) {
  for (int j = 0; j < 2; ++j) {
    p[j] = m.ratio[j];
    lam[j] = m.hazard(static_cast<Arm>(j));
    eta[j] = m.dropout[j];
  }
}

double ModelEval::at_risk(int j, double t) const {
  if (t < 0 || t > tk || !(nk > 0)) return 0.0;
  double h = m.enrolled(std::min(m.enroll_duration, tk - t)) / nk;
  return std::exp(-lam[j].integral(t) - eta[j].integral(t)) * h;
}

double at_risk_probability(const TrialModel& m, Arm a, double t, double tk) {
  return ModelEval(m, tk).at_risk(idx(a), t);
}

double failure_probability(const TrialModel& m, Arm a, double t, double tk) {
  t = std::min(t, tk);
  if (t <= 0) return 0.0;
  ModelEval ev(m, tk);
  int j = idx(a);
  std::vector<double> grid;
  for (double x : analysis_grid(m, tk))
    if (x < t) grid.push_back(x);
  grid.push_back(t);
  return integrate1([&](double s) { return ev.hazard(j, s) * ev.at_risk(j, s); }, grid);
}

double pooled_failure_probability(const TrialModel& m, double t, double tk) {
  return m.p(Arm::Control) * failure_probability(m, Arm::Control, t, tk) +
         m.p(Arm::Experimental) * failure_probability(m, Arm::Experimental, t, tk);
}

double time_for_events(const TrialModel& m, double events, double max_time) {
  if (!(events > 0)) throw ModelError("target events must be positive");
  if (expected_events_total(m, max_time) < events)
    throw ModelError("target event count is not reached within the time horizon");
  auto f = [&](double t) { return expected_events_total(m, t) - events; };
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, 0.0, max_time, -events, f(max_time),
                                             boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

}  // namespace nphgsd
