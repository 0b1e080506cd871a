#include "nphgsd/ahr.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "nphgsd/error.hpp"
#include "nphgsd/expect.hpp"
#include "nphgsd/quadrature.hpp"

namespace nphgsd {

namespace {

// merge fine-grid expected events into runs of constant hazards
void collect_runs(const TrialModel& m, double tk, int stratum, AhrResult& out) {
  ExpectedEvents ee = expected_events(m, tk);
  std::size_t half = ee.rows.size() / 2;
  PiecewiseConstant l0 = m.hazard(Arm::Control), l1 = m.hazard(Arm::Experimental);
  std::vector<AhrInterval> runs;
  for (std::size_t i = 0; i < half; ++i) {
    const EventsRow& c = ee.rows[i];
    const EventsRow& e = ee.rows[half + i];
    double mid = 0.5 * (c.start + c.end);
    double h0 = l0(mid), h1 = l1(mid);
    if (!runs.empty() && runs.back().end == c.start && l0(runs.back().start) == h0 &&
        l1(runs.back().start) == h1) {
      runs.back().end = c.end;
      runs.back().events_control += c.events;
      runs.back().events_experimental += e.events;
      continue;
    }
    AhrInterval r;
    r.stratum = stratum;
    r.start = c.start;
    r.end = c.end;
    r.events_control = c.events;
    r.events_experimental = e.events;
    if (h0 == 0 && h1 > 0)
      throw ModelError("control hazard is zero but experimental hazard positive on [" +
                       std::to_string(c.start) + ", " + std::to_string(c.end) + ")");
    r.hr = h0 > 0 ? h1 / h0 : 1.0;
    r.log_hr = std::log(r.hr);
    runs.push_back(r);
  }
  for (auto& r : runs) {
    if (r.events_control > 0 && r.events_experimental > 0)
      r.weight = 1.0 / (1.0 / r.events_control + 1.0 / r.events_experimental);
    out.info_h0 += (r.events_control + r.events_experimental) * m.p(Arm::Control) *
                   m.p(Arm::Experimental);
    out.events += r.events_control + r.events_experimental;
    out.per_interval.push_back(r);
  }
}

}  // namespace

double estimate_ahr(const std::vector<AhrInterval>& rows) {
  double num = 0, den = 0;
  for (const auto& r : rows) {
    num += r.weight * r.log_hr;
    den += r.weight;
  }
  if (!(den > 0)) return 1.0;
  return std::exp(num / den);
}

AhrResult ahr_lr(const TrialModel& m, double tk) {
  require_valid(m);
  if (!(tk > 0)) throw ModelError("analysis time must be positive");
  AhrResult out;
  out.analysis_time = tk;
  if (m.strata.empty()) {
    collect_runs(m, tk, 0, out);
  } else {
    for (std::size_t j = 0; j < m.strata.size(); ++j)
      collect_runs(m.stratum_model(j), tk, static_cast<int>(j), out);
  }
  double num = 0;
  for (const auto& r : out.per_interval) {
    num += r.weight * r.log_hr;
    out.info_h1 += r.weight;
  }
  out.log_ahr = out.info_h1 > 0 ? num / out.info_h1 : 0.0;
  out.ahr = std::exp(out.log_ahr);
  return out;
}

double ahr_wlr(const TrialModel& m, const std::function<double(double)>& weight, double tk,
               const std::vector<double>& kinks) {
  if (!(tk > 0)) throw ModelError("analysis time must be positive");
  ModelEval ev(m, tk);
  const double p0 = ev.p[0], p1 = ev.p[1];
  auto f = [&](double t) {
    double a0 = ev.at_risk(0, t), a1 = ev.at_risk(1, t);
    double pi = p0 * a0 + p1 * a1;
    double l0 = ev.hazard(0, t), l1 = ev.hazard(1, t);
    if (!(pi > 0) || l0 == 0) {
      if (l0 == 0 && l1 > 0) throw ModelError("control hazard is zero where experimental is not");
      return std::array<double, 2>{0, 0};
    }
    double c = weight(t) * p0 * a0 * p1 * a1 / (pi * pi) * (p0 * a0 * l0 + p1 * a1 * l1);
    return std::array<double, 2>{c * std::log(l1 / l0), c};
  };
  auto I = integrate<2>(f, analysis_grid(m, tk, kinks));
  if (!(I[1] > 0)) return 1.0;
  return std::exp(I[0] / I[1]);
}

double ahr_wlr(const TrialModel& m, const WeightSpec& w, double tk) {
  ModelEval ev(m, tk);
  auto wf = [&](double t) {
    double ts = t;
    if (auto* b = std::get_if<MagirrBurman>(&w)) ts = std::min(t, b->t_star);
    return weight_value(w, t, ev.pooled_survival(t), ev.pooled_survival(ts));
  };
  return ahr_wlr(m, wf, tk, weight_kinks(w));
}

PiecewiseConstant bridge_weight(const TrialModel& m, double tk) {
  if (!m.strata.empty()) throw ModelError("bridge weight is defined for unstratified models");
  AhrResult a = ahr_lr(m, tk);
  ModelEval ev(m, tk);
  const double p0 = ev.p[0], p1 = ev.p[1];
  // exact at-risk factor of each run
  auto c_of = [&](double s, double e) {
    auto f = [&](double t) {
      double a0 = ev.at_risk(0, t), a1 = ev.at_risk(1, t);
      double pi = p0 * a0 + p1 * a1;
      if (!(pi > 0)) return 0.0;
      double dv = p0 * a0 * ev.hazard(0, t) + p1 * a1 * ev.hazard(1, t);
      return p0 * a0 * p1 * a1 / (pi * pi) * dv;
    };
    std::vector<double> g;
    for (double x : analysis_grid(m, tk))
      if (x > s && x < e) g.push_back(x);
    g.insert(g.begin(), s);
    g.push_back(e);
    return integrate1(f, g);
  };
  std::vector<double> starts, values;
  double total = a.info_h1 > 0 ? a.info_h1 : 1.0;
  for (const auto& r : a.per_interval) {
    double c = c_of(r.start, r.end);
    starts.push_back(r.start);
    values.push_back(c > 0 ? r.weight / total / c : 0.0);
  }
  starts.push_back(tk);
  values.push_back(0.0);
  return PiecewiseConstant(starts, values);
}

}  // namespace nphgsd
