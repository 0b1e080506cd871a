#include "nphgsd/model.hpp"

#include <algorithm>
#include <cmath>

#include "nphgsd/error.hpp"

namespace nphgsd {

PiecewiseConstant TrialModel::hazard(Arm a) const {
  if (a == Arm::Control) return control_hazard;
  return combine(control_hazard, hazard_ratio, [](double h, double r) { return h * r; });
}

double TrialModel::hazard(Arm a, double t) const {
  double h = control_hazard(t);
  return a == Arm::Control ? h : h * hazard_ratio(t);
}

double TrialModel::cum_hazard(Arm a, double t) const {
  if (a == Arm::Control) return control_hazard.integral(t);
  return hazard(a).integral(t);
}

double TrialModel::survival(Arm a, double t) const { return std::exp(-cum_hazard(a, t)); }

double TrialModel::pooled_survival(double t) const {
  return p(Arm::Control) * survival(Arm::Control, t) +
         p(Arm::Experimental) * survival(Arm::Experimental, t);
}

double TrialModel::enrolled(double t) const {
  return enroll_rate.integral(std::clamp(t, 0.0, enroll_duration));
}

double TrialModel::enroll_density(double t) const {
  if (t < 0 || t >= enroll_duration) return 0.0;
  return enroll_rate(t);
}

std::vector<double> TrialModel::breakpoints(double horizon) const {
  std::vector<double> v;
  auto add = [&](const PiecewiseConstant& f) {
    for (double s : f.starts())
      if (s > 0 && s < horizon) v.push_back(s);
  };
  add(control_hazard);
  add(hazard_ratio);
  add(dropout[0]);
  add(dropout[1]);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

TrialModel TrialModel::null_model() const {
  TrialModel m = *this;
  double p0 = p(Arm::Control), p1 = p(Arm::Experimental);
  m.control_hazard = combine(control_hazard, hazard_ratio,
                             [&](double h, double r) { return p0 * h + p1 * h * r; });
  m.hazard_ratio = PiecewiseConstant::constant(1.0);
  PiecewiseConstant eta = combine(dropout[0], dropout[1],
                                  [&](double a, double b) { return p0 * a + p1 * b; });
  m.dropout = {eta, eta};
  m.strata.clear();
  return m;
}

TrialModel TrialModel::scaled(double c) const {
  TrialModel m = *this;
  m.enroll_rate = enroll_rate.scaled(c);
  return m;
}

TrialModel TrialModel::stratum_model(std::size_t j) const {
  const Stratum& s = strata.at(j);
  TrialModel m = *this;
  m.enroll_rate = enroll_rate.scaled(s.fraction);
  m.control_hazard = s.control_hazard;
  m.hazard_ratio = s.hazard_ratio;
  m.dropout = s.dropout;
  m.strata.clear();
  return m;
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += "; ";
    out += i.field + ": " + i.message;
  }
  return out;
}

namespace {

void check_rates(ValidationReport& r, const std::string& name, const PiecewiseConstant& f) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.values()[i] < 0)
      r.issues.push_back({name, "negative value on piece starting at " +
                                    std::to_string(f.starts()[i])});
}

}  // namespace

ValidationReport validate(const TrialModel& m) {
  ValidationReport r;
  check_rates(r, "enroll_rate", m.enroll_rate);
  check_rates(r, "control_hazard", m.control_hazard);
  check_rates(r, "hazard_ratio", m.hazard_ratio);
  check_rates(r, "dropout.control", m.dropout[0]);
  check_rates(r, "dropout.experimental", m.dropout[1]);
  if (!(m.enroll_duration > 0)) r.issues.push_back({"enroll_duration", "must be positive"});
  if (!(m.total_duration > 0)) r.issues.push_back({"total_duration", "must be positive"});
  if (m.total_duration < m.enroll_duration)
    r.issues.push_back({"total_duration", "must not be shorter than enroll_duration"});
  double s = m.ratio[0] + m.ratio[1];
  if (!(m.ratio[0] > 0 && m.ratio[1] > 0) || std::abs(s - 1.0) > 1e-9)
    r.issues.push_back({"ratio", "randomization probabilities must be positive and sum to 1"});
  if (m.enroll_duration > 0 && !(m.total_enrollment() > 0))
    r.issues.push_back({"enroll_rate", "no subjects are enrolled"});
  // AHR formulas assume equal dropout in both arms
  const PiecewiseConstant diff = combine(m.dropout[0], m.dropout[1], [](double a, double b) { return a - b; });
  for (double t : diff.values())
    if (t != 0) {
      r.warnings.push_back({"dropout", "dropout rates differ between arms"});
      break;
    }
  if (!m.strata.empty()) {
    double tot = 0;
    for (std::size_t j = 0; j < m.strata.size(); ++j) {
      const auto& st = m.strata[j];
      std::string f = "strata[" + std::to_string(j) + "]";
      if (!(st.fraction > 0)) r.issues.push_back({f + ".fraction", "must be positive"});
      tot += st.fraction;
      check_rates(r, f + ".control_hazard", st.control_hazard);
      check_rates(r, f + ".hazard_ratio", st.hazard_ratio);
      check_rates(r, f + ".dropout.control", st.dropout[0]);
      check_rates(r, f + ".dropout.experimental", st.dropout[1]);
    }
    if (std::abs(tot - 1.0) > 1e-9) r.issues.push_back({"strata", "fractions must sum to 1"});
  }
  return r;
}

void require_valid(const TrialModel& m) {
  ValidationReport r = validate(m);
  if (!r.ok()) throw ModelError("invalid model: " + r.to_string());
}

}  // namespace nphgsd
