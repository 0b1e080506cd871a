#include "nphgsd/wlr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "nphgsd/error.hpp"
#include "nphgsd/quadrature.hpp"

namespace nphgsd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::string describe(const WeightSpec& w) {
  return std::visit(overloaded{
                        [](const Logrank&) { return std::string("LR"); },
                        [](const FlemingHarrington& f) {
                          return "FH(" + num(f.p) + "," + num(f.q) + ")";
                        },
                        [](const MagirrBurman& b) {
                          return "MB(" + num(b.t_star) + "," + num(b.w_max) + ")";
                        },
                        [](const ZeroEarly& z) { return "ZE(" + num(z.t0) + ")"; }},
                    w);
}

bool same_weight(const WeightSpec& a, const WeightSpec& b) { return describe(a) == describe(b); }

double weight_value(const WeightSpec& w, double t, double s, double s_star) {
  return std::visit(overloaded{[](const Logrank&) { return 1.0; },
                               [&](const FlemingHarrington& f) {
                                 double a = f.p == 0 ? 1.0 : std::pow(s, f.p);
                                 double b = f.q == 0 ? 1.0 : std::pow(1 - s, f.q);
                                 return a * b;
                               },
                               [&](const MagirrBurman& b) {
                                 return s_star > 0 ? std::min(b.w_max, 1 / s_star) : b.w_max;
                               },
                               [&](const ZeroEarly& z) { return t < z.t0 ? 0.0 : 1.0; }},
                    w);
}

double weight_eval(const WeightSpec& w, const TrialModel& m, double t) {
  double ts = t;
  if (auto* b = std::get_if<MagirrBurman>(&w)) ts = std::min(t, b->t_star);
  return weight_value(w, t, m.pooled_survival(t), m.pooled_survival(ts));
}

std::vector<double> weight_kinks(const WeightSpec& w) {
  if (auto* b = std::get_if<MagirrBurman>(&w)) return {b->t_star};
  if (auto* z = std::get_if<ZeroEarly>(&w)) return {z->t0};
  return {};
}

namespace {

double eval_weight(const WeightSpec& w, const ModelEval& ev, double t) {
  double ts = t;
  if (auto* b = std::get_if<MagirrBurman>(&w)) ts = std::min(t, b->t_star);
  double s = ev.pooled_survival(t);
  return weight_value(w, t, s, ts == t ? s : ev.pooled_survival(ts));
}

void check_spec(const WeightSpec& w) {
  if (auto* f = std::get_if<FlemingHarrington>(&w))
    if (f->p < 0 || f->q < 0) throw ModelError("FH exponents must be nonnegative");
  if (auto* b = std::get_if<MagirrBurman>(&w))
    if (!(b->t_star > 0) || !(b->w_max >= 1)) throw ModelError("MB needs t_star > 0 and w_max >= 1");
  if (auto* z = std::get_if<ZeroEarly>(&w))
    if (!(z->t0 >= 0)) throw ModelError("zero-early cutoff must be nonnegative");
}

std::vector<double> grid_for(const TrialModel& m, double tk, const std::vector<WeightSpec>& ws) {
  std::vector<double> extra;
  for (const auto& w : ws)
    for (double k : weight_kinks(w)) extra.push_back(k);
  return analysis_grid(m, tk, extra);
}

// null-model variance or covariance per subject: int wa wb p0 p1 dv
double null_cross(const TrialModel& m, const WeightSpec& a, const WeightSpec& b, double tk) {
  TrialModel nm = m.null_model();
  ModelEval ev(nm, tk);
  double p01 = ev.p[0] * ev.p[1];
  auto f = [&](double t) {
    double dv = ev.hazard(0, t) * ev.at_risk(0, t);
    return eval_weight(a, ev, t) * eval_weight(b, ev, t) * p01 * dv;
  };
  return integrate1(f, grid_for(nm, tk, {a, b}));
}

}  // namespace

WlrMoments wlr_moments(const TrialModel& m, const WeightSpec& w, double tk) {
  check_spec(w);
  if (!(tk > 0)) throw ModelError("analysis time must be positive");
  ModelEval ev(m, tk);
  const double p0 = ev.p[0], p1 = ev.p[1];
  auto f = [&](double t) {
    double a0 = ev.at_risk(0, t), a1 = ev.at_risk(1, t);
    double pi = p0 * a0 + p1 * a1;
    double l0 = ev.hazard(0, t), l1 = ev.hazard(1, t);
    double dv = p0 * a0 * l0 + p1 * a1 * l1;
    if (!(pi > 0)) return std::array<double, 3>{0, 0, 0};
    double wt = eval_weight(w, ev, t);
    double r = p0 * a0 * p1 * a1 / pi;
    return std::array<double, 3>{wt * r * (l0 - l1), wt * wt * r / pi * dv, dv};
  };
  auto I = integrate<3>(f, grid_for(m, tk, {w}));
  WlrMoments out;
  out.delta = I[0];
  out.sigma2_h1 = I[1];
  out.n = ev.nk;
  out.events = ev.nk * I[2];
  out.sigma2_h0 = null_cross(m, w, w, tk);
  out.e_z = out.sigma2_h1 > 0 ? std::sqrt(out.n) * out.delta / std::sqrt(out.sigma2_h1) : 0.0;
  return out;
}

double wlr_cross_variance(const TrialModel& m, const WeightSpec& a, const WeightSpec& b,
                          double tk, bool h1) {
  check_spec(a);
  check_spec(b);
  if (!h1) return null_cross(m, a, b, tk);
  ModelEval ev(m, tk);
  const double p0 = ev.p[0], p1 = ev.p[1];
  auto f = [&](double t) {
    double a0 = ev.at_risk(0, t), a1 = ev.at_risk(1, t);
    double pi = p0 * a0 + p1 * a1;
    if (!(pi > 0)) return 0.0;
    double dv = p0 * a0 * ev.hazard(0, t) + p1 * a1 * ev.hazard(1, t);
    return eval_weight(a, ev, t) * eval_weight(b, ev, t) * p0 * a0 * p1 * a1 / (pi * pi) * dv;
  };
  return integrate1(f, grid_for(m, tk, {a, b}));
}

std::vector<double> info_fraction(const TrialModel& m, const WeightSpec& w,
                                  const std::vector<double>& times) {
  if (times.empty()) throw ModelError("no analysis times");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ModelError("analysis times must be increasing");
  std::vector<double> info;
  for (double t : times) info.push_back(enrolled_at(m, t) * null_cross(m, w, w, t));
  if (!(info.back() > 0)) throw ModelError("no information at the final analysis");
  for (double& x : info) x /= info.back();
  return info;
}

}  // namespace nphgsd
