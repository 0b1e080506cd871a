#pragma once
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "nphgsd/expect.hpp"
#include "nphgsd/model.hpp"

namespace nphgsd {

struct Logrank {};
struct FlemingHarrington {
  double p = 0, q = 0;
};
// 1 / S(min(t, t_star)) capped at w_max
struct MagirrBurman {
  double t_star = 0;
  double w_max = std::numeric_limits<double>::infinity();
};
// 0 before t0, 1 from t0 on
struct ZeroEarly {
  double t0 = 0;
};

using WeightSpec = std::variant<Logrank, FlemingHarrington, MagirrBurman, ZeroEarly>;

std::string describe(const WeightSpec& w);
bool same_weight(const WeightSpec& a, const WeightSpec& b);

// weight as a function of the pooled survival S(t) (and t)
double weight_value(const WeightSpec& w, double t, double surv_t, double surv_tstar);
// weight at time t under the model's pooled survival p0 S0 + p1 S1
double weight_eval(const WeightSpec& w, const TrialModel& m, double t);
// points where the weight has a kink or jump
std::vector<double> weight_kinks(const WeightSpec& w);

struct WlrMoments {
  double delta = 0;      // per-subject drift, positive for benefit
  double sigma2_h0 = 0;  // per-subject variance under the null model
  double sigma2_h1 = 0;  // per-subject variance under the model
  double n = 0;          // subjects enrolled by the analysis
  double events = 0;     // expected events
  double e_z = 0;        // sqrt(n) delta / sigma_h1
  double info_h0() const { return n * sigma2_h0; }
};

WlrMoments wlr_moments(const TrialModel& m, const WeightSpec& w, double analysis_time);

// per-subject covariance of two WLR numerators, under the null model (h1 =
// false) or under the model itself
double wlr_cross_variance(const TrialModel& m, const WeightSpec& a, const WeightSpec& b,
                          double analysis_time, bool h1 = false);

// ratio of null-model information n_k sigma2_h0 to the last analysis
std::vector<double> info_fraction(const TrialModel& m, const WeightSpec& w,
                                  const std::vector<double>& analysis_times);

}  // namespace nphgsd
