#pragma once
#include <optional>
#include <string>
#include <vector>

#include "nphgsd/dist.hpp"
#include "nphgsd/model.hpp"
#include "nphgsd/wlr.hpp"

namespace nphgsd {

enum class SpendingFamily { LanDeMetsOBF, LanDeMetsPocock, KimDeMetsPower, HwangShihDeCani, Fixed };

struct SpendingFunction {
  SpendingFamily family = SpendingFamily::LanDeMetsOBF;
  double total = 0.025;
  double param = 0;                // rho (Kim-DeMets) or gamma (Hwang-Shih-DeCani)
  std::vector<double> cumulative;  // Fixed: cumulative spend per analysis
  // cumulative spend at information fraction t (analysis k for Fixed)
  double operator()(double t, std::size_t k = 0) const;
};

std::string describe(const SpendingFunction& sf);

// Statistics of a group sequential design: a joint normal over every
// (analysis, weight) pair, and the coordinates tested at each analysis.
// With a single tested coordinate per analysis the stopping statistic is
// that coordinate, otherwise the maximum over the tested ones.
struct GsLayout {
  JointDistribution dist;  // means under the alternative
  std::vector<std::vector<int>> tested;
  bool canonical = false;  // one repeated statistic with independent increments
  std::vector<double> fractions;  // its information fractions, when canonical
  int analyses() const { return static_cast<int>(tested.size()); }
  GsLayout null() const;
  GsLayout scaled(double c) const;  // means times sqrt(c)
};

// WLR / MaxCombo layout; tests[k] lists the weights combined at analysis k
GsLayout wlr_layout(const TrialModel& m, const std::vector<std::vector<WeightSpec>>& tests,
                    const std::vector<double>& times);
// logrank layout from the AHR approximation: fractions are event-based
// null information, drift theta_k sqrt(I_k|H1)
GsLayout ahr_layout(const TrialModel& m, const std::vector<double>& times);

enum class FractionMode { AllWeights, TestedWeights };

// spending fractions: minimum null-information fraction over the weights
// in the design (AllWeights) or over those tested at each analysis
std::vector<double> spending_fractions(const TrialModel& m,
                                       const std::vector<std::vector<WeightSpec>>& tests,
                                       const std::vector<double>& times,
                                       FractionMode mode = FractionMode::AllWeights);

struct MvnSettings {
  long points = 1 << 14;  // per shift, fixed so probabilities are smooth in the bounds
  int shifts = 12;
};

// P(continue through analyses < k, then cross at k): upper tail if upper,
// otherwise lower tail, with the bound at k given by `bound`
double region_probability(const GsLayout& L, int k, const std::vector<double>& b,
                          const std::vector<double>& a, bool upper, double bound,
                          const MvnSettings& mvn = {});

struct Bounds {
  std::vector<double> efficacy;
  std::vector<double> futility;  // -inf where there is none
};

// efficacy bounds solving the alpha-spending increments under the null
// layout; binding futility bounds are honoured when given
std::vector<double> efficacy_bounds(const GsLayout& h0, const SpendingFunction& sf,
                                    const std::vector<double>& fractions,
                                    const std::vector<double>& binding_futility = {},
                                    const MvnSettings& mvn = {});
// futility bounds from beta spending under the alternative layout; the final
// one equals the final efficacy bound
std::vector<double> futility_bounds(const GsLayout& h1, const SpendingFunction& sf_beta,
                                    const std::vector<double>& fractions,
                                    const std::vector<double>& efficacy,
                                    const MvnSettings& mvn = {});

struct CrossingSummary {
  std::vector<double> upper, lower;  // incremental
  double power() const;
};

CrossingSummary boundary_crossing(const GsLayout& L, const Bounds& bounds,
                                  const MvnSettings& mvn = {});

struct DesignConfig {
  TrialModel model;
  std::vector<double> analysis_times;
  std::vector<std::vector<WeightSpec>> tests;  // per analysis
  SpendingFunction alpha_spending;
  std::optional<SpendingFunction> beta_spending;
  bool binding = false;
  FractionMode fraction_mode = FractionMode::AllWeights;
  double target_power = 0.9;
};

struct AnalysisRow {
  int analysis = 0;
  double time = 0, n = 0, events = 0, ahr = 1;
  double event_fraction = 0, spending_fraction = 0;
  std::vector<std::pair<std::string, double>> info_fractions;  // null information, per weight
  std::string test;
  double efficacy_z = 0, efficacy_p = 0;
  double futility_z = 0;
  double cum_upper_h1 = 0, cum_upper_h0 = 0, cum_lower_h1 = 0, cum_lower_h0 = 0;
};

struct DesignSummary {
  std::string method;  // "fixed-n", "n-d" or "d-n"
  std::vector<AnalysisRow> rows;
  double n = 0, events = 0, power = 0, alpha = 0;
  bool degenerate = false;
  double max_clip = 0;  // PSD clipping applied to the correlation matrix
};

// operating characteristics of the design at the model's enrollment
DesignSummary evaluate_design(const DesignConfig& cfg, const MvnSettings& mvn = {});
// enrollment scaled to reach cfg.target_power, WLR/MaxCombo tests
DesignSummary sample_size_nd(const DesignConfig& cfg, const MvnSettings& mvn = {});
// logrank via the AHR approximation (tests must all be logrank)
DesignSummary sample_size_dn(const DesignConfig& cfg);

std::string to_csv(const DesignSummary& s);
std::string to_json(const DesignSummary& s);

}  // namespace nphgsd
