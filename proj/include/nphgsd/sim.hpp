#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nphgsd/model.hpp"
#include "nphgsd/wlr.hpp"

namespace nphgsd {

struct TrialDataset {
  std::vector<double> enroll;   // calendar enrollment time
  std::vector<double> event;    // latent event time from enrollment
  std::vector<double> dropout;  // latent dropout time from enrollment
  std::vector<int> arm;         // 0 control, 1 experimental
  std::size_t size() const { return enroll.size(); }
};

// n subjects; enrollment times follow the model's enrollment density on
// [0, enroll_duration], arms are randomized independently with the model ratio
TrialDataset simulate_trial(const TrialModel& m, long n, std::uint64_t seed,
                            std::uint64_t replicate = 0);

// analysis data sorted by follow-up time
struct CutData {
  double calendar_time = 0;
  std::vector<double> time;
  std::vector<int> status;
  std::vector<int> arm;
  bool short_of_events = false;  // event-driven cut that never reached its target
  int events() const;
};

CutData cut_at_time(const TrialDataset& d, double calendar_time);
CutData cut_at_events(const TrialDataset& d, long events);

// weighted logrank Z (positive favours experimental); weights use the
// left-continuous pooled Kaplan-Meier estimate
double wlr_statistic(const CutData& c, const WeightSpec& w);

struct WlrScores {
  std::vector<double> z;
  Eigen::MatrixXd corr;
};
WlrScores wlr_statistics(const CutData& c, const std::vector<WeightSpec>& ws);

struct MaxComboResult {
  double z_max = 0;
  double p_value = 1;
  double clipped = 0;
};
MaxComboResult maxcombo_test(const CutData& c, const std::vector<WeightSpec>& ws);

// difference (experimental - control) over its Greenwood standard error
double rmst_statistic(const CutData& c, double horizon);
double milestone_statistic(const CutData& c, double landmark);

struct WlrTest {
  WeightSpec weight;
};
struct MaxComboTest {
  std::vector<WeightSpec> weights;
};
struct RmstTest {
  double horizon = 0;
};
struct MilestoneTest {
  double landmark = 0;
};
using SimTest = std::variant<WlrTest, MaxComboTest, RmstTest, MilestoneTest>;
std::string describe(const SimTest& t);

struct AnalysisCut {
  bool by_events = false;
  double value = 0;  // calendar time or event count
};

struct StudyConfig {
  TrialModel model;
  long n = 0;
  std::vector<SimTest> tests;
  std::vector<AnalysisCut> cuts;
  long replicates = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  double alpha = 0.025;  // one-sided
  bool keep_z = false;   // retain per-replicate statistics
};

struct SimCell {
  int cut = 0;
  std::string test;
  long rejections = 0;
  long failures = 0;  // replicates where the statistic was undefined
  double power = 0, se = 0;
  double mean_z = 0, sd_z = 0;  // MaxCombo: the maximum Z
};

struct SimReport {
  std::vector<SimCell> cells;        // cut-major
  std::vector<std::string> labels;   // "cut/test" per statistic
  Eigen::MatrixXd z_corr;            // empirical correlation of the statistics
  long replicates = 0;
  std::vector<double> z;  // replicate-major, when kept; NaN where undefined
};

SimReport run_study(const StudyConfig& cfg);

std::string to_csv(const SimReport& r);
std::string to_json(const SimReport& r);
// one row per replicate, one column per statistic
std::string z_dump_csv(const SimReport& r);

}  // namespace nphgsd
