#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nphgsd/model.hpp"
#include "nphgsd/wlr.hpp"

namespace nphgsd {

// which statistic a coordinate is: analysis index and weight index
struct StatLabel {
  int analysis = 0;
  int test = 0;
};

struct JointDistribution {
  std::vector<StatLabel> labels;
  Eigen::VectorXd mean;
  Eigen::MatrixXd corr;
  double clipped = 0;  // largest negative eigenvalue removed, 0 if none
  JointDistribution null() const;
  JointDistribution subset(const std::vector<int>& idx) const;
};

// independent-increments distribution with Corr(Z_i, Z_j) = sqrt(t_i / t_j)
JointDistribution canonical(const std::vector<double>& fractions,
                            const std::vector<double>& expected_z);

// all weights at all analyses; labels ordered analysis-major. Means are the
// model drifts e_z, correlations use null-model (co)variances.
JointDistribution maxcombo_corr(const TrialModel& m, const std::vector<WeightSpec>& weights,
                                const std::vector<double>& analysis_times);

// nearest unit-diagonal PSD matrix by eigenvalue clipping; returns the
// magnitude of the most negative eigenvalue (0 if already PSD)
double clip_to_psd(Eigen::MatrixXd& corr);

struct MvnOptions {
  double abs_tol = 1e-6;
  long min_points = 1 << 10;   // per random shift
  long max_points = 1 << 20;
  int shifts = 12;
  std::uint64_t seed = 20240917;
};

struct MvnResult {
  double value = 0;
  double error = 0;  // three standard errors across random shifts
  bool converged = true;
};

// P(lower < X < upper) for X ~ N(mean, cov); infinite limits allowed
MvnResult mvn_rectangle(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                        const MvnOptions& opt = {});
MvnResult mvn_rectangle(const JointDistribution& d, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper, const MvnOptions& opt = {});

struct Crossing {
  std::vector<double> upper;  // incremental probabilities per analysis
  std::vector<double> lower;
  double total_upper() const;
  double total_lower() const;
};

// boundary crossing for a canonical sequence by recursive numerical integration
Crossing gs_crossing(const std::vector<double>& fractions, const std::vector<double>& expected_z,
                     const std::vector<double>& upper, const std::vector<double>& lower);

}  // namespace nphgsd
