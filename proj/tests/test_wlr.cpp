#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "nphgsd/error.hpp"
#include "nphgsd/expect.hpp"
#include "nphgsd/scenarios.hpp"
#include "nphgsd/wlr.hpp"
#include "oracle.hpp"

using namespace nphgsd;

namespace {

// at-risk probability from the definition: event-free, not dropped out, and
// enrolled at least t before the analysis
double at_risk(const TrialModel& m, int j, double t, double tau) {
  Arm a = j == 0 ? Arm::Control : Arm::Experimental;
  double nk = m.enrolled(std::min(tau, m.enroll_duration));
  return std::exp(-m.cum_hazard(a, t) - m.dropout[j].integral(t)) * m.enrolled(tau - t) / nk;
}

double drift_oracle(const TrialModel& m, const WeightSpec& w, double tau) {
  auto f = [&](double t) {
    double p0 = m.ratio[0], p1 = m.ratio[1];
    double a0 = at_risk(m, 0, t, tau), a1 = at_risk(m, 1, t, tau);
    double pi = p0 * a0 + p1 * a1;
    double l0 = m.hazard(Arm::Control, t), l1 = m.hazard(Arm::Experimental, t);
    return weight_eval(w, m, t) * p0 * a0 * p1 * a1 / pi * (l0 - l1);
  };
  std::vector<double> cuts = oracle::all_breaks(m);
  for (double s : m.enroll_rate.starts()) cuts.push_back(tau - s);
  cuts.push_back(tau - m.enroll_duration);
  for (double k : weight_kinks(w)) cuts.push_back(k);
  return oracle::gk(f, cuts, 0, tau, 8);
}

}  // namespace

TEST_CASE("weight functions") {
  CHECK(weight_value(FlemingHarrington{0, 0.5}, 3, 0.75, 0.75) == doctest::Approx(0.5));
  CHECK(weight_value(FlemingHarrington{1, 0}, 3, 0.75, 0.75) == doctest::Approx(0.75));
  CHECK(weight_value(MagirrBurman{12, 2}, 20, 0.3, 0.6) == doctest::Approx(1 / 0.6));
  CHECK(weight_value(MagirrBurman{12, 2}, 20, 0.3, 0.4) == doctest::Approx(2.0));
  CHECK(weight_value(ZeroEarly{3}, 2.99, 0.9, 0.9) == 0.0);
  CHECK(weight_value(ZeroEarly{3}, 3, 0.9, 0.9) == 1.0);
  CHECK(describe(FlemingHarrington{0, 0.5}) == "FH(0,0.5)");
  CHECK(same_weight(MagirrBurman{12, 2}, MagirrBurman{12, 2}));
  CHECK_FALSE(same_weight(Logrank{}, ZeroEarly{0}));
}

TEST_CASE("invalid weight parameters are rejected") {
  TrialModel m = scenario_model("ph");
  CHECK_THROWS_AS(wlr_moments(m, FlemingHarrington{-1, 0}, 36), ModelError);
  CHECK_THROWS_AS(wlr_moments(m, MagirrBurman{12, 0.5}, 36), ModelError);
  CHECK_THROWS_AS(wlr_moments(m, ZeroEarly{-1}, 36), ModelError);
}

TEST_CASE("drift matches quadrature of the definition") {
  std::mt19937_64 g(41);
  std::vector<WeightSpec> ws{Logrank{}, FlemingHarrington{0, 0.5}, FlemingHarrington{1, 1},
                             MagirrBurman{8, 2}, ZeroEarly{2}};
  for (int rep = 0; rep < 10; ++rep) {
    TrialModel m = gen::model(g);
    double tau = m.total_duration * 0.9;
    for (const auto& w : ws) {
      WlrMoments mo = wlr_moments(m, w, tau);
      INFO(describe(w), " rep ", rep);
      CHECK(mo.delta == doctest::Approx(drift_oracle(m, w, tau)).epsilon(1e-7).scale(1e-9));
    }
  }
}

TEST_CASE("logrank null information is p0 p1 times the null-model events") {
  std::mt19937_64 g(42);
  for (int rep = 0; rep < 20; ++rep) {
    TrialModel m = gen::model(g);
    double tau = m.total_duration;
    WlrMoments mo = wlr_moments(m, Logrank{}, tau);
    double d = oracle::expected_events(m.null_model(), 0, tau) + oracle::expected_events(m.null_model(), 1, tau);
    CHECK(mo.info_h0() == doctest::Approx(m.ratio[0] * m.ratio[1] * d).epsilon(1e-8));
  }
}

TEST_CASE("logrank equals FH(0,0)") {
  TrialModel m = scenario_model("delay6");
  WlrMoments a = wlr_moments(m, Logrank{}, 30), b = wlr_moments(m, FlemingHarrington{0, 0}, 30);
  CHECK(a.delta == doctest::Approx(b.delta));
  CHECK(a.sigma2_h0 == doctest::Approx(b.sigma2_h0));
  CHECK(a.sigma2_h1 == doctest::Approx(b.sigma2_h1));
}

TEST_CASE("no drift when the arms are identical") {
  TrialModel m = scenario_model("weak_null");
  for (const WeightSpec& w : {WeightSpec{Logrank{}}, WeightSpec{FlemingHarrington{0, 0.5}}, WeightSpec{MagirrBurman{12, 2}}}) {
    WlrMoments mo = wlr_moments(m, w, 36);
    CHECK(std::abs(mo.e_z) < 1e-12);
    CHECK(mo.sigma2_h0 == doctest::Approx(mo.sigma2_h1));
  }
}

TEST_CASE("logrank information fractions follow the null-model events") {
  TrialModel m = delayed_effect_example();
  std::vector<double> times{12, 20, 28, 36};
  auto f = info_fraction(m, Logrank{}, times);
  TrialModel nm = m.null_model();
  for (std::size_t k = 0; k < times.size(); ++k)
    CHECK(f[k] == doctest::Approx(expected_events_total(nm, times[k]) / expected_events_total(nm, 36)).epsilon(1e-8));
  CHECK(f.back() == 1.0);
  CHECK_THROWS(info_fraction(m, Logrank{}, {20, 12}));
}

TEST_CASE("property: self cross-variance is the null variance, covariance is bounded") {
  std::mt19937_64 g(43);
  for (int rep = 0; rep < 20; ++rep) {
    TrialModel m = gen::model(g);
    double tau = m.total_duration;
    WeightSpec a = Logrank{}, b = FlemingHarrington{0, 0.5};
    double va = wlr_moments(m, a, tau).sigma2_h0, vb = wlr_moments(m, b, tau).sigma2_h0;
    CHECK(wlr_cross_variance(m, a, a, tau) == doctest::Approx(va));
    double c = wlr_cross_variance(m, a, b, tau);
    CHECK(c * c <= va * vb * (1 + 1e-12));
    CHECK(wlr_cross_variance(m, b, b, tau, true) == doctest::Approx(wlr_moments(m, b, tau).sigma2_h1));
  }
}

TEST_CASE("property: drift scales with the square root of enrollment and its sign follows the benefit") {
  std::mt19937_64 g(44);
  for (int rep = 0; rep < 20; ++rep) {
    TrialModel m = gen::model(g);
    double tau = m.total_duration;
    WlrMoments a = wlr_moments(m, FlemingHarrington{0, 0.5}, tau), b = wlr_moments(m.scaled(4), FlemingHarrington{0, 0.5}, tau);
    CHECK(b.e_z == doctest::Approx(2 * a.e_z));
    CHECK(a.sigma2_h0 > 0);
    CHECK(a.sigma2_h1 > 0);
    CHECK((a.e_z > 0) == (a.delta > 0));
    m.hazard_ratio = PiecewiseConstant::constant(0.7);
    CHECK(wlr_moments(m, ZeroEarly{1}, tau).e_z > 0);
    m.hazard_ratio = PiecewiseConstant::constant(1.3);
    CHECK(wlr_moments(m, ZeroEarly{1}, tau).e_z < 0);
  }
}
