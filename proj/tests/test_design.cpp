#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "nphgsd/design.hpp"
#include "nphgsd/error.hpp"
#include "nphgsd/expect.hpp"
#include "nphgsd/normal.hpp"
#include "nphgsd/scenarios.hpp"

using namespace nphgsd;

namespace {

const double inf = std::numeric_limits<double>::infinity();

DesignConfig delayed_design() {
  DesignConfig d;
  d.model = delayed_effect_example();
  d.analysis_times = {12, 20, 28, 36};
  std::vector<WeightSpec> combo{Logrank{}, FlemingHarrington{0, 0.5}};
  d.tests = {{Logrank{}}, {Logrank{}}, {Logrank{}}, combo};
  return d;
}

DesignConfig logrank_design(double n = 500) {
  DesignConfig d;
  d.model = delayed_effect_example(n);
  d.analysis_times = {16, 26, 36};
  d.tests = {{Logrank{}}, {Logrank{}}, {Logrank{}}};
  return d;
}

}  // namespace

TEST_CASE("spending functions have closed forms") {
  SpendingFunction s;
  s.total = 0.025;
  double t = 0.4;
  CHECK(s(t) == doctest::Approx(2 * (1 - pnorm(qnorm(1 - 0.0125) / std::sqrt(t)))));
  s.family = SpendingFamily::LanDeMetsPocock;
  CHECK(s(t) == doctest::Approx(0.025 * std::log(1 + (std::exp(1.0) - 1) * t)));
  s.family = SpendingFamily::KimDeMetsPower;
  s.param = 3;
  CHECK(s(t) == doctest::Approx(0.025 * t * t * t));
  s.family = SpendingFamily::HwangShihDeCani;
  s.param = -4;
  CHECK(s(t) == doctest::Approx(0.025 * (1 - std::exp(4 * t)) / (1 - std::exp(4.0))));
  s.param = 0;
  CHECK(s(t) == doctest::Approx(0.01));
  s.family = SpendingFamily::Fixed;
  s.cumulative = {0.001, 0.01, 0.025};
  CHECK(s(0.9, 1) == 0.01);
}

TEST_CASE("property: spending is monotone from zero to the total") {
  std::mt19937_64 g(71);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto fam : {SpendingFamily::LanDeMetsOBF, SpendingFamily::LanDeMetsPocock,
                   SpendingFamily::KimDeMetsPower, SpendingFamily::HwangShihDeCani}) {
    for (int rep = 0; rep < 20; ++rep) {
      SpendingFunction s{fam, 0.01 + 0.2 * u(g), fam == SpendingFamily::HwangShihDeCani ? -8 + 16 * u(g) : 0.5 + 3 * u(g), {}};
      CHECK(s(0) == 0.0);
      CHECK(s(1) == s.total);
      CHECK(s(1.5) == s.total);
      double prev = 0;
      for (double t = 0.01; t < 1; t += 0.01) {
        double v = s(t);
        CHECK(v >= prev - 1e-15);
        CHECK(v <= s.total + 1e-15);
        prev = v;
      }
    }
  }
}

TEST_CASE("single analysis design is the fixed-sample test") {
  DesignConfig d;
  d.model = scenario_model("delay3");
  d.analysis_times = {36};
  d.tests = {{FlemingHarrington{0, 0.5}}};
  DesignSummary s = evaluate_design(d);
  CHECK(s.rows[0].efficacy_z == doctest::Approx(qnorm(0.975)).epsilon(1e-10));
  double ez = wlr_moments(d.model, FlemingHarrington{0, 0.5}, 36).e_z;
  CHECK(s.power == doctest::Approx(pnorm(ez - qnorm(0.975))).epsilon(1e-10));
}

TEST_CASE("two-analysis bounds spend alpha exactly") {
  DesignConfig d = logrank_design();
  d.analysis_times = {20, 36};
  d.tests = {{Logrank{}}, {Logrank{}}};
  DesignSummary s = evaluate_design(d);
  double t1 = s.rows[0].spending_fraction;
  double a1 = d.alpha_spending(t1);
  double b1 = s.rows[0].efficacy_z, b2 = s.rows[1].efficacy_z;
  CHECK(pnorm_upper(b1) == doctest::Approx(a1).epsilon(1e-8));
  // P(Z1 < b1, Z2 > b2) from the bivariate normal with correlation sqrt(t1)
  double r = std::sqrt(t1);
  double p2 = pnorm_upper(b2) - bvn_upper(b1, b2, r);
  CHECK(p2 == doctest::Approx(0.025 - a1).epsilon(1e-7));
}

TEST_CASE("property: total null efficacy crossing equals alpha") {
  std::vector<DesignConfig> ds{delayed_design(), logrank_design()};
  DesignConfig x = logrank_design();
  x.alpha_spending.family = SpendingFamily::HwangShihDeCani;
  x.alpha_spending.param = -2;
  x.alpha_spending.total = 0.05;
  ds.push_back(x);
  DesignConfig y = delayed_design();
  y.tests = {{Logrank{}, FlemingHarrington{0, 0.5}}, {Logrank{}, FlemingHarrington{0, 0.5}},
             {Logrank{}, FlemingHarrington{0, 0.5}}, {Logrank{}, FlemingHarrington{0, 0.5}}};
  y.analysis_times = {12, 24, 36};
  y.tests.resize(3);
  ds.push_back(y);
  for (const auto& d : ds) {
    DesignSummary s = evaluate_design(d);
    CHECK(std::abs(s.rows.back().cum_upper_h0 - d.alpha_spending.total) <= 1e-6);
    for (std::size_t k = 1; k < s.rows.size(); ++k) {
      CHECK(s.rows[k].cum_upper_h0 >= s.rows[k - 1].cum_upper_h0);
      CHECK(s.rows[k].cum_upper_h1 >= s.rows[k - 1].cum_upper_h1);
    }
  }
}

TEST_CASE("non-binding efficacy bounds ignore futility spending") {
  DesignConfig base = logrank_design();
  DesignSummary ref = evaluate_design(base);
  for (double beta : {0.05, 0.1, 0.2}) {
    DesignConfig d = base;
    d.beta_spending = SpendingFunction{SpendingFamily::LanDeMetsOBF, beta, 0, {}};
    DesignSummary s = evaluate_design(d);
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
      CHECK(std::abs(s.rows[k].efficacy_z - ref.rows[k].efficacy_z) <= 1e-8);
      CHECK(s.rows[k].futility_z <= s.rows[k].efficacy_z + 1e-12);
    }
    CHECK(s.rows.back().futility_z == doctest::Approx(s.rows.back().efficacy_z));
  }
}

TEST_CASE("binding futility relaxes the efficacy bounds") {
  DesignConfig d = logrank_design();
  d.beta_spending = SpendingFunction{SpendingFamily::KimDeMetsPower, 0.1, 2, {}};
  DesignSummary nb = evaluate_design(d);
  d.binding = true;
  DesignSummary b = evaluate_design(d);
  for (std::size_t k = 1; k < b.rows.size(); ++k) CHECK(b.rows[k].efficacy_z <= nb.rows[k].efficacy_z + 1e-10);
  CHECK(std::abs(b.rows.back().cum_upper_h0 - 0.025) <= 1e-6);
}

TEST_CASE("spending fractions take the minimum over the design's weights") {
  DesignConfig d = delayed_design();
  auto all = spending_fractions(d.model, d.tests, d.analysis_times, FractionMode::AllWeights);
  auto lr = info_fraction(d.model, Logrank{}, d.analysis_times);
  auto fh = info_fraction(d.model, FlemingHarrington{0, 0.5}, d.analysis_times);
  for (std::size_t k = 0; k < all.size(); ++k) CHECK(all[k] == doctest::Approx(std::min(lr[k], fh[k])));
  auto tested = spending_fractions(d.model, d.tests, d.analysis_times, FractionMode::TestedWeights);
  for (std::size_t k = 0; k + 1 < tested.size(); ++k) CHECK(tested[k] == doctest::Approx(lr[k]));
}

TEST_CASE("delayed-effect group sequential design") {
  DesignSummary s = evaluate_design(delayed_design());
  const double events[] = {138.2, 267.6, 359.2, 426.4}, ahr[] = {0.84, 0.74, 0.70, 0.68},
               frac[] = {0.32, 0.63, 0.84, 1.00};
  const double h1[] = {0.1805, 0.8240, 0.9900}, h0[] = {0.0004, 0.0077, 0.0250};
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(s.rows[k].events - events[k]) <= 0.5);
    CHECK(std::abs(s.rows[k].ahr - ahr[k]) <= 0.005);
    CHECK(std::abs(s.rows[k].event_fraction - frac[k]) <= 0.005);
  }
  for (int k = 1; k < 4; ++k) {
    CHECK(std::abs(s.rows[k].cum_upper_h1 - h1[k - 1]) <= 0.005);
    CHECK(std::abs(s.rows[k].cum_upper_h0 - h0[k - 1]) <= 0.0005);
  }
  CHECK(s.rows[0].efficacy_z == doctest::Approx(6.18).epsilon(0.002));
  CHECK(s.rows[1].efficacy_z == doctest::Approx(3.37).epsilon(0.002));
  CHECK(s.rows[2].efficacy_z == doctest::Approx(2.42).epsilon(0.002));
}

TEST_CASE("a single final FH(0,0.5) test gives the 2.02 final bound") {
  DesignConfig d = delayed_design();
  d.tests.back() = {FlemingHarrington{0, 0.5}};
  DesignSummary s = evaluate_design(d);
  CHECK(std::abs(s.rows.back().efficacy_z - 2.02) < 0.005);
  CHECK(std::abs(s.rows.back().efficacy_p - 0.0219) < 0.0005);
}

TEST_CASE("sample size reaches the target power") {
  DesignConfig d = delayed_design();
  d.target_power = 0.9;
  DesignSummary s = sample_size_nd(d);
  CHECK(s.power == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(std::abs(s.rows.back().cum_upper_h0 - 0.025) <= 1e-6);
  CHECK(s.method == "n-d");
  // the same design evaluated at the solved enrollment
  DesignConfig e = d;
  e.model = d.model.scaled(s.n / d.model.total_enrollment());
  CHECK(evaluate_design(e).power == doctest::Approx(0.9).epsilon(1e-5));
}

TEST_CASE("average hazard ratio sizing under proportional hazards matches the event formula") {
  DesignConfig d;
  d.model = scenario_model("ph");
  d.analysis_times = {36};
  d.tests = {{Logrank{}}};
  d.target_power = 0.9;
  DesignSummary s = sample_size_dn(d);
  double theta = -std::log(d.model.hazard_ratio(0));
  double z = qnorm(0.975) + qnorm(0.9);
  double schoenfeld = 4 * z * z / (theta * theta);
  CHECK(s.events == doctest::Approx(schoenfeld).epsilon(0.03));
  CHECK(s.power == doctest::Approx(0.9).epsilon(1e-6));
  DesignConfig f = d;
  f.tests = {{FlemingHarrington{0, 0.5}}};
  CHECK_THROWS_AS(sample_size_dn(f), ModelError);
}

TEST_CASE("no benefit makes sizing infeasible") {
  DesignConfig d;
  d.model = scenario_model("weak_null");
  d.analysis_times = {36};
  d.tests = {{Logrank{}}};
  CHECK(evaluate_design(d).power == doctest::Approx(0.025).epsilon(1e-8));
  CHECK_THROWS_AS(sample_size_nd(d), UnattainableError);
}

TEST_CASE("reports carry the summary columns") {
  DesignConfig d = logrank_design();
  DesignSummary s = evaluate_design(d);
  std::string csv = to_csv(s);
  CHECK(csv.rfind("analysis,time,n,events,ahr,event_fraction,info_fractions,spending_fraction,test,efficacy_z,nominal_p", 0) == 0);
  CHECK(csv.find("16.0000,500.0000,") != std::string::npos);
  auto j = nlohmann::json::parse(to_json(s));
  CHECK(j["analyses"].size() == 3);
  CHECK(j["analyses"][2]["cum_upper_h0"].get<double>() == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(j["analyses"][0]["futility_z"] == "-Inf");
  CHECK(to_csv(s) == to_csv(evaluate_design(d)));
}
