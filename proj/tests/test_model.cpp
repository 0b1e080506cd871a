#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "nphgsd/error.hpp"
#include "nphgsd/model.hpp"
#include "nphgsd/scenarios.hpp"

using namespace nphgsd;

namespace {

TrialModel simple() {
  TrialModel m;
  m.enroll_rate = PiecewiseConstant::constant(10);
  m.enroll_duration = 12;
  m.total_duration = 36;
  m.control_hazard = PiecewiseConstant::constant(0.05);
  m.hazard_ratio = PiecewiseConstant({0, 4}, {1.0, 0.6});
  m.dropout = {PiecewiseConstant::constant(0.001), PiecewiseConstant::constant(0.001)};
  return m;
}

}  // namespace

TEST_CASE("arm hazards and survival") {
  TrialModel m = simple();
  CHECK(m.hazard(Arm::Experimental, 2.0) == doctest::Approx(0.05));
  CHECK(m.hazard(Arm::Experimental, 10.0) == doctest::Approx(0.03));
  CHECK(m.cum_hazard(Arm::Experimental, 10.0) == doctest::Approx(0.05 * 4 + 0.03 * 6));
  CHECK(m.survival(Arm::Control, 10) == doctest::Approx(std::exp(-0.5)));
  CHECK(m.pooled_survival(10) ==
        doctest::Approx(0.5 * std::exp(-0.5) + 0.5 * std::exp(-0.38)));
  CHECK(m.total_enrollment() == doctest::Approx(120));
  CHECK(m.enrolled(20) == doctest::Approx(120));
  CHECK(m.enroll_density(13) == 0.0);
}

TEST_CASE("validation collects every problem") {
  TrialModel m = simple();
  CHECK(validate(m).ok());
  m.enroll_duration = 40;
  m.ratio = {0.5, 0.6};
  m.control_hazard = PiecewiseConstant::constant(-1);
  auto r = validate(m);
  CHECK(r.issues.size() == 3);
  CHECK_THROWS_AS(require_valid(m), ModelError);
}

TEST_CASE("unequal dropout is a warning, not an error") {
  TrialModel m = simple();
  CHECK(validate(m).warnings.empty());
  m.dropout[1] = PiecewiseConstant::constant(0.01);
  auto r = validate(m);
  CHECK(r.ok());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("validate is idempotent and leaves the model untouched") {
  TrialModel m = simple();
  m.ratio = {0.2, 0.2};
  auto a = validate(m), b = validate(m);
  CHECK(a.to_string() == b.to_string());
  CHECK(m.ratio[0] == 0.2);
}

TEST_CASE("null model averages the arm hazards") {
  TrialModel m = simple();
  m.ratio = {0.4, 0.6};
  TrialModel n = m.null_model();
  for (double t : {1.0, 5.0, 30.0}) {
    double avg = 0.4 * m.hazard(Arm::Control, t) + 0.6 * m.hazard(Arm::Experimental, t);
    CHECK(n.hazard(Arm::Control, t) == doctest::Approx(avg));
    CHECK(n.hazard(Arm::Experimental, t) == doctest::Approx(avg));
  }
}

TEST_CASE("property: experimental over control hazard is the hazard ratio") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0, 60);
  for (int rep = 0; rep < 100; ++rep) {
    TrialModel m = gen::model(g);
    CHECK(validate(m).ok());
    for (int k = 0; k < 20; ++k) {
      double t = u(g);
      CHECK(m.hazard(Arm::Experimental, t) / m.hazard(Arm::Control, t) ==
            doctest::Approx(m.hazard_ratio(t)));
    }
  }
}

TEST_CASE("built-in scenarios share the two-year survival anchors") {
  const double hrc = std::log(0.35) / std::log(0.25);
  for (const char* name : {"ph", "delay3", "delay6", "crossing"}) {
    TrialModel m = scenario_model(name);
    CHECK(validate(m).ok());
    CHECK(m.survival(Arm::Control, 24) == doctest::Approx(0.25));
    CHECK(m.survival(Arm::Experimental, 24) == doctest::Approx(0.35));
    CHECK(m.hazard_ratio(30) == doctest::Approx(hrc));
    CHECK(m.total_enrollment() == doctest::Approx(698));
  }
  CHECK(scenario_model("weak_null").hazard_ratio(10) == 1.0);
  CHECK_THROWS(scenario_model("nope"));
}
