#include <cmath>
#include <set>

#include "doctest.h"
#include "nphgsd/normal.hpp"
#include "nphgsd/rng.hpp"
#include "nphgsd/scenarios.hpp"
#include "nphgsd/sim.hpp"

using namespace nphgsd;

namespace {

CutData make_cut(std::vector<double> t, std::vector<int> s, std::vector<int> a) {
  std::vector<std::size_t> ord(t.size());
  for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
  std::sort(ord.begin(), ord.end(), [&](auto x, auto y) { return t[x] < t[y]; });
  CutData c;
  for (auto i : ord) {
    c.time.push_back(t[i]);
    c.status.push_back(s[i]);
    c.arm.push_back(a[i]);
  }
  return c;
}

// textbook weighted logrank from explicit risk-set counts; the weight is a
// function of the pooled Kaplan-Meier estimate just before each event time
template <class W>
double wlr_oracle(const CutData& c, W weight) {
  std::set<double> times;
  for (std::size_t i = 0; i < c.time.size(); ++i)
    if (c.status[i]) times.insert(c.time[i]);
  double u = 0, v = 0, km = 1;
  for (double t : times) {
    double n[2] = {0, 0}, d[2] = {0, 0};
    for (std::size_t i = 0; i < c.time.size(); ++i) {
      if (c.time[i] >= t) n[c.arm[i]] += 1;
      if (c.time[i] == t && c.status[i]) d[c.arm[i]] += 1;
    }
    double N = n[0] + n[1], D = d[0] + d[1];
    double w = weight(t, km);
    u += w * (d[1] - D * n[1] / N);
    if (N > 1) v += w * w * D * n[0] * n[1] * (N - D) / (N * N * (N - 1));
    km *= 1 - D / N;
  }
  return -u / std::sqrt(v);
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(a == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  auto b = philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
  CHECK(b == std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  auto c = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  CHECK(c == std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniform stream stays inside the unit interval") {
  StreamRng r(7, 3);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = r.uniform();
    REQUIRE(x > 0);
    REQUIRE(x < 1);
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sum2 / n - sum * sum / n / n - 1.0 / 12) < 0.002);
}

TEST_CASE("datasets are reproducible per seed and replicate") {
  TrialModel m = scenario_model("delay3");
  auto a = simulate_trial(m, 300, 5, 2), b = simulate_trial(m, 300, 5, 2), c = simulate_trial(m, 300, 5, 3);
  CHECK(a.enroll == b.enroll);
  CHECK(a.event == b.event);
  CHECK(a.arm == b.arm);
  CHECK(a.enroll != c.enroll);
  for (double e : a.enroll) {
    CHECK(e >= 0);
    CHECK(e <= m.enroll_duration);
  }
}

TEST_CASE("simulated event times follow the arm hazards") {
  TrialModel m = scenario_model("crossing");
  long n = 40000;
  auto d = simulate_trial(m, n, 1);
  for (int arm = 0; arm < 2; ++arm) {
    double hit = 0, tot = 0;
    for (long i = 0; i < n; ++i) {
      if (d.arm[i] != arm) continue;
      tot += 1;
      hit += d.event[i] > 24;
    }
    double p = arm == 0 ? 0.25 : 0.35;
    CHECK(std::abs(hit / tot - p) < 4 * std::sqrt(p * (1 - p) / tot));
  }
}

TEST_CASE("calendar cut censors at the analysis") {
  TrialModel m = scenario_model("ph");
  auto d = simulate_trial(m, 500, 9);
  CutData c = cut_at_time(d, 20);
  CHECK(c.time.size() <= 500);
  for (std::size_t i = 1; i < c.time.size(); ++i) CHECK(c.time[i] >= c.time[i - 1]);
  for (double t : c.time) CHECK(t <= 20 + 1e-12);
  CutData e = cut_at_events(d, 150);
  CHECK(e.events() == 150);
  CHECK_FALSE(e.short_of_events);
  CHECK(cut_at_events(d, 100000).short_of_events);
}

TEST_CASE("logrank on a small example by hand") {
  CutData c = make_cut({1, 3, 4, 5, 2, 3, 6, 7}, {1, 1, 0, 1, 1, 0, 1, 0}, {0, 0, 0, 0, 1, 1, 1, 1});
  double u = -0.5 + 3.0 / 7 - 0.5 - 2.0 / 3;
  double v = 0.25 + 12.0 / 49 + 0.25 + 2.0 / 9;
  CHECK(wlr_statistic(c, Logrank{}) == doctest::Approx(-u / std::sqrt(v)).epsilon(1e-12));
}

TEST_CASE("weighted logrank statistics match the textbook computation") {
  TrialModel m = scenario_model("delay6");
  for (int rep = 0; rep < 5; ++rep) {
    auto d = simulate_trial(m, 400, 17, rep);
    CutData c = cut_at_time(d, 30);
    // coarsen times to create ties
    for (auto& t : c.time) t = std::ceil(t * 4) / 4;
    CHECK(wlr_statistic(c, Logrank{}) == doctest::Approx(wlr_oracle(c, [](double, double) { return 1.0; })).epsilon(1e-10));
    CHECK(wlr_statistic(c, FlemingHarrington{0, 0.5}) ==
          doctest::Approx(wlr_oracle(c, [](double, double s) { return std::sqrt(1 - s); })).epsilon(1e-10));
    CHECK(wlr_statistic(c, FlemingHarrington{1, 1}) ==
          doctest::Approx(wlr_oracle(c, [](double, double s) { return s * (1 - s); })).epsilon(1e-10));
    CHECK(wlr_statistic(c, ZeroEarly{3}) ==
          doctest::Approx(wlr_oracle(c, [](double t, double) { return t < 3 ? 0.0 : 1.0; })).epsilon(1e-10));
    double s12 = 1;
    wlr_oracle(c, [&](double t, double s) {
      if (t <= 12) s12 = s;
      return 1.0;
    });
    // KM just before the last event time not after 12 is frozen from then on
    CHECK(wlr_statistic(c, MagirrBurman{12, 2}) ==
          doctest::Approx(wlr_oracle(c, [&](double t, double s) { return std::min(2.0, 1 / (t <= 12 ? s : s12)); })).epsilon(1e-10));
  }
}

TEST_CASE("swapping the arm labels negates the statistic") {
  auto d = simulate_trial(scenario_model("ph"), 300, 3);
  CutData c = cut_at_time(d, 36);
  double z = wlr_statistic(c, FlemingHarrington{0, 0.5});
  for (auto& a : c.arm) a = 1 - a;
  CHECK(wlr_statistic(c, FlemingHarrington{0, 0.5}) == doctest::Approx(-z).epsilon(1e-12));
}

TEST_CASE("combination of duplicate weights is the single test") {
  auto d = simulate_trial(scenario_model("delay3"), 400, 4);
  CutData c = cut_at_time(d, 36);
  auto r = maxcombo_test(c, {Logrank{}, Logrank{}});
  double z = wlr_statistic(c, Logrank{});
  CHECK(r.z_max == doctest::Approx(z));
  CHECK(r.p_value == doctest::Approx(pnorm_upper(z)).epsilon(1e-6));
  auto s = wlr_statistics(c, {Logrank{}, FlemingHarrington{0, 0.5}});
  auto mc = maxcombo_test(c, {Logrank{}, FlemingHarrington{0, 0.5}});
  double zm = std::max(s.z[0], s.z[1]);
  CHECK(mc.p_value == doctest::Approx(1 - bvn_lower(zm, zm, s.corr(0, 1))).epsilon(1e-10));
}

TEST_CASE("milestone and RMST statistics") {
  // arm 0: events at 1, 2; censored at 4.  arm 1: events at 3; censored at 5, 6
  CutData c = make_cut({1, 2, 4, 3, 5, 6}, {1, 1, 0, 1, 0, 0}, {0, 0, 0, 1, 1, 1});
  double s0 = 1.0 / 3, s1 = 2.0 / 3;
  double v0 = s0 * s0 * (1.0 / (3 * 2) + 1.0 / (2 * 1)), v1 = s1 * s1 * (1.0 / (3 * 2));
  CHECK(milestone_statistic(c, 3.5) == doctest::Approx((s1 - s0) / std::sqrt(v0 + v1)));
  // RMST to 3.5: arm 0 area 1 + 2/3 + 1.5/3, arm 1 area 3 + 0.5 * 2/3
  double r0 = 1 + 2.0 / 3 + 1.5 / 3, r1 = 3 + 1.0 / 3;
  double a0 = 2.0 / 3 + 1.5 / 3, a0b = 1.5 / 3, a1 = 1.0 / 3;
  double var0 = a0 * a0 / (3 * 2) + a0b * a0b / (2 * 1), var1 = a1 * a1 / (3 * 2);
  CHECK(rmst_statistic(c, 3.5) == doctest::Approx((r1 - r0) / std::sqrt(var0 + var1)));
  CHECK_THROWS(rmst_statistic(c, 10));
}

TEST_CASE("study results do not depend on the worker count") {
  StudyConfig s;
  s.model = scenario_model("delay3", 300);
  s.n = 300;
  s.tests = {WlrTest{Logrank{}}, MaxComboTest{{Logrank{}, FlemingHarrington{0, 0.5}}}, MilestoneTest{24}};
  s.cuts = {{false, 24}, {true, 150}};
  s.replicates = 300;
  s.seed = 99;
  s.keep_z = true;
  SimReport a = run_study(s);
  s.workers = 3;
  SimReport b = run_study(s);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_csv(a) == to_csv(b));
  CHECK(z_dump_csv(a) == z_dump_csv(b));
  for (const auto& c : a.cells) {
    CHECK(c.power >= 0);
    CHECK(c.power <= 1);
    CHECK(c.se == doctest::Approx(std::sqrt(c.power * (1 - c.power) / 300)));
  }
}

TEST_CASE("identical arms reject at the nominal rate") {
  StudyConfig s;
  s.model = scenario_model("weak_null", 400);
  s.n = 400;
  s.tests = {WlrTest{Logrank{}}, WlrTest{FlemingHarrington{0, 0.5}}, MaxComboTest{{Logrank{}, FlemingHarrington{0, 0.5}}}};
  s.cuts = {{false, 36}};
  s.replicates = 4000;
  s.seed = 5;
  SimReport r = run_study(s);
  for (const auto& c : r.cells) {
    CHECK(std::abs(c.power - 0.025) < 4 * std::sqrt(0.025 * 0.975 / 4000));
    if (c.test.rfind("MaxCombo", 0) != 0) CHECK(std::abs(c.mean_z) < 4 / std::sqrt(4000.0));
  }
}
