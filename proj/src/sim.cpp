#include "nphgsd/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nphgsd/dist.hpp"
#include "nphgsd/error.hpp"
#include "nphgsd/normal.hpp"
#include "nphgsd/rng.hpp"

namespace nphgsd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TrialDataset simulate_trial(const TrialModel& m, long n, std::uint64_t seed, std::uint64_t rep) {
  if (n <= 0) throw ModelError("number of subjects must be positive");
  double G = m.total_enrollment();
  if (!(G > 0)) throw ModelError("model enrolls no subjects");
  PiecewiseConstant enroll = m.enroll_rate.truncated(m.enroll_duration);
  PiecewiseConstant lam[2] = {m.hazard(Arm::Control), m.hazard(Arm::Experimental)};
  StreamRng rng(seed, rep);
  TrialDataset d;
  d.enroll.resize(n);
  d.event.resize(n);
  d.dropout.resize(n);
  d.arm.resize(n);
  double p1 = m.p(Arm::Experimental);
  for (long i = 0; i < n; ++i) {
    d.enroll[i] = std::min(enroll.inverse_integral(rng.uniform() * G), m.enroll_duration);
    int a = rng.uniform() < p1 ? 1 : 0;
    d.arm[i] = a;
    d.event[i] = lam[a].inverse_integral(rng.exponential());
    d.dropout[i] = m.dropout[a].inverse_integral(rng.exponential());
  }
  return d;
}

int CutData::events() const { return std::accumulate(status.begin(), status.end(), 0); }

CutData cut_at_time(const TrialDataset& d, double tau) {
  CutData c;
  c.calendar_time = tau;
  std::vector<std::size_t> keep;
  std::vector<double> t;
  std::vector<int> s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.enroll[i] > tau) continue;
    double follow = tau - d.enroll[i];
    double cens = std::min(d.dropout[i], follow);
    keep.push_back(i);
    t.push_back(std::min(d.event[i], cens));
    s.push_back(d.event[i] <= cens ? 1 : 0);
  }
  std::vector<std::size_t> ord(keep.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  for (std::size_t j : ord) {
    c.time.push_back(t[j]);
    c.status.push_back(s[j]);
    c.arm.push_back(d.arm[keep[j]]);
  }
  return c;
}

CutData cut_at_events(const TrialDataset& d, long events) {
  if (events <= 0) throw ModelError("event target must be positive");
  std::vector<double> cal;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.event[i] <= d.dropout[i]) cal.push_back(d.enroll[i] + d.event[i]);
  if (cal.empty()) throw ModelError("no events in the dataset");
  std::sort(cal.begin(), cal.end());
  bool short_of = static_cast<long>(cal.size()) < events;
  double tau = short_of ? cal.back() : cal[events - 1];
  CutData c = cut_at_time(d, tau);
  c.short_of_events = short_of;
  return c;
}

namespace {

// one pass over distinct times computing numerators and (co)variances
struct WlrPass {
  std::vector<double> u;
  Eigen::MatrixXd v;
};

WlrPass wlr_pass(const CutData& c, const std::vector<WeightSpec>& ws) {
  std::size_t L = ws.size(), N = c.time.size();
  WlrPass r{std::vector<double>(L, 0.0), Eigen::MatrixXd::Zero(L, L)};
  double n0 = 0, n1 = 0;
  for (int a : c.arm) (a ? n1 : n0) += 1;
  double s_minus = 1.0;  // pooled KM just before the current time
  std::vector<double> s_star(L, 1.0);  // pooled KM just before t_star (MB)
  std::vector<double> a(L);
  std::size_t i = 0;
  while (i < N) {
    double t = c.time[i];
    double d0 = 0, d1 = 0, r0 = 0, r1 = 0;
    std::size_t j = i;
    for (; j < N && c.time[j] == t; ++j) {
      int arm = c.arm[j];
      (arm ? r1 : r0) += 1;
      if (c.status[j]) (arm ? d1 : d0) += 1;
    }
    double d = d0 + d1, n = n0 + n1;
    if (d > 0) {
      double e1 = d * n1 / n;
      double v = n > 1 ? d * (n0 * n1 / (n * n)) * (n - d) / (n - 1) : 0.0;
      for (std::size_t k = 0; k < L; ++k) {
        double sst = s_minus;
        if (auto* b = std::get_if<MagirrBurman>(&ws[k]); b && t > b->t_star) sst = s_star[k];
        a[k] = weight_value(ws[k], t, s_minus, sst);
        r.u[k] += a[k] * (d1 - e1);
      }
      for (std::size_t k = 0; k < L; ++k)
        for (std::size_t l = 0; l <= k; ++l) r.v(k, l) += a[k] * a[l] * v;
      s_minus *= 1 - d / n;
      for (std::size_t k = 0; k < L; ++k)
        if (auto* b = std::get_if<MagirrBurman>(&ws[k]); b && t < b->t_star) s_star[k] = s_minus;
    }
    n0 -= r0;
    n1 -= r1;
    i = j;
  }
  for (std::size_t k = 0; k < L; ++k)
    for (std::size_t l = 0; l < k; ++l) r.v(l, k) = r.v(k, l);
  return r;
}

}  // namespace

WlrScores wlr_statistics(const CutData& c, const std::vector<WeightSpec>& ws) {
  WlrPass p = wlr_pass(c, ws);
  std::size_t L = ws.size();
  WlrScores out;
  out.z.resize(L);
  out.corr = Eigen::MatrixXd::Identity(L, L);
  for (std::size_t k = 0; k < L; ++k) {
    double v = p.v(k, k);
    out.z[k] = v > 0 ? -p.u[k] / std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t l = 0; l < k; ++l) {
      double den = std::sqrt(p.v(k, k) * p.v(l, l));
      out.corr(k, l) = out.corr(l, k) = den > 0 ? p.v(k, l) / den : 0.0;
    }
  }
  return out;
}

double wlr_statistic(const CutData& c, const WeightSpec& w) { return wlr_statistics(c, {w}).z[0]; }

MaxComboResult maxcombo_test(const CutData& c, const std::vector<WeightSpec>& ws) {
  if (ws.empty()) throw ModelError("MaxCombo needs at least one weight");
  WlrScores s = wlr_statistics(c, ws);
  std::vector<int> ok;
  for (std::size_t k = 0; k < ws.size(); ++k)
    if (std::isfinite(s.z[k])) ok.push_back(static_cast<int>(k));
  MaxComboResult r;
  if (ok.empty()) {
    r.z_max = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  int L = static_cast<int>(ok.size());
  Eigen::MatrixXd R(L, L);
  r.z_max = -kInf;
  for (int i = 0; i < L; ++i) {
    r.z_max = std::max(r.z_max, s.z[ok[i]]);
    for (int j = 0; j < L; ++j) R(i, j) = s.corr(ok[i], ok[j]);
  }
  r.clipped = clip_to_psd(R);
  if (L == 1) {
    r.p_value = pnorm_upper(r.z_max);
  } else if (L == 2) {
    r.p_value = 1 - bvn_lower(r.z_max, r.z_max, std::clamp(R(0, 1), -1.0, 1.0));
  } else {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(L, -kInf), hi = Eigen::VectorXd::Constant(L, r.z_max);
    r.p_value = 1 - mvn_rectangle(Eigen::VectorXd::Zero(L), R, lo, hi).value;
  }
  return r;
}

namespace {

struct Km {
  std::vector<double> t, s, n, d;  // event times, survival after, at risk, events
  double last_time = 0;            // largest follow-up time in the arm
};

Km km_arm(const CutData& c, int arm) {
  Km k;
  double n = 0;
  for (int a : c.arm) n += a == arm;
  double s = 1;
  std::size_t i = 0, N = c.time.size();
  while (i < N) {
    double t = c.time[i], d = 0, r = 0;
    std::size_t j = i;
    for (; j < N && c.time[j] == t; ++j)
      if (c.arm[j] == arm) {
        r += 1;
        d += c.status[j];
        k.last_time = t;
      }
    if (d > 0) {
      s *= 1 - d / n;
      k.t.push_back(t);
      k.s.push_back(s);
      k.n.push_back(n);
      k.d.push_back(d);
    }
    n -= r;
    i = j;
  }
  return k;
}

// survival at time x (right-continuous)
double km_at(const Km& k, double x) {
  auto it = std::upper_bound(k.t.begin(), k.t.end(), x);
  if (it == k.t.begin()) return 1.0;
  return k.s[it - k.t.begin() - 1];
}

double greenwood_sum(const Km& k, double x) {
  double g = 0;
  for (std::size_t i = 0; i < k.t.size() && k.t[i] <= x; ++i)
    if (k.n[i] > k.d[i]) g += k.d[i] / (k.n[i] * (k.n[i] - k.d[i]));
  return g;
}

void require_followup(const Km& k, double x, const char* what) {
  if (k.last_time < x)
    throw ModelError(std::string(what) + ": Kaplan-Meier estimate undefined at " + std::to_string(x) +
                     " (follow-up ends at " + std::to_string(k.last_time) + ")");
}

// RMST up to h and its Greenwood variance
std::pair<double, double> rmst_arm(const Km& k, double h) {
  // integral of S over [t_i, h] for each event time, from the right
  std::vector<double> pts{0.0};
  for (double t : k.t)
    if (t < h) pts.push_back(t);
  pts.push_back(h);
  std::vector<double> area(pts.size(), 0.0);  // area from pts[i] to h
  for (std::size_t i = pts.size() - 1; i-- > 0;)
    area[i] = area[i + 1] + km_at(k, pts[i]) * (pts[i + 1] - pts[i]);
  double var = 0;
  for (std::size_t i = 0; i < k.t.size() && k.t[i] <= h; ++i) {
    if (!(k.n[i] > k.d[i])) continue;
    double a = area[i + 1];  // pts[i + 1] == k.t[i]
    var += a * a * k.d[i] / (k.n[i] * (k.n[i] - k.d[i]));
  }
  return {area[0], var};
}

}  // namespace

double rmst_statistic(const CutData& c, double horizon) {
  if (!(horizon > 0)) throw ModelError("RMST horizon must be positive");
  Km k0 = km_arm(c, 0), k1 = km_arm(c, 1);
  require_followup(k0, horizon, "RMST");
  require_followup(k1, horizon, "RMST");
  auto [r0, v0] = rmst_arm(k0, horizon);
  auto [r1, v1] = rmst_arm(k1, horizon);
  if (!(v0 + v1 > 0)) throw ModelError("RMST variance is zero");
  return (r1 - r0) / std::sqrt(v0 + v1);
}

double milestone_statistic(const CutData& c, double landmark) {
  if (!(landmark > 0)) throw ModelError("milestone time must be positive");
  Km k0 = km_arm(c, 0), k1 = km_arm(c, 1);
  require_followup(k0, landmark, "milestone");
  require_followup(k1, landmark, "milestone");
  double s0 = km_at(k0, landmark), s1 = km_at(k1, landmark);
  double v = s0 * s0 * greenwood_sum(k0, landmark) + s1 * s1 * greenwood_sum(k1, landmark);
  if (!(v > 0)) throw ModelError("milestone variance is zero");
  return (s1 - s0) / std::sqrt(v);
}

std::string describe(const SimTest& t) {
  std::ostringstream os;
  if (auto* w = std::get_if<WlrTest>(&t)) {
    os << describe(w->weight);
  } else if (auto* m = std::get_if<MaxComboTest>(&t)) {
    os << "MaxCombo{";
    for (std::size_t i = 0; i < m->weights.size(); ++i) os << (i ? "," : "") << describe(m->weights[i]);
    os << "}";
  } else if (auto* r = std::get_if<RmstTest>(&t)) {
    os << "RMST(" << r->horizon << ")";
  } else if (auto* s = std::get_if<MilestoneTest>(&t)) {
    os << "Milestone(" << s->landmark << ")";
  }
  return os.str();
}

namespace {

// statistic and rejection for one test on one cut; NaN statistic on failure
std::pair<double, bool> run_test(const SimTest& t, const CutData& c, double alpha, double zcrit) {
  try {
    if (auto* w = std::get_if<WlrTest>(&t)) {
      double z = wlr_statistic(c, w->weight);
      return {z, std::isfinite(z) && z > zcrit};
    }
    if (auto* m = std::get_if<MaxComboTest>(&t)) {
      MaxComboResult r = maxcombo_test(c, m->weights);
      return {r.z_max, std::isfinite(r.z_max) && r.p_value < alpha};
    }
    if (auto* r = std::get_if<RmstTest>(&t)) {
      double z = rmst_statistic(c, r->horizon);
      return {z, z > zcrit};
    }
    if (auto* s = std::get_if<MilestoneTest>(&t)) {
      double z = milestone_statistic(c, s->landmark);
      return {z, z > zcrit};
    }
  } catch (const ModelError&) {
  }
  return {std::numeric_limits<double>::quiet_NaN(), false};
}

}  // namespace

SimReport run_study(const StudyConfig& cfg) {
  require_valid(cfg.model);
  if (cfg.n <= 0 || cfg.replicates <= 0) throw ModelError("n and replicates must be positive");
  if (cfg.tests.empty() || cfg.cuts.empty()) throw ModelError("need at least one test and one cut");
  if (!(cfg.alpha > 0 && cfg.alpha < 0.5)) throw ModelError("alpha must lie in (0, 0.5)");
  const std::size_t C = cfg.cuts.size(), T = cfg.tests.size(), S = C * T;
  const long R = cfg.replicates;
  std::vector<double> z(R * S);
  std::vector<unsigned char> rej(R * S);
  const double zcrit = qnorm(1 - cfg.alpha);
  std::atomic<long> next{0};
  auto work = [&]() {
    const long chunk = 64;
    while (true) {
      long b = next.fetch_add(chunk);
      if (b >= R) break;
      for (long r = b; r < std::min(R, b + chunk); ++r) {
        TrialDataset d = simulate_trial(cfg.model, cfg.n, cfg.seed, static_cast<std::uint64_t>(r));
        for (std::size_t ci = 0; ci < C; ++ci) {
          const AnalysisCut& ac = cfg.cuts[ci];
          CutData c = ac.by_events ? cut_at_events(d, static_cast<long>(std::llround(ac.value)))
                                   : cut_at_time(d, ac.value);
          for (std::size_t ti = 0; ti < T; ++ti) {
            auto [zz, rr] = run_test(cfg.tests[ti], c, cfg.alpha, zcrit);
            z[r * S + ci * T + ti] = zz;
            rej[r * S + ci * T + ti] = rr;
          }
        }
      }
    }
  };
  int W = std::max(1, cfg.workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < W; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  // aggregation in replicate order, independent of scheduling
  SimReport rep;
  rep.replicates = R;
  std::vector<double> mean(S, 0.0);
  std::vector<long> ok(S, 0);
  for (std::size_t s = 0; s < S; ++s) {
    SimCell cell;
    cell.cut = static_cast<int>(s / T);
    cell.test = describe(cfg.tests[s % T]);
    double sum = 0, sum2 = 0;
    for (long r = 0; r < R; ++r) {
      double v = z[r * S + s];
      cell.rejections += rej[r * S + s];
      if (!std::isfinite(v)) {
        ++cell.failures;
        continue;
      }
      sum += v;
      sum2 += v * v;
      ++ok[s];
    }
    cell.power = static_cast<double>(cell.rejections) / R;
    cell.se = std::sqrt(cell.power * (1 - cell.power) / R);
    if (ok[s] > 0) {
      cell.mean_z = sum / ok[s];
      cell.sd_z = ok[s] > 1 ? std::sqrt(std::max(0.0, (sum2 - ok[s] * cell.mean_z * cell.mean_z) / (ok[s] - 1))) : 0;
    }
    mean[s] = cell.mean_z;
    rep.labels.push_back("cut" + std::to_string(cell.cut + 1) + "/" + cell.test);
    rep.cells.push_back(cell);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(S, S);
  for (long r = 0; r < R; ++r) {
    bool all = true;
    for (std::size_t s = 0; s < S; ++s) all = all && std::isfinite(z[r * S + s]);
    if (!all) continue;
    for (std::size_t a = 0; a < S; ++a)
      for (std::size_t b = 0; b <= a; ++b) cov(a, b) += (z[r * S + a] - mean[a]) * (z[r * S + b] - mean[b]);
  }
  rep.z_corr = Eigen::MatrixXd::Identity(S, S);
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = 0; b < a; ++b) {
      double den = std::sqrt(cov(a, a) * cov(b, b));
      rep.z_corr(a, b) = rep.z_corr(b, a) = den > 0 ? cov(a, b) / den : 0.0;
    }
  if (cfg.keep_z) rep.z = std::move(z);
  return rep;
}

std::string to_csv(const SimReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "cut,test,replicates,rejections,power,mc_se,mean_z,sd_z,failures\n";
  for (const auto& c : r.cells)
    os << c.cut + 1 << ",\"" << c.test << "\"," << r.replicates << ',' << c.rejections << ','
       << c.power << ',' << c.se << ',' << c.mean_z << ',' << c.sd_z << ',' << c.failures << '\n';
  return os.str();
}

std::string z_dump_csv(const SimReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << "replicate";
  for (const auto& l : r.labels) os << ",\"" << l << '"';
  os << '\n';
  const std::size_t S = r.labels.size();
  for (long i = 0; i < r.replicates && !r.z.empty(); ++i) {
    os << i + 1;
    for (std::size_t s = 0; s < S; ++s) {
      double v = r.z[i * S + s];
      os << ',';
      if (std::isfinite(v)) os << v;
      else os << "NA";
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const SimReport& r) {
  nlohmann::json j;
  j["replicates"] = r.replicates;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : r.cells)
    j["cells"].push_back({{"cut", c.cut + 1},
                          {"test", c.test},
                          {"rejections", c.rejections},
                          {"power", c.power},
                          {"mc_se", c.se},
                          {"mean_z", c.mean_z},
                          {"sd_z", c.sd_z},
                          {"failures", c.failures}});
  j["labels"] = r.labels;
  std::vector<std::vector<double>> m(r.z_corr.rows(), std::vector<double>(r.z_corr.cols()));
  for (int a = 0; a < r.z_corr.rows(); ++a)
    for (int b = 0; b < r.z_corr.cols(); ++b) m[a][b] = r.z_corr(a, b);
  j["z_correlation"] = m;
  return j.dump(2);
}

}  // namespace nphgsd
