#include "nphgsd/design.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include "json.hpp"
#include <sstream>

#include "nphgsd/ahr.hpp"
#include "nphgsd/error.hpp"
#include "nphgsd/expect.hpp"
#include "nphgsd/normal.hpp"

namespace nphgsd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double solve_root(F f, double lo, double hi, double flo, double fhi) {
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                             boost::math::tools::eps_tolerance<double>(48), it);
  return 0.5 * (r.first + r.second);
}
}  // namespace

double SpendingFunction::operator()(double t, std::size_t k) const {
  if (family == SpendingFamily::Fixed) {
    if (cumulative.empty()) throw ModelError("fixed spending needs cumulative values");
    return std::min(total, cumulative[std::min(k, cumulative.size() - 1)]);
  }
  if (t <= 0) return 0.0;
  if (t >= 1) return total;
  switch (family) {
    case SpendingFamily::LanDeMetsOBF:
      return 2 * pnorm_upper(qnorm(1 - total / 2) / std::sqrt(t));
    case SpendingFamily::LanDeMetsPocock:
      return total * std::log(1 + (std::exp(1.0) - 1) * t);
    case SpendingFamily::KimDeMetsPower:
      return total * std::pow(t, param);
    case SpendingFamily::HwangShihDeCani:
      if (param == 0) return total * t;
      return total * std::expm1(-param * t) / std::expm1(-param);
    default:
      break;
  }
  return total;
}

std::string describe(const SpendingFunction& sf) {
  std::ostringstream os;
  switch (sf.family) {
    case SpendingFamily::LanDeMetsOBF: os << "LanDeMetsOBF"; break;
    case SpendingFamily::LanDeMetsPocock: os << "LanDeMetsPocock"; break;
    case SpendingFamily::KimDeMetsPower: os << "KimDeMetsPower(" << sf.param << ")"; break;
    case SpendingFamily::HwangShihDeCani: os << "HwangShihDeCani(" << sf.param << ")"; break;
    case SpendingFamily::Fixed: os << "Fixed"; break;
  }
  os << " total=" << sf.total;
  return os.str();
}

GsLayout GsLayout::null() const {
  GsLayout g = *this;
  g.dist = dist.null();
  return g;
}

GsLayout GsLayout::scaled(double c) const {
  GsLayout g = *this;
  g.dist.mean *= std::sqrt(c);
  return g;
}

namespace {

void check_schedule(const std::vector<double>& times, std::size_t ntests) {
  if (times.empty()) throw ModelError("no analyses");
  if (ntests != times.size()) throw ModelError("one test per analysis is required");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (!(times[k] > 0) || (k > 0 && !(times[k] > times[k - 1])))
      throw ModelError("analysis times must be positive and increasing");
}

std::vector<WeightSpec> distinct_weights(const std::vector<std::vector<WeightSpec>>& tests) {
  std::vector<WeightSpec> out;
  for (const auto& t : tests) {
    if (t.empty()) throw ModelError("an analysis has no test");
    for (const auto& w : t) {
      bool seen = false;
      for (const auto& o : out) seen = seen || same_weight(o, w);
      if (!seen) out.push_back(w);
    }
  }
  return out;
}

int weight_index(const std::vector<WeightSpec>& ws, const WeightSpec& w) {
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (same_weight(ws[i], w)) return static_cast<int>(i);
  return -1;
}

}  // namespace

GsLayout wlr_layout(const TrialModel& m, const std::vector<std::vector<WeightSpec>>& tests,
                    const std::vector<double>& times) {
  check_schedule(times, tests.size());
  std::vector<WeightSpec> ws = distinct_weights(tests);
  GsLayout L;
  L.dist = maxcombo_corr(m, ws, times);
  int W = static_cast<int>(ws.size()), K = static_cast<int>(times.size());
  for (int k = 0; k < K; ++k) {
    std::vector<int> idx;
    for (const auto& w : tests[k]) {
      int i = weight_index(ws, w);
      if (std::find(idx.begin(), idx.end(), k * W + i) == idx.end()) idx.push_back(k * W + i);
    }
    L.tested.push_back(idx);
  }
  // one statistic repeated at every analysis has independent increments
  int w0 = L.tested[0][0];
  L.canonical = true;
  for (int k = 0; k < K; ++k)
    L.canonical = L.canonical && L.tested[k].size() == 1 && L.tested[k][0] == k * W + w0;
  if (L.canonical) {
    int last = L.tested[K - 1][0];
    for (int k = 0; k < K; ++k) {
      double r = L.dist.corr(L.tested[k][0], last);
      L.fractions.push_back(r * r);
    }
    L.fractions.back() = 1.0;
  }
  return L;
}

GsLayout ahr_layout(const TrialModel& m, const std::vector<double>& times) {
  check_schedule(times, times.size());
  std::vector<double> i0, mu;
  for (double t : times) {
    AhrResult a = ahr_lr(m, t);
    i0.push_back(a.info_h0);
    mu.push_back(a.theta() * std::sqrt(a.info_h1));
  }
  if (!(i0.back() > 0)) throw ModelError("no expected events at the final analysis");
  std::vector<double> t;
  for (double x : i0) t.push_back(x / i0.back());
  GsLayout L;
  L.dist = canonical(t, mu);
  for (std::size_t k = 0; k < times.size(); ++k) L.tested.push_back({static_cast<int>(k)});
  L.canonical = true;
  L.fractions = t;
  return L;
}

std::vector<double> spending_fractions(const TrialModel& m,
                                       const std::vector<std::vector<WeightSpec>>& tests,
                                       const std::vector<double>& times, FractionMode mode) {
  check_schedule(times, tests.size());
  std::vector<WeightSpec> ws = distinct_weights(tests);
  std::vector<std::vector<double>> f;
  for (const auto& w : ws) f.push_back(info_fraction(m, w, times));
  std::vector<double> out(times.size(), kInf);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (mode == FractionMode::TestedWeights) {
        bool used = false;
        for (const auto& w : tests[k]) used = used || same_weight(w, ws[i]);
        if (!used) continue;
      }
      out[k] = std::min(out[k], f[i][k]);
    }
  }
  out.back() = 1.0;
  return out;
}

namespace {

struct Constraint {
  int coord;
  double lo, hi;
};
struct Term {
  double sign;
  std::vector<Constraint> cons;
};

std::vector<Term> expand(const GsLayout& L, int k, const std::vector<double>& b,
                         const std::vector<double>& a, bool upper, double bound) {
  std::vector<Term> terms{{1.0, {}}};
  for (int j = 0; j <= k; ++j) {
    const auto& T = L.tested[j];
    std::vector<Term> opts;
    if (j < k) {
      if (T.size() == 1) {
        opts.push_back({1.0, {{T[0], a[j], b[j]}}});
      } else {
        Term t1{1.0, {}};
        for (int c : T) t1.cons.push_back({c, -kInf, b[j]});
        opts.push_back(t1);
        if (a[j] > -kInf) {
          Term t2{-1.0, {}};
          for (int c : T) t2.cons.push_back({c, -kInf, a[j]});
          opts.push_back(t2);
        }
      }
    } else if (upper) {
      int n = static_cast<int>(T.size());
      for (int mask = 1; mask < (1 << n); ++mask) {
        Term t{__builtin_popcount(mask) % 2 ? 1.0 : -1.0, {}};
        for (int i = 0; i < n; ++i)
          if (mask >> i & 1) t.cons.push_back({T[i], bound, kInf});
        opts.push_back(t);
      }
    } else {
      Term t{1.0, {}};
      for (int c : T) t.cons.push_back({c, -kInf, bound});
      opts.push_back(t);
    }
    std::vector<Term> next;
    for (const auto& t : terms)
      for (const auto& o : opts) {
        Term n{t.sign * o.sign, t.cons};
        n.cons.insert(n.cons.end(), o.cons.begin(), o.cons.end());
        next.push_back(n);
      }
    terms = std::move(next);
  }
  return terms;
}

}  // namespace

double region_probability(const GsLayout& L, int k, const std::vector<double>& b,
                          const std::vector<double>& a, bool upper, double bound,
                          const MvnSettings& mvn) {
  if (L.canonical) {
    std::vector<double> t(L.fractions.begin(), L.fractions.begin() + k + 1), mu, bb, aa;
    for (int j = 0; j <= k; ++j) {
      mu.push_back(L.dist.mean[L.tested[j][0]]);
      bb.push_back(j < k ? b[j] : (upper ? bound : kInf));
      aa.push_back(j < k ? a[j] : (upper ? -kInf : bound));
    }
    Crossing c = gs_crossing(t, mu, bb, aa);
    return upper ? c.upper[k] : c.lower[k];
  }
  MvnOptions opt;
  opt.abs_tol = 0;
  opt.min_points = opt.max_points = mvn.points;
  opt.shifts = mvn.shifts;
  double total = 0;
  for (const auto& term : expand(L, k, b, a, upper, bound)) {
    std::vector<int> idx;
    std::vector<double> lo, hi;
    bool empty = false;
    for (const auto& c : term.cons) {
      if (!(c.lo < c.hi)) empty = true;
      if (c.lo == -kInf && c.hi == kInf) continue;
      idx.push_back(c.coord);
      lo.push_back(c.lo);
      hi.push_back(c.hi);
    }
    if (empty) continue;
    if (idx.empty()) {
      total += term.sign;
      continue;
    }
    JointDistribution d = L.dist.subset(idx);
    Eigen::VectorXd l = Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size());
    Eigen::VectorXd h = Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size());
    total += term.sign * mvn_rectangle(d, l, h, opt).value;
  }
  return std::max(0.0, total);
}

namespace {

double solve_efficacy(const GsLayout& h0, int k, std::vector<double>& b,
                      const std::vector<double>& a, double inc, const MvnSettings& mvn) {
  if (!(inc > 1e-15)) return kInf;
  auto f = [&](double x) { return region_probability(h0, k, b, a, true, x, mvn) - inc; };
  double hi = 40, lo = -10;
  double flo = f(lo);
  if (flo <= 0) return lo;
  return solve_root(f, lo, hi, flo, -inc);
}

double solve_futility(const GsLayout& h1, int k, const std::vector<double>& b,
                      std::vector<double>& a, double inc, const MvnSettings& mvn) {
  if (!(inc > 1e-15)) return -kInf;
  auto g = [&](double x) { return region_probability(h1, k, b, a, false, x, mvn) - inc; };
  double hi = b[k];
  double ghi = g(hi);
  if (ghi <= 0) return hi;
  double lo = std::min(-10.0, hi - 1);
  double glo = g(lo);
  if (glo >= 0) return lo;
  return solve_root(g, lo, hi, glo, ghi);
}

Bounds solve_bounds(const GsLayout& h1, const SpendingFunction& sa,
                    const std::optional<SpendingFunction>& sb, bool binding,
                    const std::vector<double>& t, const MvnSettings& mvn,
                    const std::vector<double>* fixed_efficacy = nullptr) {
  int K = h1.analyses();
  GsLayout h0 = h1.null();
  Bounds B;
  B.efficacy.assign(K, kInf);
  B.futility.assign(K, -kInf);
  std::vector<double> none(K, -kInf);
  double pa = 0, pb = 0;
  for (int k = 0; k < K; ++k) {
    double ca = sa(t[k], k);
    if (fixed_efficacy) {
      B.efficacy[k] = (*fixed_efficacy)[k];
    } else {
      B.efficacy[k] =
          solve_efficacy(h0, k, B.efficacy, binding ? B.futility : none, ca - pa, mvn);
    }
    pa = ca;
    if (sb) {
      if (k + 1 == K) {
        B.futility[k] = B.efficacy[k];
      } else {
        double cb = (*sb)(t[k], k);
        B.futility[k] = solve_futility(h1, k, B.efficacy, B.futility, cb - pb, mvn);
        pb = cb;
      }
    }
  }
  return B;
}

}  // namespace

std::vector<double> efficacy_bounds(const GsLayout& h0, const SpendingFunction& sf,
                                    const std::vector<double>& t,
                                    const std::vector<double>& binding_futility,
                                    const MvnSettings& mvn) {
  int K = h0.analyses();
  if (static_cast<int>(t.size()) != K) throw ModelError("one spending fraction per analysis");
  std::vector<double> a = binding_futility.empty() ? std::vector<double>(K, -kInf) : binding_futility;
  std::vector<double> b(K, kInf);
  double prev = 0;
  for (int k = 0; k < K; ++k) {
    double c = sf(t[k], k);
    b[k] = solve_efficacy(h0, k, b, a, c - prev, mvn);
    prev = c;
  }
  return b;
}

std::vector<double> futility_bounds(const GsLayout& h1, const SpendingFunction& sb,
                                    const std::vector<double>& t,
                                    const std::vector<double>& b, const MvnSettings& mvn) {
  int K = h1.analyses();
  std::vector<double> a(K, -kInf);
  double prev = 0;
  for (int k = 0; k + 1 < K; ++k) {
    double c = sb(t[k], k);
    a[k] = solve_futility(h1, k, b, a, c - prev, mvn);
    prev = c;
  }
  a[K - 1] = b[K - 1];
  return a;
}

double CrossingSummary::power() const {
  double s = 0;
  for (double x : upper) s += x;
  return s;
}

CrossingSummary boundary_crossing(const GsLayout& L, const Bounds& B, const MvnSettings& mvn) {
  int K = L.analyses();
  CrossingSummary c;
  for (int k = 0; k < K; ++k) {
    c.upper.push_back(B.efficacy[k] == kInf
                          ? 0.0
                          : region_probability(L, k, B.efficacy, B.futility, true, B.efficacy[k], mvn));
    c.lower.push_back(B.futility[k] == -kInf
                          ? 0.0
                          : region_probability(L, k, B.efficacy, B.futility, false, B.futility[k], mvn));
  }
  return c;
}

namespace {

std::string test_name(const std::vector<WeightSpec>& ws) {
  if (ws.size() == 1) return describe(ws[0]);
  std::string s = "MaxCombo{";
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? "," : "") + describe(ws[i]);
  return s + "}";
}

DesignSummary summarize(const DesignConfig& cfg, const TrialModel& m, const GsLayout& L,
                        const std::vector<double>& t, const Bounds& B, const MvnSettings& mvn) {
  int K = L.analyses();
  DesignSummary s;
  s.alpha = cfg.alpha_spending.total;
  s.max_clip = L.dist.clipped;
  CrossingSummary h1 = boundary_crossing(L, B, mvn);
  Bounds b0 = B;
  if (!cfg.binding) b0.futility.assign(K, -kInf);
  CrossingSummary h0 = boundary_crossing(L.null(), b0, mvn);
  double final_events = expected_events_total(m, cfg.analysis_times.back());
  std::vector<WeightSpec> ws = distinct_weights(cfg.tests);
  std::vector<std::vector<double>> fr;
  for (const auto& w : ws) fr.push_back(info_fraction(m, w, cfg.analysis_times));
  double cu1 = 0, cu0 = 0, cl1 = 0, cl0 = 0;
  for (int k = 0; k < K; ++k) {
    AnalysisRow r;
    r.analysis = k + 1;
    r.time = cfg.analysis_times[k];
    r.n = enrolled_at(m, r.time);
    r.events = expected_events_total(m, r.time);
    r.ahr = ahr_lr(m, r.time).ahr;
    r.event_fraction = r.events / final_events;
    r.spending_fraction = t[k];
    for (std::size_t i = 0; i < ws.size(); ++i) r.info_fractions.push_back({describe(ws[i]), fr[i][k]});
    r.test = test_name(cfg.tests[k]);
    r.efficacy_z = B.efficacy[k];
    r.efficacy_p = pnorm_upper(B.efficacy[k]);
    r.futility_z = B.futility[k];
    cu1 += h1.upper[k];
    cu0 += h0.upper[k];
    cl1 += h1.lower[k];
    cl0 += h0.lower[k];
    r.cum_upper_h1 = cu1;
    r.cum_upper_h0 = cu0;
    r.cum_lower_h1 = cl1;
    r.cum_lower_h0 = cl0;
    s.rows.push_back(r);
  }
  s.n = m.total_enrollment();
  s.events = final_events;
  s.power = cu1;
  return s;
}

void check_config(const DesignConfig& cfg) {
  require_valid(cfg.model);
  check_schedule(cfg.analysis_times, cfg.tests.size());
  if (!(cfg.alpha_spending.total > 0 && cfg.alpha_spending.total < 0.5))
    throw ModelError("alpha must lie in (0, 0.5)");
  if (cfg.beta_spending && !(cfg.beta_spending->total > 0 && cfg.beta_spending->total < 1))
    throw ModelError("beta must lie in (0, 1)");
}

// scale factor c on enrollment such that the power equals the target
template <class PowerFn>
double solve_scale(PowerFn power, double target) {
  double lo = 1e-6, hi = 1.0;
  double phi = power(hi);
  int guard = 0;
  while (phi < target) {
    lo = hi;
    hi *= 2;
    phi = power(hi);
    if (++guard > 60) throw UnattainableError("target power is not reachable by increasing N");
  }
  double plo = power(lo);
  while (plo > target && lo > 1e-12) {
    hi = lo;
    phi = plo;
    lo /= 4;
    plo = power(lo);
  }
  return solve_root([&](double c) { return power(c) - target; }, lo, hi, plo - target,
                    phi - target);
}

DesignSummary sized_design(const DesignConfig& cfg, const GsLayout& L0,
                           const std::vector<double>& t, const std::string& method,
                           const MvnSettings& mvn) {
  check_config(cfg);
  DesignSummary s;
  if (cfg.target_power <= cfg.alpha_spending.total) {
    s.method = method;
    s.degenerate = true;
    s.alpha = cfg.alpha_spending.total;
    return s;
  }
  if (!(cfg.target_power < 1)) throw ModelError("target power must be below 1");
  int K = L0.analyses();
  bool positive = false;
  for (int c : L0.tested[K - 1]) positive = positive || L0.dist.mean[c] > 0;
  if (!positive) throw UnattainableError("no treatment benefit at the final analysis");
  std::vector<double> b;
  if (!cfg.binding) b = efficacy_bounds(L0.null(), cfg.alpha_spending, t, {}, mvn);
  auto bounds_at = [&](const GsLayout& L) {
    return solve_bounds(L, cfg.alpha_spending, cfg.beta_spending, cfg.binding, t, mvn,
                        cfg.binding ? nullptr : &b);
  };
  auto power = [&](double c) {
    GsLayout L = L0.scaled(c);
    return boundary_crossing(L, bounds_at(L), mvn).power();
  };
  double c = solve_scale(power, cfg.target_power);
  TrialModel m = cfg.model.scaled(c);
  GsLayout L = L0.scaled(c);
  s = summarize(cfg, m, L, t, bounds_at(L), mvn);
  s.method = method;
  return s;
}

bool all_logrank(const DesignConfig& cfg) {
  for (const auto& t : cfg.tests)
    if (t.size() != 1 || !std::holds_alternative<Logrank>(t[0])) return false;
  return true;
}

}  // namespace

DesignSummary evaluate_design(const DesignConfig& cfg, const MvnSettings& mvn) {
  check_config(cfg);
  GsLayout L = wlr_layout(cfg.model, cfg.tests, cfg.analysis_times);
  std::vector<double> t =
      spending_fractions(cfg.model, cfg.tests, cfg.analysis_times, cfg.fraction_mode);
  Bounds B = solve_bounds(L, cfg.alpha_spending, cfg.beta_spending, cfg.binding, t, mvn);
  DesignSummary s = summarize(cfg, cfg.model, L, t, B, mvn);
  s.method = "fixed-n";
  return s;
}

DesignSummary sample_size_nd(const DesignConfig& cfg, const MvnSettings& mvn) {
  check_config(cfg);
  GsLayout L = wlr_layout(cfg.model, cfg.tests, cfg.analysis_times);
  std::vector<double> t =
      spending_fractions(cfg.model, cfg.tests, cfg.analysis_times, cfg.fraction_mode);
  return sized_design(cfg, L, t, "n-d", mvn);
}

DesignSummary sample_size_dn(const DesignConfig& cfg) {
  check_config(cfg);
  if (!all_logrank(cfg)) throw ModelError("the d-n method requires logrank tests at every analysis");
  GsLayout L = ahr_layout(cfg.model, cfg.analysis_times);
  return sized_design(cfg, L, L.fractions, "d-n", {});
}

namespace {

// reports carry four decimals; JSON keeps full precision
std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << x;
  return os.str();
}

nlohmann::json num(double x) {
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  return x;
}

}  // namespace

std::string to_csv(const DesignSummary& s) {
  std::ostringstream os;
  os << "analysis,time,n,events,ahr,event_fraction,info_fractions,spending_fraction,test,efficacy_z,"
        "nominal_p,futility_z,cum_upper_h1,cum_upper_h0,cum_lower_h1,cum_lower_h0\n";
  for (const auto& r : s.rows) {
    std::string fr;
    for (const auto& [name, f] : r.info_fractions) fr += (fr.empty() ? "" : ";") + name + "=" + fmt(f);
    os << r.analysis << ',' << fmt(r.time) << ',' << fmt(r.n) << ',' << fmt(r.events) << ','
       << fmt(r.ahr) << ',' << fmt(r.event_fraction) << ",\"" << fr << "\"," << fmt(r.spending_fraction) << ",\""
       << r.test << "\"," << fmt(r.efficacy_z) << ',' << fmt(r.efficacy_p) << ','
       << fmt(r.futility_z) << ',' << fmt(r.cum_upper_h1) << ',' << fmt(r.cum_upper_h0) << ','
       << fmt(r.cum_lower_h1) << ',' << fmt(r.cum_lower_h0) << '\n';
  }
  return os.str();
}

std::string to_json(const DesignSummary& s) {
  nlohmann::json j;
  j["method"] = s.method;
  j["n"] = s.n;
  j["events"] = s.events;
  j["power"] = s.power;
  j["alpha"] = s.alpha;
  j["degenerate"] = s.degenerate;
  j["correlation_clipping"] = s.max_clip;
  j["analyses"] = nlohmann::json::array();
  for (const auto& r : s.rows) {
    nlohmann::json fr = nlohmann::json::object();
    for (const auto& [name, f] : r.info_fractions) fr[name] = f;
    j["analyses"].push_back({{"analysis", r.analysis},
                             {"time", r.time},
                             {"n", r.n},
                             {"events", r.events},
                             {"ahr", r.ahr},
                             {"event_fraction", r.event_fraction},
                             {"info_fractions", fr},
                             {"spending_fraction", r.spending_fraction},
                             {"test", r.test},
                             {"efficacy_z", num(r.efficacy_z)},
                             {"nominal_p", r.efficacy_p},
                             {"futility_z", num(r.futility_z)},
                             {"cum_upper_h1", r.cum_upper_h1},
                             {"cum_upper_h0", r.cum_upper_h0},
                             {"cum_lower_h1", r.cum_lower_h1},
                             {"cum_lower_h0", r.cum_lower_h0}});
  }
  return j.dump(2);
}

}  // namespace nphgsd
