#include "nphgsd/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nphgsd/error.hpp"
#include "nphgsd/normal.hpp"

namespace nphgsd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

JointDistribution JointDistribution::null() const {
  JointDistribution d = *this;
  d.mean.setZero();
  return d;
}

JointDistribution JointDistribution::subset(const std::vector<int>& idx) const {
  JointDistribution d;
  int n = static_cast<int>(idx.size());
  d.mean.resize(n);
  d.corr.resize(n, n);
  for (int i = 0; i < n; ++i) {
    d.labels.push_back(labels[idx[i]]);
    d.mean[i] = mean[idx[i]];
    for (int j = 0; j < n; ++j) d.corr(i, j) = corr(idx[i], idx[j]);
  }
  d.clipped = clipped;
  return d;
}

JointDistribution canonical(const std::vector<double>& t, const std::vector<double>& ez) {
  if (t.size() != ez.size() || t.empty()) throw ModelError("fractions and means must match");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0 && t[k] <= 1 + 1e-12)) throw ModelError("information fractions must lie in (0, 1]");
    if (k > 0 && !(t[k] > t[k - 1])) throw ModelError("information fractions must increase");
  }
  int K = static_cast<int>(t.size());
  JointDistribution d;
  d.mean.resize(K);
  d.corr.resize(K, K);
  for (int i = 0; i < K; ++i) {
    d.labels.push_back({i, 0});
    d.mean[i] = ez[i];
    for (int j = 0; j < K; ++j)
      d.corr(i, j) = std::sqrt(std::min(t[i], t[j]) / std::max(t[i], t[j]));
  }
  return d;
}

double clip_to_psd(Eigen::MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  double lo = es.eigenvalues().minCoeff();
  if (lo >= -1e-12) return 0.0;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  c = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd s = c.diagonal().cwiseSqrt();
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) c(i, j) /= s[i] * s[j];
  return -lo;
}

JointDistribution maxcombo_corr(const TrialModel& m, const std::vector<WeightSpec>& ws,
                                const std::vector<double>& times) {
  if (ws.empty() || times.empty()) throw ModelError("need at least one weight and analysis");
  int L = static_cast<int>(ws.size()), K = static_cast<int>(times.size());
  // per-analysis information V[k][l] and within-analysis covariance
  std::vector<Eigen::MatrixXd> cov(K, Eigen::MatrixXd(L, L));
  JointDistribution d;
  d.mean.resize(K * L);
  for (int k = 0; k < K; ++k) {
    double n = enrolled_at(m, times[k]);
    for (int i = 0; i < L; ++i) {
      WlrMoments mo = wlr_moments(m, ws[i], times[k]);
      d.mean[k * L + i] = mo.e_z;
      cov[k](i, i) = n * mo.sigma2_h0;
      for (int j = 0; j < i; ++j)
        cov[k](i, j) = cov[k](j, i) = n * wlr_cross_variance(m, ws[i], ws[j], times[k]);
    }
  }
  d.corr.resize(K * L, K * L);
  for (int k1 = 0; k1 < K; ++k1) {
    for (int i = 0; i < L; ++i) d.labels.push_back({k1, i});
    for (int k2 = 0; k2 < K; ++k2) {
      int a = std::min(k1, k2), b = std::max(k1, k2);
      for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
          // covariance is fixed by the earlier analysis (independent increments)
          int ii = k1 <= k2 ? i : j, jj = k1 <= k2 ? j : i;
          double c = cov[a](ii, jj);
          double v1 = cov[a](ii, ii), v2 = cov[b](jj, jj);
          d.corr(k1 * L + i, k2 * L + j) = c / std::sqrt(v1 * v2);
        }
    }
  }
  d.clipped = clip_to_psd(d.corr);
  return d;
}

namespace {

const int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                       59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

// probability mass of (a, b) for N(0,1), computed in the accurate tail
double interval_mass(double a, double b) {
  if (a > 0) return pnorm_upper(a) - pnorm_upper(b);
  return pnorm(b) - pnorm(a);
}

// inverse cdf at fraction w of the mass of (a, b)
double interval_quantile(double a, double b, double w) {
  if (a > 0) {
    double ua = pnorm_upper(a), ub = pnorm_upper(b);
    return -qnorm(ua - w * (ua - ub));
  }
  double pa = pnorm(a), pb = pnorm(b);
  return qnorm(pa + w * (pb - pa));
}

struct Sov {
  int m;
  Eigen::MatrixXd C;
  Eigen::VectorXd a, b;

  double eval(const double* w, double* y) const {
    double f = 1.0;
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (int k = 0; k < i; ++k) s += C(i, k) * y[k];
      double c = C(i, i);
      if (c > 1e-10) {
        double lo = (a[i] - s) / c, hi = (b[i] - s) / c;
        double p = interval_mass(lo, hi);
        if (!(p > 0)) return 0.0;
        f *= p;
        if (i + 1 < m) y[i] = interval_quantile(lo, hi, w[i]);
      } else {
        if (a[i] - s > 1e-8 || s - b[i] > 1e-8) return 0.0;
        y[i] = 0;
      }
    }
    return f;
  }
};

// Cholesky factor with variable prioritization (smallest expected mass first)
Sov prepare(Eigen::MatrixXd S, Eigen::VectorXd a, Eigen::VectorXd b) {
  int m = static_cast<int>(S.rows());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    int best = i;
    double bestp = kInf;
    for (int j = i; j < m; ++j) {
      double s = 0, v = S(j, j);
      for (int k = 0; k < i; ++k) {
        s += C(j, k) * y[k];
        v -= C(j, k) * C(j, k);
      }
      double p;
      if (v > 1e-20) {
        double sd = std::sqrt(v);
        p = interval_mass((a[j] - s) / sd, (b[j] - s) / sd);
      } else {
        p = (a[j] - s <= 1e-8 && s - b[j] <= 1e-8) ? 1.0 : 0.0;
      }
      if (p < bestp) {
        bestp = p;
        best = j;
      }
    }
    if (best != i) {
      S.row(i).swap(S.row(best));
      S.col(i).swap(S.col(best));
      C.row(i).swap(C.row(best));
      std::swap(a[i], a[best]);
      std::swap(b[i], b[best]);
    }
    double v = S(i, i);
    for (int k = 0; k < i; ++k) v -= C(i, k) * C(i, k);
    double c = v > 1e-20 ? std::sqrt(v) : 0.0;
    C(i, i) = c;
    for (int j = i + 1; j < m; ++j) {
      double s = S(j, i);
      for (int k = 0; k < i; ++k) s -= C(j, k) * C(i, k);
      C(j, i) = c > 0 ? s / c : 0.0;
    }
    // conditional mean of the truncated variable, used to order the rest
    double s = 0;
    for (int k = 0; k < i; ++k) s += C(i, k) * y[k];
    if (c > 0) {
      double lo = (a[i] - s) / c, hi = (b[i] - s) / c;
      double p = interval_mass(lo, hi);
      double dl = std::isfinite(lo) ? dnorm(lo) : 0.0, dh = std::isfinite(hi) ? dnorm(hi) : 0.0;
      if (p > 1e-300)
        y[i] = (dl - dh) / p;
      else
        y[i] = std::isfinite(lo) ? lo : hi;
    } else {
      y[i] = 0;
    }
  }
  return {m, C, a, b};
}

}  // namespace

MvnResult mvn_rectangle(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                        const MvnOptions& opt) {
  int m = static_cast<int>(mean.size());
  if (cov.rows() != m || cov.cols() != m || lower.size() != m || upper.size() != m)
    throw ModelError("mvn_rectangle: dimension mismatch");
  if (m > 16) throw ModelError("mvn_rectangle supports at most 16 dimensions");
  for (int i = 0; i < m; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i])) throw ModelError("mvn_rectangle: NaN limit");
    if (lower[i] >= upper[i]) return {0.0, 0.0, true};
    if (!(cov(i, i) > 0)) throw ModelError("mvn_rectangle: variances must be positive");
  }
  // drop unrestricted coordinates
  std::vector<int> keep;
  for (int i = 0; i < m; ++i)
    if (std::isfinite(lower[i]) || std::isfinite(upper[i])) keep.push_back(i);
  int n = static_cast<int>(keep.size());
  if (n == 0) return {1.0, 0.0, true};
  Eigen::VectorXd sd(n), a(n), b(n);
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i) {
    sd[i] = std::sqrt(cov(keep[i], keep[i]));
    a[i] = (lower[keep[i]] - mean[keep[i]]) / sd[i];
    b[i] = (upper[keep[i]] - mean[keep[i]]) / sd[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = cov(keep[i], keep[j]) / (sd[i] * sd[j]);

  if (n == 1) return {interval_mass(a[0], b[0]), 0.0, true};
  if (n == 2) {
    double r = std::clamp(R(0, 1), -1.0, 1.0);
    auto U = [&](double x, double y) { return bvn_upper(x, y, r); };
    double v = U(a[0], a[1]) - U(b[0], a[1]) - U(a[0], b[1]) + U(b[0], b[1]);
    return {std::clamp(v, 0.0, 1.0), 1e-14, true};
  }

  Sov sov = prepare(R, a, b);
  int dim = n - 1;
  std::vector<double> z(dim);
  for (int i = 0; i < dim; ++i) z[i] = std::sqrt(static_cast<double>(kPrimes[i]));
  std::mt19937_64 gen(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> shift(opt.shifts, std::vector<double>(dim));
  for (auto& s : shift)
    for (double& x : s) x = unif(gen);

  std::vector<double> sums(opt.shifts, 0.0);
  std::vector<double> w(dim), y(n);
  long done = 0, target = std::max(1L, opt.min_points);
  MvnResult res;
  while (true) {
    for (int s = 0; s < opt.shifts; ++s) {
      for (long k = done + 1; k <= target; ++k) {
        for (int i = 0; i < dim; ++i) {
          double x = k * z[i] + shift[s][i];
          x -= std::floor(x);
          w[i] = std::abs(2 * x - 1);  // baker's transform
        }
        sums[s] += sov.eval(w.data(), y.data());
      }
    }
    done = target;
    double mean_v = 0;
    for (double v : sums) mean_v += v / done;
    mean_v /= opt.shifts;
    double var = 0;
    for (double v : sums) var += (v / done - mean_v) * (v / done - mean_v);
    var /= (opt.shifts - 1) * static_cast<double>(opt.shifts);
    res.value = std::clamp(mean_v, 0.0, 1.0);
    res.error = 3 * std::sqrt(var);
    if (res.error <= opt.abs_tol) break;
    if (target >= opt.max_points) {
      res.converged = false;
      break;
    }
    target = std::min(opt.max_points, 2 * target);
  }
  return res;
}

MvnResult mvn_rectangle(const JointDistribution& d, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper, const MvnOptions& opt) {
  return mvn_rectangle(d.mean, d.corr, lower, upper, opt);
}

double Crossing::total_upper() const {
  double s = 0;
  for (double x : upper) s += x;
  return s;
}

double Crossing::total_lower() const {
  double s = 0;
  for (double x : lower) s += x;
  return s;
}

namespace {

struct Grid {
  std::vector<double> z, w;  // nodes and Simpson weights
};

Grid simpson(double lo, double hi, int n) {
  Grid g;
  if (!(hi > lo)) return g;
  double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    g.z.push_back(lo + i * h);
    double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    g.w.push_back(c * h / 3);
  }
  return g;
}

Crossing crossing_once(const std::vector<double>& t, const std::vector<double>& mu,
                       const std::vector<double>& b, const std::vector<double>& a, int n) {
  int K = static_cast<int>(t.size());
  Crossing out;
  out.upper.assign(K, 0.0);
  out.lower.assign(K, 0.0);
  const double span = 8.0;
  out.upper[0] = pnorm_upper(b[0] - mu[0]);
  out.lower[0] = pnorm(a[0] - mu[0]);
  if (K == 1) return out;
  Grid g = simpson(std::max(a[0], mu[0] - span), std::min(b[0], mu[0] + span), n);
  std::vector<double> h(g.z.size());
  for (std::size_t i = 0; i < g.z.size(); ++i) h[i] = dnorm(g.z[i] - mu[0]);
  for (int k = 1; k < K; ++k) {
    double dt = t[k] - t[k - 1], sdt = std::sqrt(dt);
    double st = std::sqrt(t[k]), sp = std::sqrt(t[k - 1]);
    double drift = mu[k] * st - mu[k - 1] * sp;
    double up = 0, lo = 0;
    for (std::size_t i = 0; i < g.z.size(); ++i) {
      double c = g.z[i] * sp + drift, wh = g.w[i] * h[i];
      if (wh == 0) continue;
      up += wh * pnorm_upper((b[k] * st - c) / sdt);
      lo += wh * pnorm((a[k] * st - c) / sdt);
    }
    out.upper[k] = up;
    out.lower[k] = lo;
    if (k + 1 == K) break;
    // conditional mean of Z_k is roughly mu_k; keep the grid on the continuation region
    double cen = mu[k];
    Grid g2 = simpson(std::max(a[k], cen - span), std::min(b[k], cen + span), n);
    std::vector<double> h2(g2.z.size(), 0.0);
    for (std::size_t j = 0; j < g2.z.size(); ++j) {
      double s = 0;
      for (std::size_t i = 0; i < g.z.size(); ++i) {
        double x = (g2.z[j] * st - g.z[i] * sp - drift) / sdt;
        s += g.w[i] * h[i] * dnorm(x);
      }
      h2[j] = s * st / sdt;
    }
    g = std::move(g2);
    h = std::move(h2);
  }
  return out;
}

}  // namespace

Crossing gs_crossing(const std::vector<double>& t, const std::vector<double>& mu,
                     const std::vector<double>& b, const std::vector<double>& a) {
  std::size_t K = t.size();
  if (K == 0 || mu.size() != K || b.size() != K || a.size() != K)
    throw ModelError("gs_crossing: inconsistent lengths");
  for (std::size_t k = 0; k < K; ++k) {
    if (!(t[k] > 0) || (k > 0 && !(t[k] > t[k - 1])))
      throw ModelError("gs_crossing: information fractions must be positive and increasing");
    if (a[k] > b[k]) throw ModelError("gs_crossing: lower bound above upper bound");
  }
  int n = 181;
  Crossing prev = crossing_once(t, mu, b, a, n);
  for (int it = 0; it < 4; ++it) {
    n = 2 * n - 1;
    Crossing cur = crossing_once(t, mu, b, a, n);
    double diff = 0;
    for (std::size_t k = 0; k < K; ++k)
      diff = std::max({diff, std::abs(cur.upper[k] - prev.upper[k]),
                       std::abs(cur.lower[k] - prev.lower[k])});
    prev = std::move(cur);
    if (diff < 1e-8) break;
  }
  return prev;
}

}  // namespace nphgsd
