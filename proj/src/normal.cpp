#include "nphgsd/normal.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <limits>
#include <vector>

#include "nphgsd/quadrature.hpp"

namespace nphgsd {

double qnorm(double p) {
  if (p <= 0) return -std::numeric_limits<double>::infinity();
  if (p >= 1) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2 * p);
}

namespace {

// positive half of the n-point Gauss-Legendre rule
struct HalfRule {
  std::vector<double> x, w;
  explicit HalfRule(int n) {
    GaussLegendre g(n);
    for (int i = n / 2; i < n; ++i) {
      x.push_back(g.x[i]);
      w.push_back(g.w[i]);
    }
  }
};

}  // namespace

// Genz's algorithm (Drezner-Wesolowsky type expansion with
// Gauss-Legendre quadrature), double precision accuracy.
double bvn_upper(double dh, double dk, double r) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (dh == inf || dk == inf) return 0.0;
  if (dh == -inf) return dk == -inf ? 1.0 : pnorm(-dk);
  if (dk == -inf) return pnorm(-dh);
  if (r == 0) return pnorm(-dh) * pnorm(-dk);
  if (r >= 1) return pnorm(-std::max(dh, dk));
  if (r <= -1) return std::max(0.0, pnorm(-dh) - pnorm(dk));

  static const HalfRule r6(6), r12(12), r20(20);
  const HalfRule& rule = std::abs(r) < 0.3 ? r6 : (std::abs(r) < 0.75 ? r12 : r20);
  const double tp = 2 * std::numbers::pi;
  double h = dh, k = dk, hk = h * k, bvn = 0;

  if (std::abs(r) < 0.925) {
    double hs = (h * h + k * k) / 2, asr = std::asin(r) / 2;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      for (double x : {1 - rule.x[i], 1 + rule.x[i]}) {
        double sn = std::sin(asr * x);
        bvn += rule.w[i] * std::exp((sn * hk - hs) / (1 - sn * sn));
      }
    }
    bvn = bvn * asr / tp + pnorm(-h) * pnorm(-k);
  } else {
    if (r < 0) {
      k = -k;
      hk = -hk;
    }
    double as = 1 - r * r, a = std::sqrt(as), bs = (h - k) * (h - k);
    double asr = -(bs / as + hk) / 2, c = (4 - hk) / 8, d = (12 - hk) / 80;
    if (asr > -100)
      bvn = a * std::exp(asr) * (1 - c * (bs - as) * (1 - d * bs) / 3 + c * d * as * as);
    if (hk > -100) {
      double b = std::sqrt(bs), sp = std::sqrt(tp) * pnorm(-b / a);
      bvn -= std::exp(-hk / 2) * sp * b * (1 - c * bs * (1 - d * bs) / 3);
    }
    a /= 2;
    double sum = 0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      for (double x : {1 - rule.x[i], 1 + rule.x[i]}) {
        double xs = (a * x) * (a * x);
        double e = -(bs / xs + hk) / 2;
        if (e <= -100) continue;
        double sp = 1 + c * xs * (1 + 5 * d * xs);
        double rs = std::sqrt(1 - xs);
        double ep = std::exp(-(hk / 2) * xs / ((1 + rs) * (1 + rs))) / rs;
        sum += rule.w[i] * std::exp(e) * (sp - ep);
      }
    }
    bvn = (a * sum - bvn) / tp;
    if (r > 0) {
      bvn += pnorm(-std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      double L = h < 0 ? pnorm(k) - pnorm(h) : pnorm(-h) - pnorm(-k);
      bvn = L - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace nphgsd
