#include "nphgsd/quadrature.hpp"

#include <numbers>

namespace nphgsd {

GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
  // Newton iteration on P_n from the Chebyshev-like initial guess
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
}

const GaussLegendre& gl15() {
  static const GaussLegendre g(15);
  return g;
}

}  // namespace nphgsd
