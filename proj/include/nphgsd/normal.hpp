#pragma once
#include <cmath>
#include <numbers>

namespace nphgsd {

inline double dnorm(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }
inline double pnorm(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
// upper tail, accurate far out
inline double pnorm_upper(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
double qnorm(double p);

// P(X > h, Y > k) for a standard bivariate normal with correlation r
double bvn_upper(double h, double k, double r);
// P(X < h, Y < k)
inline double bvn_lower(double h, double k, double r) { return bvn_upper(-h, -k, r); }

}  // namespace nphgsd
