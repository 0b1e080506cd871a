#pragma once
#include <array>
#include <cmath>
#include <vector>

namespace nphgsd {

// Gauss-Legendre nodes and weights on [-1, 1]
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};

const GaussLegendre& gl15();

namespace detail {

template <std::size_t K, class F>
std::array<double, K> gl_segment(const F& f, double a, double b) {
  const GaussLegendre& g = gl15();
  double h = 0.5 * (b - a), c = 0.5 * (a + b);
  std::array<double, K> s{};
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    std::array<double, K> v = f(c + h * g.x[i]);
    for (std::size_t k = 0; k < K; ++k) s[k] += g.w[i] * v[k];
  }
  for (auto& x : s) x *= h;
  return s;
}

template <std::size_t K, class F>
std::array<double, K> adapt(const F& f, double a, double b, const std::array<double, K>& whole,
                            double tol, int depth) {
  double m = 0.5 * (a + b);
  auto l = gl_segment<K>(f, a, m), r = gl_segment<K>(f, m, b);
  std::array<double, K> both;
  double err = 0, scale = 0;
  for (std::size_t k = 0; k < K; ++k) {
    both[k] = l[k] + r[k];
    err = std::max(err, std::abs(both[k] - whole[k]));
    scale = std::max(scale, std::abs(both[k]));
  }
  if (err <= tol * std::max(scale, 1e-300) || depth >= 30 || err < 1e-300) return both;
  auto L = adapt<K>(f, a, m, l, tol, depth + 1);
  auto R = adapt<K>(f, m, b, r, tol, depth + 1);
  for (std::size_t k = 0; k < K; ++k) both[k] = L[k] + R[k];
  return both;
}

}  // namespace detail

// Integrates a vector-valued f over [grid.front(), grid.back()], 15-point
// Gauss-Legendre per grid segment, bisecting a segment while the two-halves
// estimate differs from the whole-segment one by more than rel_tol.
template <std::size_t K, class F>
std::array<double, K> integrate(const F& f, const std::vector<double>& grid,
                                double rel_tol = 1e-10) {
  std::array<double, K> total{};
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = grid[i], b = grid[i + 1];
    if (!(b > a)) continue;
    auto whole = detail::gl_segment<K>(f, a, b);
    auto s = detail::adapt<K>(f, a, b, whole, rel_tol, 0);
    for (std::size_t k = 0; k < K; ++k) total[k] += s[k];
  }
  return total;
}

template <class F>
double integrate1(const F& f, const std::vector<double>& grid, double rel_tol = 1e-10) {
  auto g = [&](double t) { return std::array<double, 1>{f(t)}; };
  return integrate<1>(g, grid, rel_tol)[0];
}

}  // namespace nphgsd
