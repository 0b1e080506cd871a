#include "nphgsd/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nphgsd/error.hpp"

namespace nphgsd {

PiecewiseConstant::PiecewiseConstant(std::vector<double> starts, std::vector<double> values)
    : starts_(std::move(starts)), values_(std::move(values)) {
  if (starts_.empty() || starts_.size() != values_.size())
    throw ModelError("piecewise function needs matching, nonempty starts and values");
  if (starts_[0] != 0.0) throw ModelError("piecewise function must start at 0");
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    if (!std::isfinite(starts_[i]) || !std::isfinite(values_[i]))
      throw ModelError("piecewise function has non-finite entries");
    if (i > 0 && !(starts_[i] > starts_[i - 1]))
      throw ModelError("piecewise breakpoints must be strictly increasing");
  }
  cum_.resize(starts_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < starts_.size(); ++i)
    cum_[i] = cum_[i - 1] + values_[i - 1] * (starts_[i] - starts_[i - 1]);
}

PiecewiseConstant PiecewiseConstant::constant(double value) {
  return PiecewiseConstant({0.0}, {value});
}

PiecewiseConstant PiecewiseConstant::from_durations(const std::vector<double>& durations,
                                                    const std::vector<double>& values) {
  if (durations.size() != values.size() || durations.empty())
    throw ModelError("durations and values must have the same nonzero length");
  std::vector<double> s{0.0};
  std::vector<double> v;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (!(durations[i] > 0)) throw ModelError("piece durations must be positive");
    v.push_back(values[i]);
    if (i + 1 < durations.size()) {
      if (!std::isfinite(durations[i])) throw ModelError("only the last duration may be infinite");
      s.push_back(s.back() + durations[i]);
    }
  }
  // a finite last duration means zero afterwards
  if (std::isfinite(durations.back())) {
    s.push_back(s.back() + durations.back());
    v.push_back(0.0);
  }
  return PiecewiseConstant(s, v);
}

std::size_t PiecewiseConstant::piece(double t) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  return it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin() - 1);
}

double PiecewiseConstant::operator()(double t) const { return values_[piece(t)]; }

double PiecewiseConstant::integral(double t) const {
  if (t <= 0) return 0.0;
  if (std::isinf(t)) {
    if (values_.back() == 0) return cum_.back();
    return values_.back() > 0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
  }
  std::size_t i = piece(t);
  return cum_[i] + values_[i] * (t - starts_[i]);
}

double PiecewiseConstant::inverse_integral(double y) const {
  if (y <= 0) return 0.0;
  std::size_t i = static_cast<std::size_t>(
      std::lower_bound(cum_.begin(), cum_.end(), y) - cum_.begin() - 1);
  // walk forward over zero pieces
  while (true) {
    double next = i + 1 < cum_.size() ? cum_[i + 1] : std::numeric_limits<double>::infinity();
    if (values_[i] > 0 && y <= next) return starts_[i] + (y - cum_[i]) / values_[i];
    if (i + 1 >= cum_.size()) return std::numeric_limits<double>::infinity();
    ++i;
  }
}

PiecewiseConstant PiecewiseConstant::truncated(double t) const {
  std::vector<double> s, v;
  for (std::size_t i = 0; i < starts_.size() && starts_[i] < t; ++i) {
    s.push_back(starts_[i]);
    v.push_back(values_[i]);
  }
  if (s.empty()) return constant(0.0);
  if (std::isfinite(t)) {
    s.push_back(t);
    v.push_back(0.0);
  }
  return PiecewiseConstant(s, v).simplified();
}

PiecewiseConstant PiecewiseConstant::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return PiecewiseConstant(starts_, v);
}

PiecewiseConstant PiecewiseConstant::simplified() const {
  std::vector<double> s{starts_[0]}, v{values_[0]};
  for (std::size_t i = 1; i < starts_.size(); ++i) {
    if (values_[i] == v.back()) continue;
    s.push_back(starts_[i]);
    v.push_back(values_[i]);
  }
  return PiecewiseConstant(s, v);
}

PiecewiseConstant combine(const PiecewiseConstant& a, const PiecewiseConstant& b,
                          const std::function<double(double, double)>& op) {
  std::vector<double> s = a.starts();
  s.insert(s.end(), b.starts().begin(), b.starts().end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> v;
  v.reserve(s.size());
  for (double x : s) v.push_back(op(a(x), b(x)));
  return PiecewiseConstant(s, v);
}

std::vector<double> make_grid(std::vector<double> v, double lo, double hi) {
  std::vector<double> g{lo};
  std::sort(v.begin(), v.end());
  for (double x : v)
    if (x > lo && x < hi && x - g.back() > 1e-12 * std::max(1.0, std::abs(x))) g.push_back(x);
  if (hi - g.back() <= 1e-12 * std::max(1.0, std::abs(hi)) && g.size() > 1) g.back() = hi;
  else g.push_back(hi);
  return g;
}

}  // namespace nphgsd
