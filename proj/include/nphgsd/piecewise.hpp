#pragma once
#include <functional>
#include <vector>

namespace nphgsd {

// Step function on [0, inf) with right-open pieces [s_i, s_{i+1}).
// The last piece extends to infinity.
class PiecewiseConstant {
public:
  PiecewiseConstant() : PiecewiseConstant({0.0}, {0.0}) {}
  PiecewiseConstant(std::vector<double> starts, std::vector<double> values);

  static PiecewiseConstant constant(double value);
  // durations of consecutive pieces; the last duration may be infinite
  static PiecewiseConstant from_durations(const std::vector<double>& durations,
                                          const std::vector<double>& values);

  double operator()(double t) const;
  // integral over [0, t]
  double integral(double t) const;
  double integral(double a, double b) const { return integral(b) - integral(a); }
  // smallest t with integral(t) = y, for a nonnegative function
  double inverse_integral(double y) const;

  const std::vector<double>& starts() const { return starts_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return starts_.size(); }
  std::size_t piece(double t) const;

  // zero from t onwards
  PiecewiseConstant truncated(double t) const;
  PiecewiseConstant scaled(double c) const;
  // adjacent pieces with equal values merged
  PiecewiseConstant simplified() const;

private:
  std::vector<double> starts_;
  std::vector<double> values_;
  std::vector<double> cum_;  // integral up to starts_[i]
};

// pointwise op(a(t), b(t)) on the union of both grids
PiecewiseConstant combine(const PiecewiseConstant& a, const PiecewiseConstant& b,
                          const std::function<double(double, double)>& op);

// sorted unique points of v inside (lo, hi), with lo and hi added
std::vector<double> make_grid(std::vector<double> v, double lo, double hi);

}  // namespace nphgsd
