#pragma once

#include <limits>
#include <vector>

namespace hardwall {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Uniform grid lo, lo + step, ..., lo + step * (count - 1).
struct GridSpec {
  double lo = 0.0;
  double step = 0.01;
  int count = 0;

  double hi() const { return lo + step * (count - 1); }
  double point(int i) const { return lo + step * i; }
  double to_index(double x) const { return (x - lo) / step; }
  int nearest_index(double x) const;
  bool contains(double x) const;

  // Inclusive range [lo, hi]; hi is stretched to the next grid point if
  // (hi - lo) is not an exact multiple of step.
  static GridSpec from_range(double lo, double hi, double step);

  bool operator==(const GridSpec&) const = default;
};

// A function sampled on a GridSpec, stored as log-values.  -inf marks an
// exact zero; +inf and NaN are never allowed.
class LogGridFunction {
 public:
  LogGridFunction() = default;
  LogGridFunction(GridSpec grid, std::vector<double> values);
  static LogGridFunction constant(const GridSpec& grid, double value);

  const GridSpec& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Linear interpolation of the log-values.  Off the grid by more than a
  // rounding slack it throws; a -inf neighbour makes the result -inf unless
  // the query sits exactly on the finite node.
  double interp(double x) const;
  // Same, but queries beyond the ends evaluate to the end values.
  double interp_clamped(double x) const;

  // Running max from the right: enforces a nonincreasing sequence.
  void enforce_nonincreasing();

  double max_value() const;
  int argmax() const;  // leftmost index attaining the max; -1 if all -inf

  // log of the trapezoid integral of exp(values) over the grid.
  double log_integral() const;

  // Throws NumericalError on +inf or NaN entries.
  void check_finite_or_neginf(const char* what) const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

}  // namespace hardwall
