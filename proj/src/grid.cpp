#include "hardwall/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardwall/errors.hpp"

namespace hardwall {

int GridSpec::nearest_index(double x) const {
  int i = static_cast<int>(std::lround((x - lo) / step));
  return std::clamp(i, 0, count - 1);
}

bool GridSpec::contains(double x) const {
  double slack = 1e-9 * step;
  return x >= lo - slack && x <= hi() + slack;
}

GridSpec GridSpec::from_range(double lo, double hi, double step) {
  if (!(step > 0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    throw ValidationError("bad grid range");
  int count = static_cast<int>(std::ceil((hi - lo) / step - 1e-9)) + 1;
  return GridSpec{lo, step, count};
}

LogGridFunction::LogGridFunction(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (grid_.count != static_cast<int>(values_.size()))
    throw ValidationError("grid count does not match value count");
}

LogGridFunction LogGridFunction::constant(const GridSpec& grid, double value) {
  return LogGridFunction(grid, std::vector<double>(grid.count, value));
}

double LogGridFunction::interp(double x) const {
  double t = grid_.to_index(x);
  if (t < -1e-6 || t > grid_.count - 1 + 1e-6)
    throw ValidationError("interpolation query off grid: x=" + std::to_string(x));
  int i = static_cast<int>(std::floor(t));
  i = std::clamp(i, 0, grid_.count - 2);
  double frac = t - i;
  if (grid_.count == 1) return values_[0];
  if (frac < 1e-9) return values_[i];
  if (frac > 1 - 1e-9) return values_[i + 1];
  double a = values_[i], b = values_[i + 1];
  if (a == kNegInf || b == kNegInf) return kNegInf;
  return a + frac * (b - a);
}

double LogGridFunction::interp_clamped(double x) const {
  if (x <= grid_.lo) return values_.front();
  if (x >= grid_.hi()) return values_.back();
  return interp(x);
}

void LogGridFunction::enforce_nonincreasing() {
  for (int i = grid_.count - 2; i >= 0; --i)
    values_[i] = std::max(values_[i], values_[i + 1]);
}

double LogGridFunction::max_value() const {
  double m = kNegInf;
  for (double v : values_) m = std::max(m, v);
  return m;
}

int LogGridFunction::argmax() const {
  double m = kNegInf;
  int arg = -1;
  for (int i = 0; i < size(); ++i) {
    if (values_[i] > m) {
      m = values_[i];
      arg = i;
    }
  }
  return arg;
}

double LogGridFunction::log_integral() const {
  double m = max_value();
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  int n = size();
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * std::exp(values_[i] - m);
  }
  return m + std::log(acc * grid_.step);
}

void LogGridFunction::check_finite_or_neginf(const char* what) const {
  for (double v : values_) {
    if (std::isnan(v) || v == -kNegInf)
      throw NumericalError(std::string(what) + ": non-finite log value");
  }
}

}  // namespace hardwall
