#include "hardwall/gaussian.hpp"

#include <cmath>

namespace hardwall {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLog2Pi = 1.8378770664093455;
}  // namespace

double log_normal_pdf(double x, double var) {
  return -0.5 * (x * x / var + kLog2Pi + std::log(var));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_normal_cdf(double x) {
  if (x > 8.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
  if (x > -26.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
  // Phi(x) = phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - ...);
  // at x = -26 the first omitted term is below 1e-12 relative.
  double inv2 = 1.0 / (x * x);
  double series =
      1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * 105.0)));
  return -0.5 * x * x - 0.5 * kLog2Pi - std::log(-x) + std::log(series);
}

}  // namespace hardwall
