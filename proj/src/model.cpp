#include "hardwall/model.hpp"

#include <cmath>

#include "hardwall/errors.hpp"

namespace hardwall {

double ModelParams::c0() { return std::sqrt(2.0 * std::log(2.0)); }

double ModelParams::m(int n) {
  if (n < 0) throw ValidationError("m(n) needs n >= 0");
  if (n == 0) return 0.0;
  return c0() * n - 1.5 * std::log(double(n)) / c0();
}

double frac_log2(double s) {
  if (!(s > 0)) return 0.0;
  double l = std::log2(s);
  return l - std::floor(l);
}

int floor_log2_or_zero(double u) {
  if (u < 1.0) return 0;
  return static_cast<int>(std::floor(std::log2(u)));
}

double rho(int n, int k) {
  if (n < 1 || k < 0 || k > n) throw ValidationError("rho(n, k) needs 0 <= k <= n, n >= 1");
  return (1.0 - std::ldexp(1.0, -k)) / (1.0 - std::ldexp(1.0, -n));
}

std::vector<double> harmonic_profile(double v, int k) {
  if (k < 1) throw ValidationError("harmonic_profile needs k >= 1");
  std::vector<double> mu(k + 1);
  double denom = 1.0 - std::ldexp(1.0, -k);
  for (int d = 0; d <= k; ++d) mu[d] = v * (1.0 - std::ldexp(1.0, -d)) / denom;
  return mu;
}

double dirichlet_energy(double v, int k) {
  if (k < 1) throw ValidationError("dirichlet_energy needs k >= 1");
  return 0.5 * v * v * (1.0 + 1.0 / (std::ldexp(1.0, k) - 1.0));
}

}  // namespace hardwall
