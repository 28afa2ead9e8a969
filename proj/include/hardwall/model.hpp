#pragma once

#include <cstdint>
#include <vector>

namespace hardwall {

// Branching random walk on the binary tree with standard Gaussian steps;
// the wall sits at -m(n) + u below the depth-n leaves.
struct ModelParams {
  // c0 = sqrt(2 log 2), the leading-order speed of the minimum.
  static double c0();
  // m(n) = c0 n - (3/2) log(n) / c0, with m(0) = 0.
  static double m(int n);
};

// Fractional part of log2 s for s > 0; 0 otherwise.
double frac_log2(double s);

// floor(log2 u) for u >= 1, else 0.
int floor_log2_or_zero(double u);

// Variance ratio rho(n, k) = (1 - 2^-k) / (1 - 2^-n) for 0 <= k <= n, n >= 1.
double rho(int n, int k);

// Tree-harmonic interpolation between 0 at the root and v at depth k:
// mu(d) = v (1 - 2^-d) / (1 - 2^-k), returned for d = 0..k.
std::vector<double> harmonic_profile(double v, int k);

// Dirichlet energy of that profile extended by the constant v below depth k:
// (v^2 / 2) (1 + 1/(2^k - 1)).
double dirichlet_energy(double v, int k);

// Node address on the binary tree: index runs over 0..2^depth-1 at each
// depth, and heap order places depth d at offsets 2^d - 1 + index.
struct TreeCoord {
  int depth = 0;
  std::uint64_t index = 0;
  std::uint64_t heap_index() const { return (1ull << depth) - 1 + index; }
};

}  // namespace hardwall
