#pragma once

#include <vector>

#include "hardwall/chain.hpp"
#include "hardwall/grid.hpp"

namespace hardwall::oracle {

// Cross-check quadratures for small instances.  Everything here runs in
// linear probability space with composite Simpson sums on a refined grid,
// deliberately sharing no code with the log-space engine.

// Tail probabilities for depths 1..n_max (n_max <= 4).  The refined grid
// halves the family step and keeps the same origin, so family nodes are
// oracle nodes.  Depth 1 is seeded by the closed-form square of the
// standard normal upper tail.
class TailTables {
 public:
  TailTables(const GridSpec& family_grid, int n_max, double z_half = 12.0);
  const GridSpec& grid() const { return grid_; }
  // linear-space probability; 1 left of the grid, 0 right of it
  double value(int depth, double v) const;
  double log_value(int depth, double v) const;

 private:
  GridSpec grid_;
  std::vector<std::vector<double>> p_;  // [depth][node], depth >= 1
};

// Brute-force fixed-length chain summary on the chain's own grid.
struct ChainBruteResult {
  double log_z = 0.0;
  std::vector<double> mean, var;                  // sites 1..length
  std::vector<std::vector<double>> cov;           // cov[j][k], sites 1..length
};

ChainBruteResult chain_brute(const ChainSpec& spec);

// Law of h(k+1) given h(k) = v under the same brute-force path, normalized
// on the chain grid.
LogGridFunction chain_brute_kernel(const ChainSpec& spec, int k, double v);

}  // namespace hardwall::oracle
