#pragma once

#include <vector>

#include "hardwall/grid.hpp"

namespace hardwall {

// Limiting potential for the tree free-energy recursion, together with
// numerical stand-ins for the conditions the limit needs: bounded above,
// continuous, and falling off at both ends of the grid.
struct PotentialSpec {
  LogGridFunction g;
  // the grid ends must sit at least this far below the interior maximum
  double edge_drop = 20.0;
  // continuity proxy: largest allowed jump between adjacent grid values
  double max_step_jump = 1.0;

  // Throws ValidationError when a condition fails.
  void validate() const;
};

// Free energy of generation k.  Each generation doubles the natural scale,
// so the curve stores s = 2^k G_k and recovers G_k on demand; g_star and
// u_star track max_u G_k(u), ties broken by the leftmost grid point.
struct FreeEnergyCurve {
  int k = 0;
  LogGridFunction s;
  double g_star = 0.0;
  double u_star = 0.0;

  // G_k on the grid, i.e. s / 2^k.
  LogGridFunction curve() const;
};

// Generation zero: G_0 = g.
FreeEnergyCurve fe_base(const PotentialSpec& pot);

// One generation: G_k(u) = 2^{1-k} log E exp(2^{k-1} G_{k-1}(u + Z)) with a
// standard Gaussian Z, computed entirely on the doubled scale.
FreeEnergyCurve fe_step(const FreeEnergyCurve& prev);

struct GStarRow {
  int k = 0;
  double u_star = 0.0;
  double g_star = 0.0;
  double gap = 0.0;  // |G_k* - G_{k-1}*|
};

struct GStarResult {
  std::vector<GStarRow> rows;  // one per generation run, k = 1..k_reached
  double g_star = 0.0;
  double u_star = 0.0;
  int k_reached = 0;
  double gap = 0.0;
  bool converged = false;
};

// Iterates fe_step until successive maxima settle within tol, or k_max
// generations elapse; the full gap history stays in rows either way.
GStarResult g_star_limit(const PotentialSpec& pot, double tol = 1e-3,
                         int k_max = 24);

// Potential assembled from a limiting tail curve on a u-grid:
// g(s) = tail(-s) - 2^delta s, for delta in [0, 1).  The tail curve must be
// wide enough that the mirrored potential clears the edge-drop requirement.
PotentialSpec brw_theta_potential(double delta,
                                  const LogGridFunction& tail_limit);

}  // namespace hardwall
