#pragma once

#include <vector>

#include "hardwall/chain.hpp"
#include "hardwall/grid.hpp"
#include "hardwall/tails.hpp"

namespace hardwall {

// Conditioning the tree on {min over depth-n leaves >= -m(n) + u} reduces,
// along the branch to a depth-l vertex, to a Gaussian-step chain whose
// site-k weight is the survival factor of the subtrees hanging off site k:
// (1/2) F_{n-k} for interior sites, the full F_{n-l} at the branch end.
struct SpineSetup {
  int n = 0;
  int l = 0;
  double u = 0.0;
  int l_u = 0;        // floor(log2 u), 0 for u < 1
  double u_prime = 0.0;  // u - c0 * l_u
  std::vector<double> mu;  // repulsion centers (1 - 2^{-k}) u', k = 0..l
};

SpineSetup make_spine_setup(int n, int l, double u);

// Chain whose forward-backward marginals are the conditional branch law.
ChainSpec build_spine(const TailFamily& tails, const SpineSetup& setup,
                      const GridSpec& grid);

// Site means of a spine DP, k = 0..length.
std::vector<double> conditional_mean_profile(const ChainDP& dp);

// E[leaf - root] of a depth-d tree conditioned on min >= root + a.
double subtree_leaf_mean(const TailFamily& tails, int depth, double a);

// |(-dlog p)(n, u) - site-l_u mean / (1 - 2^{-l_u})| for a spine DP at
// (n, u); the two sides are equal in the continuum.
double derivative_identity_gap(const TailFamily& tails, const ChainDP& dp,
                               int n, double u);

// Tail probabilities of hat h(x) = h(x) - mu_n(x) at |x| = x_depth under
// the hard wall u = m(n), nonzero deviations in both directions.
struct HatTailPoint {
  double u_dev = 0.0;
  double log_upper = 0.0;  // log P(hat h >= u_dev)
  double log_lower = 0.0;  // log P(hat h <= -u_dev)
};

struct HatTailCurve {
  int n = 0;
  int x_depth = 0;
  double mu = 0.0;  // the deterministic profile m(n') (1 - 2^{-|x|} 1{|x| < l_n})
  std::vector<HatTailPoint> points;
};

HatTailCurve hat_h_tails(const TailFamily& tails, int n, int x_depth,
                         const std::vector<double>& u_devs,
                         const GridSpec& grid);

// Cov(h(x), h(y)) under the wall at (n, u) for leaves x, y whose common
// ancestor sits at depth_meet.  Given the ancestor value v the two leaf
// lines are independent with equal conditional mean g(v), so the
// covariance is Var(g(V)) over the spine marginal at depth_meet; dp must
// be a spine DP at the same (n, u) with length >= depth_meet.
double pair_covariance_tree(const TailFamily& tails, const ChainDP& dp,
                            int n, double u, int depth_meet);

// The branch chain recentered around the repulsion profile,
// Y_k = h(k) - mu(k) with mu snapped to the grid; valid while every site
// still sees an order-one wall, l <= l_u - safety.
struct RecenteredSpine {
  SpineSetup setup;
  std::vector<double> mu_snap;      // k = 0..l
  std::vector<double> tilt;         // Gaussian-step cross terms b_k, k = 1..l
  std::vector<LogGridFunction> f;   // -potential / (1 + 1{k=l}), k = 1..l
  ChainSpec chain;                  // Y-coordinate ChainSpec, start 0
};

RecenteredSpine recenter(const TailFamily& tails, const SpineSetup& setup,
                         const GridSpec& y_grid, int safety = 3);

// Homogeneous chain tiling the deepest valid interior recentered potential
// (site l_u - safety).  This extends the localized regime to arbitrary
// lengths, which the finite l_u of desk-scale thresholds cannot reach.
ChainSpec tiled_interior_chain(const TailFamily& tails, int n, double u,
                               int length, const GridSpec& y_grid,
                               int safety = 3);

}  // namespace hardwall
