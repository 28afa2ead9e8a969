#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace hardwall {

// One draw of the field over the full depth-n binary tree, heap-ordered:
// node (d, i) sits at values[2^d - 1 + i] and the children of heap index j
// are 2j+1 and 2j+2.  log_weight is 0 for plain draws and carries the
// change-of-measure correction for tilted ones.
struct TreeSample {
  int n = 0;
  std::vector<double> values;
  double log_weight = 0.0;
};

// Full trees in memory stop here; the DP modules cover larger n.
inline constexpr int kMaxTreeDepth = 24;

TreeSample sample_tree(int n, std::uint64_t seed);

// Shift of the field by the tree-harmonic interpolation up to height v at
// depth k, extended by the constant v below.  The shift is harmonic away
// from depth k, so the correction weight only sees the field there.
struct TiltPlan {
  int k = 0;
  double v = 0.0;
  std::vector<double> mu;  // profile by depth, mu[0..k]
  double energy = 0.0;     // half the Dirichlet form of the extended shift
};

TiltPlan make_tilt_plan(int k, double v);

// Draw h, output h + shift with the weight that makes weighted expectations
// of the output reproduce plain expectations of h.
TreeSample sample_tilted(int n, const TiltPlan& plan, std::uint64_t seed);

enum class McMethod { naive, tilted };

struct PEstimate {
  double log_estimate = 0.0;
  double std_error = 0.0;  // linear scale
  double ess = 0.0;
  long trials = 0;
  long accepted = 0;
  // no trial cleared the wall: log_estimate is only a rule-of-three bound
  bool zero_acceptance = false;
};

// P(every leaf clears the wall -m(n) + u), either by direct indicator
// averaging or by importance sampling tilted to height u' + tilt_offset at
// depth tilt_depth (0 picks the depth automatically); the tilted method
// needs u > 1.
PEstimate estimate_p(int n, double u, McMethod method, long trials,
                     std::uint64_t seed, double tilt_offset = 1.0,
                     int tilt_depth = 0);

struct ConditionalEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  long trials = 0;
  long accepted = 0;
  bool reliable = false;  // ess reached the floor
};

// Self-normalized estimate of E[statistic | every leaf clears the wall].
// The statistic sees the complete accepted tree.
ConditionalEstimate estimate_conditional(
    int n, double u, const std::function<double(const TreeSample&)>& statistic,
    McMethod method, long trials, std::uint64_t seed, double tilt_offset = 1.0,
    double ess_floor = 50.0, int tilt_depth = 0);

}  // namespace hardwall
