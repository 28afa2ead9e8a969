#pragma once

#include <vector>

#include "hardwall/grid.hpp"
#include "hardwall/log_conv.hpp"

namespace hardwall {

// F_n(v) = log P(min over depth-n leaves >= v), in absolute coordinates.
// One smoothing step followed by doubling advances the depth: the two
// subtrees below the root are independent copies shifted by the root step.
struct TailCurve {
  int n = 0;
  LogGridFunction log_tail;

  // log of the per-subtree factor, F_n / 2.
  LogGridFunction half_log_tail() const;
};

// Depth 0: the indicator log 1{v <= 0}.
TailCurve tail_base(const GridSpec& grid);

// Depth n -> n+1.  The step off the indicator base is evaluated in closed
// form, log Phi(-v) per subtree, because quadrature across the jump would
// cost O(step) accuracy that the rest of the recursion never recovers.
TailCurve tail_step(const TailCurve& prev, const ConvOptions& opt = {});

struct PointEval {
  double value = 0.0;
  bool clamped = false;  // query fell left of the grid, end value used
};

// The whole family F_0..F_n on one grid.  The default grid is
// [-(m(n)+20), u_max+20] so that v = u - m(n) lands exactly on a node
// whenever u is a multiple of the step.
class TailFamily {
 public:
  static TailFamily build(int n_max, double u_max, double step = 0.01,
                          const ConvOptions& opt = {});
  static TailFamily build_on(const GridSpec& grid, int n_max,
                             const ConvOptions& opt = {});

  const GridSpec& grid() const { return grid_; }
  int n_max() const { return n_max_; }
  const LogGridFunction& F(int n) const;

  // log p_n(u) = F_n(u - m(n)).  Queries left of the grid clamp to the end
  // value (the probability is 1 up to rounding there); queries right of the
  // grid are a contract violation.
  double log_p(int n, double u) const;
  PointEval log_p_eval(int n, double u) const;

  // d/du log p_n(u), central difference with one grid step.
  double dlog_p(int n, double u) const;

  // log q_n(u) = log(1 - p_n(-u)).
  double log_q(int n, double u) const;

  // [-log p_n(u) - u'^2/2] / u with u' = u - c0 * floor(log2 u); needs u > 0.
  double theta_residual(int n, double u) const;

 private:
  GridSpec grid_;
  int n_max_ = 0;
  std::vector<LogGridFunction> F_;
};

struct ThetaPoint {
  double u = 0.0;
  double frac = 0.0;  // fractional part of log2 u
  double residual = 0.0;
};

struct ThetaProfile {
  int n = 0;
  std::vector<ThetaPoint> points;
  double hard_wall_residual = 0.0;  // residual at u = m(n), the exact wall
};

ThetaProfile theta_profile(const TailFamily& family, int n,
                           const std::vector<double>& us);

// log p at the deepest available depth resampled to a u-grid, plus the sup
// gap against the previous depth over |u| <= 5 as a convergence witness.
LogGridFunction p_infinity_curve(const TailFamily& family, double u_lo,
                                 double u_hi, double* cauchy_gap = nullptr);

}  // namespace hardwall
