#include "hardwall/spine.hpp"

#include <cmath>
#include <string>

#include "hardwall/errors.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/model.hpp"

namespace hardwall {

namespace {

// snap to the grid's lattice so coordinate changes stay index-exact
double snap(double x, double step) { return step * std::round(x / step); }

LogGridFunction spine_weight(const TailFamily& tails, int n, double u, int k,
                             double coeff, double center,
                             const GridSpec& grid) {
  double shift = u - ModelParams::m(n) - center;
  LogGridFunction w = LogGridFunction::constant(grid, 0.0);
  if (n == k) {
    // the depth-0 tail is an indicator; interpolating across its jump would
    // shift the wall by up to one table cell, so evaluate it exactly
    for (int i = 0; i < grid.count; ++i)
      w[i] = shift - grid.point(i) <= 0.0 ? 0.0 : kNegInf;
    return w;
  }
  const LogGridFunction& f = tails.F(n - k);
  for (int i = 0; i < grid.count; ++i)
    w[i] = coeff * f.interp_clamped(shift - grid.point(i));
  return w;
}

}  // namespace

SpineSetup make_spine_setup(int n, int l, double u) {
  if (l < 1 || l > n) throw ValidationError("spine needs 1 <= l <= n");
  SpineSetup s;
  s.n = n;
  s.l = l;
  s.u = u;
  s.l_u = floor_log2_or_zero(u);
  s.u_prime = u - ModelParams::c0() * s.l_u;
  s.mu.resize(l + 1);
  for (int k = 0; k <= l; ++k)
    s.mu[k] = s.u_prime * (1.0 - std::pow(2.0, -k));
  return s;
}

ChainSpec build_spine(const TailFamily& tails, const SpineSetup& setup,
                      const GridSpec& grid) {
  if (setup.n > tails.n_max())
    throw ValidationError("tail family too shallow for this spine");
  // the left-clamped extension of F is exact (probability one); arguments
  // past the right end would silently understate the penalty
  double worst_arg = setup.u - ModelParams::m(setup.n) - grid.lo;
  if (worst_arg > tails.grid().hi() + 1e-9)
    throw ValidationError("chain grid extends below the tail family's range");

  ChainSpec spec;
  spec.grid = grid;
  spec.length = setup.l;
  spec.start = 0.0;
  for (int k = 1; k <= setup.l; ++k) {
    double coeff = k == setup.l ? 1.0 : 0.5;
    spec.log_weight.push_back(
        spine_weight(tails, setup.n, setup.u, k, coeff, 0.0, grid));
  }
  return spec;
}

std::vector<double> conditional_mean_profile(const ChainDP& dp) {
  std::vector<double> means(dp.spec().length + 1);
  for (int k = 0; k <= dp.spec().length; ++k) means[k] = dp.marginal(k).mean;
  return means;
}

double subtree_leaf_mean(const TailFamily& tails, int depth, double a) {
  if (depth < 1 || depth > tails.n_max())
    throw ValidationError("subtree depth outside the tail family");
  const LogGridFunction& f = tails.F(depth);
  double h = tails.grid().step;
  double slope = (f.interp_clamped(a + h) - f.interp_clamped(a - h)) / (2.0 * h);
  return (1.0 - std::pow(2.0, -depth)) * -slope;
}

double derivative_identity_gap(const TailFamily& tails, const ChainDP& dp,
                               int n, double u) {
  int lu = floor_log2_or_zero(u);
  if (lu < 1 || lu > dp.spec().length)
    throw ValidationError("spine too short for the identity depth");
  double lhs = -tails.dlog_p(n, u);
  double rhs = dp.marginal(lu).mean / (1.0 - std::pow(2.0, -lu));
  return std::abs(lhs - rhs);
}

HatTailCurve hat_h_tails(const TailFamily& tails, int n, int x_depth,
                         const std::vector<double>& u_devs,
                         const GridSpec& grid) {
  if (x_depth < 1 || x_depth > n) throw ValidationError("bad vertex depth");
  int ln = floor_log2_or_zero(double(n));
  double mnp = ModelParams::m(n - ln);

  HatTailCurve out;
  out.n = n;
  out.x_depth = x_depth;
  out.mu = x_depth < ln ? mnp * (1.0 - std::pow(2.0, -x_depth)) : mnp;

  SpineSetup setup = make_spine_setup(n, x_depth, ModelParams::m(n));
  ChainDP dp(build_spine(tails, setup, grid));
  const LogGridFunction& d = dp.marginal(x_depth).log_density;
  for (double dev : u_devs) {
    HatTailPoint pt;
    pt.u_dev = dev;
    pt.log_upper = log_tail_mass(d, out.mu + dev, +1);
    pt.log_lower = log_tail_mass(d, out.mu - dev, -1);
    out.points.push_back(pt);
  }
  return out;
}

double pair_covariance_tree(const TailFamily& tails, const ChainDP& dp,
                            int n, double u, int depth_meet) {
  if (depth_meet == 0) return 0.0;  // the root is pinned
  if (depth_meet < 0 || depth_meet > dp.spec().length)
    throw ValidationError("meeting depth outside the spine");
  int n1 = n - depth_meet;
  double shift = u - ModelParams::m(n);

  const LogGridFunction& d = dp.marginal(depth_meet).log_density;
  const GridSpec& g = d.grid();
  double m = d.max_value();
  double s0 = 0, s1 = 0;
  std::vector<double> gv(g.count, 0.0);
  for (int i = 0; i < g.count; ++i) {
    if (d[i] == kNegInf || d[i] < m - 60.0) continue;
    double v = g.point(i);
    gv[i] = n1 == 0 ? v : v + subtree_leaf_mean(tails, n1, shift - v);
    double w = (i == 0 || i == g.count - 1 ? 0.5 : 1.0) * std::exp(d[i] - m);
    s0 += w;
    s1 += w * gv[i];
  }
  double mean = s1 / s0;
  double s2 = 0;
  for (int i = 0; i < g.count; ++i) {
    if (d[i] == kNegInf || d[i] < m - 60.0) continue;
    double w = (i == 0 || i == g.count - 1 ? 0.5 : 1.0) * std::exp(d[i] - m);
    s2 += w * (gv[i] - mean) * (gv[i] - mean);
  }
  return s2 / s0;
}

RecenteredSpine recenter(const TailFamily& tails, const SpineSetup& setup,
                         const GridSpec& y_grid, int safety) {
  if (setup.l > setup.l_u - safety)
    throw ValidationError(
        "recentered spine needs l <= floor(log2 u) - safety; got l = " +
        std::to_string(setup.l) + ", floor(log2 u) = " +
        std::to_string(setup.l_u));
  if (setup.n > tails.n_max())
    throw ValidationError("tail family too shallow for this spine");

  RecenteredSpine out;
  out.setup = setup;
  out.mu_snap.resize(setup.l + 1);
  for (int k = 0; k <= setup.l; ++k)
    out.mu_snap[k] = snap(setup.mu[k], y_grid.step);

  // the Gaussian steps pick up a linear cross term from the deterministic
  // shift; telescoping leaves one tilt per site
  std::vector<double> delta(setup.l + 1, 0.0);
  for (int k = 1; k <= setup.l; ++k)
    delta[k] = out.mu_snap[k] - out.mu_snap[k - 1];

  out.chain.grid = y_grid;
  out.chain.length = setup.l;
  out.chain.start = 0.0;
  out.tilt.resize(setup.l + 1, 0.0);
  for (int k = 1; k <= setup.l; ++k) {
    double coeff = k == setup.l ? 1.0 : 0.5;
    double bk = k < setup.l ? delta[k + 1] - delta[k] : -delta[k];
    out.tilt[k] = bk;
    LogGridFunction w = spine_weight(tails, setup.n, setup.u, k, coeff,
                                     out.mu_snap[k], y_grid);
    LogGridFunction fk = LogGridFunction::constant(y_grid, 0.0);
    for (int i = 0; i < y_grid.count; ++i) {
      double y = y_grid.point(i);
      fk[i] = -(w[i] + bk * y) / (2.0 * coeff);
      w[i] += bk * y;
    }
    out.f.push_back(std::move(fk));
    out.chain.log_weight.push_back(std::move(w));
  }
  return out;
}

ChainSpec tiled_interior_chain(const TailFamily& tails, int n, double u,
                               int length, const GridSpec& y_grid,
                               int safety) {
  int lu = floor_log2_or_zero(u);
  int site = lu - safety;
  if (site < 1)
    throw ValidationError("threshold too small to localize: floor(log2 u) - safety < 1");
  if (length < 1) throw ValidationError("tiled chain needs length >= 1");

  // one valid interior site, replicated: its wall distance 2^{-site} u' is
  // order one, so the potential confines from both sides at every copy
  SpineSetup setup = make_spine_setup(n, site + 1, u);
  double mu_site = snap(setup.mu[site], y_grid.step);
  double d1 = mu_site - snap(setup.mu[site - 1], y_grid.step);
  double d2 = snap(setup.mu[site + 1], y_grid.step) - mu_site;
  double bk = d2 - d1;

  LogGridFunction w = spine_weight(tails, n, u, site, 0.5, mu_site, y_grid);
  for (int i = 0; i < y_grid.count; ++i) w[i] += bk * y_grid.point(i);

  ChainSpec spec;
  spec.grid = y_grid;
  spec.length = length;
  spec.start = 0.0;
  spec.log_weight.assign(length, w);
  return spec;
}

}  // namespace hardwall
