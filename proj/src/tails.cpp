#include "hardwall/tails.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardwall/errors.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/model.hpp"

namespace hardwall {

LogGridFunction TailCurve::half_log_tail() const {
  LogGridFunction h = log_tail;
  for (double& v : h.values()) v *= 0.5;
  return h;
}

TailCurve tail_base(const GridSpec& grid) {
  std::vector<double> v(grid.count);
  for (int i = 0; i < grid.count; ++i) v[i] = grid.point(i) <= 0.0 ? 0.0 : kNegInf;
  return TailCurve{0, LogGridFunction(grid, std::move(v))};
}

TailCurve tail_step(const TailCurve& prev, const ConvOptions& opt) {
  const GridSpec& g = prev.log_tail.grid();
  if (prev.n == 0) {
    std::vector<double> v(g.count);
    for (int i = 0; i < g.count; ++i) v[i] = 2.0 * log_normal_cdf(-g.point(i));
    return TailCurve{1, LogGridFunction(g, std::move(v))};
  }
  // one generation of the two-child recursion: average the child tail over
  // the branching displacement, then square (factor 2 in log space)
  LogGridFunction next = log_convolve_gaussian(prev.log_tail, 1.0, opt);
  for (double& v : next.values()) v *= 2.0;
  // a tail probability cannot grow with the threshold or exceed one; clip
  // quadrature noise, which the squaring otherwise doubles every generation
  for (double& v : next.values()) v = std::min(v, 0.0);
  // The squaring doubles any plateau residue each generation, so a value a
  // few ulp below zero grows into a macroscopic deficit within ~50 levels;
  // whether the quadrature lands at or just under zero on the flat plateau
  // is last-ulp luck that varies with the grid.  Snapping everything within
  // kPlateauSnap of zero back to exactly zero makes the plateau absorbing.
  // The threshold sits far above summation noise (~1e-13) and far below any
  // probability scale the tables resolve.
  constexpr double kPlateauSnap = 1e-11;
  for (double& v : next.values())
    if (v > -kPlateauSnap) v = 0.0;
  next.enforce_nonincreasing();
  next.check_finite_or_neginf("tail_step");
  return TailCurve{prev.n + 1, std::move(next)};
}

TailFamily TailFamily::build(int n_max, double u_max, double step,
                             const ConvOptions& opt) {
  if (n_max < 1) throw ValidationError("tail family needs n_max >= 1");
  if (!(u_max > 0)) throw ValidationError("tail family needs u_max > 0");
  GridSpec g = GridSpec::from_range(-(ModelParams::m(n_max) + 20.0), u_max + 20.0, step);
  return build_on(g, n_max, opt);
}

TailFamily TailFamily::build_on(const GridSpec& grid, int n_max,
                                const ConvOptions& opt) {
  if (n_max < 1) throw ValidationError("tail family needs n_max >= 1");
  TailFamily fam;
  fam.grid_ = grid;
  fam.n_max_ = n_max;
  fam.F_.reserve(n_max + 1);
  TailCurve cur = tail_base(grid);
  fam.F_.push_back(cur.log_tail);
  for (int n = 1; n <= n_max; ++n) {
    cur = tail_step(cur, opt);
    fam.F_.push_back(cur.log_tail);
  }
  return fam;
}

const LogGridFunction& TailFamily::F(int n) const {
  if (n < 0 || n > n_max_) throw ValidationError("depth outside family: " + std::to_string(n));
  return F_[n];
}

PointEval TailFamily::log_p_eval(int n, double u) const {
  const LogGridFunction& f = F(n);
  double v = u - ModelParams::m(n);
  if (v <= grid_.lo) return {f[0], true};
  if (v > grid_.hi() + 1e-9 * grid_.step)
    throw ValidationError("u beyond the family grid: u=" + std::to_string(u));
  return {f.interp(std::min(v, grid_.hi())), false};
}

double TailFamily::log_p(int n, double u) const { return log_p_eval(n, u).value; }

double TailFamily::dlog_p(int n, double u) const {
  double h = grid_.step;
  return (log_p(n, u + h) - log_p(n, u - h)) / (2.0 * h);
}

double TailFamily::log_q(int n, double u) const {
  double lp = log_p(n, -u);
  if (lp == kNegInf) return 0.0;  // the complement has full mass
  double q = -std::expm1(lp);
  return q <= 0.0 ? kNegInf : std::log(q);
}

double TailFamily::theta_residual(int n, double u) const {
  if (!(u > 0)) throw ValidationError("theta residual needs u > 0");
  double up = u - ModelParams::c0() * floor_log2_or_zero(u);
  return (-log_p(n, u) - 0.5 * up * up) / u;
}

ThetaProfile theta_profile(const TailFamily& family, int n,
                           const std::vector<double>& us) {
  ThetaProfile out;
  out.n = n;
  out.points.reserve(us.size());
  for (double u : us)
    out.points.push_back({u, frac_log2(u), family.theta_residual(n, u)});
  out.hard_wall_residual = family.theta_residual(n, ModelParams::m(n));
  return out;
}

LogGridFunction p_infinity_curve(const TailFamily& family, double u_lo,
                                 double u_hi, double* cauchy_gap) {
  int n = family.n_max();
  GridSpec g = GridSpec::from_range(u_lo, u_hi, family.grid().step);
  std::vector<double> v(g.count);
  for (int i = 0; i < g.count; ++i) v[i] = family.log_p(n, g.point(i));
  if (cauchy_gap) {
    double gap = 0.0;
    for (double u = -5.0; u <= 5.0; u += g.step) {
      double a = family.log_p(n, u), b = family.log_p(n - 1, u);
      gap = std::max(gap, std::abs(a - b));
    }
    *cauchy_gap = gap;
  }
  return LogGridFunction(g, std::move(v));
}

}  // namespace hardwall
