#include "hardwall/free_energy.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hardwall/errors.hpp"
#include "hardwall/log_conv.hpp"

namespace hardwall {

void PotentialSpec::validate() const {
  if (g.size() < 8) throw ValidationError("potential needs at least 8 grid points");
  g.check_finite_or_neginf("potential");
  double top = g.max_value();
  if (top == kNegInf) throw ValidationError("potential is -inf everywhere");
  if (g[0] > top - edge_drop || g[g.size() - 1] > top - edge_drop)
    throw ValidationError(
        "potential does not fall off at the grid ends; widen the grid");
  for (int i = 0; i + 1 < g.size(); ++i) {
    double a = g[i], b = g[i + 1];
    if (a == kNegInf && b == kNegInf) continue;
    if (a == kNegInf || b == kNegInf || std::abs(b - a) > max_step_jump)
      throw ValidationError("potential jumps by more than " +
                            std::to_string(max_step_jump) +
                            " between adjacent grid points near u = " +
                            std::to_string(g.grid().point(i)));
  }
}

LogGridFunction FreeEnergyCurve::curve() const {
  LogGridFunction out = s;
  double scale = std::ldexp(1.0, -k);
  for (double& v : out.values()) v *= scale;
  return out;
}

FreeEnergyCurve fe_base(const PotentialSpec& pot) {
  pot.validate();
  FreeEnergyCurve c;
  c.k = 0;
  c.s = pot.g;
  c.g_star = c.s.max_value();
  c.u_star = c.s.grid().point(c.s.argmax());
  return c;
}

FreeEnergyCurve fe_step(const FreeEnergyCurve& prev) {
  if (prev.s.size() == 0) throw ValidationError("empty free-energy curve");
  FreeEnergyCurve next;
  next.k = prev.k + 1;
  // On the doubled scale the recursion is s_k = 2 log E exp(s_{k-1}(u + Z)):
  // the convolution routine already recentres on the integrand peak, which
  // is exactly the running-max rescue the raw values need once |s| is large.
  LogGridFunction avg = log_convolve_gaussian(prev.s, 1.0);
  for (double& v : avg.values()) v *= 2.0;
  avg.check_finite_or_neginf("free-energy curve");
  next.s = std::move(avg);
  double scale = std::ldexp(1.0, -next.k);
  next.g_star = next.s.max_value() * scale;
  next.u_star = next.s.grid().point(next.s.argmax());
  return next;
}

GStarResult g_star_limit(const PotentialSpec& pot, double tol, int k_max) {
  if (!(tol > 0.0)) throw ValidationError("g_star_limit needs tol > 0");
  if (k_max < 1) throw ValidationError("g_star_limit needs k_max >= 1");
  FreeEnergyCurve cur = fe_base(pot);
  GStarResult out;
  for (int k = 1; k <= k_max && !out.converged; ++k) {
    FreeEnergyCurve next = fe_step(cur);
    double gap = std::abs(next.g_star - cur.g_star);
    out.rows.push_back({k, next.u_star, next.g_star, gap});
    out.converged = gap < tol;
    cur = std::move(next);
  }
  out.g_star = cur.g_star;
  out.u_star = cur.u_star;
  out.k_reached = cur.k;
  out.gap = out.rows.back().gap;
  return out;
}

PotentialSpec brw_theta_potential(double delta,
                                  const LogGridFunction& tail_limit) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw ValidationError("theta potential needs delta in [0, 1)");
  const GridSpec& ug = tail_limit.grid();
  if (ug.count < 8)
    throw ValidationError("tail curve needs at least 8 grid points");
  // mirror by index: s_i = -u_{count-1-i}, so no interpolation enters
  GridSpec sg{-ug.hi(), ug.step, ug.count};
  std::vector<double> vals(ug.count);
  double rate = std::pow(2.0, delta);
  for (int i = 0; i < ug.count; ++i) {
    double tail = tail_limit[ug.count - 1 - i];
    vals[i] = tail == kNegInf ? kNegInf : tail - rate * sg.point(i);
  }
  PotentialSpec pot;
  pot.g = LogGridFunction(sg, std::move(vals));
  pot.validate();
  return pot;
}

}  // namespace hardwall
