#include "hardwall/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardwall/errors.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/rng.hpp"

namespace hardwall {

namespace {

LogGridFunction add(const LogGridFunction& a, const LogGridFunction& b) {
  LogGridFunction out = a;
  for (int i = 0; i < out.size(); ++i) {
    // -inf dominates; the sum of two -inf stays -inf rather than NaN
    out[i] = (a[i] == kNegInf || b[i] == kNegInf) ? kNegInf : a[i] + b[i];
  }
  return out;
}

void normalize_in_place(LogGridFunction& d, const char* what) {
  double z = d.log_integral();
  if (!std::isfinite(z)) throw NumericalError(std::string(what) + ": no mass on the grid");
  for (double& v : d.values())
    if (v != kNegInf) v -= z;
}

double trapezoid_weight(int i, int count) {
  return (i == 0 || i == count - 1) ? 0.5 : 1.0;
}

// mean and variance of a normalized log-density by linear-space quadrature
void moments(const LogGridFunction& d, double* mean, double* var) {
  const GridSpec& g = d.grid();
  double m = d.max_value();
  double s0 = 0, s1 = 0;
  for (int i = 0; i < g.count; ++i) {
    if (d[i] == kNegInf) continue;
    double w = trapezoid_weight(i, g.count) * std::exp(d[i] - m);
    s0 += w;
    s1 += w * g.point(i);
  }
  double mu = s1 / s0;
  double s2 = 0;
  for (int i = 0; i < g.count; ++i) {
    if (d[i] == kNegInf) continue;
    double w = trapezoid_weight(i, g.count) * std::exp(d[i] - m);
    double dx = g.point(i) - mu;
    s2 += w * dx * dx;
  }
  *mean = mu;
  *var = s2 / s0;
}

// inverse-CDF draw from a log-density, piecewise linear in linear space
double draw_from_log_density(const LogGridFunction& ld, double u01) {
  const GridSpec& g = ld.grid();
  double m = ld.max_value();
  if (m == kNegInf) throw NumericalError("sampling from an empty density");
  double total = 0.0;
  for (int i = 0; i + 1 < g.count; ++i) {
    double da = ld[i] == kNegInf ? 0.0 : std::exp(ld[i] - m);
    double db = ld[i + 1] == kNegInf ? 0.0 : std::exp(ld[i + 1] - m);
    total += 0.5 * (da + db);
  }
  double target = u01 * total;
  for (int i = 0; i + 1 < g.count; ++i) {
    double da = ld[i] == kNegInf ? 0.0 : std::exp(ld[i] - m);
    double db = ld[i + 1] == kNegInf ? 0.0 : std::exp(ld[i + 1] - m);
    double cell = 0.5 * (da + db);
    if (target > cell) {
      target -= cell;
      continue;
    }
    if (cell <= 0.0) continue;
    double t;
    double slope = db - da;
    if (std::abs(slope) < 1e-14 * (da + db)) {
      t = target / cell;
    } else {
      t = (-da + std::sqrt(da * da + 2.0 * slope * target)) / slope;
    }
    return g.point(i) + std::clamp(t, 0.0, 1.0) * g.step;
  }
  return g.hi();
}

// grid-node probability masses of a log-density
std::vector<double> node_masses(const LogGridFunction& ld) {
  const GridSpec& g = ld.grid();
  double m = ld.max_value();
  std::vector<double> p(g.count, 0.0);
  double total = 0.0;
  for (int i = 0; i < g.count; ++i) {
    if (ld[i] == kNegInf) continue;
    p[i] = trapezoid_weight(i, g.count) * std::exp(ld[i] - m);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

int draw_node(const std::vector<double>& p, double u01) {
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u01 < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

void ChainSpec::validate() const {
  if (length < 1) throw ValidationError("chain length must be >= 1");
  if (grid.count < 8) throw ValidationError("chain grid too small");
  if (!(step_var > 0)) throw ValidationError("chain step variance must be positive");
  if (static_cast<int>(log_weight.size()) != length)
    throw ValidationError("chain needs one site weight per site 1..length");
  for (const auto& w : log_weight)
    if (!(w.grid() == grid)) throw ValidationError("site weight grid mismatch");
  int idx = grid.nearest_index(start);
  if (idx < 1 || idx > grid.count - 2 || std::abs(grid.point(idx) - start) > 0.51 * grid.step)
    throw ValidationError("chain start must lie inside the grid");
}

ChainDP::ChainDP(ChainSpec spec, const ConvOptions& opt)
    : spec_(std::move(spec)), opt_(opt) {
  spec_.validate();
  const GridSpec& g = spec_.grid;
  const int L = spec_.length;

  alpha_.resize(L + 1);
  beta_.resize(L + 1);

  {
    std::vector<double> a1(g.count);
    for (int i = 0; i < g.count; ++i)
      a1[i] = log_normal_pdf(g.point(i) - spec_.start, spec_.step_var);
    alpha_[1] = add(LogGridFunction(g, std::move(a1)), spec_.log_weight[0]);
  }
  for (int k = 2; k <= L; ++k)
    alpha_[k] = add(log_convolve_gaussian(alpha_[k - 1], spec_.step_var, opt_),
                    spec_.log_weight[k - 1]);

  beta_[L] = LogGridFunction::constant(g, 0.0);
  for (int k = L - 1; k >= 0; --k)
    beta_[k] = log_convolve_gaussian(add(beta_[k + 1], spec_.log_weight[k]),
                                     spec_.step_var, opt_);

  log_z_ = alpha_[L].log_integral();
  if (!std::isfinite(log_z_))
    throw NumericalError("infeasible chain: zero total mass");

  marg_.resize(L + 1);
  {
    // deterministic start: a single-node spike carrying unit mass
    std::vector<double> spike(g.count, kNegInf);
    spike[g.nearest_index(spec_.start)] = -std::log(g.step);
    marg_[0].log_density = LogGridFunction(g, std::move(spike));
    marg_[0].mean = spec_.start;
    marg_[0].var = 0.0;
  }
  for (int k = 1; k <= L; ++k) {
    LogGridFunction d = add(alpha_[k], beta_[k]);
    normalize_in_place(d, "site marginal");
    moments(d, &marg_[k].mean, &marg_[k].var);
    marg_[k].log_density = std::move(d);
  }
}

const LogGridFunction& ChainDP::alpha(int k) const {
  if (k < 1 || k > spec_.length) throw ValidationError("alpha index out of range");
  return alpha_[k];
}

const LogGridFunction& ChainDP::beta(int k) const {
  if (k < 0 || k > spec_.length) throw ValidationError("beta index out of range");
  return beta_[k];
}

const SiteMarginal& ChainDP::marginal(int k) const {
  if (k < 0 || k > spec_.length) throw ValidationError("marginal index out of range");
  return marg_[k];
}

LogGridFunction ChainDP::step_kernel(int k, double v) const {
  if (k < 0 || k >= spec_.length) throw ValidationError("step kernel needs 0 <= k < length");
  const GridSpec& g = spec_.grid;
  if (!g.contains(v)) throw ValidationError("step kernel source off grid");
  std::vector<double> t(g.count);
  const LogGridFunction& w = spec_.log_weight[k];
  const LogGridFunction& b = beta_[k + 1];
  for (int i = 0; i < g.count; ++i) {
    double lw = w[i], lb = b[i];
    t[i] = (lw == kNegInf || lb == kNegInf)
               ? kNegInf
               : log_normal_pdf(g.point(i) - v, spec_.step_var) + lw + lb;
  }
  LogGridFunction out(g, std::move(t));
  normalize_in_place(out, "step kernel");
  return out;
}

double ChainDP::pair_covariance(int k1, int k2) const {
  if (k1 > k2) std::swap(k1, k2);
  if (k1 < 0 || k2 > spec_.length) throw ValidationError("covariance index out of range");
  if (k1 == 0) return 0.0;
  if (k1 == k2) return marg_[k1].var;

  const GridSpec& g = spec_.grid;
  // propagate E[(h(k2) - lo) | h(j) = w] backwards in log space; the shift
  // by the grid's left end keeps the propagated quantity nonnegative
  LogGridFunction w = beta_[k2];
  for (int i = 0; i < g.count; ++i) {
    double off = g.point(i) - g.lo;
    w[i] = (w[i] == kNegInf || off <= 0.0) ? kNegInf : w[i] + std::log(off);
  }
  for (int j = k2 - 1; j >= k1; --j)
    w = log_convolve_gaussian(add(w, spec_.log_weight[j]), spec_.step_var, opt_);

  LogGridFunction num = add(alpha_[k1], w);
  LogGridFunction den = add(alpha_[k1], beta_[k1]);
  double mn = num.max_value(), md = den.max_value();
  double s1 = 0.0, s0 = 0.0;
  for (int i = 0; i < g.count; ++i) {
    double tw = trapezoid_weight(i, g.count);
    if (num[i] != kNegInf) s1 += tw * g.point(i) * std::exp(num[i] - mn);
    if (den[i] != kNegInf) s0 += tw * std::exp(den[i] - md);
  }
  double cross = std::exp(mn - md) * s1 / s0;  // E[h(k1) (h(k2) - lo)]
  return cross - marg_[k1].mean * (marg_[k2].mean - g.lo);
}

std::vector<double> ChainDP::tv_curve(int k0, double v, double v2, int horizon) const {
  if (k0 < 0 || horizon < 0 || k0 + horizon > spec_.length)
    throw ValidationError("tv curve range exceeds the chain");
  const GridSpec& g = spec_.grid;
  if (!g.contains(v) || !g.contains(v2))
    throw ValidationError("tv curve start off grid");

  auto first_step = [&](double from) {
    std::vector<double> t(g.count);
    const LogGridFunction& wt = spec_.log_weight[k0];
    const LogGridFunction& b = beta_[k0 + 1];
    for (int i = 0; i < g.count; ++i)
      t[i] = (wt[i] == kNegInf || b[i] == kNegInf)
                 ? kNegInf
                 : log_normal_pdf(g.point(i) - from, spec_.step_var) + wt[i] + b[i];
    LogGridFunction out(g, std::move(t));
    normalize_in_place(out, "tv flow");
    return out;
  };
  auto advance = [&](const LogGridFunction& rho, int site) {
    // condition out the current lookahead, step, and reweight with the next
    LogGridFunction bare = rho;
    const LogGridFunction& bprev = beta_[site];
    for (int i = 0; i < g.count; ++i)
      if (bare[i] != kNegInf) bare[i] -= bprev[i];
    LogGridFunction out = log_convolve_gaussian(bare, spec_.step_var, opt_);
    out = add(out, add(spec_.log_weight[site], beta_[site + 1]));
    normalize_in_place(out, "tv flow");
    return out;
  };
  auto tv_between = [&](const LogGridFunction& a, const LogGridFunction& b) {
    double acc = 0.0;
    for (int i = 0; i < g.count; ++i) {
      double x = a[i], y = b[i];
      if (x == kNegInf && y == kNegInf) continue;
      double hibound = std::max(x, y), gap = std::abs(x - y);
      double diff = (x == kNegInf || y == kNegInf)
                        ? std::exp(hibound)
                        : std::exp(hibound) * -std::expm1(-gap);
      acc += trapezoid_weight(i, g.count) * diff;
    }
    return 0.5 * acc * g.step;
  };

  std::vector<double> tv(horizon + 1, 0.0);
  tv[0] = v == v2 ? 0.0 : 1.0;
  if (horizon == 0) return tv;
  LogGridFunction fa = first_step(v), fb = first_step(v2);
  tv[1] = tv_between(fa, fb);
  for (int j = 2; j <= horizon; ++j) {
    int site = k0 + j - 1;  // stepping from site to site+1
    fa = advance(fa, site);
    fb = advance(fb, site);
    tv[j] = tv_between(fa, fb);
  }
  return tv;
}

std::vector<std::vector<double>> ChainDP::sample_paths(std::uint64_t seed,
                                                       int n_paths) const {
  if (n_paths < 1) throw ValidationError("need at least one path");
  std::vector<std::vector<double>> paths(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    Xoshiro256pp rng = Xoshiro256pp::seeded(mix_seed(seed, p));
    std::vector<double>& path = paths[p];
    path.resize(spec_.length + 1);
    path[0] = spec_.start;
    for (int k = 0; k < spec_.length; ++k)
      path[k + 1] = draw_from_log_density(step_kernel(k, path[k]), rng.uniform01());
  }
  return paths;
}

CouplingResult ChainDP::coupling_experiment(double v, double v2,
                                            std::uint64_t seed, int pairs,
                                            double window) const {
  if (pairs < 1) throw ValidationError("need at least one pair");
  const GridSpec& g = spec_.grid;
  const int L = spec_.length;
  std::vector<long> tau_gt(L + 1, 0);  // counts of tau > k

  for (int p = 0; p < pairs; ++p) {
    Xoshiro256pp rng = Xoshiro256pp::seeded(mix_seed(seed, p));
    double a = v, b = v2;
    bool coupled = (v == v2);
    int tau = coupled ? 0 : L + 1;
    for (int k = 0; k < L; ++k) {
      if (coupled) {
        auto ka = node_masses(step_kernel(k, a));
        a = b = g.point(draw_node(ka, rng.uniform01()));
        continue;
      }
      if (std::abs(a) <= window && std::abs(b) <= window) {
        auto pa = node_masses(step_kernel(k, a));
        auto pb = node_masses(step_kernel(k, b));
        std::vector<double> overlap(pa.size());
        double eta = 0.0;
        for (size_t i = 0; i < pa.size(); ++i) {
          overlap[i] = std::min(pa[i], pb[i]);
          eta += overlap[i];
        }
        if (rng.uniform01() < eta) {
          for (double& x : overlap) x /= eta;
          a = b = g.point(draw_node(overlap, rng.uniform01()));
          coupled = true;
          tau = k + 1;
        } else {
          for (size_t i = 0; i < pa.size(); ++i) {
            pa[i] = (pa[i] - overlap[i] * eta) / (1.0 - eta);
            pb[i] = (pb[i] - overlap[i] * eta) / (1.0 - eta);
          }
          a = g.point(draw_node(pa, rng.uniform01()));
          b = g.point(draw_node(pb, rng.uniform01()));
        }
      } else {
        a = g.point(draw_node(node_masses(step_kernel(k, a)), rng.uniform01()));
        b = g.point(draw_node(node_masses(step_kernel(k, b)), rng.uniform01()));
      }
    }
    for (int k = 0; k <= L; ++k)
      if (tau > k) ++tau_gt[k];
  }

  CouplingResult out;
  out.pairs = pairs;
  out.window = window;
  out.survival.resize(L + 1);
  for (int k = 0; k <= L; ++k)
    out.survival[k] = double(tau_gt[k]) / double(pairs);
  return out;
}

DriftEnvelope drift_envelope(const ChainDP& dp, const std::vector<int>& sites,
                             const std::vector<double>& v_probes,
                             double log_density_floor) {
  if (sites.empty() || v_probes.empty())
    throw ValidationError("drift envelope needs sites and probes");
  const GridSpec& g = dp.spec().grid;
  const double h = g.step;

  // per probe v: range of envelope crossings that any admissible (a, w)
  // must respect, aggregated over the requested sites
  struct Cross {
    std::vector<double> x;  // offsets u - v with usable density
    std::vector<double> gd; // log-density derivative there
  };
  std::vector<Cross> crosses(v_probes.size());
  for (size_t pi = 0; pi < v_probes.size(); ++pi) {
    for (int site : sites) {
      LogGridFunction k = dp.step_kernel(site, v_probes[pi]);
      double m = k.max_value();
      for (int i = 1; i + 1 < g.count; ++i) {
        if (k[i - 1] == kNegInf || k[i + 1] == kNegInf || k[i] < m + log_density_floor)
          continue;
        crosses[pi].x.push_back(g.point(i) - v_probes[pi]);
        crosses[pi].gd.push_back((k[i + 1] - k[i - 1]) / (2.0 * h));
      }
    }
    if (crosses[pi].x.empty())
      throw NumericalError("drift envelope: kernel has no usable density");
  }

  DriftEnvelope best;
  bool have_best = false;
  for (double a = 0.50; a >= 0.049; a -= 0.05) {
    // tightest admissible crossing parameters per probe
    std::vector<DriftBound> bounds(v_probes.size());
    for (size_t pi = 0; pi < v_probes.size(); ++pi) {
      double wlo = 1e300, whi = -1e300;
      for (size_t t = 0; t < crosses[pi].x.size(); ++t) {
        double x = crosses[pi].x[t], gd = crosses[pi].gd[t];
        double lo_w = x + (gd >= 0 ? gd / (2.0 * a) : a * gd / 2.0);
        double hi_w = x + (gd >= 0 ? a * gd / 2.0 : gd / (2.0 * a));
        wlo = std::min(wlo, lo_w);
        whi = std::max(whi, hi_w);
      }
      bounds[pi] = {v_probes[pi], wlo, whi};
    }
    for (double b = 0.5; b <= 8.01; b += 0.5) {
      double d = 1e300;
      bool left = false, right = false;
      double D = 0.0;
      for (const auto& c : bounds) {
        D = std::max(D, std::max(std::abs(c.d_lo), std::abs(c.d_hi)) - std::abs(c.v));
        if (c.v < -b) {
          left = true;
          d = std::min(d, c.d_lo);
        }
        if (c.v > b) {
          right = true;
          d = std::min(d, -c.d_hi);
        }
      }
      if (!left && !right) continue;
      if (d == 1e300) d = 0.0;
      DriftEnvelope cand;
      cand.a = a;
      cand.b = b;
      cand.d = std::max(d, 0.0);
      cand.D = std::max(D, 0.0) + cand.d;
      cand.inward_from_left = left && d > 0.0;
      cand.inward_from_right = right && d > 0.0;
      cand.magnitude_bounded = std::isfinite(D);
      cand.per_v = bounds;
      if (!have_best || cand.score() > best.score()) {
        best = cand;
        have_best = true;
      }
    }
  }
  if (!have_best) throw NumericalError("drift envelope: no probes outside any band");
  return best;
}

namespace {

PotentialCheck check_potential(const LogGridFunction& lw) {
  const GridSpec& g = lw.grid();
  // g = -log weight, normalized to vanish at its minimum over the grid
  std::vector<double> pot(g.count);
  double mn = 1e300;
  for (int i = 0; i < g.count; ++i) {
    pot[i] = lw[i] == kNegInf ? 1e300 : -lw[i];
    mn = std::min(mn, pot[i]);
  }
  for (double& x : pot)
    if (x < 1e299) x -= mn;

  PotentialCheck out;
  for (double b = 1.0; b <= 16.01; b += 1.0) {
    bool mono = true;
    double slack = 1e-7;
    for (int i = 0; i + 1 < g.count; ++i) {
      double xa = g.point(i), xb = g.point(i + 1);
      double pa = std::min(pot[i], 1e299), pb = std::min(pot[i + 1], 1e299);
      if (xa >= b && pb < pa - slack * (1.0 + pa)) mono = false;
      if (xb <= -b && pb > pa + slack * (1.0 + pa)) mono = false;
    }
    if (!mono) continue;
    double a = 1e300, D = 0.0;
    bool any_outside = false;
    for (int i = 0; i < g.count; ++i) {
      double x = g.point(i);
      if (std::abs(x) <= b) {
        if (pot[i] > 1e299) { D = 1e300; break; }
        D = std::max(D, pot[i]);
      } else if (std::abs(x) <= 60.0) {
        any_outside = true;
        a = std::min(a, std::min(pot[i], 1e299) / std::abs(x));
      }
    }
    if (D > 1e299 || !any_outside) continue;
    if (a >= 0.02) {
      out.a = a;
      out.b = b;
      out.D = D;
      out.ok = true;
      return out;
    }
  }
  return out;
}

}  // namespace

double log_tail_mass(const LogGridFunction& d, double x, int direction) {
  const GridSpec& g = d.grid();
  double m = d.max_value();
  auto dens = [&](int i) { return d[i] == kNegInf ? 0.0 : std::exp(d[i] - m); };
  double t = g.to_index(x);
  double acc = 0.0;
  if (direction > 0) {
    if (t <= 0) return d.log_integral();  // everything
    if (t >= g.count - 1) return kNegInf;
    int i = static_cast<int>(std::floor(t));
    double frac = t - i;
    double dx = dens(i) + frac * (dens(i + 1) - dens(i));
    acc += (1.0 - frac) * g.step * 0.5 * (dx + dens(i + 1));
    for (int j = i + 1; j + 1 < g.count; ++j)
      acc += g.step * 0.5 * (dens(j) + dens(j + 1));
  } else {
    if (t >= g.count - 1) return d.log_integral();
    if (t <= 0) return kNegInf;
    int i = static_cast<int>(std::ceil(t));
    double frac = i - t;
    double dx = dens(i) - frac * (dens(i) - dens(i - 1));
    acc += (1.0 - frac) * g.step * 0.5 * (dens(i - 1) + dx);
    for (int j = i - 1; j - 1 >= 0; --j)
      acc += g.step * 0.5 * (dens(j - 1) + dens(j));
  }
  return acc > 0.0 ? m + std::log(acc) : kNegInf;
}

PinnedTailResult pinned_tail(const ChainDP& dp, int site,
                             const std::vector<double>& ts) {
  if (site < 1 || site > dp.spec().length)
    throw ValidationError("pinned tail site out of range");
  PinnedTailResult out;
  out.potentials_ok = true;
  for (const auto& w : dp.spec().log_weight) {
    out.site_checks.push_back(check_potential(w));
    out.potentials_ok = out.potentials_ok && out.site_checks.back().ok;
  }
  const LogGridFunction& d = dp.marginal(site).log_density;
  for (double t : ts) {
    if (!(t >= 0)) throw ValidationError("pinned tail needs t >= 0");
    double above = log_tail_mass(d, t, +1);
    double below = log_tail_mass(d, -t, -1);
    double hi = std::max(above, below), lo = std::min(above, below);
    double val = hi == kNegInf
                     ? kNegInf
                     : (lo == kNegInf ? hi : hi + std::log1p(std::exp(lo - hi)));
    out.t.push_back(t);
    out.log_tail.push_back(val);
  }
  return out;
}

}  // namespace hardwall
