#include "hardwall/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hardwall/chain.hpp"
#include "hardwall/cli.hpp"
#include "hardwall/errors.hpp"
#include "hardwall/free_energy.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/grid.hpp"
#include "hardwall/mc.hpp"
#include "hardwall/model.hpp"
#include "hardwall/oracle.hpp"
#include "hardwall/spine.hpp"
#include "hardwall/table_io.hpp"
#include "hardwall/tails.hpp"
#include "hardwall/util.hpp"

namespace hardwall {
namespace {

std::string num(double v, const char* spec = "%.4g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Tail families are the expensive shared ingredient; build each requested
// (n_max, u_max, step) once and keep it for later criteria.
struct FamilyCache {
  std::map<std::string, TailFamily> families;

  const TailFamily& get(int n_max, double u_max, double step = 0.01) {
    std::string key = std::to_string(n_max) + "|" + format_double(u_max) +
                      "|" + format_double(step);
    auto it = families.find(key);
    if (it == families.end())
      it = families.emplace(key, TailFamily::build(n_max, u_max, step)).first;
    return it->second;
  }
};

struct Ctx {
  FamilyCache cache;
  std::uint64_t seed = kDefaultSeed;
};

LogGridFunction quadratic_weight(const GridSpec& g, double coeff,
                                 double center) {
  LogGridFunction w = LogGridFunction::constant(g, 0.0);
  for (int i = 0; i < g.count; ++i) {
    double x = g.point(i) - center;
    w[i] = -coeff * x * x;
  }
  return w;
}

// ---- criterion 1: depth-1 closed form ------------------------------------

bool c1_closed_form(Ctx& ctx, std::string& d) {
  const TailFamily& fam = ctx.cache.get(1, 4.0);
  double m1 = ModelParams::m(1);
  double worst = 0.0;
  for (int i = -40; i <= 40; ++i) {
    double u = 0.1 * i;
    double err = std::abs(fam.log_p(1, u) - 2.0 * log_normal_cdf(m1 - u));
    worst = std::max(worst, err);
  }
  d = "max |log error| = " + num(worst, "%.3g") + " over u in [-4, 4]";
  return worst < 1e-6;
}

// ---- criterion 2: brute-force quadrature at small size --------------------

bool c2_brute_force(Ctx& ctx, std::string& d) {
  const TailFamily& fam = ctx.cache.get(3, 8.0);
  oracle::TailTables tables(fam.grid(), 3);
  double worst_tail = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const LogGridFunction& F = fam.F(n);
    for (int i = 0; i < fam.grid().count; ++i) {
      double ref = tables.log_value(n, fam.grid().point(i));
      if (ref <= -30.0) continue;
      worst_tail = std::max(worst_tail, std::abs(F[i] - ref));
    }
  }

  ChainSpec spec;
  spec.grid = GridSpec::from_range(-8.0, 8.0, 0.01);
  spec.length = 3;
  spec.start = 0.3;
  spec.log_weight.push_back(quadratic_weight(spec.grid, 0.3, 1.0));
  LogGridFunction floor_w = quadratic_weight(spec.grid, 0.1, 0.0);
  for (int i = 0; i < spec.grid.count; ++i)
    if (spec.grid.point(i) < -0.5) floor_w[i] = kNegInf;
  spec.log_weight.push_back(floor_w);
  spec.log_weight.push_back(quadratic_weight(spec.grid, 0.7, -0.4));

  ChainDP dp(spec);
  oracle::ChainBruteResult ref = oracle::chain_brute(spec);
  double worst_chain = std::abs(dp.log_normalizer() - ref.log_z);
  for (int k = 1; k <= 3; ++k) {
    worst_chain =
        std::max(worst_chain, std::abs(dp.marginal(k).mean - ref.mean[k]));
    worst_chain =
        std::max(worst_chain, std::abs(dp.marginal(k).var - ref.var[k]));
  }
  for (int j = 1; j <= 3; ++j)
    for (int k = j + 1; k <= 3; ++k)
      worst_chain = std::max(
          worst_chain, std::abs(dp.pair_covariance(j, k) - ref.cov[j][k]));
  for (double v : {-0.2, 0.5, 1.4}) {
    LogGridFunction a = dp.step_kernel(1, v);
    LogGridFunction b = oracle::chain_brute_kernel(spec, 1, v);
    for (int i = 0; i < spec.grid.count; ++i) {
      if (b[i] < b.max_value() - 30.0) continue;
      worst_chain = std::max(worst_chain, std::abs(a[i] - b[i]));
    }
  }

  d = "max tail error = " + num(worst_tail, "%.3g") +
      ", max chain error = " + num(worst_chain, "%.3g");
  return worst_tail < 1e-6 && worst_chain < 1e-6;
}

// ---- criterion 3: Monte Carlo cross-check ---------------------------------

bool c3_mc(Ctx& ctx, std::string& d) {
  const TailFamily& fam10 = ctx.cache.get(10, 8.0);
  double p10 = std::exp(fam10.log_p(10, 0.0));
  PEstimate naive = estimate_p(10, 0.0, McMethod::naive, 1000000, ctx.seed);
  double gap10 = std::abs(std::exp(naive.log_estimate) - p10);
  bool ok_naive = gap10 <= 3.0 * naive.std_error;

  const TailFamily& fam16 = ctx.cache.get(16, 8.0);
  double p16 = std::exp(fam16.log_p(16, 6.0));
  PEstimate tilted =
      estimate_p(16, 6.0, McMethod::tilted, 100000, ctx.seed + 1, 0.5);
  double gap16 = std::abs(std::exp(tilted.log_estimate) - p16);
  bool ok_tilted = !tilted.zero_acceptance && gap16 <= 3.0 * tilted.std_error;

  // efficiency: naive sampling at the same point and budget accepts almost
  // nothing; the tilted effective sample must beat that yield 100-fold.  At
  // this depth the naive count is usually zero (its mean is ~0.6), so the
  // realized count is floored by the expected count from the table, keeping
  // the comparison nonvacuous without gating on one Bernoulli draw.
  PEstimate base = estimate_p(16, 6.0, McMethod::naive, 100000, ctx.seed + 2);
  double expect = 100000.0 * p16;
  double yield = std::max(double(base.accepted), expect);
  bool ok_ess = tilted.ess >= 100.0 * yield;

  d = "naive(10,0): |dp| = " + num(gap10, "%.2e") + " vs 3se = " +
      num(3.0 * naive.std_error, "%.2e") + "; tilted(16,6): |dp| = " +
      num(gap16, "%.2e") + " vs 3se = " + num(3.0 * tilted.std_error, "%.2e") +
      "; ess = " + num(tilted.ess, "%.0f") + " vs naive yield " +
      std::to_string(base.accepted) + " (mean " + num(expect, "%.2f") + ")";
  return ok_naive && ok_tilted && ok_ess;
}

// ---- criterion 4: derivative-form residual at n = 100 ---------------------

bool c4_derivative_residual(Ctx& ctx, std::string& d) {
  const TailFamily& fam = ctx.cache.get(100, 64.0);
  double c0 = ModelParams::c0();
  double worst = 0.0, sup_lo = 0.0, sup_hi = 0.0;
  for (int u = 8; u <= 64; u += 4) {
    double r = -fam.dlog_p(100, u) - (u - c0 * std::log2(double(u)));
    worst = std::max(worst, std::abs(r));
    double& sup = u <= 36 ? sup_lo : sup_hi;
    sup = std::max(sup, std::abs(r));
  }
  d = "max |r| = " + num(worst) + "; sup upper half = " + num(sup_hi) +
      ", sup lower half = " + num(sup_lo);
  return worst <= 5.0 && sup_hi <= sup_lo + 1.0;
}

// ---- criterion 5: normalized tail band at n = 256 --------------------------

bool c5_tail_band(Ctx& ctx, std::string& d) {
  auto band = [&](double step, double& lo, double& hi) {
    const TailFamily& fam = ctx.cache.get(256, 128.0, step);
    lo = 1e300;
    hi = -1e300;
    for (int u = 16; u <= 128; ++u) {
      double r = fam.theta_residual(256, double(u));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  };
  double lo1, hi1, lo2, hi2;
  band(0.01, lo1, hi1);
  band(0.005, lo2, hi2);
  double width = hi1 - lo1;
  double shift = std::max(std::abs(hi2 - hi1), std::abs(lo2 - lo1));
  d = "band [" + num(lo1) + ", " + num(hi1) + "], width = " + num(width) +
      ", halving shift = " + num(shift, "%.3g");
  return width <= 4.0 && shift < 0.5;
}

// ---- criterion 6: derivative identity across modules -----------------------

bool c6_cross_module(Ctx& ctx, std::string& d) {
  const TailFamily& fam = ctx.cache.get(100, 64.0);
  double worst = 0.0;
  for (double u : {16.0, 32.0}) {
    int l = floor_log2_or_zero(u) + 2;
    SpineSetup setup = make_spine_setup(100, l, u);
    GridSpec grid = GridSpec::from_range(-14.0, u + 14.0, 0.01);
    ChainDP dp(build_spine(fam, setup, grid));
    worst = std::max(worst, derivative_identity_gap(fam, dp, 100, u));
  }
  d = "max identity gap = " + num(worst, "%.3g") + " at u in {16, 32}";
  return worst < 0.05;
}

// ---- criterion 7: repulsion profile at the hard wall ------------------------

bool c7_profile(Ctx& ctx, std::string& d) {
  int n = 64;
  double u = ModelParams::m(n);
  const TailFamily& fam = ctx.cache.get(n, std::ceil(u) + 1.0);
  int ln = floor_log2_or_zero(double(n));
  int l = ln + 10;
  SpineSetup setup = make_spine_setup(n, l, u);
  GridSpec grid = GridSpec::from_range(-14.0, u + 14.0, 0.01);
  ChainDP dp(build_spine(fam, setup, grid));
  std::vector<double> mean = conditional_mean_profile(dp);
  double mn = ModelParams::m(n - ln);
  double worst_head = 0.0, worst_plateau = 0.0;
  for (int k = 1; k <= ln; ++k)
    worst_head = std::max(
        worst_head, std::abs(mean[k] - mn * (1.0 - std::ldexp(1.0, -k))));
  for (int k = ln; k <= l; ++k)
    worst_plateau = std::max(worst_plateau, std::abs(mean[k] - mn));
  d = "max |mean - profile| = " + num(worst_head) + " for k <= " +
      std::to_string(ln) + "; max |mean - m(n')| = " + num(worst_plateau) +
      " for k in [" + std::to_string(ln) + ", " + std::to_string(l) + "]";
  return worst_head <= 5.0 && worst_plateau <= 5.0;
}

// ---- criterion 8: deviation tails at the profile depth ---------------------

bool c8_hat_tails(Ctx& ctx, std::string& d) {
  int n = 64;
  double u = ModelParams::m(n);
  const TailFamily& fam = ctx.cache.get(n, std::ceil(u) + 1.0);
  int ln = floor_log2_or_zero(double(n));
  std::vector<double> devs;
  for (double t = 4.0; t <= 20.0; t += 2.0) devs.push_back(t);
  GridSpec grid = GridSpec::from_range(-14.0, 100.0, 0.01);
  HatTailCurve curve = hat_h_tails(fam, n, ln, devs, grid);
  double up_lo = 1e300, up_hi = 0.0, dn_lo = 1e300, dn_hi = 0.0;
  for (const HatTailPoint& p : curve.points) {
    double ru = -p.log_upper / (p.u_dev * p.u_dev / std::log2(p.u_dev));
    double rl = -p.log_lower / (p.u_dev * p.u_dev);
    up_lo = std::min(up_lo, ru);
    up_hi = std::max(up_hi, ru);
    dn_lo = std::min(dn_lo, rl);
    dn_hi = std::max(dn_hi, rl);
  }
  d = "upper ratio in [" + num(up_lo) + ", " + num(up_hi) +
      "], lower ratio in [" + num(dn_lo) + ", " + num(dn_hi) + "]";
  return up_lo > 0.0 && dn_lo > 0.0 && up_hi / up_lo <= 20.0 &&
         dn_hi / dn_lo <= 20.0;
}

// ---- criterion 9: leaf covariances across meeting depths --------------------

bool c9_covariance(Ctx& ctx, std::string& d) {
  int n = 64;
  double u = ModelParams::m(n);
  const TailFamily& fam = ctx.cache.get(n, std::ceil(u) + 1.0);
  int ln = floor_log2_or_zero(double(n));
  int l = n - 2;  // deepest meeting depth probed below
  SpineSetup setup = make_spine_setup(n, l, u);
  GridSpec grid = GridSpec::from_range(-20.0, u + 30.0, 0.01);
  ChainDP dp(build_spine(fam, setup, grid));

  double worst = 0.0;
  for (int meet = ln; meet <= l; meet += 8) {
    double cov = pair_covariance_tree(fam, dp, n, u, meet);
    worst = std::max(worst, std::abs(cov - double(meet - ln)));
  }

  // meeting depths receding above the profile depth: log |Cov| drops
  // affinely in the gap (only two depths exist at this n, so the fit is
  // exact and the slope carries the whole statement)
  std::vector<double> gap, logc;
  for (int meet = ln - 2; meet >= 0; meet -= 4) {
    double cov = pair_covariance_tree(fam, dp, n, u, meet);
    gap.push_back(double(ln - meet));
    logc.push_back(std::log(std::max(std::abs(cov), 1e-300)));
  }
  LineFit fit = fit_line(gap, logc);

  d = "max |cov - (meet - " + std::to_string(ln) + ")| = " + num(worst) +
      "; decay slope = " + num(fit.slope) + " over " +
      std::to_string(gap.size()) + " points, r2 = " + num(fit.r2);
  return worst <= 5.0 && fit.slope <= -0.1 && fit.r2 >= 0.9;
}

// ---- criterion 10: localized-walk tails -------------------------------------

bool c10_localized_tails(Ctx& ctx, std::string& d) {
  std::vector<double> ts;
  for (double t = 2.0; t <= 8.0; t += 1.0) ts.push_back(t);

  double worst_slope = -1e300, worst_r2 = 1.0;
  auto probe = [&](const ChainDP& dp, int site) {
    PinnedTailResult pt = pinned_tail(dp, site, ts);
    LineFit fit = fit_line(pt.t, pt.log_tail);
    worst_slope = std::max(worst_slope, fit.slope);
    worst_r2 = std::min(worst_r2, fit.r2);
    return pt.potentials_ok;
  };

  ChainSpec quad;
  quad.grid = GridSpec::from_range(-12.0, 12.0, 0.01);
  quad.length = 44;
  for (int k = 0; k < quad.length; ++k)
    quad.log_weight.push_back(quadratic_weight(quad.grid, 1.0, 0.0));
  ChainDP qdp(quad);
  bool ok_quad = probe(qdp, 20) && probe(qdp, 40);

  int n = 128;
  double u = ModelParams::m(n);
  const TailFamily& fam = ctx.cache.get(n, std::ceil(u) + 1.0);
  GridSpec y_grid = GridSpec::from_range(-16.0, 16.0, 0.01);
  ChainDP tdp(tiled_interior_chain(fam, n, u, 44, y_grid));
  bool ok_tiled = probe(tdp, 20) && probe(tdp, 40);

  d = "worst slope = " + num(worst_slope) + ", worst r2 = " + num(worst_r2) +
      " over {quad, spine} x sites {20, 40}";
  return ok_quad && ok_tiled && worst_slope <= -0.3 && worst_r2 >= 0.95;
}

// ---- criterion 11: total-variation memory loss ------------------------------

bool c11_tv_decay(Ctx& ctx, std::string& d) {
  int n = 128;
  double u = ModelParams::m(n);
  const TailFamily& fam = ctx.cache.get(n, std::ceil(u) + 1.0);
  GridSpec y_grid = GridSpec::from_range(-16.0, 16.0, 0.01);
  ChainDP dp(tiled_interior_chain(fam, n, u, 34, y_grid));

  std::vector<double> same = dp.tv_curve(0, 4.0, 4.0, 5);
  bool zero_ok = std::all_of(same.begin(), same.end(),
                             [](double x) { return x == 0.0; });

  std::vector<double> tv = dp.tv_curve(0, 4.0, -4.0, 30);
  std::vector<double> js, logtv;
  for (int j = 10; j <= 30; ++j) {
    js.push_back(double(j));
    logtv.push_back(std::log(std::max(tv[std::size_t(j)], 1e-300)));
  }
  LineFit fit = fit_line(js, logtv);
  d = "slope = " + num(fit.slope) + ", r2 = " + num(fit.r2) +
      " over j in [10, 30]; tv(v, v) identically zero: " +
      (zero_ok ? "yes" : "no");
  return zero_ok && fit.slope <= -0.05 && fit.r2 >= 0.9;
}

// ---- criterion 12: free-energy limits ---------------------------------------

bool c12_free_energy(Ctx& ctx, std::string& d) {
  PotentialSpec quad;
  quad.g = quadratic_weight(GridSpec::from_range(-12.0, 12.0, 0.01), 1.0, 0.0);
  double g1 = fe_step(fe_base(quad)).g_star;
  double want = -0.5 * std::log(3.0);
  double quad_err = std::abs(g1 - want);

  auto theta_limit = [&](double step) {
    const TailFamily& fam = ctx.cache.get(16, 13.0, step);
    PotentialSpec pot = brw_theta_potential(0.0, p_infinity_curve(fam, -24.0, 13.0));
    return g_star_limit(pot, 1e-3, 14);
  };
  GStarResult r1 = theta_limit(0.01);
  GStarResult r2 = theta_limit(0.005);
  double shift = std::abs(r1.g_star - r2.g_star);

  d = "quad G1* error = " + num(quad_err, "%.2e") + "; theta gap " +
      num(r1.gap, "%.2e") + " at k = " + std::to_string(r1.k_reached) +
      ", halving shift = " + num(shift, "%.2e");
  return quad_err < 1e-4 && r1.converged && r1.k_reached <= 14 && shift < 2e-3;
}

// ---- criterion 13: byte-identical reruns ------------------------------------

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("hardwall");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_run(int(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NumericalError("verify: expected output file " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool c13_determinism(Ctx& ctx, std::string& d) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "hardwall_verify_rerun";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string out = (dir / "out").string();
  std::string seed = std::to_string(ctx.seed);

  std::vector<std::pair<std::string, std::vector<std::string>>> battery = {
      {"tails", {"tails", "--n", "8", "--u", "0:4:1"}},
      {"theta", {"theta", "--n", "8", "--u", "1:4:1"}},
      {"profile", {"profile", "--n", "16", "--u", "6", "--l", "6"}},
      {"marginals",
       {"profile", "--n", "12", "--u", "4", "--l", "4", "--marginals"}},
      {"covariance", {"covariance", "--n", "12", "--meet", "0:10:5"}},
      {"kernel", {"kernel", "--n", "12", "--u", "4", "--j", "2", "--x", "0.5"}},
      {"tv", {"tv", "--n", "64", "--v", "2", "--vprime", "-2", "--l", "12"}},
      {"free-energy", {"free-energy", "--potential", "quad", "--kmax", "4"}},
      {"sample-tilted",
       {"sample", "--n", "8", "--u", "1.5", "--method", "tilted", "--trials",
        "20000", "--seed", seed}},
      {"sample-naive",
       {"sample", "--n", "6", "--u", "0", "--method", "naive", "--trials",
        "20000", "--seed", seed}},
  };

  bool all_ok = true;
  std::string failed;
  for (const auto& [name, args] : battery) {
    std::vector<std::string> cmd = args;
    cmd.insert(cmd.end(), {"--out", out});
    int rc1 = run_cli(cmd);
    std::string first = rc1 == 0 ? slurp(out) : "";
    int rc2 = run_cli(cmd);
    std::string second = rc2 == 0 ? slurp(out) : "";
    if (rc1 != 0 || rc2 != 0 || first.empty() || first != second) {
      all_ok = false;
      failed += (failed.empty() ? "" : ", ") + name;
    }
  }
  fs::remove_all(dir);
  d = all_ok ? "all " + std::to_string(battery.size()) +
                   " commands byte-identical across reruns"
             : "mismatch or failure in: " + failed;
  return all_ok;
}

struct Criterion {
  int id;
  std::string slug;
  std::string title;
  double budget_seconds;
  std::function<bool(Ctx&, std::string&)> fn;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "closed-form", "depth-1 tail equals the Gaussian closed form", 1.0,
       c1_closed_form},
      {2, "brute-force", "small tails and chains match quadrature oracles",
       10.0, c2_brute_force},
      {3, "mc-cross-check", "Monte Carlo estimates agree with the DP tables",
       120.0, c3_mc},
      {4, "tails-derivative", "derivative residual bounded at n = 100", 60.0,
       c4_derivative_residual},
      {5, "tails-band", "normalized tail band at n = 256 is narrow and stable",
       300.0, c5_tail_band},
      {6, "cross-module", "derivative identity ties chain to tails", 60.0,
       c6_cross_module},
      {7, "profile", "conditional means follow the repulsion profile", 60.0,
       c7_profile},
      {8, "hat-tails", "deviation tails at the profile depth are two-sided",
       120.0, c8_hat_tails},
      {9, "covariance", "leaf covariances track the meeting depth", 180.0,
       c9_covariance},
      {10, "localized-tails", "localized chains have uniform exponential tails",
       60.0, c10_localized_tails},
      {11, "tv-decay", "conditioned flows forget their start exponentially",
       120.0, c11_tv_decay},
      {12, "free-energy", "free-energy limits hit closed form and converge",
       300.0, c12_free_energy},
      {13, "determinism", "fixed seeds give byte-identical outputs", 60.0,
       c13_determinism},
  };
  return list;
}

bool selected(const Criterion& c, const std::vector<std::string>& only) {
  if (only.empty()) return true;
  for (const std::string& tok : only)
    if (c.slug.find(tok) != std::string::npos) return true;
  return false;
}

}  // namespace

AcceptanceReport run_acceptance(const std::vector<std::string>& only,
                                std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  Ctx ctx;
  ctx.seed = seed;
  AcceptanceReport report;
  for (const Criterion& c : criteria()) {
    if (!selected(c, only)) continue;
    CriterionResult res;
    res.id = c.id;
    res.slug = c.slug;
    res.title = c.title;
    auto t0 = clock::now();
    try {
      res.passed = c.fn(ctx, res.details);
    } catch (const std::exception& e) {
      res.passed = false;
      res.details = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (res.seconds > c.budget_seconds) {
      res.passed = false;
      res.details += "; over time budget (" + num(res.seconds, "%.1f") +
                     " s > " + num(c.budget_seconds, "%.0f") + " s)";
    }
    report.total_seconds += res.seconds;
    report.all_passed = report.all_passed && res.passed;
    report.results.push_back(std::move(res));
  }
  return report;
}

nlohmann::json AcceptanceReport::as_json(std::uint64_t seed,
                                         const std::vector<std::string>& only)
    const {
  nlohmann::json cfg{{"cmd", "verify"}, {"seed", seed}, {"only", only}};
  nlohmann::json out;
  out["schema"] = "hardwall verify v1";
  out["config"] = cfg;
  out["config_hash"] = git_blob_sha1(canonical_json(cfg));
  out["all_passed"] = all_passed;
  out["total_seconds"] = total_seconds;
  nlohmann::json rows = nlohmann::json::array();
  for (const CriterionResult& r : results)
    rows.push_back({{"id", r.id},
                    {"slug", r.slug},
                    {"title", r.title},
                    {"passed", r.passed},
                    {"details", r.details},
                    {"seconds", r.seconds}});
  out["criteria"] = std::move(rows);
  return out;
}

std::string AcceptanceReport::text_summary() const {
  std::string out;
  int passed = 0;
  for (const CriterionResult& r : results) {
    char line[512];
    std::snprintf(line, sizeof line, "%s %2d %-16s %s (%.1f s)\n",
                  r.passed ? "PASS" : "FAIL", r.id, r.slug.c_str(),
                  r.details.c_str(), r.seconds);
    out += line;
    passed += r.passed ? 1 : 0;
  }
  char tail[128];
  std::snprintf(tail, sizeof tail, "%d/%zu criteria passed in %.1f s\n",
                passed, results.size(), total_seconds);
  out += tail;
  return out;
}

}  // namespace hardwall
