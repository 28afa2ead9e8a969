#include "hardwall/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hardwall/chain.hpp"
#include "hardwall/errors.hpp"
#include "hardwall/free_energy.hpp"
#include "hardwall/grid.hpp"
#include "hardwall/mc.hpp"
#include "hardwall/model.hpp"
#include "hardwall/spine.hpp"
#include "hardwall/table_io.hpp"
#include "hardwall/tails.hpp"
#include "hardwall/verify.hpp"

namespace hardwall {
namespace {

constexpr double kUnsetU = std::numeric_limits<double>::quiet_NaN();

// "start:stop:step" with inclusive stop, or a single value.
std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() != 1 && parts.size() != 3)
    throw ValidationError("range '" + text +
                          "' must be a value or start:stop:step");
  std::vector<double> vals;
  for (std::string& p : parts) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      throw ValidationError("range '" + text + "' has a malformed number");
    }
    if (used != p.size())
      throw ValidationError("range '" + text + "' has a malformed number");
    vals.push_back(v);
  }
  if (vals.size() == 1) return vals;
  double start = vals[0], stop = vals[1], step = vals[2];
  if (step <= 0.0)
    throw ValidationError("range '" + text + "' needs a positive step");
  if (stop < start)
    throw ValidationError("range '" + text + "' runs backwards");
  long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 1000000)
    throw ValidationError("range '" + text + "' expands to too many points");
  std::vector<double> out;
  out.reserve(std::size_t(count));
  for (long i = 0; i < count; ++i) out.push_back(start + double(i) * step);
  return out;
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_range(text)) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
      throw ValidationError("range '" + text + "' must contain integers");
    out.push_back(int(r));
  }
  return out;
}

struct Output {
  std::string path;             // empty = stdout
  std::string format = "csv";

  void emit(const Table& t, const nlohmann::json& cfg) const {
    std::string body =
        format == "json" ? render_json(t, cfg) : render_csv(t, cfg);
    if (path.empty())
      std::fputs(body.c_str(), stdout);
    else
      write_atomic(path, body);
  }
};

// Everything any subcommand may read; CLI11 fills in what was passed and
// the run functions validate the rest.
struct Args {
  int n = 0;
  std::string u_range;
  double u = kUnsetU;
  double grid_lo = kUnsetU;
  double grid_hi = kUnsetU;
  double grid_step = 0.01;
  int l = 0;  // 0 = choose per command
  bool marginals = false;
  std::string meet_range;
  int j = 1;
  double x = 0.0;
  double v = 0.0;
  double vprime = 0.0;
  std::string potential = "quad";
  double delta = 0.0;
  double tol = 1e-3;
  int kmax = 24;
  std::string method = "naive";
  long trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  double tilt_offset = 1.0;
  int tilt_depth = 0;
  std::vector<std::string> only;
  Output out;
};

double wall_height(const Args& a) {
  return std::isnan(a.u) ? ModelParams::m(a.n) : a.u;
}

// Family wide enough for every u-query the command makes.
TailFamily family_for(int n, double u_top, double step) {
  return TailFamily::build(n, std::max(1.0, std::ceil(u_top)) + 1.0, step);
}

GridSpec spine_grid(const Args& a, double u) {
  double lo = std::isnan(a.grid_lo) ? -14.0 : a.grid_lo;
  double hi = std::isnan(a.grid_hi) ? std::max(u, 0.0) + 14.0 : a.grid_hi;
  return GridSpec::from_range(lo, hi, a.grid_step);
}

int default_length(const Args& a) {
  if (a.l > 0) return a.l;
  return std::min(a.n, floor_log2_or_zero(double(a.n)) + 10);
}

nlohmann::json base_config(const char* cmd, const Args& a) {
  nlohmann::json cfg;
  cfg["cmd"] = cmd;
  cfg["format"] = a.out.format;
  cfg["grid_step"] = a.grid_step;
  if (!a.out.path.empty()) cfg["out"] = a.out.path;
  return cfg;
}

int run_tails(const Args& a, bool theta_only) {
  std::vector<double> us = parse_range(a.u_range);
  double top = *std::max_element(us.begin(), us.end());
  if (theta_only)
    for (double u : us)
      if (u <= 0.0)
        throw ValidationError("theta residuals need u > 0");
  TailFamily fam = family_for(a.n, top, a.grid_step);

  nlohmann::json cfg = base_config(theta_only ? "theta" : "tails", a);
  cfg["n"] = a.n;
  cfg["u"] = a.u_range;

  Table t;
  if (theta_only) {
    ThetaProfile prof = theta_profile(fam, a.n, us);
    t.columns = {"n", "u", "frac_log2_u", "residual"};
    for (const ThetaPoint& p : prof.points)
      t.add_row({long(a.n), p.u, p.frac, p.residual});
  } else {
    double c0 = ModelParams::c0();
    t.columns = {"n", "u", "log_p", "dlog_p", "residual"};
    for (double u : us) {
      double lp = fam.log_p(a.n, u);
      double dlp = fam.dlog_p(a.n, u);
      double res = u > 1.0 ? -dlp - (u - c0 * std::log2(u)) : kUnsetU;
      t.add_row({long(a.n), u, lp, dlp, res});
    }
  }
  a.out.emit(t, cfg);
  return 0;
}

int run_profile(const Args& a) {
  double u = wall_height(a);
  int l = default_length(a);
  TailFamily fam = family_for(a.n, std::max(u, 0.0), a.grid_step);
  SpineSetup setup = make_spine_setup(a.n, l, u);
  GridSpec grid = spine_grid(a, u);
  ChainDP dp(build_spine(fam, setup, grid));

  nlohmann::json cfg = base_config("profile", a);
  cfg["n"] = a.n;
  cfg["u"] = u;
  cfg["l"] = l;
  cfg["marginals"] = a.marginals;

  Table t;
  if (a.marginals) {
    t.columns = {"site", "grid_value", "log_density"};
    for (int k = 0; k <= l; ++k) {
      const LogGridFunction& f = dp.marginal(k).log_density;
      double floor = f.max_value() - 60.0;
      for (int i = 0; i < grid.count; ++i)
        if (f[i] > floor) t.add_row({long(k), grid.point(i), f[i]});
    }
  } else {
    t.columns = {"n", "u", "k", "mean", "var"};
    for (int k = 0; k <= l; ++k)
      t.add_row({long(a.n), u, long(k), dp.marginal(k).mean,
                 dp.marginal(k).var});
  }
  a.out.emit(t, cfg);
  return 0;
}

int run_covariance(const Args& a) {
  double u = wall_height(a);
  std::string meets_text = a.meet_range.empty()
                               ? "0:" + std::to_string(a.n - 2) + ":8"
                               : a.meet_range;
  std::vector<int> meets = parse_int_range(meets_text);
  for (int m : meets)
    if (m < 0 || m >= a.n)
      throw ValidationError("meeting depth " + std::to_string(m) +
                            " outside [0, n)");
  int l = std::max(1, *std::max_element(meets.begin(), meets.end()));
  TailFamily fam = family_for(a.n, std::max(u, 0.0), a.grid_step);
  SpineSetup setup = make_spine_setup(a.n, l, u);
  ChainDP dp(build_spine(fam, setup, spine_grid(a, u)));

  nlohmann::json cfg = base_config("covariance", a);
  cfg["n"] = a.n;
  cfg["u"] = u;
  cfg["meet"] = meets_text;

  Table t;
  t.columns = {"n", "depth_meet", "cov"};
  for (int m : meets)
    t.add_row({long(a.n), long(m), pair_covariance_tree(fam, dp, a.n, u, m)});
  a.out.emit(t, cfg);
  return 0;
}

int run_kernel(const Args& a) {
  double u = wall_height(a);
  int l = a.l > 0 ? a.l : std::min(a.n, std::max(a.j + 1, 8));
  if (a.j < 0 || a.j >= l)
    throw ValidationError("kernel site must lie in [0, length)");
  TailFamily fam = family_for(a.n, std::max(u, 0.0), a.grid_step);
  SpineSetup setup = make_spine_setup(a.n, l, u);
  GridSpec grid = spine_grid(a, u);
  ChainDP dp(build_spine(fam, setup, grid));
  LogGridFunction k = dp.step_kernel(a.j, a.x);

  nlohmann::json cfg = base_config("kernel", a);
  cfg["n"] = a.n;
  cfg["u"] = u;
  cfg["l"] = l;
  cfg["j"] = a.j;
  cfg["x"] = a.x;

  Table t;
  t.columns = {"j", "x", "y", "log_density"};
  double floor = k.max_value() - 60.0;
  for (int i = 0; i < grid.count; ++i)
    if (k[i] > floor) t.add_row({long(a.j), a.x, grid.point(i), k[i]});
  a.out.emit(t, cfg);
  return 0;
}

int run_tv(const Args& a) {
  double u = wall_height(a);
  int l = a.l > 0 ? a.l : std::min(a.n, 34);
  TailFamily fam = family_for(a.n, std::max(u, 0.0), a.grid_step);
  double span = std::max({16.0, std::abs(a.v) + 8.0, std::abs(a.vprime) + 8.0});
  GridSpec y_grid = GridSpec::from_range(-span, span, a.grid_step);
  ChainDP dp(tiled_interior_chain(fam, a.n, u, l, y_grid));
  std::vector<double> tv = dp.tv_curve(0, a.v, a.vprime, l);

  nlohmann::json cfg = base_config("tv", a);
  cfg["n"] = a.n;
  cfg["u"] = u;
  cfg["l"] = l;
  cfg["v"] = a.v;
  cfg["vprime"] = a.vprime;

  Table t;
  t.columns = {"j", "tv"};
  for (std::size_t j = 0; j < tv.size(); ++j)
    t.add_row({long(j), tv[j]});
  a.out.emit(t, cfg);
  return 0;
}

int run_free_energy(const Args& a) {
  PotentialSpec pot;
  if (a.potential == "quad") {
    double lo = std::isnan(a.grid_lo) ? -12.0 : a.grid_lo;
    double hi = std::isnan(a.grid_hi) ? 12.0 : a.grid_hi;
    GridSpec g = GridSpec::from_range(lo, hi, a.grid_step);
    pot.g = LogGridFunction::constant(g, 0.0);
    for (int i = 0; i < g.count; ++i)
      pot.g[i] = -g.point(i) * g.point(i);
  } else {
    // limiting tail potential: the grid comes from the tail curve itself
    TailFamily fam = TailFamily::build(16, 13.0, a.grid_step);
    pot = brw_theta_potential(a.delta, p_infinity_curve(fam, -24.0, 13.0));
  }
  GStarResult r = g_star_limit(pot, a.tol, a.kmax);

  nlohmann::json cfg = base_config("free-energy", a);
  cfg["potential"] = a.potential;
  cfg["delta"] = a.delta;
  cfg["tol"] = a.tol;
  cfg["kmax"] = a.kmax;

  Table t;
  t.columns = {"k", "u_star", "g_star", "gap"};
  for (const GStarRow& row : r.rows)
    t.add_row({long(row.k), row.u_star, row.g_star, row.gap});
  a.out.emit(t, cfg);
  if (!r.converged)
    std::fprintf(stderr,
                 "note: gap %.3g after %d generations, above tol %.3g\n",
                 r.gap, r.k_reached, a.tol);
  return 0;
}

int run_sample(const Args& a) {
  if (std::isnan(a.u)) throw ValidationError("sample needs --u");
  McMethod method =
      a.method == "tilted" ? McMethod::tilted : McMethod::naive;
  PEstimate est = estimate_p(a.n, a.u, method, a.trials, a.seed,
                             a.tilt_offset, a.tilt_depth);

  nlohmann::json cfg = base_config("sample", a);
  cfg["n"] = a.n;
  cfg["u"] = a.u;
  cfg["method"] = a.method;
  cfg["trials"] = a.trials;
  cfg["seed"] = a.seed;
  cfg["tilt_offset"] = a.tilt_offset;
  cfg["tilt_depth"] = a.tilt_depth;

  Table t;
  t.columns = {"n", "u", "method", "trials", "log_estimate", "se", "ess",
               "seed"};
  t.add_row({long(a.n), a.u, a.method, a.trials, est.log_estimate,
             est.std_error, est.ess, long(a.seed)});
  a.out.emit(t, cfg);
  if (est.zero_acceptance)
    std::fprintf(stderr,
                 "note: no trial cleared the wall; the estimate is a "
                 "rule-of-three upper bound\n");
  return 0;
}

int run_verify(const Args& a) {
  AcceptanceReport report = run_acceptance(a.only, a.seed);
  std::fputs(report.text_summary().c_str(), stdout);
  if (!a.out.path.empty())
    write_atomic(a.out.path,
                 report.as_json(a.seed, a.only).dump(2) + "\n");
  return report.all_passed ? 0 : 3;
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
  CLI::App app{"hard-wall conditioned branching random walk toolkit"};
  app.require_subcommand(1);
  Args a;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", a.out.path, "output file (default: stdout)");
    cmd->add_option("--format", a.out.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--grid-step", a.grid_step, "grid resolution")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--grid-lo", a.grid_lo, "grid lower edge");
    cmd->add_option("--grid-hi", a.grid_hi, "grid upper edge");
  };

  CLI::App* tails = app.add_subcommand("tails", "tail probabilities over u");
  tails->add_option("--n", a.n, "tree depth")->required();
  tails->add_option("--u", a.u_range, "u value or start:stop:step")
      ->required();
  add_common(tails);

  CLI::App* theta =
      app.add_subcommand("theta", "normalized tail residuals over u");
  theta->add_option("--n", a.n, "tree depth")->required();
  theta->add_option("--u", a.u_range, "u value or start:stop:step")
      ->required();
  add_common(theta);

  CLI::App* profile =
      app.add_subcommand("profile", "conditional branch means and variances");
  profile->add_option("--n", a.n, "tree depth")->required();
  profile->add_option("--u", a.u, "wall height (default: m(n))");
  profile->add_option("--l", a.l, "branch length (default: log2 n + 10)");
  profile->add_flag("--marginals", a.marginals,
                    "emit full site marginals instead of moments");
  add_common(profile);

  CLI::App* covariance =
      app.add_subcommand("covariance", "leaf covariances by meeting depth");
  covariance->add_option("--n", a.n, "tree depth")->required();
  covariance->add_option("--u", a.u, "wall height (default: m(n))");
  covariance->add_option("--meet", a.meet_range,
                         "meeting depths, value or start:stop:step");
  add_common(covariance);

  CLI::App* kernel =
      app.add_subcommand("kernel", "one conditioned step kernel");
  kernel->add_option("--n", a.n, "tree depth")->required();
  kernel->add_option("--u", a.u, "wall height (default: m(n))");
  kernel->add_option("--j", a.j, "site the step leaves from")
      ->capture_default_str();
  kernel->add_option("--x", a.x, "value conditioned on at site j")
      ->capture_default_str();
  kernel->add_option("--l", a.l, "branch length");
  add_common(kernel);

  CLI::App* tv = app.add_subcommand(
      "tv", "total variation between conditioned flows");
  tv->add_option("--n", a.n, "tree depth")->required();
  tv->add_option("--u", a.u, "wall height (default: m(n))");
  tv->add_option("--v", a.v, "first start value")->required();
  tv->add_option("--vprime", a.vprime, "second start value")->required();
  tv->add_option("--l", a.l, "chain length (default: min(n, 34))");
  add_common(tv);

  CLI::App* fe = app.add_subcommand("free-energy",
                                    "tree free-energy recursion limits");
  fe->add_option("--potential", a.potential, "potential family")
      ->check(CLI::IsMember({"quad", "theta"}))
      ->capture_default_str();
  fe->add_option("--delta", a.delta, "tilt rate exponent for theta")
      ->capture_default_str();
  fe->add_option("--tol", a.tol, "convergence tolerance")
      ->capture_default_str();
  fe->add_option("--kmax", a.kmax, "generation cap")->capture_default_str();
  add_common(fe);

  CLI::App* sample =
      app.add_subcommand("sample", "Monte Carlo probability estimates");
  sample->add_option("--n", a.n, "tree depth")->required();
  sample->add_option("--u", a.u, "wall height")->required();
  sample->add_option("--method", a.method, "naive or tilted")
      ->check(CLI::IsMember({"naive", "tilted"}))
      ->capture_default_str();
  sample->add_option("--trials", a.trials, "number of trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample->add_option("--seed", a.seed, "random seed")->capture_default_str();
  sample->add_option("--tilt-offset", a.tilt_offset,
                     "height offset above u' for the tilt")
      ->capture_default_str();
  sample->add_option("--tilt-depth", a.tilt_depth,
                     "tilt depth (0 = automatic)")
      ->capture_default_str();
  add_common(sample);

  CLI::App* verify =
      app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--only", a.only,
                     "run only criteria whose slug contains a token");
  verify->add_option("--seed", a.seed, "random seed")->capture_default_str();
  verify->add_option("--out", a.out.path, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help requests carry exit code 0; everything else is a usage error
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (tails->parsed()) return run_tails(a, false);
    if (theta->parsed()) return run_tails(a, true);
    if (profile->parsed()) return run_profile(a);
    if (covariance->parsed()) return run_covariance(a);
    if (kernel->parsed()) return run_kernel(a);
    if (tv->parsed()) return run_tv(a);
    if (fe->parsed()) return run_free_energy(a);
    if (sample->parsed()) return run_sample(a);
    if (verify->parsed()) return run_verify(a);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace hardwall
