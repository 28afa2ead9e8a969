#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hardwall/errors.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/model.hpp"
#include "hardwall/spine.hpp"

using namespace hardwall;

namespace {

double tv_between(const LogGridFunction& a, const LogGridFunction& b) {
  const GridSpec& g = a.grid();
  double acc = 0.0;
  for (int i = 0; i < g.count; ++i) {
    double wt = (i == 0 || i == g.count - 1) ? 0.5 : 1.0;
    double pa = a[i] == kNegInf ? 0.0 : std::exp(a[i]);
    double pb = b[i] == kNegInf ? 0.0 : std::exp(b[i]);
    acc += wt * std::abs(pa - pb);
  }
  return 0.5 * acc * g.step;
}

}  // namespace

TEST_CASE("single-step spine is a truncated gaussian") {
  TailFamily fam = TailFamily::build(1, 6.0);
  // put the wall half a cell below a grid node so the effective truncation
  // point v is unambiguous, then correct the closed form for the half-cell
  // ramp the trapezoid rule sees at the jump
  const double h = 0.005;
  const double v = 0.825;
  double u = ModelParams::m(1) + (v - 0.5 * h);
  SpineSetup setup = make_spine_setup(1, 1, u);
  GridSpec grid = GridSpec::from_range(-10.0, 10.0, h);
  ChainDP dp(build_spine(fam, setup, grid));

  double phi = std::exp(log_normal_pdf(v, 1.0));
  double z = normal_cdf(-v) + 0.5 * h * phi;
  double n1 = phi * (1.0 + 0.5 * h * v);
  double n2 = normal_cdf(-v) + v * phi + 0.5 * h * v * v * phi;
  double mean = n1 / z;
  double var = n2 / z - mean * mean;
  CHECK(dp.marginal(1).mean == doctest::Approx(mean).epsilon(1e-4));
  CHECK(dp.marginal(1).var == doctest::Approx(var).epsilon(1e-4));
  CHECK(dp.log_normalizer() == doctest::Approx(std::log(z)).epsilon(1e-4));
}

TEST_CASE("conditioning on a sure event leaves the walk free") {
  TailFamily fam = TailFamily::build(6, 6.0);
  SpineSetup setup = make_spine_setup(6, 3, -14.0);
  GridSpec grid = GridSpec::from_range(-16.0, 16.0, 0.01);
  ChainDP dp(build_spine(fam, setup, grid));
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> freev(grid.count);
    for (int i = 0; i < grid.count; ++i)
      freev[i] = log_normal_pdf(grid.point(i), double(k));
    double tv = tv_between(dp.marginal(k).log_density,
                           LogGridFunction(grid, std::move(freev)));
    CHECK(tv < 1e-4);
  }
}

TEST_CASE("leaf mean of a depth-1 subtree is the one-sided gaussian mean") {
  TailFamily fam = TailFamily::build(2, 8.0);
  for (double a : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    double expect = std::exp(log_normal_pdf(a, 1.0)) / normal_cdf(-a);
    CHECK(subtree_leaf_mean(fam, 1, a) == doctest::Approx(expect).epsilon(1e-4));
  }
  CHECK(std::abs(subtree_leaf_mean(fam, 2, -30.0)) < 1e-6);
}

TEST_CASE("mean profile properties across thresholds") {
  const int n = 16;
  TailFamily fam = TailFamily::build(n, 10.0);
  GridSpec grid = GridSpec::from_range(-12.0, 18.0, 0.01);

  std::vector<double> last_means;
  double prev_end = -1e300;
  for (double u : {2.0, 4.0, 6.0, 8.0}) {
    SpineSetup setup = make_spine_setup(n, 4, u);
    ChainDP dp(build_spine(fam, setup, grid));
    std::vector<double> means = conditional_mean_profile(dp);
    CHECK(means[0] == 0.0);
    for (int k = 1; k <= 4; ++k) {
      CHECK(means[k] >= -1e-9);
      CHECK(means[k] < std::max(u, 0.0) + 5.0);
      // second moment stays within C (u^2 + 1) of the free value k
      double m2 = dp.marginal(k).var + means[k] * means[k];
      CHECK(std::abs(m2 - k) <= 3.0 * (u * u + 1.0));
    }
    CHECK(means[4] > prev_end - 1e-9);
    prev_end = means[4];
    last_means = means;
  }
}

TEST_CASE("derivative identity ties the chain to the tail curve") {
  const int n = 24;
  TailFamily fam = TailFamily::build(n, 12.0);
  double u = 10.0;  // l_u = 3
  GridSpec grid = GridSpec::from_range(-12.0, 20.0, 0.01);
  SpineSetup setup = make_spine_setup(n, 6, u);
  ChainDP dp(build_spine(fam, setup, grid));
  CHECK(derivative_identity_gap(fam, dp, n, u) < 0.05);
}

TEST_CASE("recentring is an exact coordinate change") {
  const int n = 32;
  TailFamily fam = TailFamily::build(n, 40.0);
  double u = 38.0;  // l_u = 5
  SpineSetup setup = make_spine_setup(n, 4, u);

  GridSpec h_grid = GridSpec::from_range(-14.0, 52.0, 0.01);
  GridSpec y_grid = GridSpec::from_range(-14.0, 14.0, 0.01);
  ChainDP dp_h(build_spine(fam, setup, h_grid));
  RecenteredSpine rec = recenter(fam, setup, y_grid, 1);
  ChainDP dp_y(rec.chain);

  for (int k = 1; k <= 4; ++k) {
    // same lattice: compare the shifted densities node by node
    const LogGridFunction& dh = dp_h.marginal(k).log_density;
    const LogGridFunction& dy = dp_y.marginal(k).log_density;
    long off = std::lround((rec.mu_snap[k] + y_grid.lo - h_grid.lo) / h_grid.step);
    double acc = 0.0;
    for (int i = 0; i < y_grid.count; ++i) {
      double py = dy[i] == kNegInf ? 0.0 : std::exp(dy[i]);
      double ph = dh[int(i + off)] == kNegInf ? 0.0 : std::exp(dh[int(i + off)]);
      acc += (i == 0 || i == y_grid.count - 1 ? 0.5 : 1.0) * std::abs(py - ph);
    }
    CHECK(0.5 * acc * y_grid.step < 1e-8);
    CHECK(dp_y.marginal(k).mean ==
          doctest::Approx(dp_h.marginal(k).mean - rec.mu_snap[k]).epsilon(1e-6));
  }
  CHECK(dp_y.marginal(0).var == 0.0);
  CHECK(dp_y.marginal(0).mean == 0.0);

  SUBCASE("validity window is enforced") {
    CHECK_THROWS_AS(recenter(fam, make_spine_setup(n, 4, u), y_grid, 3),
                    ValidationError);
  }

  SUBCASE("potentials responsible for localization grow on both sides") {
    // envelope on sgn(s) f'(s) with the wall-distance kink
    for (int k = 1; k <= 3; ++k) {
      const LogGridFunction& f = rec.f[k - 1];
      double a = std::pow(2.0, -k - 1) * setup.u_prime;
      for (double s = -6.0; s <= 6.0 + 1e-9; s += 0.25) {
        if (std::abs(s) < 0.5) continue;
        int i = y_grid.nearest_index(s);
        double fp = (f[i + 1] - f[i - 1]) / (2.0 * y_grid.step);
        double shape = std::abs(s) - std::max(s - a, 0.0);
        double v = (s > 0 ? fp : -fp);
        CHECK(v >= 0.02 * shape - 8.0);
        CHECK(v <= 50.0 * shape + 8.0);
      }
    }
  }
}

TEST_CASE("tiled interior chain localizes uniformly in length") {
  const int n = 64;
  TailFamily fam = TailFamily::build(n, 40.0);
  double u = 38.0;  // l_u = 5, interior site 5 - 3 = 2
  GridSpec y_grid = GridSpec::from_range(-16.0, 16.0, 0.01);
  ChainSpec spec = tiled_interior_chain(fam, n, u, 24, y_grid);
  ChainDP dp(spec);

  double v12 = dp.marginal(12).var, v20 = dp.marginal(20).var;
  CHECK(v12 < 4.0);
  CHECK(std::abs(v20 - v12) < 0.2);
  CHECK(std::abs(dp.marginal(20).mean) < 2.0);

  PinnedTailResult tails = pinned_tail(dp, 20, {1.0, 2.0, 3.0, 4.0});
  CHECK(tails.potentials_ok);
  for (size_t i = 0; i + 1 < tails.t.size(); ++i)
    CHECK(tails.log_tail[i + 1] < tails.log_tail[i] - 0.5);
}

TEST_CASE("hat deviations at the profile depth") {
  const int n = 32;  // l_n = 5
  TailFamily fam = TailFamily::build(n, 6.0);
  GridSpec grid = GridSpec::from_range(-12.0, 48.0, 0.01);
  HatTailCurve curve = hat_h_tails(fam, n, 5, {0.0, 2.0, 4.0, 6.0}, grid);

  CHECK(curve.mu == doctest::Approx(ModelParams::m(27)));
  // at zero deviation the two sides partition the mass
  double up0 = std::exp(curve.points[0].log_upper);
  double lo0 = std::exp(curve.points[0].log_lower);
  CHECK(up0 + lo0 == doctest::Approx(1.0).epsilon(1e-2));
  for (size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].log_upper < curve.points[i - 1].log_upper);
    CHECK(curve.points[i].log_lower < curve.points[i - 1].log_lower);
  }
  // both sides decay at least as fast as a centred gaussian of the free
  // variance would; the sharper shape constants are probed at larger n
  double dev = curve.points[3].u_dev;
  CHECK(curve.points[3].log_upper < -dev * dev / 12.0);
  CHECK(curve.points[3].log_lower < -dev * dev / 12.0);
}

TEST_CASE("leaf pair covariance through the meeting depth") {
  const int n = 12;
  TailFamily fam = TailFamily::build(n, 8.0);
  GridSpec grid = GridSpec::from_range(-12.0, 22.0, 0.01);
  double u = ModelParams::m(n);
  SpineSetup setup = make_spine_setup(n, n, u);
  ChainDP dp(build_spine(fam, setup, grid));

  CHECK(pair_covariance_tree(fam, dp, n, u, 0) == 0.0);
  // x = y: the covariance collapses to the leaf variance
  double self = pair_covariance_tree(fam, dp, n, u, n);
  CHECK(self == doctest::Approx(dp.marginal(n).var).epsilon(1e-6));
  // deeper meetings share more of the branch
  double c3 = pair_covariance_tree(fam, dp, n, u, 3);
  double c6 = pair_covariance_tree(fam, dp, n, u, 6);
  double c9 = pair_covariance_tree(fam, dp, n, u, 9);
  CHECK(c3 > 0.0);
  CHECK(c6 > c3);
  CHECK(c9 > c6);
}
