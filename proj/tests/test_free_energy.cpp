#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "hardwall/errors.hpp"
#include "hardwall/free_energy.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/tails.hpp"
#include "hardwall/util.hpp"

using namespace hardwall;

namespace {

PotentialSpec on_grid(double lo, double hi, double step,
                      const std::function<double(double)>& fn,
                      double max_jump = 1.0) {
  GridSpec g = GridSpec::from_range(lo, hi, step);
  std::vector<double> v(g.count);
  for (int i = 0; i < g.count; ++i) v[i] = fn(g.point(i));
  PotentialSpec pot;
  pot.g = LogGridFunction(g, std::move(v));
  pot.max_step_jump = max_jump;
  return pot;
}

// For g(u) = -u^2 every generation stays an exact parabola:
// G_k(u) = -u^2 / (2^{k+1} - 1) - quad_offset(k), so the limit of the
// maxima is the full series below.
double quad_offset(int k) {
  double c = 0.0;
  for (int j = 1; j <= k; ++j)
    c += std::ldexp(1.0, -j) *
         std::log((std::ldexp(1.0, j + 1) - 1.0) / (std::ldexp(1.0, j) - 1.0));
  return c;
}

// One generation straight from the definition: composite Simpson over
// z in [-12, 12] at the grid step, so u + z lands on grid nodes exactly.
double two_leaf_oracle(const LogGridFunction& g, int i) {
  const GridSpec& gs = g.grid();
  long half = std::lround(12.0 / gs.step);
  long double mx = kNegInf;
  for (long j = -half; j <= half; ++j) {
    double t = log_normal_pdf(gs.step * double(j), 1.0) + g[int(i + j)];
    if (t > mx) mx = t;
  }
  long double acc = 0.0L;
  for (long j = -half; j <= half; ++j) {
    long double c = (j == -half || j == half) ? 1.0L : (((j + half) % 2) ? 4.0L : 2.0L);
    long double t = log_normal_pdf(gs.step * double(j), 1.0) + g[int(i + j)];
    acc += c * expl(t - mx);
  }
  return double(mx + logl(acc * (long double)(gs.step) / 3.0L));
}

}  // namespace

TEST_CASE("quadratic potential stays a parabola generation by generation") {
  PotentialSpec pot = on_grid(-20.0, 20.0, 0.01, [](double u) { return -u * u; });
  FreeEnergyCurve c = fe_base(pot);
  CHECK(c.g_star == 0.0);
  CHECK(c.u_star == 0.0);

  for (int k = 1; k <= 3; ++k) {
    c = fe_step(c);
    double a = 1.0 / (std::ldexp(1.0, k + 1) - 1.0);
    double off = quad_offset(k);
    LogGridFunction gk = c.curve();
    double worst = 0.0;
    for (double u = -5.0; u <= 5.0 + 1e-9; u += 0.37) {
      int i = gk.grid().nearest_index(u);
      double x = gk.grid().point(i);
      worst = std::max(worst, std::abs(gk[i] - (-a * x * x - off)));
    }
    CHECK(worst < 1e-6);
    CHECK(c.g_star == doctest::Approx(-off).epsilon(1e-8));
    CHECK(std::abs(c.u_star) < 1e-12);
  }
}

TEST_CASE("a potential with a large positive part is rescaled, not overflowed") {
  PotentialSpec pot =
      on_grid(-20.0, 20.0, 0.01, [](double u) { return 50.0 - u * u; });
  FreeEnergyCurve c = fe_base(pot);
  for (int k = 0; k < 3; ++k) c = fe_step(c);
  CHECK(c.g_star == doctest::Approx(50.0 - quad_offset(3)).epsilon(1e-8));
}

TEST_CASE("constant free energy is a fixed point of the step") {
  GridSpec g = GridSpec::from_range(-10.0, 10.0, 0.01);
  FreeEnergyCurve c;
  c.k = 0;
  c.s = LogGridFunction::constant(g, 0.7);
  c.g_star = 0.7;
  c = fe_step(c);
  LogGridFunction g1 = c.curve();
  for (int i = 0; i < g1.size(); i += 97) CHECK(g1[i] == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(c.g_star == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("first generation matches the direct quadrature for three potentials") {
  std::vector<std::function<double(double)>> fns = {
      [](double u) { return -u * u; },
      [](double u) { return -(u * u - 4.0) * (u * u - 4.0) / 10.0 + 0.3 * u; },
      [](double u) { return -u * u * u * u / 8.0 + std::cos(2.0 * u); },
  };
  for (const auto& fn : fns) {
    PotentialSpec pot = on_grid(-20.0, 20.0, 0.01, fn, 50.0);
    FreeEnergyCurve c1 = fe_step(fe_base(pot));
    LogGridFunction g1 = c1.curve();
    double worst = 0.0;
    for (double u = -6.0; u <= 6.0 + 1e-9; u += 0.83) {
      int i = g1.grid().nearest_index(u);
      worst = std::max(worst, std::abs(g1[i] - two_leaf_oracle(pot.g, i)));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("maxima never exceed the top of the potential") {
  PotentialSpec pot = on_grid(
      -20.0, 20.0, 0.01,
      [](double u) { return -(u * u - 4.0) * (u * u - 4.0) / 10.0 + 0.3 * u; },
      50.0);
  double top = pot.g.max_value();
  FreeEnergyCurve c = fe_base(pot);
  for (int k = 0; k < 5; ++k) {
    CHECK(c.g_star <= top + 1e-9);
    c = fe_step(c);
  }
}

TEST_CASE("curves stay continuous as the grid refines") {
  auto max_jump = [](double step) {
    PotentialSpec pot =
        on_grid(-20.0, 20.0, step, [](double u) { return -u * u; });
    FreeEnergyCurve c = fe_base(pot);
    for (int k = 0; k < 3; ++k) c = fe_step(c);
    LogGridFunction gk = c.curve();
    double m = 0.0;
    for (int i = 0; i + 1 < gk.size(); ++i) m = std::max(m, std::abs(gk[i + 1] - gk[i]));
    return m;
  };
  double coarse = max_jump(0.01);
  double fine = max_jump(0.005);
  CHECK(coarse < 0.05);
  CHECK(fine < 0.75 * coarse);
}

TEST_CASE("the limit of the maxima settles and matches the series") {
  PotentialSpec pot = on_grid(-20.0, 20.0, 0.01, [](double u) { return -u * u; });
  GStarResult res = g_star_limit(pot, 1e-3, 20);
  CHECK(res.converged);
  CHECK(res.k_reached <= 14);
  for (size_t i = 1; i < res.rows.size(); ++i)
    CHECK(res.rows[i].gap < res.rows[i - 1].gap);
  CHECK(std::abs(res.g_star - (-quad_offset(60))) < 1e-3);

  SUBCASE("halving the grid step moves the answer by less than the tolerance") {
    PotentialSpec fine =
        on_grid(-20.0, 20.0, 0.005, [](double u) { return -u * u; });
    GStarResult res2 = g_star_limit(fine, 1e-3, 20);
    CHECK(std::abs(res2.g_star - res.g_star) < 2e-3);
  }

  SUBCASE("translating the potential translates the argmax and nothing else") {
    PotentialSpec moved = on_grid(-20.0, 20.0, 0.01, [](double u) {
      double t = u - 3.0;
      return -t * t;
    });
    GStarResult res3 = g_star_limit(moved, 1e-3, 20);
    CHECK(std::abs(res3.g_star - res.g_star) < 1e-6);
    CHECK(res3.u_star == doctest::Approx(res.u_star + 3.0).epsilon(1e-9));
  }
}

TEST_CASE("potential validation rejects what the recursion cannot digest") {
  CHECK_THROWS_AS(
      on_grid(-2.0, 2.0, 0.01, [](double u) { return -u * u; }).validate(),
      ValidationError);  // edges only 4 below the max
  CHECK_THROWS_AS(
      on_grid(-20.0, 20.0, 0.01, [](double u) { return -u * u * u * u; })
          .validate(),
      ValidationError);  // adjacent jumps of ~300 at the edges
  PotentialSpec ok = on_grid(-20.0, 20.0, 0.01, [](double u) { return -u * u; });
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("tail-curve potential has the advertised shape") {
  TailFamily fam = TailFamily::build(16, 13.0);
  LogGridFunction tail = p_infinity_curve(fam, -24.0, 13.0);

  PotentialSpec pot = brw_theta_potential(0.0, tail);
  const GridSpec& sg = pot.g.grid();
  CHECK(sg.lo == doctest::Approx(-13.0));
  CHECK(sg.hi() == doctest::Approx(24.0));

  // far right the tail factor is flat, leaving the pure linear term
  std::vector<double> xs, ys;
  for (double s = 18.0; s <= 23.0 + 1e-9; s += 0.5) {
    int i = sg.nearest_index(s);
    xs.push_back(sg.point(i));
    ys.push_back(pot.g[i]);
  }
  LineFit right = fit_line(xs, ys);
  CHECK(right.slope == doctest::Approx(-1.0).epsilon(5e-2));

  PotentialSpec pot5 = brw_theta_potential(0.5, tail);
  xs.clear();
  ys.clear();
  for (double s = 18.0; s <= 23.0 + 1e-9; s += 0.5) {
    int i = pot5.g.grid().nearest_index(s);
    xs.push_back(pot5.g.grid().point(i));
    ys.push_back(pot5.g[i]);
  }
  LineFit right5 = fit_line(xs, ys);
  CHECK(right5.slope == doctest::Approx(-std::pow(2.0, 0.5)).epsilon(5e-2));

  // far left the tail dominates and the falloff steepens superlinearly
  auto at = [&](double s) { return pot.g[sg.nearest_index(s)]; };
  CHECK(at(-6.0) > at(-8.0));
  CHECK(at(-8.0) > at(-10.0));
  CHECK(at(-10.0) - at(-8.0) < at(-8.0) - at(-6.0));

  GStarResult res = g_star_limit(pot, 1e-3, 16);
  CHECK((res.converged || res.gap < 2e-3));
  CHECK(std::abs(res.g_star) < 10.0);

  CHECK_THROWS_AS(brw_theta_potential(1.0, tail), ValidationError);
  // a tail window this narrow cannot clear the edge-drop requirement
  CHECK_THROWS_AS(brw_theta_potential(0.0, p_infinity_curve(fam, -6.0, 6.0)),
                  ValidationError);
}
