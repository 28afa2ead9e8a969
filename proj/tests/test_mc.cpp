#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "hardwall/errors.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/mc.hpp"
#include "hardwall/model.hpp"
#include "hardwall/rng.hpp"
#include "hardwall/spine.hpp"
#include "hardwall/tails.hpp"

using namespace hardwall;

TEST_CASE("plain tree draws have the tree covariance") {
  const int n = 6;
  const long draws = 40000;
  // depth-3 nodes 0 and 1 share their depth-2 parent
  std::size_t a = (1u << 3) - 1 + 0, b = (1u << 3) - 1 + 1;
  double sa = 0, saa = 0, sb = 0, sab = 0;
  for (long t = 0; t < draws; ++t) {
    TreeSample s = sample_tree(n, mix_seed(101, std::uint64_t(t)));
    REQUIRE(s.values[0] == 0.0);
    REQUIRE(s.log_weight == 0.0);
    sa += s.values[a];
    saa += s.values[a] * s.values[a];
    sb += s.values[b];
    sab += s.values[a] * s.values[b];
  }
  double ma = sa / draws, mb = sb / draws;
  double var = saa / draws - ma * ma;
  double cov = sab / draws - ma * mb;
  // 3 SE bands: SE(var) ~ var sqrt(2/T), SE(cov) ~ sqrt((v1 v2 + c^2)/T)
  CHECK(std::abs(var - 3.0) < 3.0 * 3.0 * std::sqrt(2.0 / draws));
  CHECK(std::abs(cov - 2.0) < 3.0 * std::sqrt((9.0 + 4.0) / draws));

  TreeSample one = sample_tree(n, 12345);
  TreeSample two = sample_tree(n, 12345);
  CHECK(one.values == two.values);
  CHECK_THROWS_AS(sample_tree(0, 1), ValidationError);
  CHECK_THROWS_AS(sample_tree(kMaxTreeDepth + 1, 1), ValidationError);
}

TEST_CASE("tilt plans carry the closed-form energy") {
  for (auto [v, k] : std::vector<std::pair<double, int>>{
           {1.5, 1}, {2.7, 3}, {-0.8, 5}, {4.0, 10}}) {
    TiltPlan p = make_tilt_plan(k, v);
    CHECK(p.mu[0] == 0.0);
    CHECK(p.mu[k] == doctest::Approx(v).epsilon(1e-12));
    CHECK(std::abs(p.energy - dirichlet_energy(v, k)) < 1e-10);
  }
  CHECK_THROWS_AS(make_tilt_plan(0, 1.0), ValidationError);
}

TEST_CASE("zero-height tilt is the identity") {
  TiltPlan p = make_tilt_plan(3, 0.0);
  TreeSample plain = sample_tree(6, 4242);
  TreeSample tilted = sample_tilted(6, p, 4242);
  CHECK(tilted.log_weight == 0.0);
  CHECK(tilted.values == plain.values);
  CHECK_THROWS_AS(sample_tilted(2, p, 1), ValidationError);
}

TEST_CASE("tilted draws integrate to one and reproduce plain probabilities") {
  const long draws = 20000;
  TiltPlan p = make_tilt_plan(2, 1.5);
  double sw = 0.0;
  for (long t = 0; t < draws; ++t)
    sw += std::exp(sample_tilted(5, p, mix_seed(7, std::uint64_t(t))).log_weight);
  // Var(w) = exp(2 energy) - 1
  double se = std::sqrt((std::exp(2.0 * p.energy) - 1.0) / draws);
  CHECK(std::abs(sw / draws - 1.0) < 3.0 * se);

  TiltPlan q = make_tilt_plan(1, 0.8);
  double hits = 0.0;
  for (long t = 0; t < draws; ++t) {
    TreeSample s = sample_tilted(1, q, mix_seed(8, std::uint64_t(t)));
    if (s.values[1] > 1.0) hits += std::exp(s.log_weight);
  }
  CHECK(hits / draws == doctest::Approx(normal_cdf(-1.0)).epsilon(0.25));
}

TEST_CASE("naive probability estimates match closed form and the tables") {
  PEstimate e1 = estimate_p(1, 1.0, McMethod::naive, 40000, 31);
  double p1 = std::pow(normal_cdf(ModelParams::m(1) - 1.0), 2.0);
  CHECK(std::abs(std::exp(e1.log_estimate) - p1) < 3.0 * e1.std_error);
  CHECK(e1.ess == double(e1.accepted));

  TailFamily fam = TailFamily::build(6, 6.0);
  PEstimate e6 = estimate_p(6, 1.0, McMethod::naive, 40000, 32);
  double p6 = std::exp(fam.log_p(6, 1.0));
  CHECK(std::abs(std::exp(e6.log_estimate) - p6) < 3.0 * e6.std_error + 1e-4);
}

TEST_CASE("tilted estimates agree with the tables and beat naive efficiency") {
  TailFamily fam = TailFamily::build(10, 8.0);
  double p = std::exp(fam.log_p(10, 4.0));
  PEstimate tilted = estimate_p(10, 4.0, McMethod::tilted, 20000, 33);
  CHECK(!tilted.zero_acceptance);
  CHECK(std::abs(std::exp(tilted.log_estimate) - p) <
        3.0 * tilted.std_error + 1e-5);
  PEstimate naive = estimate_p(10, 4.0, McMethod::naive, 20000, 34);
  CHECK(std::abs(std::exp(naive.log_estimate) - p) <
        3.0 * naive.std_error + 1e-5);
  // at this threshold naive acceptance is ~32 in 2e4 trials; the tilted run
  // concentrates its budget on the conditioned region and should deliver a
  // few times that effective size
  CHECK(tilted.ess > 100.0);
  CHECK(tilted.ess > 2.0 * double(naive.accepted));
}

TEST_CASE("extreme thresholds hit the documented edges") {
  PEstimate sure = estimate_p(4, -30.0, McMethod::naive, 2000, 5);
  CHECK(sure.log_estimate == 0.0);
  CHECK(sure.accepted == sure.trials);
  CHECK(sure.std_error == 0.0);

  PEstimate none = estimate_p(8, 30.0, McMethod::naive, 200, 6);
  CHECK(none.zero_acceptance);
  CHECK(none.accepted == 0);
  CHECK(none.log_estimate == doctest::Approx(std::log(3.0 / 200.0)));

  CHECK_THROWS_AS(estimate_p(30, 1.0, McMethod::naive, 10, 1), ValidationError);
  CHECK_THROWS_AS(estimate_p(5, 1.0, McMethod::naive, 0, 1), ValidationError);
  CHECK_THROWS_AS(estimate_p(5, 0.5, McMethod::tilted, 10, 1), ValidationError);
}

TEST_CASE("conditional estimates line up with the chain marginals") {
  auto root = [](const TreeSample& s) { return s.values[0]; };
  ConditionalEstimate r = estimate_conditional(4, 0.0, root, McMethod::naive,
                                               5000, 40);
  CHECK(r.estimate == 0.0);
  CHECK(r.std_error == 0.0);
  CHECK(r.reliable);

  // mean of the depth-3 ancestor of the leftmost leaf under the wall
  TailFamily fam = TailFamily::build(10, 8.0);
  GridSpec grid = GridSpec::from_range(-12.0, 16.0, 0.01);
  ChainDP dp(build_spine(fam, make_spine_setup(10, 3, 2.0), grid));
  double want = dp.marginal(3).mean;
  auto node3 = [](const TreeSample& s) { return s.values[(1u << 3) - 1]; };
  ConditionalEstimate nv = estimate_conditional(10, 2.0, node3,
                                                McMethod::naive, 100000, 41);
  CHECK(nv.reliable);
  CHECK(std::abs(nv.estimate - want) < 3.0 * nv.std_error + 0.02);
  ConditionalEstimate tl = estimate_conditional(10, 2.0, node3,
                                                McMethod::tilted, 30000, 42);
  CHECK(tl.reliable);
  CHECK(std::abs(tl.estimate - want) < 3.0 * tl.std_error + 0.02);

  ConditionalEstimate few = estimate_conditional(6, 4.5, root, McMethod::naive,
                                                 500, 43);
  CHECK(!few.reliable);
}

TEST_CASE("leaf products recover the pair covariance") {
  const int n = 3;
  double u = ModelParams::m(n);
  TailFamily fam = TailFamily::build(n, 4.0);
  GridSpec grid = GridSpec::from_range(-10.0, 10.0, 0.01);
  ChainDP dp(build_spine(fam, make_spine_setup(n, n, u), grid));
  double mean_leaf = dp.marginal(n).mean;
  double want =
      pair_covariance_tree(fam, dp, n, u, 1) + mean_leaf * mean_leaf;

  // leaves 0 and 2 of the depth-3 tree branch apart at depth 1
  auto prod = [](const TreeSample& s) {
    return s.values[(1u << 3) - 1 + 0] * s.values[(1u << 3) - 1 + 2];
  };
  ConditionalEstimate e = estimate_conditional(n, u, prod, McMethod::naive,
                                               200000, 44);
  CHECK(e.reliable);
  CHECK(std::abs(e.estimate - want) < 3.0 * e.std_error + 0.02);
}

TEST_CASE("conditional node means rise with the threshold") {
  auto node2 = [](const TreeSample& s) { return s.values[(1u << 2) - 1]; };
  double prev = -1e300;
  for (double u : {-1.0, 0.5, 2.0}) {
    ConditionalEstimate e = estimate_conditional(6, u, node2, McMethod::naive,
                                                 150000, 45);
    CHECK(e.reliable);
    CHECK(e.estimate > prev - 0.05);
    prev = e.estimate;
  }
}

TEST_CASE("estimates are bitwise reproducible across seeds and threads") {
  PEstimate a = estimate_p(10, 4.0, McMethod::tilted, 5000, 77);
  PEstimate b = estimate_p(10, 4.0, McMethod::tilted, 5000, 77);
  CHECK(a.log_estimate == b.log_estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.ess == b.ess);

  setenv("HARDWALL_THREADS", "3", 1);
  PEstimate c = estimate_p(10, 4.0, McMethod::tilted, 5000, 77);
  auto node2 = [](const TreeSample& s) { return s.values[(1u << 2) - 1]; };
  ConditionalEstimate d = estimate_conditional(8, 1.0, node2, McMethod::naive,
                                               20000, 78);
  setenv("HARDWALL_THREADS", "1", 1);
  PEstimate e = estimate_p(10, 4.0, McMethod::tilted, 5000, 77);
  ConditionalEstimate f = estimate_conditional(8, 1.0, node2, McMethod::naive,
                                               20000, 78);
  unsetenv("HARDWALL_THREADS");
  CHECK(c.log_estimate == a.log_estimate);
  CHECK(e.log_estimate == a.log_estimate);
  CHECK(d.estimate == f.estimate);
  CHECK(d.std_error == f.std_error);
}
