#pragma once

#include <cstdint>
#include <vector>

#include "hardwall/grid.hpp"
#include "hardwall/log_conv.hpp"

namespace hardwall {

// Markov chain h(0), ..., h(length): h(0) = start is deterministic, each
// step adds an N(0, step_var) increment, and site k carries a multiplicative
// weight exp(log_weight[k-1](h(k))).
struct ChainSpec {
  GridSpec grid;
  int length = 0;
  double start = 0.0;
  double step_var = 1.0;
  std::vector<LogGridFunction> log_weight;  // one per site 1..length

  void validate() const;
};

struct SiteMarginal {
  LogGridFunction log_density;  // normalized on the grid
  double mean = 0.0;
  double var = 0.0;
};

struct CouplingResult {
  // survival[k] = empirical P(tau > k) for k = 0..length, tau the step at
  // which the maximal coupling first lands both chains on the same point
  std::vector<double> survival;
  int pairs = 0;
  double window = 0.0;
};

// Forward-backward pass over the weighted chain.  alpha(k) accumulates the
// past including site k's weight, beta(k) the future excluding it, so the
// site law is alpha + beta and the step kernel out of (k, v) is
// phi(u - v) + weight(u) + beta(k+1)(u) - beta(k)(v).
class ChainDP {
 public:
  explicit ChainDP(ChainSpec spec, const ConvOptions& opt = {});

  const ChainSpec& spec() const { return spec_; }
  double log_normalizer() const { return log_z_; }
  const LogGridFunction& alpha(int k) const;
  const LogGridFunction& beta(int k) const;
  const SiteMarginal& marginal(int k) const;  // k = 0..length

  // log-density of h(k+1) given h(k) = v, normalized; 0 <= k < length.
  LogGridFunction step_kernel(int k, double v) const;

  double pair_covariance(int k1, int k2) const;

  // Total variation between the conditional flows started at (k0, v) and
  // (k0, v2), after j = 0..horizon steps.
  std::vector<double> tv_curve(int k0, double v, double v2, int horizon) const;

  // Forward sampling through the step kernels; paths[p][k], k = 0..length.
  std::vector<std::vector<double>> sample_paths(std::uint64_t seed,
                                                int n_paths) const;

  // Two chains from (0, v) and (0, v2); once both lie in [-window, window],
  // each step draws from the maximal coupling of the two step kernels
  // discretized to grid-node masses.
  CouplingResult coupling_experiment(double v, double v2, std::uint64_t seed,
                                     int pairs, double window) const;

 private:
  ChainSpec spec_;
  ConvOptions opt_;
  std::vector<LogGridFunction> alpha_, beta_;
  std::vector<SiteMarginal> marg_;
  double log_z_ = 0.0;
};

inline ChainDP forward_backward(ChainSpec spec, const ConvOptions& opt = {}) {
  return ChainDP(std::move(spec), opt);
}

struct DriftBound {
  double v = 0.0;
  double d_lo = 0.0;  // envelope drift bound from below
  double d_hi = 0.0;  // and from above
};

// Two-sided piecewise-linear envelopes on the log-derivative of the step
// kernels: slope pair (2a, 2/a) below the crossing and vice versa above.
// d is the certified inward drift outside [-b, b], D the uniform slack.
struct DriftEnvelope {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
  double D = 0.0;
  bool inward_from_left = false;   // drift >= d somewhere past -b
  bool inward_from_right = false;  // drift <= -d past +b
  bool magnitude_bounded = false;  // |drift| < |v| + D on all probes
  std::vector<DriftBound> per_v;

  double score() const { return a * d * d; }
};

DriftEnvelope drift_envelope(const ChainDP& dp, const std::vector<int>& sites,
                             const std::vector<double>& v_probes,
                             double log_density_floor = -30.0);

// Growth/shape witnesses for one site potential g = -log_weight:
// g >= a |u| outside [-b, b], monotone on each side, and |g| <= D inside.
struct PotentialCheck {
  double a = 0.0;
  double b = 0.0;
  double D = 0.0;
  bool ok = false;
};

struct PinnedTailResult {
  std::vector<double> t;
  std::vector<double> log_tail;  // log P(|h(site)| > t)
  std::vector<PotentialCheck> site_checks;
  bool potentials_ok = false;
};

// log mass of a normalized log-density beyond x (direction +1) or below x
// (direction -1), trapezoid with a fractional end cell.
double log_tail_mass(const LogGridFunction& density, double x, int direction);

// Tail of |h(site)| under the chain law, with the potential-shape
// validation that the uniform-in-length statement requires.
PinnedTailResult pinned_tail(const ChainDP& dp, int site,
                             const std::vector<double>& ts);

}  // namespace hardwall
