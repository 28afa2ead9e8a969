#pragma once

namespace hardwall {

// log of the N(0, var) density at x.
double log_normal_pdf(double x, double var = 1.0);

// log Phi(x), accurate over the whole real line.  Uses erfc down to
// x = -26 and the Mills-ratio asymptotic series below that.
double log_normal_cdf(double x);

// Phi(x).
double normal_cdf(double x);

}  // namespace hardwall
