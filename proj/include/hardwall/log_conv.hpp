#pragma once

#include "hardwall/grid.hpp"

namespace hardwall {

struct ConvOptions {
  // Quadrature window half-width in standard deviations of the kernel.
  // With the window centred at the integrand peak the discarded mass is
  // below exp(-trunc_mult^2/2) relative, under 1e-15 at the default.
  double trunc_mult = 8.0;
  // Composite Simpson weights instead of the default trapezoid rule.
  bool simpson = false;
};

struct ConvReport {
  long clamped_left = 0;   // outputs whose window ran past the left edge
  long clamped_right = 0;  // same on the right
  long rescued = 0;        // outputs recomputed by the slow exact path
};

// g(v) = log integral phi_var(z) exp(f(v - z)) dz on the grid of f.
//
// The quadrature window for each output is centred at the peak of the
// integrand z -> phi(z) + f(v - z) (log scale), located by a monotone
// hill-climb; with a fixed origin-centred window a steep f would silently
// push the true peak outside the window.  Arguments beyond the grid ends
// evaluate to the end values.
//
// Evaluation is blocked: within a block the values of f are detrended by a
// secant slope so that all exponentials stay within double range, and the
// inner sum is a dot product.  Any output whose blocked sum lost its own
// peak (detected by comparing against the peak term) is recomputed exactly.
LogGridFunction log_convolve_gaussian(const LogGridFunction& f, double variance,
                                      const ConvOptions& opt = {},
                                      ConvReport* report = nullptr);

}  // namespace hardwall
