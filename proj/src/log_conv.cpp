#include "hardwall/log_conv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#include "hardwall/errors.hpp"
#include "hardwall/util.hpp"

namespace hardwall {

namespace {

constexpr double kLog2Pi = 1.8378770664093455;

struct Workspace {
  std::vector<double> a;     // detrended exp(f) over the block's argument span
  std::vector<double> arev;  // a reversed, so the inner loop strides forward
  std::vector<double> w;     // detrended kernel weights over the offset span
};

}  // namespace

LogGridFunction log_convolve_gaussian(const LogGridFunction& f, double variance,
                                      const ConvOptions& opt, ConvReport* report) {
  if (!(variance > 0) || !std::isfinite(variance))
    throw ValidationError("convolution variance must be positive");
  f.check_finite_or_neginf("log_convolve_gaussian input");

  const GridSpec& g = f.grid();
  const int G = g.count;
  const double s = g.step;
  const long J = static_cast<long>(std::ceil(opt.trunc_mult * std::sqrt(variance) / s));
  const double inv2v = 1.0 / (2.0 * variance);
  const double log_norm = -0.5 * (kLog2Pi + std::log(variance));

  // f with end clamping; arguments may be any integer.
  auto fval = [&](long x) -> double {
    return f[x < 0 ? 0 : (x >= G ? G - 1 : static_cast<int>(x))];
  };
  // log quadrature weight * kernel at offset j (z = j * step).
  auto logw = [&](long j) -> double {
    double z = j * s;
    double w = opt.simpson ? ((j & 1) ? 4.0 * s / 3.0 : 2.0 * s / 3.0) : s;
    return std::log(w) + log_norm - z * z * inv2v;
  };
  // log integrand for output i at offset j, with the quadrature weight left
  // out: the hill-climb below must not see the Simpson 4/2 alternation.
  auto term = [&](long i, long j) -> double {
    double v = fval(i - j);
    if (v == kNegInf) return kNegInf;
    double z = j * s;
    return log_norm - z * z * inv2v + v;
  };
  // the same with the weight, i.e. an actual summand
  auto wterm = [&](long i, long j) -> double {
    double v = fval(i - j);
    return v == kNegInf ? kNegInf : logw(j) + v;
  };

  // Window centres.  The integrand is unimodal on every maximal finite run
  // of f (log-concave pieces against a Gaussian), but a -inf gap can sit
  // between a warm-started climb and the true peak, so each run keeps its
  // own climber and the best run wins per output.
  std::vector<long> center(G, 0);
  if (f.argmax() < 0) return LogGridFunction(g, std::vector<double>(G, kNegInf));
  {
    struct Run {
      long arg_lo, arg_hi;  // argument index bounds, virtually extended at
                            // the grid ends where clamping flattens f
      long peak_arg;        // argmax of f within the run
      long c = 0;
      bool seeded = false;
    };
    constexpr long kFar = 1L << 40;
    std::vector<Run> runs;
    for (int x = 0; x < G; ++x) {
      if (f[x] == kNegInf) continue;
      if (runs.empty() || runs.back().arg_hi != x - 1) {
        runs.push_back(Run{x, x, x});
      } else {
        runs.back().arg_hi = x;
      }
      if (f[x] > f[runs.back().peak_arg]) runs.back().peak_arg = x;
    }
    if (f[0] != kNegInf) runs.front().arg_lo = -kFar;
    if (f[G - 1] != kNegInf) runs.back().arg_hi = kFar;

    for (long i = 0; i < G; ++i) {
      double best = kNegInf;
      long bestc = 0;
      for (auto& r : runs) {
        long jmin = i - r.arg_hi, jmax = i - r.arg_lo;
        if (!r.seeded) {
          r.c = i - r.peak_arg;
          r.seeded = true;
        }
        long c = std::clamp(r.c, jmin, jmax);
        while (c + 1 <= jmax && term(i, c + 1) > term(i, c)) ++c;
        while (c - 1 >= jmin && term(i, c - 1) > term(i, c)) --c;
        r.c = c;
        double t = term(i, c);
        if (t > best) {
          best = t;
          bestc = c;
        }
      }
      center[i] = bestc;
    }
  }

  std::vector<double> out(G, kNegInf);
  std::atomic<long> clamped_left{0}, clamped_right{0}, rescued{0};

  const long B = 96;
  parallel_blocks(0, G, B, [&](long i0, long i1) {
    long cmin = center[i0], cmax = center[i0];
    for (long i = i0 + 1; i < i1; ++i) {
      cmin = std::min(cmin, center[i]);
      cmax = std::max(cmax, center[i]);
    }
    const long jlo = cmin - J, jhi = cmax + J;
    const long xlo = i0 - jhi, xhi = (i1 - 1) - jlo;
    const long L = xhi - xlo + 1, wlen = jhi - jlo + 1;

    // Secant detrend of f over the block's argument span keeps every
    // exponential below; the peak-term check after the sum catches the
    // rare block where the detrended span is still too wide.
    long xa = -1, xb = -1;
    for (long x = xlo; x <= xhi; ++x)
      if (fval(x) != kNegInf) { xa = x; break; }
    for (long x = xhi; x >= xlo; --x)
      if (fval(x) != kNegInf) { xb = x; break; }
    double lam = (xa >= 0 && xb > xa) ? (fval(xb) - fval(xa)) / double(xb - xa) : 0.0;

    static thread_local Workspace ws;
    ws.a.assign(L, 0.0);
    ws.arev.assign(L, 0.0);
    ws.w.assign(wlen, 0.0);

    double mr = kNegInf;
    for (long x = xlo; x <= xhi; ++x) {
      double v = fval(x);
      if (v != kNegInf) mr = std::max(mr, v - lam * double(x));
    }
    if (mr == kNegInf) {
      for (long i = i0; i < i1; ++i) out[i] = kNegInf;
      return;
    }
    for (long x = xlo; x <= xhi; ++x) {
      double v = fval(x);
      ws.a[x - xlo] = v == kNegInf ? 0.0 : std::exp(v - lam * double(x) - mr);
    }
    for (long t = 0; t < L; ++t) ws.arev[t] = ws.a[L - 1 - t];

    double mk = kNegInf;
    for (long j = jlo; j <= jhi; ++j) mk = std::max(mk, logw(j) - lam * double(j));
    for (long j = jlo; j <= jhi; ++j)
      ws.w[j - jlo] = std::exp(logw(j) - lam * double(j) - mk);

    long cl = 0, cr = 0, rs = 0;
    for (long i = i0; i < i1; ++i) {
      const long c = center[i];
      if (i - (c + J) < 0) ++cl;
      if (i - (c - J) > G - 1) ++cr;
      const long a0 = c - J - jlo;
      // a-th kernel entry pairs with argument i - (jlo + a); reversed
      // storage turns the argument index into a forward stride.
      const long base = (L - 1) - (i - jlo - xlo);
      const double* wp = ws.w.data() + a0;
      const double* ap = ws.arev.data() + base + a0;
      double acc = 0.0;
      for (long t = 0; t < 2 * J + 1; ++t) acc += wp[t] * ap[t];

      double peak = wterm(i, c);
      double val = acc > 0.0
                       ? lam * double(i) + mk + mr + std::log(acc)
                       : kNegInf;
      if (peak == kNegInf) {
        out[i] = val;  // no finite term in the window at all
        continue;
      }
      if (val >= peak - 1e-9) {
        out[i] = val;
        continue;
      }
      // Blocked sum lost the peak to underflow: exact per-term fallback.
      ++rs;
      double m = peak;
      for (long j = c - J; j <= c + J; ++j) m = std::max(m, wterm(i, j));
      double sum = 0.0;
      for (long j = c - J; j <= c + J; ++j) {
        double t2 = wterm(i, j);
        if (t2 != kNegInf) sum += std::exp(t2 - m);
      }
      out[i] = m + std::log(sum);
    }
    clamped_left += cl;
    clamped_right += cr;
    rescued += rs;
  });

  if (report) {
    report->clamped_left = clamped_left.load();
    report->clamped_right = clamped_right.load();
    report->rescued = rescued.load();
  }
  return LogGridFunction(g, std::move(out));
}

}  // namespace hardwall
