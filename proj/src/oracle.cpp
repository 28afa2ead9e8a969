#include "hardwall/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "hardwall/errors.hpp"
#include "hardwall/gaussian.hpp"

namespace hardwall::oracle {

namespace {

// signed vector carried as e^shift * a[i] with |a| kept near 1
struct SVec {
  long double shift = 0.0L;
  std::vector<long double> a;
};

void renorm(SVec& v) {
  long double m = 0.0L;
  for (long double x : v.a) m = std::max(m, std::abs(x));
  if (m == 0.0L) return;
  for (long double& x : v.a) x /= m;
  v.shift += std::log(m);
}

long double trap(int i, int count) { return (i == 0 || i == count - 1) ? 0.5L : 1.0L; }

// out(x_i) = sum_j wt_j * step * phi(x_i - x_j) * v(x_j)
SVec transition(const SVec& v, const GridSpec& g, double var) {
  const int n = g.count;
  std::vector<long double> kern(n);
  const long double norm = 1.0L / std::sqrt(2.0L * 3.14159265358979323846264338328L * (long double)var);
  for (int d = 0; d < n; ++d) {
    long double x = (long double)d * g.step;
    kern[d] = norm * std::exp(-x * x / (2.0L * (long double)var));
  }
  SVec out;
  out.shift = v.shift;
  out.a.assign(n, 0.0L);
  for (int i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (int j = 0; j < n; ++j)
      acc += trap(j, n) * kern[std::abs(i - j)] * v.a[j];
    out.a[i] = acc * (long double)g.step;
  }
  renorm(out);
  return out;
}

void apply_weight(SVec& v, const LogGridFunction& lw) {
  double m = lw.max_value();
  if (m == kNegInf) {
    std::fill(v.a.begin(), v.a.end(), 0.0L);
    return;
  }
  for (size_t i = 0; i < v.a.size(); ++i)
    v.a[i] *= lw[static_cast<int>(i)] == kNegInf
                  ? 0.0L
                  : std::exp((long double)(lw[static_cast<int>(i)] - m));
  v.shift += (long double)m;
  renorm(v);
}

struct ChainVectors {
  std::vector<SVec> A;  // A[k], k = 1..L
  std::vector<SVec> B;  // B[k], k = 0..L
};

ChainVectors build_vectors(const ChainSpec& spec) {
  spec.validate();
  const GridSpec& g = spec.grid;
  const int L = spec.length;
  ChainVectors cv;
  cv.A.resize(L + 1);
  cv.B.resize(L + 1);

  SVec a;
  a.a.resize(g.count);
  for (int i = 0; i < g.count; ++i) {
    long double x = (long double)(g.point(i) - spec.start);
    a.a[i] = std::exp((long double)log_normal_pdf((double)x, spec.step_var));
  }
  renorm(a);
  apply_weight(a, spec.log_weight[0]);
  cv.A[1] = a;
  for (int k = 2; k <= L; ++k) {
    a = transition(a, g, spec.step_var);
    apply_weight(a, spec.log_weight[k - 1]);
    cv.A[k] = a;
  }

  SVec b;
  b.a.assign(g.count, 1.0L);
  cv.B[L] = b;
  for (int k = L - 1; k >= 0; --k) {
    SVec t = cv.B[k + 1];
    apply_weight(t, spec.log_weight[k]);
    cv.B[k] = transition(t, g, spec.step_var);
  }
  return cv;
}

// sum_i wt_i * step * f_i(x_i) * v.a[i], returned with the shift applied
long double grid_sum(const SVec& v, const GridSpec& g,
                     const std::vector<long double>& f) {
  long double acc = 0.0L;
  for (int i = 0; i < g.count; ++i) acc += trap(i, g.count) * f[i] * v.a[i];
  return acc * (long double)g.step;
}

}  // namespace

ChainBruteResult chain_brute(const ChainSpec& spec) {
  const GridSpec& g = spec.grid;
  const int L = spec.length;
  if (L > 3) throw ValidationError("chain_brute is for length <= 3");
  ChainVectors cv = build_vectors(spec);

  std::vector<long double> ones(g.count, 1.0L), xs(g.count), x2(g.count);
  for (int i = 0; i < g.count; ++i) {
    xs[i] = (long double)g.point(i);
    x2[i] = xs[i] * xs[i];
  }

  ChainBruteResult out;
  long double z = grid_sum(cv.A[L], g, ones);
  if (!(z > 0.0L)) throw NumericalError("chain_brute: zero total mass");
  out.log_z = (double)(std::log(z) + cv.A[L].shift);

  out.mean.resize(L + 1);
  out.var.resize(L + 1);
  out.cov.assign(L + 1, std::vector<double>(L + 1, 0.0));
  for (int k = 1; k <= L; ++k) {
    SVec d = cv.A[k];
    for (int i = 0; i < g.count; ++i) d.a[i] *= cv.B[k].a[i];
    long double s0 = grid_sum(d, g, ones);
    long double s1 = grid_sum(d, g, xs);
    long double s2 = grid_sum(d, g, x2);
    out.mean[k] = (double)(s1 / s0);
    out.var[k] = (double)(s2 / s0 - (s1 / s0) * (s1 / s0));
    out.cov[k][k] = out.var[k];
  }

  for (int j = 1; j <= L; ++j) {
    for (int k = j + 1; k <= L; ++k) {
      SVec s = cv.B[k];
      for (int i = 0; i < g.count; ++i) s.a[i] *= xs[i];
      renorm(s);
      for (int t = k; t > j; --t) {
        apply_weight(s, spec.log_weight[t - 1]);
        s = transition(s, g, spec.step_var);
      }
      SVec d = cv.A[j];
      for (int i = 0; i < g.count; ++i) d.a[i] *= s.a[i];
      d.shift += s.shift;
      long double num = grid_sum(d, g, xs);
      // normalize against the full partition sum carried to the same stage
      SVec dz = cv.A[j];
      for (int i = 0; i < g.count; ++i) dz.a[i] *= cv.B[j].a[i];
      dz.shift += cv.B[j].shift;
      long double zz = grid_sum(dz, g, ones);
      long double exy =
          num / zz * std::exp(d.shift - dz.shift);
      out.cov[j][k] = out.cov[k][j] =
          (double)exy - out.mean[j] * out.mean[k];
    }
  }
  return out;
}

LogGridFunction chain_brute_kernel(const ChainSpec& spec, int k, double v) {
  const GridSpec& g = spec.grid;
  if (k < 0 || k >= spec.length) throw ValidationError("chain_brute_kernel index");
  ChainVectors cv = build_vectors(spec);
  SVec t = cv.B[k + 1];
  apply_weight(t, spec.log_weight[k]);
  for (int i = 0; i < g.count; ++i)
    t.a[i] *= std::exp((long double)log_normal_pdf(g.point(i) - v, spec.step_var));
  renorm(t);
  std::vector<long double> ones(g.count, 1.0L);
  long double z = grid_sum(t, g, ones);
  if (!(z > 0.0L)) throw NumericalError("chain_brute_kernel: zero mass");
  std::vector<double> ld(g.count);
  for (int i = 0; i < g.count; ++i)
    ld[i] = t.a[i] > 0.0L ? (double)(std::log(t.a[i] / z)) : kNegInf;
  return LogGridFunction(g, std::move(ld));
}

TailTables::TailTables(const GridSpec& family_grid, int n_max, double z_half) {
  if (n_max < 1 || n_max > 4) throw ValidationError("TailTables supports depths 1..4");
  grid_.lo = family_grid.lo;
  grid_.step = family_grid.step / 2.0;
  grid_.count = 2 * family_grid.count - 1;

  p_.resize(n_max);
  p_[0].resize(grid_.count);
  for (int i = 0; i < grid_.count; ++i) {
    double c = normal_cdf(-grid_.point(i));
    p_[0][i] = c * c;
  }

  const double h = grid_.step;
  const long long J = std::llround(z_half / h);
  std::vector<long double> w(2 * J + 1);
  for (long long j = 0; j <= 2 * J; ++j) {
    double z = (double)(j - J) * h;
    long double simpson = (j == 0 || j == 2 * J) ? 1.0L : ((j & 1) ? 4.0L : 2.0L);
    w[j] = simpson * (long double)h / 3.0L *
           std::exp((long double)(-0.5 * z * z)) /
           std::sqrt(2.0L * 3.14159265358979323846264338328L);
  }
  for (int d = 2; d <= n_max; ++d) {
    const std::vector<double>& prev = p_[d - 2];
    p_[d - 1].resize(grid_.count);
    for (int i = 0; i < grid_.count; ++i) {
      long double acc = 0.0L;
      for (long long j = 0; j <= 2 * J; ++j) {
        long long idx = i - (j - J);
        long double pv = idx < 0 ? 1.0L
                                 : (idx >= grid_.count ? 0.0L : (long double)prev[idx]);
        acc += w[j] * pv;
      }
      p_[d - 1][i] = (double)(acc * acc);
    }
  }
}

double TailTables::value(int depth, double v) const {
  if (depth < 1 || depth > static_cast<int>(p_.size()))
    throw ValidationError("TailTables depth out of range");
  double t = (v - grid_.lo) / grid_.step;
  if (t < -1e-9) return 1.0;
  if (t > grid_.count - 1 + 1e-9) return 0.0;
  if (t <= 1e-9) return p_[depth - 1].front();
  if (t >= grid_.count - 1 - 1e-9) return p_[depth - 1].back();
  int i = static_cast<int>(std::floor(t));
  double frac = t - i;
  if (frac < 1e-9) return p_[depth - 1][i];
  if (frac > 1.0 - 1e-9) return p_[depth - 1][i + 1];
  return p_[depth - 1][i] + frac * (p_[depth - 1][i + 1] - p_[depth - 1][i]);
}

double TailTables::log_value(int depth, double v) const {
  double p = value(depth, v);
  return p > 0.0 ? std::log(p) : kNegInf;
}

}  // namespace hardwall::oracle
