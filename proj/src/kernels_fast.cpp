// Built with -ffast-math (see src/CMakeLists.txt) so the loops below call the
// glibc vector math routines. Nothing here may see inf or nan: callers pass
// live index ranges instead of -inf sentinels, and exponent arguments are
// capped.
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "polymerlab/kernels.hpp"

namespace polymerlab::kernels::fast {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// Rows shorter than this are not worth a fork/join.
constexpr int kParallelRow = 1 << 15;

// Normal quantile, Wichura's AS241 (PPND16), written branch-free.
inline double ppnd16(double p) {
  double q = p - 0.5;
  double rc = 0.180625 - q * q;
  double num_c = (((((((2.5090809287301226727e3 * rc + 3.3430575583588128105e4) * rc +
                       6.7265770927008700853e4) * rc + 4.5921953931549871457e4) * rc +
                     1.3731693765509461125e4) * rc + 1.9715909503065514427e3) * rc +
                   1.3314166789178437745e2) * rc + 3.3871328727963666080e0);
  double den_c = (((((((5.2264952788528544610e3 * rc + 2.8729085735721942674e4) * rc +
                       3.9307895800092710610e4) * rc + 2.1213794301586595867e4) * rc +
                     5.3941960214247511077e3) * rc + 6.8718700749205790830e2) * rc +
                   4.2313330701600911252e1) * rc + 1.0);
  double central = q * num_c / den_c;

  double tail_p = q < 0 ? p : 1.0 - p;
  double r = std::sqrt(-std::log(tail_p));
  double r1 = r - 1.6;
  double num_m = (((((((7.74545014278341407640e-4 * r1 + 2.27238449892691845833e-2) * r1 +
                       2.41780725177450611770e-1) * r1 + 1.27045825245236838258e0) * r1 +
                     3.64784832476320460504e0) * r1 + 5.76949722146069140550e0) * r1 +
                   4.63033784615654529590e0) * r1 + 1.42343711074968357734e0);
  double den_m = (((((((1.05075007164441684324e-9 * r1 + 5.47593808499534494600e-4) * r1 +
                       1.51986665636164571966e-2) * r1 + 1.48103976427480074590e-1) * r1 +
                     6.89767334985100004550e-1) * r1 + 1.67638483018380384940e0) * r1 +
                   2.05319162663775882187e0) * r1 + 1.0);
  double r2 = r - 5.0;
  double num_t = (((((((2.01033439929228813265e-7 * r2 + 2.71155556874348757815e-5) * r2 +
                       1.24266094738807843860e-3) * r2 + 2.65321895265761230930e-2) * r2 +
                     2.96560571828504891230e-1) * r2 + 1.78482653991729133580e0) * r2 +
                   5.46378491116411436990e0) * r2 + 6.65790464350110377720e0);
  double den_t = (((((((2.04426310338993978564e-15 * r2 + 1.42151175831644588870e-7) * r2 +
                       1.84631831751005468180e-5) * r2 + 7.86869131145613259100e-4) * r2 +
                     1.48753612908506148525e-2) * r2 + 1.36929880922735805310e-1) * r2 +
                   5.99832206555887937690e-1) * r2 + 1.0);
  double tail = r <= 5.0 ? num_m / den_m : num_t / den_t;
  tail = q < 0 ? -tail : tail;
  return std::abs(q) <= 0.425 ? central : tail;
}
}  // namespace

namespace {
// GCC 11 does not vectorize the combined "parallel for simd" construct well,
// so threads split the range by hand and each runs this simd loop.
double row_interior(const double* prev, double* next, const double* omega, double beta, int a, int b) {
  double mx = -std::numeric_limits<double>::max();
#pragma omp simd reduction(max : mx)
  for (int j = a; j <= b; ++j) {
    double l = prev[j - 1], r = prev[j];
    double m = l > r ? l : r;
    double d = l > r ? r - l : l - r;
    double v = beta * omega[j] + m + std::log1p(std::exp(d)) - kLn2;
    next[j] = v;
    mx = v > mx ? v : mx;
  }
  return mx;
}
}  // namespace

double row_step(const double* prev, int plo, int phi, double* next, const double* omega,
                double beta, int lo, int hi) {
  const int a = std::max(lo, plo + 1);
  const int b = std::min(hi, phi);
  double mx = -std::numeric_limits<double>::max();
  if (a <= b) {
    if ((b - a) >= kParallelRow && !omp_in_parallel()) {
#pragma omp parallel reduction(max : mx)
      {
        const int nt = omp_get_num_threads(), t = omp_get_thread_num();
        const long len = static_cast<long>(b) - a + 1;
        const int s = a + static_cast<int>(len * t / nt);
        const int e = a + static_cast<int>(len * (t + 1) / nt) - 1;
        if (s <= e) mx = std::max(mx, row_interior(prev, next, omega, beta, s, e));
      }
    } else {
      mx = row_interior(prev, next, omega, beta, a, b);
    }
  }
  // entries with a single live neighbour sit at the two ends
  auto edge = [&](int j) {
    bool left_live = j - 1 >= plo && j - 1 <= phi;
    double v = beta * omega[j] + (left_live ? prev[j - 1] : prev[j]) - kLn2;
    next[j] = v;
    mx = v > mx ? v : mx;
  };
  const int left_end = std::min(hi, a - 1);
  for (int j = lo; j <= left_end; ++j) edge(j);
  for (int j = std::max(b + 1, left_end + 1); j <= hi; ++j) edge(j);
  return mx;
}

double expm1_dot(const double* __restrict p, const double* __restrict w, std::size_t m, double beta, double k,
                 double lambda) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t j = 0; j < m; ++j) {
    const double t = w[j] <= k ? w[j] : 0.0;
    s += p[j] * std::expm1(beta * t - lambda);
  }
  return s;
}

void shift(double* v, int lo, int hi, double by) {
#pragma omp simd
  for (int j = lo; j <= hi; ++j) v[j] -= by;
}

void quantile_batch(const TailSpec& s, const double* __restrict u, double* __restrict out, std::size_t m) {
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: {
      const double q = s.left_weight();
      const double inv_r = 1.0 / s.right_weight();
      const double inv_q = q > 0 ? 1.0 / q : 0.0;
      const double neg_inv_a = -1.0 / s.alpha;
      const double b = s.scale, mu = s.mu, inv_sd = 1.0 / s.sd;
#pragma omp simd
      for (std::size_t i = 0; i < m; ++i) {
        bool right = u[i] > q;
        double base = right ? (1.0 - u[i]) * inv_r : u[i] * inv_q;
        double z = std::exp(neg_inv_a * std::log(base));
        double y = b * (z - 1.0);
        y = right ? y : -y;
        out[i] = (y - mu) * inv_sd;
      }
      break;
    }
    case Family::ParetoOneSided: {
      const double neg_inv_a = -1.0 / s.alpha;
#pragma omp simd
      for (std::size_t i = 0; i < m; ++i) out[i] = std::exp(neg_inv_a * std::log(1.0 - u[i]));
      break;
    }
    case Family::GaussianReference: {
#pragma omp simd
      for (std::size_t i = 0; i < m; ++i) out[i] = ppnd16(u[i]);
      break;
    }
  }
}

PointBatchSum point_sum(const PointMap& pm, double beta, const double* u1, const double* u2,
                        const double* u3, std::size_t m) {
  const double neg_inv_a = -1.0 / pm.alpha;
  const double inv_right = 1.0 / pm.right;
  const double inv_left = pm.right < 1.0 ? 1.0 / (1.0 - pm.right) : 0.0;
  const double inv_beta = beta > 0 ? 1.0 / beta : 0.0;
  const bool tilt = beta > 0;
  double sum = 0.0;
  std::size_t over = 0;
#pragma omp simd reduction(+ : sum, over)
  for (std::size_t i = 0; i < m; ++i) {
    bool pos = u1[i] < pm.right;
    double v = pos ? u1[i] * inv_right : (u1[i] - pm.right) * inv_left;
    v = v > 0x1.0p-60 ? v : 0x1.0p-60;
    double w = pm.eps * std::exp(neg_inv_a * std::log(v));
    w = pos ? w : -w;
    double t = u2[i];
    double x = pm.K * (2.0 * u3[i] - 1.0);
    double rho = std::exp(-x * x / (2.0 * t)) * kInvSqrt2Pi / std::sqrt(t);
    double bw = beta * w;
    bool big = tilt && bw > kExpCap;
    double capped = bw > kExpCap ? kExpCap : bw;
    double f = tilt ? std::expm1(capped) * inv_beta : w;
    sum += big ? 0.0 : f * rho;
    over += big ? 1 : 0;
  }
  return {sum, over};
}

}  // namespace polymerlab::kernels::fast
