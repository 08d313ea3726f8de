#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polymerlab/kernels.hpp"

namespace polymerlab::kernels::ref {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}
}  // namespace

double row_step(const double* prev, int prev_len, double* next, const double* omega, double beta,
                int lo, int hi) {
  const int len = prev_len + 1;
  double mx = kNegInf;
  for (int j = 0; j < len; ++j) {
    if (j < lo || j > hi) {
      next[j] = kNegInf;
      continue;
    }
    double left = j - 1 >= 0 ? prev[j - 1] : kNegInf;
    double right = j < prev_len ? prev[j] : kNegInf;
    double acc = logaddexp(left, right);
    next[j] = acc == kNegInf ? kNegInf : beta * omega[j] + acc - std::numbers::ln2;
    mx = std::max(mx, next[j]);
  }
  return mx;
}

void quantile_batch(const TailSpec& s, const double* u, double* out, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) out[i] = quantile(s, u[i]);
}

double expm1_dot(const double* p, const double* w, std::size_t m, double beta, double k, double lambda) {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += p[j] * std::expm1(beta * truncate(w[j], k) - lambda);
  return s;
}

PointBatchSum point_sum(const PointMap& pm, double beta, const double* u1, const double* u2,
                        const double* u3, std::size_t m) {
  PointBatchSum acc;
  const double inv_a = 1.0 / pm.alpha;
  for (std::size_t i = 0; i < m; ++i) {
    bool pos = u1[i] < pm.right;
    double v = pos ? u1[i] / pm.right : (u1[i] - pm.right) / (1.0 - pm.right);
    v = std::max(v, 0x1.0p-60);
    double w = pm.eps * std::pow(v, -inv_a);
    if (!pos) w = -w;
    double t = u2[i];
    double x = pm.K * (2.0 * u3[i] - 1.0);
    double rho = std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
    double f;
    if (beta > 0) {
      if (beta * w > kExpCap) {
        ++acc.overflow;
        continue;
      }
      f = std::expm1(beta * w) / beta;
    } else {
      f = w;
    }
    acc.sum += f * rho;
  }
  return acc;
}

}  // namespace polymerlab::kernels::ref
