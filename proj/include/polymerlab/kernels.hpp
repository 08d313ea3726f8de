#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "polymerlab/disorder.hpp"

// Inner loops shared by the polymer, chaos and limits modules. Every kernel
// exists twice: `ref` is plain scalar code with std math (the testing
// baseline), `fast` is the vectorized version used in production paths.
namespace polymerlab::kernels {

// One transfer-matrix row in log domain:
//   next[j] = beta*omega[j] + log(exp(prev[j-1]) + exp(prev[j])) - log 2
// for j in [lo, hi]; a neighbour that falls outside the previous row's live
// range is dropped. Returns max over next[lo..hi].
namespace ref {
// prev has prev_len entries; entries equal to -inf are dead. Writes the whole
// next row (prev_len + 1 entries) with -inf outside [lo, hi].
double row_step(const double* prev, int prev_len, double* next, const double* omega, double beta,
                int lo, int hi);
void quantile_batch(const TailSpec& s, const double* u, double* out, std::size_t m);
}  // namespace ref

namespace fast {
// Only prev[plo..phi] is read; only next[lo..hi] is written.
double row_step(const double* prev, int plo, int phi, double* next, const double* omega,
                double beta, int lo, int hi);
void shift(double* v, int lo, int hi, double by);
void quantile_batch(const TailSpec& s, const double* u, double* out, std::size_t m);
}  // namespace fast

// sum_j p[j] * expm1(beta * (w[j] <= k ? w[j] : 0) - lambda)
namespace ref {
double expm1_dot(const double* p, const double* w, std::size_t m, double beta, double k, double lambda);
}
namespace fast {
double expm1_dot(const double* p, const double* w, std::size_t m, double beta, double k, double lambda);
}

// Poisson points built from three uniforms each:
//   u1 -> sign and |w| = eps * v^(-1/alpha), v the conditional uniform,
//   u2 -> t, u3 -> x = K (2 u3 - 1).
struct PointMap {
  double alpha;
  double right;  // P(w > 0) = 1/(1+c_-)
  double eps;
  double K;
};

struct PointBatchSum {
  double sum = 0.0;
  std::size_t overflow = 0;  // points with beta*w beyond the exp range
};

// Sum over the batch of  rho(t,x) * (beta > 0 ? expm1(beta w)/beta : w).
namespace ref {
PointBatchSum point_sum(const PointMap& pm, double beta, const double* u1, const double* u2,
                        const double* u3, std::size_t m);
}
namespace fast {
PointBatchSum point_sum(const PointMap& pm, double beta, const double* u1, const double* u2,
                        const double* u3, std::size_t m);
}

// Largest beta*w handled before declaring overflow.
inline constexpr double kExpCap = 700.0;

}  // namespace polymerlab::kernels
