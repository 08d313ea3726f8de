#pragma once

#include <vector>

#include "polymerlab/polymer.hpp"

namespace polymerlab {

// p(i,x) = P(s_i = x) for 0 <= i <= n, stored on the parity cone with row 0.
struct KernelTable {
  int n = 0;
  std::vector<double> p;

  static std::size_t row_offset(int i) { return static_cast<std::size_t>(i) * (i + 1) / 2; }
  double at(int i, int x) const;
  std::span<const double> row(int i) const { return {p.data() + row_offset(i), static_cast<std::size_t>(i) + 1}; }
};

KernelTable srw_kernel(int n);
// Row n alone (index j <-> x = 2j - n), from the binomial law; usable for
// large n where the full table would not fit.
std::vector<double> srw_kernel_row(int n);

// Standard heat kernel rho(t,x) = exp(-x^2/2t) / sqrt(2 pi t), t in (0,1].
double heat_kernel(double t, double x);

// zeta_v = (exp(beta w~_v - lambda) - 1) / beta with w~ = w 1{w <= k}.
struct ZetaField {
  double beta = 0.0;
  double k = 0.0;
  double lambda = 0.0;
  Environment env;  // holds zeta values in place of weights

  double at(int i, int x) const { return env.at(i, x); }
};

// lambda(beta) for the centering of the chaos: quadrature of the truncated
// law; the exact cumulant beta^2/2 for untruncated Gaussian disorder.
double chaos_lambda(const TailSpec& spec, double beta, double k);

ZetaField zeta_field(const Environment& env, double beta, double k);
ZetaField zeta_field(const Environment& env, double beta, double k, double lambda);

// 1 + sum_{m=1}^{max_order} beta^m sum over time-ordered site tuples of
// prod p(i_j - i_{j-1}, x_j - x_{j-1}) zeta_{i_j, x_j}. Evaluated by the
// forward recursion over (order, i, x); with max_order = n this equals
// exp(-n lambda) Z^{w~} exactly.
double multilinear_sum(const Environment& env, double beta, double k, int max_order);
double multilinear_sum(const ZetaField& zeta, int max_order);
// Per-order terms 0..max_order of the same sum.
std::vector<double> multilinear_terms(const ZetaField& zeta, int max_order);

// Direct sum over site tuples. Exponential cost; n <= 8.
double multilinear_sum_tuples(const ZetaField& zeta, int max_order);

// n^{-3/4} sum_{i,x} sqrt(n) p(i,x) zeta_{i,x}.
double first_order_stat(const Environment& env, double beta, double k);
// Same statistic with environment rows generated on the fly.
double first_order_stat_streaming(const TailSpec& spec, int n, std::uint64_t seed, double beta, double k);

}  // namespace polymerlab
