#include "polymerlab/chaos.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/binomial.hpp>

#include "polymerlab/errors.hpp"
#include "polymerlab/kernels.hpp"

namespace polymerlab {

double KernelTable::at(int i, int x) const {
  if (i < 0 || i > n || std::abs(x) > i || (i + x) % 2 != 0) return 0.0;
  return p[row_offset(i) + (x + i) / 2];
}

KernelTable srw_kernel(int n) {
  if (n < 1) throw DomainError("srw_kernel: n must be at least 1");
  KernelTable kt;
  kt.n = n;
  kt.p.assign(KernelTable::row_offset(n + 1), 0.0);
  kt.p[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const double* prev = kt.p.data() + KernelTable::row_offset(i - 1);
    double* cur = kt.p.data() + KernelTable::row_offset(i);
    for (int j = 0; j <= i; ++j) {
      double l = j >= 1 ? prev[j - 1] : 0.0;
      double r = j <= i - 1 ? prev[j] : 0.0;
      cur[j] = 0.5 * (l + r);
    }
  }
  return kt;
}

std::vector<double> srw_kernel_row(int n) {
  if (n < 1) throw DomainError("srw_kernel_row: n must be at least 1");
  boost::math::binomial_distribution<double> law(n, 0.5);
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) row[j] = boost::math::pdf(law, j);
  return row;
}

double heat_kernel(double t, double x) {
  if (!(t > 0)) throw DomainError("heat_kernel: t must be positive");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double chaos_lambda(const TailSpec& spec, double beta, double k) {
  if (spec.family == Family::GaussianReference && std::isinf(k)) return 0.5 * beta * beta;
  return lambda_trunc(spec, beta, k);
}

ZetaField zeta_field(const Environment& env, double beta, double k) {
  if (!(beta > 0) || !(k > 0)) throw DomainError("zeta_field: need beta > 0 and k > 0");
  return zeta_field(env, beta, k, chaos_lambda(env.spec, beta, k));
}

ZetaField zeta_field(const Environment& env, double beta, double k, double lambda) {
  if (!(beta > 0) || !(k > 0)) throw DomainError("zeta_field: need beta > 0 and k > 0");
  ZetaField z;
  z.beta = beta;
  z.k = k;
  z.lambda = lambda;
  z.env = env;
  for (double& w : z.env.omega) w = std::expm1(beta * truncate(w, k) - lambda) / beta;
  return z;
}

std::vector<double> multilinear_terms(const ZetaField& zeta, int max_order) {
  if (max_order < 0) throw DomainError("multilinear_terms: max_order must be nonnegative");
  const int n = zeta.env.n;
  const int M = std::min(max_order, n);
  const double work = static_cast<double>(M + 1) * static_cast<double>(Environment::cone_size(n));
  if (work > static_cast<double>(1 << 28))
    throw CostGuard("multilinear_sum: (order+1) * cone size exceeds 2^28");
  const double beta = zeta.beta;
  // F[m][j]: walks up to the current row carrying m zeta factors, ending at j
  std::vector<std::vector<double>> F(M + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  std::vector<std::vector<double>> G = F;
  F[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    auto z = zeta.env.row(i);
    for (int m = 0; m <= M; ++m) {
      for (int j = 0; j <= i; ++j) {
        double l = j >= 1 ? F[m][j - 1] : 0.0;
        double r = j <= i - 1 ? F[m][j] : 0.0;
        G[m][j] = 0.5 * (l + r);
      }
    }
    for (int m = 0; m <= M; ++m)
      for (int j = 0; j <= i; ++j) F[m][j] = G[m][j] + (m > 0 ? beta * z[j] * G[m - 1][j] : 0.0);
  }
  std::vector<double> terms(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int m = 0; m <= M; ++m)
    for (int j = 0; j <= n; ++j) terms[m] += F[m][j];
  return terms;
}

double multilinear_sum(const ZetaField& zeta, int max_order) {
  double s = 0.0;
  for (double t : multilinear_terms(zeta, max_order)) s += t;
  return s;
}

double multilinear_sum(const Environment& env, double beta, double k, int max_order) {
  if (max_order == 0) return 1.0;
  return multilinear_sum(zeta_field(env, beta, k), max_order);
}

double multilinear_sum_tuples(const ZetaField& zeta, int max_order) {
  const int n = zeta.env.n;
  if (n > 8) throw CostGuard("multilinear_sum_tuples: n > 8 refused");
  KernelTable kt = srw_kernel(n);
  double total = 0.0;
  // extend a tuple ending at (i0, x0) with m factors so far
  auto rec = [&](auto&& self, int i0, int x0, int m, double prod) -> void {
    total += prod;
    if (m == max_order) return;
    for (int i = i0 + 1; i <= n; ++i)
      for (int x = -i; x <= i; x += 2) {
        double p = kt.at(i - i0, x - x0);
        if (p == 0.0) continue;
        self(self, i, x, m + 1, prod * p * zeta.beta * zeta.at(i, x));
      }
  };
  rec(rec, 0, 0, 0, 1.0);
  return total;
}

double first_order_stat(const Environment& env, double beta, double k) {
  if (!(beta > 0) || !(k > 0)) throw DomainError("first_order_stat: need beta > 0 and k > 0");
  const int n = env.n;
  const double lambda = chaos_lambda(env.spec, beta, k);
  std::vector<double> p{1.0}, q;
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    q.assign(static_cast<std::size_t>(i) + 1, 0.0);
    for (int j = 0; j <= i; ++j) q[j] = 0.5 * ((j >= 1 ? p[j - 1] : 0.0) + (j <= i - 1 ? p[j] : 0.0));
    p.swap(q);
    sum += kernels::fast::expm1_dot(p.data(), env.row(i).data(), p.size(), beta, k, lambda) / beta;
  }
  return std::sqrt(static_cast<double>(n)) * sum / std::pow(static_cast<double>(n), 0.75);
}

double first_order_stat_streaming(const TailSpec& spec, int n, std::uint64_t seed, double beta, double k) {
  if (n < 1) throw DomainError("first_order_stat: n must be at least 1");
  if (!(beta > 0) || !(k > 0)) throw DomainError("first_order_stat: need beta > 0 and k > 0");
  const double lambda = chaos_lambda(spec, beta, k);
  EnvRowStream rows(spec, seed);
  std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0), q(p.size()), w(p.size());
  p[0] = 1.0;
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= i; ++j) q[j] = 0.5 * ((j >= 1 ? p[j - 1] : 0.0) + (j <= i - 1 ? p[j] : 0.0));
    p.swap(q);
    std::span<double> row(w.data(), static_cast<std::size_t>(i) + 1);
    rows.next_row(row);
    sum += kernels::fast::expm1_dot(p.data(), row.data(), row.size(), beta, k, lambda) / beta;
  }
  return std::sqrt(static_cast<double>(n)) * sum / std::pow(static_cast<double>(n), 0.75);
}

}  // namespace polymerlab
