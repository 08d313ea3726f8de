#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polymerlab/rng.hpp"

namespace polymerlab {

enum class Family { StandardizedTwoSidedLomax, ParetoOneSided, GaussianReference };

std::string family_name(Family f);
Family parse_family(std::string_view name);

// Law of a single site weight.
//
// Lomax: the raw variable Y has F̄(y) = r (1+y/b)^-alpha for y >= 0 and
// F(y) = q (1+|y|/b)^-alpha for y < 0, with r = 1/(1+c_-), q = c_-/(1+c_-).
// The weight is omega = (Y - mu) / sd. For alpha > 2, mu and sd make omega
// mean 0 / variance 1; for 1 < alpha <= 2 only the mean is removed; for
// alpha <= 1 omega = Y.
//
// Pareto: F̄(x) = x^-alpha for x >= 1. Gaussian: standard normal, alpha = +inf.
//
// Only asymptotically constant slowly varying parts are modelled. A general
// L(x) would enter through tail_cdf_bar / quantile / pdf below.
struct TailSpec {
  Family family = Family::GaussianReference;
  double alpha = std::numeric_limits<double>::infinity();
  double c_minus = 1.0;
  double scale = 1.0;
  double mu = 0.0;
  double sd = 1.0;

  static TailSpec lomax(double alpha, double c_minus, double scale = 1.0);
  static TailSpec pareto(double alpha);
  static TailSpec gaussian();

  double right_weight() const { return 1.0 / (1.0 + c_minus); }
  double left_weight() const { return c_minus / (1.0 + c_minus); }
  bool heavy() const { return family != Family::GaussianReference; }
};

double tail_cdf_bar(const TailSpec& s, double x);
double cdf(const TailSpec& s, double x);
double pdf(const TailSpec& s, double x);

// F^-1(u), u in (0,1).
double quantile(const TailSpec& s, double u);
// inf{x : F̄(x) <= v}, accurate for tiny v; v in (0,1).
double upper_quantile(const TailSpec& s, double v);

std::vector<double> sample(const TailSpec& s, Stream& rng, std::size_t count);
void sample_into(const TailSpec& s, Stream& rng, std::span<double> out);

// m(t) = inf{x : F̄(x) <= 1/t}, t > 1.
double m_of_t(const TailSpec& s, double t);
// The same infimum by monotone bisection on F̄ (any family); tolerance
// 1e-10 * (1 + |x|).
double m_of_t_bisect(const TailSpec& s, double t);

enum class CutoffRule { HighAlpha, MidLowAlpha };

struct CutoffSpec {
  double eta = 1.0;
  CutoffRule rule = CutoffRule::MidLowAlpha;

  static CutoffSpec for_alpha(double alpha);
  static CutoffSpec for_alpha(double alpha, double eta);
};

// (1/2 + alpha)/2, capped at 5.5.
double default_eta(double alpha);

// k_n = 1/beta_n when alpha > 6, else
// k_n = m(n^1.5 (log n)^eta) / (beta_n m(n^1.5)).
double cutoff_k(const TailSpec& s, double beta_n, long n, const CutoffSpec& cut);

inline double truncate(double omega, double k) { return omega <= k ? omega : 0.0; }

// E[omega_+^i], 1 <= i < alpha.
double moment_plus(const TailSpec& s, int i);
// Closed form of the same for the Lomax family (binomial expansion).
double moment_plus_closed(const TailSpec& s, int i);
// E[omega^i] over the whole line, by quadrature.
double moment(const TailSpec& s, int i);

// E[e^{beta omega} 1{omega < 0}] + P(omega >= 0), beta >= 0.
double mgf_neg(const TailSpec& s, double beta);

// log E[e^{beta omega 1{omega <= k}}].
double lambda_trunc(const TailSpec& s, double beta, double k);

// E[e^{beta omega_+ 1{omega <= k}}] - 1 - sum_{i<=p} beta^i E[omega_+^i]/i!,
// evaluated without cancellation. p < alpha.
double taylor_residual_plus(const TailSpec& s, double beta, double k, int p);

// E[e^{beta omega 1{|omega| <= k}}] - 1.
double two_sided_trunc_mgf_minus_one(const TailSpec& s, double beta, double k);

// E[omega 1{|omega| <= a}].
double truncated_mean(const TailSpec& s, double a);

// Generic quadrature of E[g(omega) 1{lo < omega <= hi}] with extra break points.
double expect(const TailSpec& s, const std::function<double(double)>& g, double lo, double hi,
              std::vector<double> breaks = {});

}  // namespace polymerlab
