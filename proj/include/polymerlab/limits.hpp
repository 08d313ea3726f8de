#pragma once

#include <complex>
#include <string>
#include <vector>

#include "polymerlab/disorder.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

enum class Theorem { T14, TGAUSS, THEAVY };

std::string theorem_name(Theorem t);
Theorem parse_theorem(const std::string& s);

// Which Taylor orders of E[omega_+^i] enter the centering.
struct CenteringSpec {
  Theorem theorem = Theorem::TGAUSS;
  std::vector<int> orders;
  double alpha = 0.0;

  // T14: {1,2,3,4}; TGAUSS: {1,2} plus 3 when alpha > 3; THEAVY: none
  // (the alpha = 1 truncated-mean term is handled separately).
  static CenteringSpec make(Theorem t, double alpha);
};

// T14 / TGAUSS: n log(E[e^{-beta w_-}] + sum_i beta^i E[w_+^i] / i!).
// THEAVY: n beta E[w 1{|w| <= m(n^1.5)}] at alpha = 1, else 0.
// Gaussian disorder under T14 uses the exact cumulant n beta^2 / 2.
double centering_constant(const TailSpec& spec, double beta_n, long n, const CenteringSpec& cs);

// Limit law N(0, 2/sqrt(pi)).
double gaussian_limit_variance();
double gaussian_limit_sd();
double gaussian_limit_cdf(double x);
double gaussian_limit_quantile(double p);

struct PoissonPoint {
  double w, t, x;
};

struct PoissonField {
  std::vector<PoissonPoint> points;
  double eps = 0.0;
  double K = 0.0;
  double alpha = 0.0;
  double c_minus = 0.0;
};

// Mass of the window {|w| > eps} x (0,1) x (-K,K) under
// eta = alpha/2 |w|^{-1-alpha} (1{w>0} + c_- 1{w<0}) dw dt dx,
// i.e. (1 + c_-) K eps^-alpha.
double window_mass(double alpha, double c_minus, double eps, double K);

// int_0^1 int_{-K}^{K} rho(t,x) dx dt.
double heat_mass(double K);

// Drift that the windowed W0 removes:
//   1 < alpha < 2 : int_{|w|>eps} w rho d eta over the window,
//   alpha = 1     : the same over eps < |w| <= 1,
//   alpha < 1     : minus the mean of the discarded jumps |w| <= eps.
double window_compensator(double alpha, double c_minus, double eps, double K);

PoissonField sample_poisson_field(double alpha, double c_minus, double eps, double K, Stream& rng);

struct WOptions {
  // For alpha < 1 add back the mean of the discarded jumps |w| <= eps. With
  // c_- != 1 that mean is of order eps^{1-alpha}, far above the L2 size
  // eps^{1-alpha/2} of the discarded fluctuation.
  bool small_jump_drift = true;
};

// Windowed W_beta^{(alpha)}:
//   sum_points rho(t,x) (e^{beta w} - 1)/beta - C     (beta > 0)
//   sum_points rho(t,x) w - C                         (beta = 0)
// with C = window_compensator(...). A point with beta w > 700 makes the
// value +inf.
double sample_W(double alpha, double c_minus, double beta, double eps, double K, Stream& rng,
                WOptions opt = {});
// The same functional on an explicit field (consumes no randomness).
double W_from_field(const PoissonField& field, double beta, WOptions opt = {});

// int_0^1 int_R rho(t,x)^alpha / 2 dx dt = (2 pi)^{(1-alpha)/2} / ((3-alpha) sqrt(alpha)).
double poisson_exponent_space_integral(double alpha);

// psi_alpha(y): the log characteristic function of W0^{(alpha)}.
std::complex<double> stable_exponent(double alpha, double c_minus, double y);
// exp(psi_alpha(y)).
std::complex<double> stable_cf(double alpha, double c_minus, double y);

// The one-sided integrals behind psi for y > 0:
//   alpha in (0,1): int_0^inf (e^{iu} - 1) alpha u^{-1-alpha} du
//   alpha in (1,2): int_0^inf (e^{iu} - 1 - iu) alpha u^{-1-alpha} du
//   alpha = 1     : int_0^inf (e^{iu} - 1 - iu 1{u<=1}) u^{-2} du
// by quadrature.
std::complex<double> stable_jump_integral(double alpha);

// log Z - n beta_n^2/2 for Gaussian disorder at beta_n = beta n_ref^{-1/4};
// a finite-n stand-in for log Z_{sqrt2 beta} of the stochastic heat equation.
double she_reference_sample(double beta, int n_ref, Stream& rng);

}  // namespace polymerlab
