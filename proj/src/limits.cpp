#include "polymerlab/limits.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "polymerlab/errors.hpp"
#include "polymerlab/kernels.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/quadrature.hpp"

namespace polymerlab {

namespace {

constexpr std::size_t kBatch = 4096;

void check_heavy_alpha(double alpha, const char* who) {
  if (!(alpha > 0.5 && alpha < 2.0))
    throw UnsupportedRegime(std::string(who) + ": alpha must lie in (1/2, 2)");
}

void check_window(double c_minus, double eps, double K, const char* who) {
  if (!(c_minus >= 0) || !(eps > 0) || !(K > 0))
    throw DomainError(std::string(who) + ": need c_minus >= 0, eps > 0, K > 0");
}

// sin(u) - u without cancellation near 0.
double sin_minus_id(double u) {
  if (std::abs(u) < 0.1) {
    double u2 = u * u;
    return u * u2 * (-1.0 / 6 + u2 * (1.0 / 120 + u2 * (-1.0 / 5040 + u2 / 362880)));
  }
  return std::sin(u) - u;
}

double cos_minus_one(double u) {
  double s = std::sin(0.5 * u);
  return -2.0 * s * s;
}

// int_0^1 int_R rho log rho dx dt by nested quadrature.
double rho_log_rho_integral() {
  static const double value = [] {
    auto inner = [](double t) {
      const double L = 40.0 * std::sqrt(t);
      auto f = [t](double x) {
        double lr = -x * x / (2 * t) - 0.5 * std::log(2 * std::numbers::pi * t);
        return std::exp(lr) * lr;
      };
      return 2.0 * quad::finite(f, 0.0, L, 1e-13);
    };
    return quad::singular(inner, 0.0, 1.0, 1e-12);
  }();
  return value;
}

}  // namespace

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::T14: return "T14";
    case Theorem::TGAUSS: return "TGAUSS";
    case Theorem::THEAVY: return "THEAVY";
  }
  return "?";
}

Theorem parse_theorem(const std::string& s) {
  if (s == "T14") return Theorem::T14;
  if (s == "TGAUSS") return Theorem::TGAUSS;
  if (s == "THEAVY") return Theorem::THEAVY;
  throw DomainError("unknown theorem '" + s + "' (expected T14, TGAUSS or THEAVY)");
}

CenteringSpec CenteringSpec::make(Theorem t, double alpha) {
  CenteringSpec cs;
  cs.theorem = t;
  cs.alpha = alpha;
  switch (t) {
    case Theorem::T14: cs.orders = {1, 2, 3, 4}; break;
    case Theorem::TGAUSS:
      cs.orders = {1, 2};
      if (alpha > 3) cs.orders.push_back(3);
      break;
    case Theorem::THEAVY: break;
  }
  return cs;
}

double centering_constant(const TailSpec& spec, double beta_n, long n, const CenteringSpec& cs) {
  if (!(beta_n >= 0)) throw DomainError("centering_constant: beta_n must be nonnegative");
  if (n < 1) throw DomainError("centering_constant: n must be positive");
  const double a = spec.alpha;
  switch (cs.theorem) {
    case Theorem::T14:
      if (!(a >= 6)) throw UnsupportedRegime("centering T14: needs alpha >= 6");
      break;
    case Theorem::TGAUSS:
      if (!(a > 2 && a <= 6)) throw UnsupportedRegime("centering TGAUSS: needs alpha in (2, 6]");
      break;
    case Theorem::THEAVY:
      if (!(a > 0.5 && a < 2)) throw UnsupportedRegime("centering THEAVY: needs alpha in (1/2, 2)");
      break;
  }
  if (cs.orders != CenteringSpec::make(cs.theorem, a).orders)
    throw DomainError("centering_constant: term set does not match the theorem");
  if (beta_n == 0.0) return 0.0;
  const double nn = static_cast<double>(n);
  if (cs.theorem == Theorem::THEAVY) {
    if (a != 1.0) return 0.0;
    return nn * beta_n * truncated_mean(spec, m_of_t(spec, std::pow(nn, 1.5)));
  }
  if (spec.family == Family::GaussianReference && cs.theorem == Theorem::T14)
    return nn * 0.5 * beta_n * beta_n;
  double inner = mgf_neg(spec, beta_n);
  for (int i : cs.orders) inner += std::pow(beta_n, i) * moment_plus(spec, i) / std::tgamma(i + 1.0);
  return nn * std::log(inner);
}

double gaussian_limit_variance() { return 2.0 / std::sqrt(std::numbers::pi); }
double gaussian_limit_sd() { return std::sqrt(gaussian_limit_variance()); }

double gaussian_limit_cdf(double x) {
  static const boost::math::normal law(0.0, gaussian_limit_sd());
  if (std::isinf(x)) return x < 0 ? 0.0 : 1.0;
  return boost::math::cdf(law, x);
}

double gaussian_limit_quantile(double p) {
  if (!(p > 0 && p < 1)) throw DomainError("gaussian_limit_quantile: p must lie in (0,1)");
  static const boost::math::normal law(0.0, gaussian_limit_sd());
  return boost::math::quantile(law, p);
}

double window_mass(double alpha, double c_minus, double eps, double K) {
  return (1.0 + c_minus) * K * std::pow(eps, -alpha);
}

double heat_mass(double K) {
  if (!(K > 0)) throw DomainError("heat_mass: K must be positive");
  return quad::finite([K](double t) { return std::erf(K / std::sqrt(2.0 * t)); }, 0.0, 1.0);
}

double window_compensator(double alpha, double c_minus, double eps, double K) {
  const double G = heat_mass(K);
  const double h = 0.5 * (1.0 - c_minus);
  if (alpha > 1.0) return h * alpha * std::pow(eps, 1.0 - alpha) / (alpha - 1.0) * G;
  if (alpha == 1.0) return eps < 1.0 ? h * std::log(1.0 / eps) * G : 0.0;
  return -h * alpha * std::pow(eps, 1.0 - alpha) / (1.0 - alpha) * G;
}

namespace {

double compensator_for(double alpha, double c_minus, double eps, double K, const WOptions& opt) {
  if (alpha < 1.0 && !opt.small_jump_drift) return 0.0;
  return window_compensator(alpha, c_minus, eps, K);
}

// Shared driver: draws N, then batches of (u1, u2, u3) in that order.
template <class OnBatch>
void draw_points(double mass, Stream& rng, OnBatch&& on_batch) {
  std::poisson_distribution<long long> count(mass);
  long long N = count(rng.engine());
  std::vector<double> u1(kBatch), u2(kBatch), u3(kBatch);
  for (long long done = 0; done < N;) {
    std::size_t m = static_cast<std::size_t>(std::min<long long>(kBatch, N - done));
    rng.fill_uniform(std::span<double>(u1.data(), m));
    rng.fill_uniform(std::span<double>(u2.data(), m));
    rng.fill_uniform(std::span<double>(u3.data(), m));
    on_batch(u1.data(), u2.data(), u3.data(), m);
    done += static_cast<long long>(m);
  }
}

}  // namespace

PoissonField sample_poisson_field(double alpha, double c_minus, double eps, double K, Stream& rng) {
  check_heavy_alpha(alpha, "sample_poisson_field");
  check_window(c_minus, eps, K, "sample_poisson_field");
  PoissonField f;
  f.eps = eps;
  f.K = K;
  f.alpha = alpha;
  f.c_minus = c_minus;
  const double right = 1.0 / (1.0 + c_minus);
  draw_points(window_mass(alpha, c_minus, eps, K), rng,
              [&](const double* u1, const double* u2, const double* u3, std::size_t m) {
                for (std::size_t i = 0; i < m; ++i) {
                  bool pos = u1[i] < right;
                  double v = pos ? u1[i] / right : (u1[i] - right) / (1.0 - right);
                  v = std::max(v, 0x1.0p-60);
                  double w = eps * std::pow(v, -1.0 / alpha);
                  f.points.push_back({pos ? w : -w, u2[i], K * (2.0 * u3[i] - 1.0)});
                }
              });
  return f;
}

double sample_W(double alpha, double c_minus, double beta, double eps, double K, Stream& rng,
                WOptions opt) {
  check_heavy_alpha(alpha, "sample_W");
  check_window(c_minus, eps, K, "sample_W");
  if (!(beta >= 0)) throw DomainError("sample_W: beta must be nonnegative");
  const kernels::PointMap pm{alpha, 1.0 / (1.0 + c_minus), eps, K};
  double sum = 0.0;
  std::size_t overflow = 0;
  draw_points(window_mass(alpha, c_minus, eps, K), rng,
              [&](const double* u1, const double* u2, const double* u3, std::size_t m) {
                auto b = kernels::fast::point_sum(pm, beta, u1, u2, u3, m);
                sum += b.sum;
                overflow += b.overflow;
              });
  if (overflow > 0) return std::numeric_limits<double>::infinity();
  return sum - compensator_for(alpha, c_minus, eps, K, opt);
}

double W_from_field(const PoissonField& field, double beta, WOptions opt) {
  if (!(beta >= 0)) throw DomainError("W_from_field: beta must be nonnegative");
  double sum = 0.0;
  for (const auto& p : field.points) {
    double rho = std::exp(-p.x * p.x / (2.0 * p.t)) / std::sqrt(2.0 * std::numbers::pi * p.t);
    if (beta > 0) {
      if (beta * p.w > kernels::kExpCap) return std::numeric_limits<double>::infinity();
      sum += std::expm1(beta * p.w) / beta * rho;
    } else {
      sum += p.w * rho;
    }
  }
  return sum - compensator_for(field.alpha, field.c_minus, field.eps, field.K, opt);
}

double poisson_exponent_space_integral(double alpha) {
  if (!(alpha > 0 && alpha < 3)) throw DomainError("poisson_exponent_space_integral: alpha in (0,3)");
  return std::pow(2.0 * std::numbers::pi, (1.0 - alpha) / 2.0) / ((3.0 - alpha) * std::sqrt(alpha));
}

std::complex<double> stable_jump_integral(double alpha) {
  if (!(alpha > 0 && alpha < 2)) throw DomainError("stable_jump_integral: alpha in (0,2)");
  const double a = alpha == 1.0 ? 1.0 : alpha;  // weight alpha u^{-1-alpha}; u^{-2} at alpha = 1
  auto dens = [a, alpha](double u) { return a * std::pow(u, -1.0 - alpha); };
  // near 0 use the leading terms so that no 0 * inf products appear
  auto re_f = [&](double u) {
    if (u < 1e-4) return -0.5 * a * std::pow(u, 1.0 - alpha) * (1.0 - u * u / 12.0);
    return cos_minus_one(u) * dens(u);
  };
  double re = quad::singular(re_f, 0.0, 1.0, 1e-13) +
              quad::cos_tail(dens, 1.0) - quad::finite(dens, 1.0, 1e6) -
              quad::to_infinity(dens, 1e6);
  double im;
  if (alpha < 1.0) {
    auto f = [&](double u) {
      if (u < 1e-4) return a * std::pow(u, -alpha) * (1.0 - u * u / 6.0);
      return std::sin(u) * dens(u);
    };
    im = quad::singular(f, 0.0, 1.0, 1e-13) +
         quad::sin_tail(dens, 1.0);
  } else {
    auto f = [&](double u) {
      if (u < 1e-4) return -a / 6.0 * std::pow(u, 2.0 - alpha) * (1.0 - u * u / 20.0);
      return sin_minus_id(u) * dens(u);
    };
    im = quad::singular(f, 0.0, 1.0, 1e-13) +
         quad::sin_tail(dens, 1.0);
    if (alpha > 1.0) im -= a / (alpha - 1.0);  // int_1^inf u * alpha u^{-1-alpha} du
  }
  return {re, im};
}

std::complex<double> stable_exponent(double alpha, double c_minus, double y) {
  if (!(alpha > 0 && alpha < 2)) throw DomainError("stable_cf: alpha must lie in (0,2)");
  if (!(c_minus >= 0)) throw DomainError("stable_cf: c_minus must be nonnegative");
  if (y == 0.0) return {0.0, 0.0};
  const double ay = std::abs(y);
  std::complex<double> psi;
  if (alpha < 1.0) {
    const double pi = std::numbers::pi;
    double mag = std::pow(2 * pi, (1 - alpha) / 2) * std::cos(alpha * pi / 2) * std::tgamma(1 - alpha) /
                 ((3 - alpha) * std::sqrt(alpha));
    psi = -std::pow(ay, alpha) * mag *
          std::complex<double>(1 + c_minus, -(1 - c_minus) * std::tan(alpha * pi / 2));
  } else {
    static thread_local double cached_alpha = -1;
    static thread_local std::complex<double> cached_A;
    if (alpha != cached_alpha) {
      cached_A = stable_jump_integral(alpha);
      cached_alpha = alpha;
    }
    const std::complex<double> J = cached_A + c_minus * std::conj(cached_A);
    if (alpha > 1.0) {
      psi = std::pow(ay, alpha) * poisson_exponent_space_integral(alpha) * J;
    } else {
      // int int 1/2 y rho [J - i (1-c) log(y rho)] dx dt, with int int rho = 1
      const std::complex<double> I(0.0, 1.0);
      psi = 0.5 * ay * (J - I * (1 - c_minus) * (std::log(ay) + rho_log_rho_integral()));
    }
  }
  return y > 0 ? psi : std::conj(psi);
}

std::complex<double> stable_cf(double alpha, double c_minus, double y) {
  return std::exp(stable_exponent(alpha, c_minus, y));
}

double she_reference_sample(double beta, int n_ref, Stream& rng) {
  if (n_ref < 1024) throw DomainError("she_reference_sample: n_ref must be at least 1024");
  if (!(beta >= 0)) throw DomainError("she_reference_sample: beta must be nonnegative");
  const std::uint64_t seed = rng.next();
  if (beta == 0.0) return 0.0;
  const double bn = beta * std::pow(static_cast<double>(n_ref), -0.25);
  StreamedRun r = run_streaming(TailSpec::gaussian(), n_ref, seed, bn);
  return r.log_Z - n_ref * 0.5 * bn * bn;
}

}  // namespace polymerlab
