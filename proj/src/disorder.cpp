#include "polymerlab/disorder.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "polymerlab/errors.hpp"
#include "polymerlab/kernels.hpp"
#include "polymerlab/quadrature.hpp"

namespace polymerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const boost::math::normal& stdnorm() {
  static const boost::math::normal n(0.0, 1.0);
  return n;
}

// Raw Lomax variable at weight value x.
double raw_y(const TailSpec& s, double x) { return s.mu + s.sd * x; }
double omega_of_y(const TailSpec& s, double y) { return (y - s.mu) / s.sd; }

double lomax_sf_y(const TailSpec& s, double y) {
  if (y >= 0) return s.right_weight() * std::pow(1.0 + y / s.scale, -s.alpha);
  return 1.0 - s.left_weight() * std::pow(1.0 - y / s.scale, -s.alpha);
}

double lomax_cdf_y(const TailSpec& s, double y) {
  if (y < 0) return s.left_weight() * std::pow(1.0 - y / s.scale, -s.alpha);
  return 1.0 - s.right_weight() * std::pow(1.0 + y / s.scale, -s.alpha);
}

double binom(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

// Lomax tail where the raw variable exceeds b(z_a - 1):
// int omega^i dF, via z = 1 + y/b and a binomial expansion.
double lomax_right_tail_poly(const TailSpec& s, int i, double z_a) {
  const double b = s.scale, d = b + s.mu, a = s.alpha;
  double sum = 0.0;
  for (int j = 0; j <= i; ++j)
    sum += binom(i, j) * std::pow(b, j) * std::pow(-d, i - j) * std::pow(z_a, j - a) / (a - j);
  return s.right_weight() * a * sum / std::pow(s.sd, i);
}

// Lomax tail where the raw variable is below -b(z_a - 1).
double lomax_left_tail_poly(const TailSpec& s, int i, double z_a) {
  if (s.c_minus == 0.0) return 0.0;
  const double b = s.scale, e = b - s.mu, a = s.alpha;
  double sum = 0.0;
  for (int j = 0; j <= i; ++j)
    sum += binom(i, j) * std::pow(e, i - j) * std::pow(-b, j) * std::pow(z_a, j - a) / (a - j);
  return s.left_weight() * a * sum / std::pow(s.sd, i);
}

// Where the quadrature hands over to the analytic Lomax tails, in raw units.
double lomax_tail_y(const TailSpec& s) { return 10.0 * s.scale + 2.0 * std::abs(s.mu); }

std::vector<double> natural_breaks(const TailSpec& s) {
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: {
      double yt = lomax_tail_y(s);
      return {omega_of_y(s, -yt), omega_of_y(s, -s.scale), omega_of_y(s, 0.0),
              omega_of_y(s, s.scale), omega_of_y(s, yt), 0.0};
    }
    case Family::ParetoOneSided:
      return {1.0, 2.0, 10.0};
    case Family::GaussianReference:
      return {-10.0, -3.0, 0.0, 3.0, 10.0};
  }
  return {};
}

double taylor_tail(double x, int p) {
  // e^x - sum_{j<=p} x^j/j!
  if (std::abs(x) < 1.0) {
    double term = 1.0;
    for (int j = 1; j <= p; ++j) term *= x / j;
    double sum = 0.0;
    for (int j = p + 1; j < p + 60; ++j) {
      term *= x / j;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  double sum = 0.0, term = 1.0;
  for (int j = 0; j <= p; ++j) {
    sum += term;
    term *= x / (j + 1);
  }
  return std::exp(x) - sum;
}

void polish_upper(const TailSpec& s, double& x, double v) {
  for (int it = 0; it < 64 && tail_cdf_bar(s, x) > v; ++it) x = std::nextafter(x, kInf);
  for (int it = 0; it < 64; ++it) {
    double down = std::nextafter(x, -kInf);
    if (tail_cdf_bar(s, down) <= v) x = down;
    else break;
  }
}

// E[omega^i 1{omega > a}].
double upper_partial_moment(const TailSpec& s, int i, double a) {
  auto g = [i](double x) { return std::pow(x, i); };
  if (s.family != Family::StandardizedTwoSidedLomax) return expect(s, g, a, kInf);
  double t = omega_of_y(s, lomax_tail_y(s));
  double start = std::max(a, t);
  double head = a < t ? expect(s, g, a, t) : 0.0;
  return head + lomax_right_tail_poly(s, i, 1.0 + raw_y(s, start) / s.scale);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::StandardizedTwoSidedLomax: return "StandardizedTwoSidedLomax";
    case Family::ParetoOneSided: return "ParetoOneSided";
    case Family::GaussianReference: return "GaussianReference";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "StandardizedTwoSidedLomax" || name == "lomax") return Family::StandardizedTwoSidedLomax;
  if (name == "ParetoOneSided" || name == "pareto") return Family::ParetoOneSided;
  if (name == "GaussianReference" || name == "gaussian") return Family::GaussianReference;
  throw DomainError("unknown disorder family '" + std::string(name) + "'");
}

TailSpec TailSpec::lomax(double alpha, double c_minus, double scale) {
  if (!(alpha > 0) || !(c_minus >= 0) || !(scale > 0) || std::isinf(alpha))
    throw DomainError("lomax: need alpha > 0 finite, c_minus >= 0, scale > 0");
  TailSpec s;
  s.family = Family::StandardizedTwoSidedLomax;
  s.alpha = alpha;
  s.c_minus = c_minus;
  s.scale = scale;
  const double r = s.right_weight(), q = s.left_weight();
  if (alpha > 1) s.mu = (r - q) * scale / (alpha - 1);
  if (alpha > 2) {
    double second = 2.0 * scale * scale / ((alpha - 1) * (alpha - 2));
    s.sd = std::sqrt(second - s.mu * s.mu);
  }
  return s;
}

TailSpec TailSpec::pareto(double alpha) {
  if (!(alpha > 0) || std::isinf(alpha)) throw DomainError("pareto: need alpha > 0 finite");
  TailSpec s;
  s.family = Family::ParetoOneSided;
  s.alpha = alpha;
  s.c_minus = 0.0;
  return s;
}

TailSpec TailSpec::gaussian() { return TailSpec{}; }

double tail_cdf_bar(const TailSpec& s, double x) {
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: return lomax_sf_y(s, raw_y(s, x));
    case Family::ParetoOneSided: return x >= 1.0 ? std::pow(x, -s.alpha) : 1.0;
    case Family::GaussianReference:
      if (std::isinf(x)) return x < 0 ? 1.0 : 0.0;
      return boost::math::cdf(boost::math::complement(stdnorm(), x));
  }
  return 0.0;
}

double cdf(const TailSpec& s, double x) {
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: return lomax_cdf_y(s, raw_y(s, x));
    case Family::ParetoOneSided: return x >= 1.0 ? 1.0 - std::pow(x, -s.alpha) : 0.0;
    case Family::GaussianReference:
      if (std::isinf(x)) return x < 0 ? 0.0 : 1.0;
      return boost::math::cdf(stdnorm(), x);
  }
  return 0.0;
}

double pdf(const TailSpec& s, double x) {
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: {
      double y = raw_y(s, x);
      double w = y >= 0 ? s.right_weight() : s.left_weight();
      return w * s.alpha / s.scale * std::pow(1.0 + std::abs(y) / s.scale, -s.alpha - 1.0) * s.sd;
    }
    case Family::ParetoOneSided: return x >= 1.0 ? s.alpha * std::pow(x, -s.alpha - 1.0) : 0.0;
    case Family::GaussianReference:
      if (std::isinf(x)) return 0.0;
      return boost::math::pdf(stdnorm(), x);
  }
  return 0.0;
}

double quantile(const TailSpec& s, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: {
      const double q = s.left_weight();
      double y;
      if (u > q) y = s.scale * (std::pow((1.0 - u) / s.right_weight(), -1.0 / s.alpha) - 1.0);
      else y = -s.scale * (std::pow(u / q, -1.0 / s.alpha) - 1.0);
      return omega_of_y(s, y);
    }
    case Family::ParetoOneSided: return std::pow(1.0 - u, -1.0 / s.alpha);
    case Family::GaussianReference: return boost::math::quantile(stdnorm(), u);
  }
  return 0.0;
}

double upper_quantile(const TailSpec& s, double v) {
  if (!(v > 0.0 && v < 1.0)) throw DomainError("upper_quantile: v must lie in (0,1)");
  double x = 0.0;
  switch (s.family) {
    case Family::StandardizedTwoSidedLomax: {
      const double r = s.right_weight();
      double y;
      if (v < r) y = s.scale * (std::pow(v / r, -1.0 / s.alpha) - 1.0);
      else y = -s.scale * (std::pow((1.0 - v) / s.left_weight(), -1.0 / s.alpha) - 1.0);
      x = omega_of_y(s, y);
      break;
    }
    case Family::ParetoOneSided: x = std::pow(v, -1.0 / s.alpha); break;
    case Family::GaussianReference:
      x = boost::math::quantile(boost::math::complement(stdnorm(), v));
      break;
  }
  polish_upper(s, x, v);
  return x;
}

std::vector<double> sample(const TailSpec& s, Stream& rng, std::size_t count) {
  std::vector<double> out(count);
  sample_into(s, rng, out);
  return out;
}

void sample_into(const TailSpec& s, Stream& rng, std::span<double> out) {
  std::array<double, 1024> u;
  for (std::size_t pos = 0; pos < out.size(); pos += u.size()) {
    std::size_t m = std::min(u.size(), out.size() - pos);
    rng.fill_uniform(std::span<double>(u.data(), m));
    kernels::fast::quantile_batch(s, u.data(), out.data() + pos, m);
  }
}

double m_of_t(const TailSpec& s, double t) {
  if (!(t > 1.0)) throw DomainError("m_of_t: t must exceed 1");
  return upper_quantile(s, 1.0 / t);
}

double m_of_t_bisect(const TailSpec& s, double t) {
  if (!(t > 1.0)) throw DomainError("m_of_t: t must exceed 1");
  const double v = 1.0 / t;
  double lo = -1.0, hi = 1.0;
  while (tail_cdf_bar(s, lo) <= v) lo = lo * 2.0 - 1.0;
  while (tail_cdf_bar(s, hi) > v) hi = hi * 2.0 + 1.0;
  while (hi - lo > 1e-10 * (1.0 + std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    if (tail_cdf_bar(s, mid) <= v) hi = mid;
    else lo = mid;
  }
  return hi;
}

double default_eta(double alpha) { return std::min((0.5 + alpha) / 2.0, 5.5); }

CutoffSpec CutoffSpec::for_alpha(double alpha) { return for_alpha(alpha, default_eta(alpha)); }

CutoffSpec CutoffSpec::for_alpha(double alpha, double eta) {
  if (!(eta > 0.5 && eta < alpha))
    throw DomainError("cutoff: eta must lie strictly inside (1/2, alpha)");
  return CutoffSpec{eta, alpha > 6.0 ? CutoffRule::HighAlpha : CutoffRule::MidLowAlpha};
}

double cutoff_k(const TailSpec& s, double beta_n, long n, const CutoffSpec& cut) {
  if (!(beta_n > 0)) throw DomainError("cutoff_k: beta_n must be positive");
  if (n < 2) throw DomainError("cutoff_k: n must be at least 2");
  if (s.alpha <= 0.5) throw UnsupportedRegime("cutoff_k: alpha <= 1/2 is not covered");
  CutoffRule expected = s.alpha > 6.0 ? CutoffRule::HighAlpha : CutoffRule::MidLowAlpha;
  if (cut.rule != expected) throw DomainError("cutoff_k: rule does not match alpha");
  if (expected == CutoffRule::HighAlpha) return 1.0 / beta_n;
  if (!(cut.eta > 0.5 && cut.eta < s.alpha))
    throw DomainError("cutoff_k: eta must lie strictly inside (1/2, alpha)");
  const double t1 = std::pow(static_cast<double>(n), 1.5);
  const double t2 = t1 * std::pow(std::log(static_cast<double>(n)), cut.eta);
  const double m1 = m_of_t(s, t1), m2 = m_of_t(s, t2);
  if (!(m1 > 0)) throw UnsupportedRegime("cutoff_k: m(n^1.5) is not positive for this law and n");
  return m2 / (beta_n * m1);
}

double expect(const TailSpec& s, const std::function<double(double)>& g, double lo, double hi,
              std::vector<double> breaks) {
  if (s.family == Family::ParetoOneSided) lo = std::max(lo, 1.0);
  if (!(lo < hi)) return 0.0;
  auto nb = natural_breaks(s);
  breaks.insert(breaks.end(), nb.begin(), nb.end());
  std::vector<double> pts;
  for (double b : breaks)
    if (b > lo && b < hi) pts.push_back(b);
  if (std::isfinite(lo)) pts.push_back(lo);
  if (std::isfinite(hi)) pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto f = [&](double x) {
    double p = pdf(s, x);
    return p == 0.0 ? 0.0 : g(x) * p;
  };
  double sum = quad::piecewise(f, pts);
  if (!std::isfinite(lo)) sum += quad::from_minus_infinity(f, pts.front());
  if (!std::isfinite(hi)) sum += quad::to_infinity(f, pts.back());
  return sum;
}

double moment_plus(const TailSpec& s, int i) {
  if (i < 1) throw DomainError("moment_plus: order must be at least 1");
  if (!(i < s.alpha)) throw DivergentMoment("moment_plus: E[omega_+^i] diverges for i >= alpha");
  return upper_partial_moment(s, i, 0.0);
}

double moment_plus_closed(const TailSpec& s, int i) {
  if (s.family != Family::StandardizedTwoSidedLomax)
    throw DomainError("moment_plus_closed: Lomax family only");
  if (i < 1) throw DomainError("moment_plus_closed: order must be at least 1");
  if (!(i < s.alpha)) throw DivergentMoment("moment_plus_closed: diverges for i >= alpha");
  if (s.mu >= 0) return lomax_right_tail_poly(s, i, 1.0 + s.mu / s.scale);
  // omega > 0 also picks up the left branch on (mu, 0)
  double total = lomax_right_tail_poly(s, i, 1.0);
  const double b = s.scale, e = b - s.mu, a = s.alpha, z1 = 1.0 - s.mu / b;
  double sum = 0.0;
  for (int j = 0; j <= i; ++j)
    sum += binom(i, j) * std::pow(e, i - j) * std::pow(-b, j) * (std::pow(z1, j - a) - 1.0) / (j - a);
  return total + s.left_weight() * a * sum / std::pow(s.sd, i);
}

double moment(const TailSpec& s, int i) {
  if (i < 0) throw DomainError("moment: negative order");
  if (i == 0) return 1.0;
  if (!(i < s.alpha)) throw DivergentMoment("moment: E[|omega|^i] diverges for i >= alpha");
  auto g = [i](double x) { return std::pow(x, i); };
  if (s.family != Family::StandardizedTwoSidedLomax) return expect(s, g, -kInf, kInf);
  const double yt = lomax_tail_y(s);
  const double z = 1.0 + yt / s.scale;
  return expect(s, g, omega_of_y(s, -yt), omega_of_y(s, yt)) + lomax_right_tail_poly(s, i, z) +
         lomax_left_tail_poly(s, i, z);
}

double mgf_neg(const TailSpec& s, double beta) {
  if (!(beta >= 0)) throw DomainError("mgf_neg: beta must be nonnegative");
  if (beta == 0.0) return 1.0;
  double neg = expect(s, [beta](double x) { return std::exp(beta * x); }, -kInf, 0.0);
  return neg + tail_cdf_bar(s, 0.0);
}

double lambda_trunc(const TailSpec& s, double beta, double k) {
  if (!(beta >= 0)) throw DomainError("lambda_trunc: beta must be nonnegative");
  if (!(k > 0)) throw DomainError("lambda_trunc: k must be positive");
  if (beta == 0.0) return 0.0;
  if (s.family == Family::GaussianReference && std::isinf(k)) return 0.5 * beta * beta;
  double body = expect(s, [beta](double x) { return std::exp(beta * x); }, -kInf, k, {0.0});
  double above = std::isinf(k) ? 0.0 : tail_cdf_bar(s, k);
  return std::log(body + above);
}

double taylor_residual_plus(const TailSpec& s, double beta, double k, int p) {
  if (!(beta >= 0) || !(k > 0)) throw DomainError("taylor_residual_plus: need beta >= 0, k > 0");
  if (p >= s.alpha) throw DivergentMoment("taylor_residual_plus: p must be below alpha");
  double head = expect(s, [beta, p](double x) { return taylor_tail(beta * x, p); }, 0.0, k);
  double tail = 0.0, bi = 1.0;
  for (int i = 1; i <= p; ++i) {
    bi *= beta / i;
    tail += bi * upper_partial_moment(s, i, k);
  }
  return head - tail;
}

double two_sided_trunc_mgf_minus_one(const TailSpec& s, double beta, double k) {
  if (!(beta >= 0) || !(k > 0)) throw DomainError("two_sided_trunc_mgf_minus_one: bad arguments");
  return expect(s, [beta](double x) { return std::expm1(beta * x); }, -k, k, {0.0});
}

double truncated_mean(const TailSpec& s, double a) {
  if (!(a > 0)) throw DomainError("truncated_mean: a must be positive");
  return expect(s, [](double x) { return x; }, -a, a, {0.0});
}

}  // namespace polymerlab
