#include "polymerlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace polymerlab::quad {

namespace {

double gk(const Fn& f, double a, double b, double rel_tol) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &err);
}

// Breaks at +-s*10^j between |a| and |b| when the interval spans decades.
std::vector<double> decade_breaks(double a, double b) {
  std::vector<double> out{a, b};
  double lo = std::max(1.0, std::min(std::abs(a), std::abs(b)));
  double hi = std::max(std::abs(a), std::abs(b));
  if (a < 0 && b > 0) lo = 1.0;
  for (double s = 10 * lo; s < hi; s *= 10) {
    if (s > a && s < b) out.push_back(s);
    if (-s > a && -s < b) out.push_back(-s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double finite(const Fn& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  if (a > b) return -finite(f, b, a, rel_tol);
  auto br = decade_breaks(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) sum += gk(f, br[i], br[i + 1], rel_tol);
  return sum;
}

double piecewise(const Fn& f, std::vector<double> breaks, double rel_tol) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) sum += finite(f, breaks[i], breaks[i + 1], rel_tol);
  return sum;
}

double to_infinity(const Fn& f, double a, double rel_tol) {
  boost::math::quadrature::exp_sinh<double> es;
  auto g = [&](double s) { return f(a + s); };
  return es.integrate(g, 0.0, std::numeric_limits<double>::infinity(), rel_tol);
}

double from_minus_infinity(const Fn& f, double b, double rel_tol) {
  boost::math::quadrature::exp_sinh<double> es;
  auto g = [&](double s) { return f(b - s); };
  return es.integrate(g, 0.0, std::numeric_limits<double>::infinity(), rel_tol);
}

double singular(const Fn& f, double a, double b, double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, rel_tol);
}

double cos_tail(const Fn& f, double a) {
  // int_a^inf f(u) cos(u) du = cos a * C - sin a * S with C, S over [0, inf)
  thread_local boost::math::quadrature::ooura_fourier_cos<double> oc;
  thread_local boost::math::quadrature::ooura_fourier_sin<double> os;
  auto g = [&](double s) { return f(a + s); };
  double c = oc.integrate(g, 1.0).first;
  double s = os.integrate(g, 1.0).first;
  return std::cos(a) * c - std::sin(a) * s;
}

double sin_tail(const Fn& f, double a) {
  thread_local boost::math::quadrature::ooura_fourier_cos<double> oc;
  thread_local boost::math::quadrature::ooura_fourier_sin<double> os;
  auto g = [&](double s) { return f(a + s); };
  double c = oc.integrate(g, 1.0).first;
  double s = os.integrate(g, 1.0).first;
  return std::sin(a) * c + std::cos(a) * s;
}

}  // namespace polymerlab::quad
