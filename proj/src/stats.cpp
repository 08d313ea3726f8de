#include "polymerlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polymerlab/errors.hpp"

namespace polymerlab {

EmpiricalSample::EmpiricalSample(std::vector<double> values, std::string meta)
    : values_(std::move(values)), meta_(std::move(meta)) {
  for (double v : values_)
    if (std::isnan(v)) throw DomainError("EmpiricalSample: NaN value");
  sorted_ = values_;
  std::sort(sorted_.begin(), sorted_.end());
}

double ecdf(const EmpiricalSample& s, double x) {
  if (s.empty()) throw DomainError("ecdf: empty sample");
  auto srt = s.sorted();
  auto it = std::upper_bound(srt.begin(), srt.end(), x);
  return static_cast<double>(it - srt.begin()) / static_cast<double>(srt.size());
}

double ks_one_sample(const EmpiricalSample& s, const std::function<double(double)>& cdf) {
  if (s.empty()) throw DomainError("ks_one_sample: empty sample");
  auto srt = s.sorted();
  const double n = static_cast<double>(srt.size());
  double d = 0.0;
  for (std::size_t i = 0; i < srt.size();) {
    std::size_t j = i;
    while (j < srt.size() && srt[j] == srt[i]) ++j;
    double F = cdf(srt[i]);
    // left limit, so CDFs with atoms are compared correctly
    double F_left = cdf(std::nextafter(srt[i], -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(static_cast<double>(j) / n - F), std::abs(F_left - static_cast<double>(i) / n)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  auto x = a.sorted(), y = b.sorted();
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<std::complex<double>> ecf(const EmpiricalSample& s, std::span<const double> y_grid) {
  if (s.empty()) throw DomainError("ecf: empty sample");
  for (double v : s.values())
    if (!std::isfinite(v)) throw DomainError("ecf: sample has infinite values");
  std::vector<std::complex<double>> out;
  out.reserve(y_grid.size());
  const double n = static_cast<double>(s.size());
  for (double y : y_grid) {
    double c = 0.0, si = 0.0;
    for (double v : s.values()) {
      c += std::cos(y * v);
      si += std::sin(y * v);
    }
    out.emplace_back(c / n, si / n);
  }
  return out;
}

namespace {

double quantile7(std::span<const double> srt, double p) {
  const double h = (static_cast<double>(srt.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, srt.size() - 1);
  if (lo == hi || srt[lo] == srt[hi]) return srt[lo];
  return srt[lo] + (h - static_cast<double>(lo)) * (srt[hi] - srt[lo]);
}

}  // namespace

double sample_quantile(const EmpiricalSample& s, double p) {
  if (s.empty()) throw DomainError("sample_quantile: empty sample");
  if (!(p >= 0 && p <= 1)) throw DomainError("sample_quantile: p must lie in [0,1]");
  return quantile7(s.sorted(), p);
}

double sample_mean(const EmpiricalSample& s) {
  if (s.empty()) throw DomainError("sample_mean: empty sample");
  // summing in sorted order keeps the result permutation-invariant
  auto srt = s.sorted();
  return std::accumulate(srt.begin(), srt.end(), 0.0) / static_cast<double>(srt.size());
}

ScaleEstimates scale_estimates(const EmpiricalSample& s) {
  if (s.empty()) throw DomainError("scale_estimates: empty sample");
  auto srt = s.sorted();
  ScaleEstimates e;
  if (srt.size() >= 2) {
    const double m = sample_mean(s);
    double ss = 0.0;
    for (double v : srt) ss += (v - m) * (v - m);
    e.variance = ss / static_cast<double>(srt.size() - 1);
  }
  e.iqr = quantile7(srt, 0.75) - quantile7(srt, 0.25);
  const double med = quantile7(srt, 0.5);
  std::vector<double> dev(srt.size());
  for (std::size_t i = 0; i < srt.size(); ++i) dev[i] = std::abs(srt[i] - med);
  std::sort(dev.begin(), dev.end());
  e.mad = quantile7(dev, 0.5);
  return e;
}

Interval bootstrap_ci(const EmpiricalSample& s,
                      const std::function<double(std::span<const double>)>& statistic, double level,
                      int resamples, Stream& rng) {
  if (s.empty()) throw DomainError("bootstrap_ci: empty sample");
  if (!(level > 0 && level < 1)) throw DomainError("bootstrap_ci: level must lie in (0,1)");
  if (resamples < 1) throw DomainError("bootstrap_ci: resamples must be positive");
  auto vals = s.sorted();
  const double point = statistic(vals);
  std::vector<double> stats(static_cast<std::size_t>(resamples)), buf(vals.size());
  std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
  for (auto& st : stats) {
    for (double& b : buf) b = vals[pick(rng.engine())];
    st = statistic(buf);
  }
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  Interval iv{quantile7(stats, tail), quantile7(stats, 1.0 - tail)};
  iv.lo = std::min(iv.lo, point);
  iv.hi = std::max(iv.hi, point);
  return iv;
}

SlopeFit loglog_slope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw DomainError("loglog_slope: need at least 3 points");
  SlopeFit f;
  for (auto [n, st] : pairs) {
    if (!(n > 0) || !(st > 0) || !std::isfinite(st))
      throw DomainError("loglog_slope: n and statistic must be positive and finite");
    f.points.emplace_back(std::log(n), std::log(st));
  }
  const double k = static_cast<double>(f.points.size());
  double mx = 0, my = 0;
  for (auto [x, y] : f.points) {
    mx += x;
    my += y;
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : f.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0) throw DomainError("loglog_slope: all n equal");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (auto [x, y] : f.points) {
    double r = y - f.intercept - f.slope * x;
    sse += r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  f.stderr_ = k > 2 ? std::sqrt(std::max(sse, 0.0) / (k - 2) / sxx) : 0.0;
  return f;
}

}  // namespace polymerlab
