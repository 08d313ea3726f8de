#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polymerlab/rng.hpp"

namespace polymerlab {

// A sample of real values. NaN is rejected; +-inf is kept (an overflowed
// W draw is a legitimate +inf observation and sorts to the end).
class EmpiricalSample {
 public:
  EmpiricalSample() = default;
  explicit EmpiricalSample(std::vector<double> values, std::string meta = {});

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> sorted() const { return sorted_; }
  const std::string& meta() const { return meta_; }

 private:
  std::vector<double> values_, sorted_;
  std::string meta_;
};

// Right-continuous ECDF.
double ecdf(const EmpiricalSample& s, double x);

double ks_one_sample(const EmpiricalSample& s, const std::function<double(double)>& cdf);
double ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b);

std::vector<std::complex<double>> ecf(const EmpiricalSample& s, std::span<const double> y_grid);

struct ScaleEstimates {
  double variance = 0.0;  // unbiased, two-pass
  double iqr = 0.0;       // type-7 quantiles
  double mad = 0.0;       // median |x - median|, unscaled
};
ScaleEstimates scale_estimates(const EmpiricalSample& s);

// Type-7 sample quantile, p in [0,1].
double sample_quantile(const EmpiricalSample& s, double p);
double sample_mean(const EmpiricalSample& s);

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Percentile bootstrap. The point estimate is folded into the interval.
Interval bootstrap_ci(const EmpiricalSample& s,
                      const std::function<double(std::span<const double>)>& statistic, double level,
                      int resamples, Stream& rng);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log n, log stat)
};

// Least squares on (log n, log stat); at least 3 points, stat > 0.
SlopeFit loglog_slope(std::span<const std::pair<double, double>> pairs);

}  // namespace polymerlab
