#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polymerlab/disorder.hpp"
#include "polymerlab/errors.hpp"

using namespace polymerlab;

namespace {

std::vector<TailSpec> all_specs() {
  return {TailSpec::lomax(0.75, 1.0), TailSpec::lomax(1.5, 0.5), TailSpec::lomax(1.5, 1.0),
          TailSpec::lomax(4.0, 1.0),  TailSpec::lomax(4.0, 0.3), TailSpec::lomax(8.0, 2.0),
          TailSpec::pareto(1.0),      TailSpec::pareto(2.0),     TailSpec::gaussian()};
}

// standard error of the median from 100 batch medians
std::pair<double, double> batch_median(std::vector<double> v) {
  const std::size_t B = 100, m = v.size() / B;
  std::vector<double> meds;
  for (std::size_t b = 0; b < B; ++b) {
    auto first = v.begin() + b * m;
    std::nth_element(first, first + m / 2, first + m);
    meds.push_back(first[m / 2]);
  }
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return {v[v.size() / 2], std::sqrt(oracle::variance(meds) / B)};
}

}  // namespace

TEST_SUITE("disorder") {

TEST_CASE("tail_cdf_bar examples") {
  CHECK(tail_cdf_bar(TailSpec::pareto(2.0), 2.0) == doctest::Approx(0.25).epsilon(1e-15));
  for (const auto& s : {TailSpec::lomax(1.5, 0.5), TailSpec::lomax(4.0, 1.0), TailSpec::lomax(8.0, 2.0),
                        TailSpec::pareto(1.0), TailSpec::gaussian()}) {
    CHECK(tail_cdf_bar(s, -1e12) >= 1.0 - 1e-12);
    CHECK(tail_cdf_bar(s, -std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(tail_cdf_bar(s, std::numeric_limits<double>::infinity()) == 0.0);
  }
}

TEST_CASE("tail frequency at 1e4 matches 1e7 draws") {
  TailSpec s = TailSpec::lomax(1.5, 0.5);
  Stream rng(101);
  auto x = sample(s, rng, 10'000'000);
  const double p = tail_cdf_bar(s, 1e4);
  const double hits = static_cast<double>(std::count_if(x.begin(), x.end(), [](double v) { return v > 1e4; }));
  const double N = 1e7;
  CHECK(std::abs(hits - N * p) <= 3.0 * std::sqrt(N * p * (1 - p)));
}

TEST_CASE("quantile examples") {
  CHECK(quantile(TailSpec::pareto(1.0), 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  for (const auto& s : all_specs())
    for (int i = 1; i <= 9; ++i) {
      double u = i / 10.0;
      CHECK(std::abs(tail_cdf_bar(s, quantile(s, u)) - (1 - u)) < 1e-12);
    }
  CHECK_THROWS_AS(quantile(TailSpec::gaussian(), 0.0), DomainError);
  CHECK_THROWS_AS(quantile(TailSpec::gaussian(), 1.0), DomainError);
}

TEST_CASE("quantile brackets F") {
  for (const auto& s : all_specs())
    for (double u : {0.01, 0.3, 0.5, 0.77, 0.999}) {
      double x = quantile(s, u);
      CHECK(cdf(s, x) >= u - 1e-15);
      CHECK(cdf(s, x - 1e-6 * (1 + std::abs(x))) < u);
    }
}

TEST_CASE("median of 1e7 draws") {
  TailSpec s = TailSpec::lomax(4.0, 1.0);
  Stream rng(7);
  auto [med, se] = batch_median(sample(s, rng, 10'000'000));
  CHECK(std::abs(med - quantile(s, 0.5)) <= 3 * se);
}

TEST_CASE("sample determinism and moments") {
  TailSpec s = TailSpec::lomax(4.0, 1.0);
  Stream a(5), b(5);
  CHECK(sample(s, a, 0).empty());
  CHECK(sample(s, a, 5) == sample(s, b, 5));
  Stream rng(11);
  auto x = sample(s, rng, 10'000'000);
  const double m = oracle::mean(x), v = oracle::variance(x);
  CHECK(std::abs(m) <= 3.0 / std::sqrt(1e7) * std::sqrt(v));
  CHECK(std::abs(v - 1.0) <= 0.02);
}

TEST_CASE("m_of_t examples") {
  CHECK(m_of_t(TailSpec::pareto(2.0), 8.0) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK(m_of_t(TailSpec::pareto(1.0), 1e3) == doctest::Approx(1000.0).epsilon(1e-14));
  TailSpec s = TailSpec::lomax(1.5, 1.0);
  CHECK(std::abs(tail_cdf_bar(s, m_of_t(s, 1e6)) - 1e-6) < 1e-12);
  CHECK(std::abs(tail_cdf_bar(s, m_of_t_bisect(s, 1e6)) - 1e-6) < 1e-12);
  CHECK_THROWS_AS(m_of_t(s, 1.0), DomainError);
}

TEST_CASE("m consistency") {
  for (const auto& s : all_specs())
    for (double t : {10.0, 1e3, 1e6}) {
      double m = m_of_t(s, t);
      CHECK(tail_cdf_bar(s, m) <= 1.0 / t);
      CHECK(tail_cdf_bar(s, 0.999999 * m) >= 1.0 / t);
      CHECK(m_of_t_bisect(s, t) == doctest::Approx(m).epsilon(1e-9));
    }
}

TEST_CASE("cutoff_k examples") {
  TailSpec s8 = TailSpec::lomax(8.0, 1.0);
  CHECK(cutoff_k(s8, 0.1, 100, CutoffSpec::for_alpha(8.0)) == doctest::Approx(10.0).epsilon(1e-15));
  TailSpec p = TailSpec::pareto(1.5);
  for (long n : {10L, 1000L, 100000L}) {
    const double beta = 0.3;
    double k = cutoff_k(p, beta, n, CutoffSpec::for_alpha(1.5, 1.0));
    double closed = std::pow(std::log(static_cast<double>(n)), 1.0 / 1.5) / beta;
    CHECK(std::abs(k - closed) <= 1e-10 * closed);
  }
  CHECK(CutoffSpec::for_alpha(6.0).rule == CutoffRule::MidLowAlpha);
  CHECK(CutoffSpec::for_alpha(6.5).rule == CutoffRule::HighAlpha);
  CHECK_THROWS_AS(cutoff_k(TailSpec::lomax(0.5, 1.0), 0.1, 100, CutoffSpec{0.6, CutoffRule::MidLowAlpha}),
                  UnsupportedRegime);
  CHECK_THROWS_AS(CutoffSpec::for_alpha(4.0, 0.5), DomainError);
  CHECK_THROWS_AS(CutoffSpec::for_alpha(4.0, 4.0), DomainError);
}

TEST_CASE("default eta inside (1/2, alpha)") {
  oracle::Gen g(3);
  for (int i = 0; i < 200; ++i) {
    double a = g.uniform(0.5001, 40.0);
    double eta = default_eta(a);
    CHECK(eta > 0.5);
    CHECK(eta < a);
    CHECK(eta <= 5.5);
  }
}

TEST_CASE("truncate") {
  CHECK(truncate(-3.2, 5) == -3.2);
  CHECK(truncate(5.0, 5.0) == 5.0);
  CHECK(truncate(7.1, 5) == 0.0);
  oracle::Gen g(4);
  for (int i = 0; i < 500; ++i) {
    double w = g.uniform(-50, 50), k = g.uniform(0.1, 30);
    double t = truncate(w, k);
    if (w >= 0) CHECK(t <= w);
    if (w <= k) CHECK(t == w);
    CHECK(truncate(t, k) == t);
  }
}

TEST_CASE("moment_plus") {
  CHECK(moment_plus(TailSpec::gaussian(), 1) == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
  TailSpec s = TailSpec::lomax(4.0, 1.0);
  Stream rng(12);
  auto x = sample(s, rng, 10'000'000);
  std::vector<double> sq;
  sq.reserve(x.size());
  for (double v : x) sq.push_back(v > 0 ? v * v : 0.0);
  CHECK(std::abs(oracle::mean(sq) - moment_plus(s, 2)) <= 3 * std::sqrt(oracle::variance(sq) / 1e7));
  CHECK_THROWS_AS(moment_plus(s, 5), DivergentMoment);
  CHECK_THROWS_AS(moment_plus(s, 4), DivergentMoment);
  for (double a : {2.5, 4.0, 8.0})
    for (int i = 1; i < a; ++i) {
      TailSpec l = TailSpec::lomax(a, 0.7);
      CHECK(moment_plus(l, i) == doctest::Approx(moment_plus_closed(l, i)).epsilon(1e-9));
    }
}

TEST_CASE("standardization") {
  for (double a : {2.5, 3.0, 4.0, 8.0})
    for (double c : {0.0, 0.5, 1.0, 3.0}) {
      TailSpec s = TailSpec::lomax(a, c);
      CHECK(std::abs(moment(s, 1)) < 1e-8);
      CHECK(std::abs(moment(s, 2) - 1.0) < 1e-6);
    }
}

TEST_CASE("regular variation and tail balance") {
  for (const auto& s : all_specs()) {
    if (!s.heavy()) continue;
    const double r2 = std::pow(1e2, s.alpha) * tail_cdf_bar(s, 1e2);
    const double r4 = std::pow(1e4, s.alpha) * tail_cdf_bar(s, 1e4);
    const double r6 = std::pow(1e6, s.alpha) * tail_cdf_bar(s, 1e6);
    CHECK(r6 > 0);
    CHECK(std::abs(r4 / r6 - 1) < 0.01);
    // drift shrinks toward the constant
    CHECK(std::abs(r4 / r6 - 1) <= std::abs(r2 / r6 - 1) + 1e-15);
    if (s.alpha <= 2 && s.family == Family::StandardizedTwoSidedLomax) {
      double x = 1e8;
      CHECK(cdf(s, -x) / tail_cdf_bar(s, x) == doctest::Approx(s.c_minus).epsilon(1e-6));
    }
  }
}

TEST_CASE("mgf_neg") {
  TailSpec s = TailSpec::lomax(4.0, 1.0);
  CHECK(mgf_neg(s, 0.0) == 1.0);
  CHECK_THROWS_AS(mgf_neg(s, -0.1), DomainError);
  TailSpec g = TailSpec::gaussian();
  CHECK(mgf_neg(g, 1e4) == doctest::Approx(0.5).epsilon(1e-4));
  Stream rng(13);
  auto x = sample(s, rng, 10'000'000);
  std::vector<double> v;
  v.reserve(x.size());
  for (double w : x) v.push_back(w < 0 ? std::exp(0.1 * w) : 1.0);
  CHECK(std::abs(oracle::mean(v) - mgf_neg(s, 0.1)) <= 3 * std::sqrt(oracle::variance(v) / 1e7));
}

TEST_CASE("lambda_trunc") {
  TailSpec s = TailSpec::lomax(4.0, 1.0);
  CHECK(lambda_trunc(s, 0.0, 3.0) == 0.0);
  for (double b : {0.1, 0.5, 1.3})
    CHECK(std::abs(lambda_trunc(TailSpec::gaussian(), b, 60.0) - b * b / 2) < 1e-8);
  Stream rng(14);
  auto x = sample(s, rng, 10'000'000);
  std::vector<double> v;
  v.reserve(x.size());
  for (double w : x) v.push_back(std::exp(0.1 * truncate(w, 10.0)));
  const double m = oracle::mean(v), se = std::sqrt(oracle::variance(v) / 1e7);
  // delta method for the log
  CHECK(std::abs(std::log(m) - lambda_trunc(s, 0.1, 10.0)) <= 3 * se / m);
}

namespace {
double scaled_residual(double b) {
  return std::pow(b, -3.5) * std::abs(taylor_residual_plus(TailSpec::lomax(4.0, 1.0), b, 1.0 / b, 3));
}
}  // namespace

// The scaled residual behaves like beta^{1/2} log(1/beta), which peaks at
// beta = e^-2 ~ 0.135, so the ladder starting at 0.2 rises once before it falls.
TEST_CASE("taylor residual ladder from 0.2 is monotone" * doctest::should_fail()) {
  double prev = std::numeric_limits<double>::infinity();
  for (double b : {0.2, 0.1, 0.05, 0.025}) {
    double r = scaled_residual(b);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("taylor residual decays faster than beta^theta past the hump") {
  double prev = std::numeric_limits<double>::infinity();
  for (double b : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
    double r = scaled_residual(b);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(scaled_residual(0.00625) < 0.5 * scaled_residual(0.2));
}

TEST_CASE("two-sided truncated mgf bound has a stable constant") {
  TailSpec s = TailSpec::lomax(1.5, 1.0);
  const double eps = 1.0;
  std::vector<double> C;
  for (double b : {1e-2, 1e-3, 1e-4}) {
    const double k = eps / b;
    const double lhs = std::abs(two_sided_trunc_mgf_minus_one(s, b, k));
    const double rhs = std::exp(b * k) * std::max(tail_cdf_bar(s, 1 / b), tail_cdf_bar(s, k));
    C.push_back(lhs / rhs);
  }
  CHECK(*std::max_element(C.begin(), C.end()) <= 2.0 * *std::min_element(C.begin(), C.end()));
}

TEST_CASE("parse_family") {
  CHECK(parse_family(family_name(Family::ParetoOneSided)) == Family::ParetoOneSided);
  CHECK(parse_family("lomax") == Family::StandardizedTwoSidedLomax);
  CHECK(parse_family("gaussian") == Family::GaussianReference);
  CHECK_THROWS(parse_family("cauchy"));
}

}
