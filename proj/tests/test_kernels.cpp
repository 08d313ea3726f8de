#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "polymerlab/kernels.hpp"
#include "polymerlab/quadrature.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;

TEST_SUITE("rng") {

TEST_CASE("hash is deterministic and order sensitive") {
  CHECK(hash64({1, 2, 3}) == hash64({1, 2, 3}));
  CHECK(hash64({1, 2, 3}) != hash64({3, 2, 1}));
  CHECK(hash64({1, 2}) != hash64({1, 2, 0}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 10000; ++r) seen.insert(hash64({42, 1024, r}));
  CHECK(seen.size() == 10000);
}

TEST_CASE("uniform stays inside the open unit interval") {
  CHECK(Stream::to_open_unit(0) > 0.0);
  CHECK(Stream::to_open_unit(~std::uint64_t{0}) < 1.0);
  Stream s(7);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
}

TEST_CASE("fill_uniform matches one-at-a-time draws") {
  Stream a(99), b(99);
  std::vector<double> v(1000);
  a.fill_uniform(v);
  for (double x : v) CHECK(x == b.uniform());
}

}

TEST_SUITE("quadrature") {

TEST_CASE("known integrals") {
  CHECK(quad::finite([](double x) { return x * x; }, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(quad::finite([](double x) { return 1 / (1 + x) / (1 + x); }, 0, 1e8) ==
        doctest::Approx(1 - 1 / (1 + 1e8)).epsilon(1e-12));
  CHECK(quad::piecewise([](double x) { return std::abs(x); }, {-1, 0, 2}) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(quad::to_infinity([](double x) { return std::exp(-x); }, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(quad::from_minus_infinity([](double x) { return std::exp(x); }, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(quad::singular([](double x) { return 1 / std::sqrt(x); }, 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  // -Ci(1) and pi/2 - Si(1)
  CHECK(quad::cos_tail([](double u) { return 1 / u; }, 1) == doctest::Approx(-0.33740392290096813).epsilon(1e-10));
  CHECK(quad::sin_tail([](double u) { return 1 / u; }, 1) == doctest::Approx(0.62471325642771360).epsilon(1e-10));
}

TEST_CASE("power-law tails") {
  for (double a : {0.5, 1.5, 3.0}) {
    double v = quad::to_infinity([a](double x) { return std::pow(1 + x, -a - 1); }, 0);
    CHECK(v == doctest::Approx(1 / a).epsilon(1e-11));
  }
}

}

TEST_SUITE("kernels") {

TEST_CASE("row_step fast agrees with reference") {
  oracle::Gen g(21);
  for (int rep = 0; rep < 200; ++rep) {
    const bool big = rep % 50 == 0;
    const int prev_len = big ? (1 << 16) + g.integer(0, 100) : g.integer(1, 400);
    const int plo = g.integer(0, prev_len - 1), phi = g.integer(plo, prev_len - 1);
    const int lo = plo + g.integer(0, 1), hi = std::max(lo, phi + g.integer(0, 1));
    std::vector<double> prev(prev_len, -INFINITY), omega(prev_len + 1);
    for (int j = plo; j <= phi; ++j) prev[j] = g.uniform(-50, 50);
    for (double& w : omega) w = g.uniform(-10, 10);
    const double beta = g.uniform(0, 3);
    std::vector<double> a(prev_len + 1), b(prev_len + 1, 12345.0);
    double ma = kernels::ref::row_step(prev.data(), prev_len, a.data(), omega.data(), beta, lo, hi);
    double mb = kernels::fast::row_step(prev.data(), plo, phi, b.data(), omega.data(), beta, lo, hi);
    CHECK(std::abs(ma - mb) <= 1e-13 * (1 + std::abs(ma)));
    int bad = 0;
    for (int j = 0; j <= prev_len; ++j) {
      if (j >= lo && j <= hi) bad += std::abs(a[j] - b[j]) > 1e-13 * (1 + std::abs(a[j]));
      else bad += b[j] != 12345.0;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("row_step with one live neighbour") {
  std::vector<double> prev{1.0}, omega{0.5, -0.5}, next(2);
  double m = kernels::fast::row_step(prev.data(), 0, 0, next.data(), omega.data(), 2.0, 0, 1);
  CHECK(next[0] == doctest::Approx(1.0 + 1.0 - std::numbers::ln2));
  CHECK(next[1] == doctest::Approx(1.0 - 1.0 - std::numbers::ln2));
  CHECK(m == next[0]);
}

TEST_CASE("quantile_batch fast agrees with reference") {
  oracle::Gen g(22);
  std::vector<TailSpec> specs{TailSpec::lomax(0.75, 0.5), TailSpec::lomax(1.5, 1), TailSpec::lomax(4, 0),
                              TailSpec::lomax(8, 2), TailSpec::pareto(1.5), TailSpec::gaussian()};
  for (const auto& s : specs) {
    std::vector<double> u(3000);
    for (double& x : u) x = g.uniform(0, 1);
    u[0] = 1e-300;
    u[1] = 1 - 1e-16;
    u[2] = 0.5;
    std::vector<double> a(u.size()), b(u.size());
    kernels::ref::quantile_batch(s, u.data(), a.data(), u.size());
    kernels::fast::quantile_batch(s, u.data(), b.data(), u.size());
    int bad = 0;
    for (std::size_t i = 0; i < u.size(); ++i) bad += !(a[i] == b[i] || std::abs(a[i] - b[i]) <= 1e-12 * (1 + std::abs(a[i])));
    CHECK_MESSAGE(bad == 0, family_name(s.family), " alpha ", s.alpha);
  }
}

TEST_CASE("point_sum fast agrees with reference") {
  oracle::Gen g(23);
  for (int rep = 0; rep < 50; ++rep) {
    kernels::PointMap pm{g.uniform(0.6, 1.9), 1 / (1 + g.uniform(0, 2)), std::pow(10.0, -g.uniform(1, 4)),
                         g.uniform(1, 10)};
    const double beta = rep % 5 == 0 ? 0.0 : g.uniform(0.1, 2);
    const std::size_t m = static_cast<std::size_t>(g.integer(1, 5000));
    std::vector<double> u1(m), u2(m), u3(m);
    for (std::size_t i = 0; i < m; ++i) {
      u1[i] = g.uniform(0, 1);
      u2[i] = g.uniform(0, 1);
      u3[i] = g.uniform(0, 1);
    }
    auto a = kernels::ref::point_sum(pm, beta, u1.data(), u2.data(), u3.data(), m);
    auto b = kernels::fast::point_sum(pm, beta, u1.data(), u2.data(), u3.data(), m);
    CHECK(a.overflow == b.overflow);
    double scale = 0;
    for (std::size_t i = 0; i < m; ++i) scale += std::abs(kernels::ref::point_sum(pm, beta, &u1[i], &u2[i], &u3[i], 1).sum);
    CHECK(std::abs(a.sum - b.sum) <= 1e-12 * (1 + scale));
  }
}

TEST_CASE("expm1_dot fast agrees with reference") {
  oracle::Gen g(24);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = static_cast<std::size_t>(g.integer(1, 3000));
    std::vector<double> p(m), w(m);
    double scale = 0;
    const double beta = g.uniform(0.001, 1), k = g.uniform(0.5, 50), lambda = g.uniform(0, 0.1);
    for (std::size_t j = 0; j < m; ++j) {
      p[j] = g.uniform(0, 1);
      w[j] = g.uniform(-5, 60);
      scale += p[j] * std::abs(std::expm1(beta * truncate(w[j], k) - lambda));
    }
    double a = kernels::ref::expm1_dot(p.data(), w.data(), m, beta, k, lambda);
    double b = kernels::fast::expm1_dot(p.data(), w.data(), m, beta, k, lambda);
    CHECK(std::abs(a - b) <= 1e-13 * (1 + scale));
  }
}

TEST_CASE("point_sum flags overflow") {
  kernels::PointMap pm{0.75, 1.0, 1e-3, 1.0};
  double u1 = 1e-300, u2 = 0.5, u3 = 0.5;
  auto r = kernels::fast::point_sum(pm, 1.0, &u1, &u2, &u3, 1);
  CHECK(r.overflow == 1);
  auto z = kernels::fast::point_sum(pm, 0.0, &u1, &u2, &u3, 1);
  CHECK(z.overflow == 0);
  CHECK(std::isfinite(z.sum));
}

}
