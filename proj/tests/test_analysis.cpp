#include <cmath>

#include "doctest.h"
#include "qevote/analysis.hpp"
#include "qevote/errors.hpp"
#include "qevote/qcore.hpp"
#include "qevote/rng.hpp"

using namespace qevote;

namespace {

// Counts every size-k draw out of T copies, with copies 0..bad-1 corrupted, that
// misses all corrupted copies. By symmetry this equals the chance that the honest
// voters' (N - t) 2^d0 draws avoid the N corrupted copies.
ExactRational enumerate_draws(int N, int t, int d0) {
  const int h = 1 << d0;
  const int T = N + N * h;
  const int k = (N - t) * h;
  const uint64_t bad = (uint64_t{1} << N) - 1;
  BigInt hits = 0, total = 0;
  if (k == 0) return ExactRational(1);
  uint64_t m = (uint64_t{1} << k) - 1;
  const uint64_t limit = uint64_t{1} << T;
  while (m < limit) {
    ++total;
    if ((m & bad) == 0) ++hits;
    uint64_t c = m & (~m + 1), r = m + c;  // next mask with the same popcount
    m = (((r ^ m) >> 2) / c) | r;
  }
  return ExactRational(hits, total);
}

double midpoint_F(double theta_v, int D, double a, double b, int n = 200000) {
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += povm_density(a + (i + 0.5) * (b - a) / n, D, theta_v);
  return sum * (b - a) / n;
}

}  // namespace

TEST_CASE("pr_win_given_bad matches draw enumeration") {
  for (int N = 1; N <= 3; ++N)
    for (int t = 0; t <= N; ++t)
      for (int d = 0; d <= 2; ++d) {
        CAPTURE(N);
        CAPTURE(t);
        CAPTURE(d);
        CHECK(pr_win_given_bad(N, t, d) == enumerate_draws(N, t, d));
        CHECK(pr_win_given_bad_binomial(N, t, d) == pr_win_given_bad(N, t, d));
      }
}

TEST_CASE("pr_win_given_bad frozen values") {
  // Enumeration oracle above, evaluated once.
  CHECK(pr_win_given_bad(4, 2, 2) == ExactRational(33, 323));
  CHECK(pr_win_given_bad(2, 1, 0) == ExactRational(1, 2));
  CHECK(pr_win_given_bad(3, 3, 1) == ExactRational(1));
  CHECK(pr_win_given_bad(3, 0, 1) == ExactRational(1, 84));
}

TEST_CASE("pr_win_given_bad is monotone in t and in delta0") {
  for (int N = 1; N <= 6; ++N)
    for (int d = 0; d <= 4; ++d)
      for (int t = 0; t < N; ++t) {
        CHECK(pr_win_given_bad(N, t, d) < pr_win_given_bad(N, t + 1, d));
        CHECK(pr_win_given_bad(N, t, d + 1) < pr_win_given_bad(N, t, d));
      }
  CHECK_THROWS_AS(pr_win_given_bad(0, 0, 0), ParameterError);
  CHECK_THROWS_AS(pr_win_given_bad(3, 4, 0), ParameterError);
  CHECK_THROWS_AS(pr_win_given_bad(3, 1, -1), ParameterError);
}

TEST_CASE("binomial agrees with Pascal's triangle") {
  std::vector<std::vector<BigInt>> tri(41);
  for (int n = 0; n <= 40; ++n) {
    tri[n].assign(n + 1, 1);
    for (int k = 1; k < n; ++k) tri[n][k] = tri[n - 1][k - 1] + tri[n - 1][k];
  }
  for (int n = 0; n <= 40; ++n)
    for (int k = 0; k <= n; ++k) CHECK(binomial(n, k) == tri[n][k]);
  CHECK(binomial(5, 7) == 0);
}

TEST_CASE("adaptive quadrature agrees with a midpoint sum") {
  for (int D : {4, 16}) {
    double a = 0.3, b = 2.2;
    CHECK(integrate_F(1.0, D, a, b).value == doctest::Approx(midpoint_F(1.0, D, a, b)).epsilon(1e-7));
  }
  CHECK(integrate_F(0.5, 8, 0.0, kTwoPi).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(integrate_F(0.5, 8, -0.1, 1.0), ParameterError);
  CHECK_THROWS_AS(integrate_F(0.5, 0, 0.0, 1.0), ParameterError);
}

TEST_CASE("integrate_window is periodic") {
  double a = integrate_window(0.7, 16, -1.0, 0.5).value;
  double b = integrate_window(0.7, 16, -1.0 + kTwoPi, 0.5 + kTwoPi).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("single-bin mass at delta = 0 is at least 4/pi^2") {
  for (int D : {4, 8, 16, 64}) {
    double v = bin_mass(D, D / 2, 0.0, D / 2).value;
    CHECK(v >= 4.0 / (M_PI * M_PI) - 1e-9);
    double mid = midpoint_F(kTwoPi * (D / 2) / D, D, kTwoPi * (D / 2) / D, kTwoPi * (D / 2 + 1) / D);
    CHECK(v == doctest::Approx(mid).epsilon(1e-7));
  }
}

TEST_CASE("three-bin mass") {
  // Published value for large D.
  CHECK(std::abs(three_bin_mass(64, 32, 0.0).value - 0.9263) <= 1e-3);
  // Smaller D sits slightly higher; quadrature evaluated once and frozen.
  CHECK(three_bin_mass(16, 8, 0.0).value == doctest::Approx(0.9283).epsilon(1e-4));
  // Indices wrap modulo D.
  double w = three_bin_mass(16, 0, 0.1).value;
  double shifted = three_bin_mass(16, 8, 0.1).value;
  CHECK(w == doctest::Approx(shifted).epsilon(1e-9));
}

TEST_CASE("wrap-around windows agree") {
  for (int D : {4, 16}) {
    for (int l_v : {0, D - 1}) {
      WrapResult r = wraparound_mass(0.2 * kTwoPi / D, D, l_v);
      CHECK(r.split.value == doctest::Approx(r.shifted.value).epsilon(1e-9));
      CHECK(r.split.value > 0.9);
    }
  }
}

TEST_CASE("Taylor lower bound") {
  // Independent route: the same alternating series summed in long double.
  for (double x : {0.1, 1.0, 2.5, -4.0}) {
    long double term = 0, sum = 0, fact = 1, xp = 1, p2 = 0.5L;
    for (int n = 1; n <= 20; ++n) {
      fact *= (2 * n - 1) * (2 * n);
      xp *= static_cast<long double>(x) * x;
      p2 *= 4;
      term = p2 * xp / fact;
      sum += (n % 2 ? term : -term);
    }
    CHECK(taylor_sin2_lower(x) == doctest::Approx(static_cast<double>(sum)).epsilon(1e-12));
  }
  CHECK(taylor_sin2_lower(0.0) == 0.0);
  CHECK(taylor_check(1.3).sign > 0);
  CHECK(taylor_check(-6.0).sign > 0);
  CHECK(taylor_check_half_pi().sign > 0);
}

TEST_CASE("Chernoff bounds") {
  CHECK(chernoff_bound(100, 0.5, Tail::lower) == doctest::Approx(std::exp(-0.25 * 100 / 3)));
  CHECK(chernoff_bound(100, 2.0, Tail::upper) == doctest::Approx(std::exp(-2.0 * 100 / 3)));
  // Lower tail at the 0.405 vs 0.4 margin stays near 1 at 500 samples.
  double g = 1 - 0.4 / 0.405;
  CHECK(chernoff_bound(0.405 * 500, g, Tail::lower) == doctest::Approx(0.98976).epsilon(1e-4));
}

TEST_CASE("rounds threshold") {
  CHECK(rounds_threshold(2) == 0.25);
  CHECK(rounds_threshold(10) == doctest::Approx(std::pow(0.9, 10)));
  for (int64_t rho = 3; rho <= 2000; ++rho) CHECK(rounds_threshold(rho) > 0.25);
}

TEST_CASE("bound suite passes and the injected fault is caught") {
  auto all = run_bound_suite("", false);
  CHECK(all.size() > 20);
  for (const auto& c : all) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  auto faulty = run_bound_suite("three_bin", true);
  int failed = 0;
  for (const auto& c : faulty) failed += c.pass ? 0 : 1;
  CHECK(failed > 0);
  CHECK_THROWS_AS(run_bound_suite("nope", false), ParameterError);
}
