#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace qevote {

using ExactRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// prod_{i=1}^{N} (t 2^d0 + i) / (N 2^d0 + i): chance that N - t honest voters,
// each drawing 2^d0 unchecked copies, all miss the N corrupted ones.
ExactRational pr_win_given_bad(int N, int t, int delta0);

// The same quantity as a product of per-voter hypergeometric zero-hit terms.
ExactRational pr_win_given_bad_binomial(int N, int t, int delta0);

BigInt binomial(int64_t n, int64_t k);

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
};

inline constexpr double kQuadTolerance = 1e-10;

// (1/(2 pi D)) int_a^b sin^2(D(t - theta_v)/2) / sin^2((t - theta_v)/2) dt,
// [a, b] inside [0, 2 pi].
QuadratureResult integrate_F(double theta_v, int D, double a, double b, double tol = kQuadTolerance);

// As integrate_F but for any real window; the integrand is 2 pi periodic.
QuadratureResult integrate_window(double theta_v, int D, double a, double b, double tol = kQuadTolerance);

// Mass of bin l = (x_l, x_{l+1}) for theta_v = x_lv + delta.
QuadratureResult bin_mass(int D, int l_v, double delta, int l);

// Mass of bins l_v-1, l_v, l_v+1 (indices mod D).
QuadratureResult three_bin_mass(int D, int l_v, double delta);

struct WrapResult {
  QuadratureResult split;    // sum of the in-range pieces
  QuadratureResult shifted;  // single window after theta -> theta - x_D
};

// l_v in {0, D-1}; delta in [0, 2 pi / D].
WrapResult wraparound_mass(double delta, int D, int l_v);

// Sum_{n=1}^{20} (-1)^{n+1} 2^{2n-1} x^{2n} / (2n)!
double taylor_sin2_lower(double x);

struct TaylorCheck {
  int sign = 0;              // sign of sin^2(x) - T(x)
  double log10_gap = 0.0;    // log10 |sin^2(x) - T(x)|, -inf at equality
  long precision_bits = 0;
};

// Exact-sign comparison at the given double x (multiprecision).
TaylorCheck taylor_check(double x);

// Sign of 1 - T(pi/2) and the gap to 1 at pi/2, with pi/2 taken at full precision.
TaylorCheck taylor_check_half_pi();

enum class Tail { lower, upper };

// exp(-g^2 mu / 3) for Pr[X <= (1-g) mu]; exp(-g mu / 3) for Pr[X >= (1+g) mu], g > 1.
double chernoff_bound(double mu, double gamma, Tail tail);

// (1 - 1/rho)^rho
double rounds_threshold(int64_t rho);

struct BoundCheck {
  std::string name;
  std::string group;
  std::string claim;
  double computed = 0.0;
  bool pass = false;
  std::string detail;
};

// Full suite behind `verify-bounds`. filter empty = all; otherwise a group name.
// inject_fault perturbs one claimed constant to exercise the failure path.
std::vector<BoundCheck> run_bound_suite(const std::string& filter, bool inject_fault);

std::vector<std::string> bound_groups();

}  // namespace qevote
