#include "qevote/analysis.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "qevote/errors.hpp"
#include "qevote/qcore.hpp"

namespace qevote {

BigInt binomial(int64_t n, int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

void check_prop1_domain(int N, int t, int delta0) {
  if (N < 1) throw ParameterError("pr_win_given_bad: N must be >= 1");
  if (t < 0 || t > N) throw ParameterError("pr_win_given_bad: t must lie in [0, N]");
  if (delta0 < 0 || delta0 > 62) throw ParameterError("pr_win_given_bad: delta0 must lie in [0, 62]");
}

}  // namespace

ExactRational pr_win_given_bad(int N, int t, int delta0) {
  check_prop1_domain(N, t, delta0);
  BigInt h = BigInt(1) << delta0;
  BigInt num = 1, den = 1;
  for (int i = 1; i <= N; ++i) {
    num *= t * h + i;
    den *= N * h + i;
  }
  return ExactRational(num, den);
}

ExactRational pr_win_given_bad_binomial(int N, int t, int delta0) {
  check_prop1_domain(N, t, delta0);
  const int64_t h = int64_t{1} << delta0;
  int64_t L = static_cast<int64_t>(N) + static_cast<int64_t>(N) * h;
  ExactRational p = 1;
  for (int k = 0; k < N - t; ++k) {
    p *= ExactRational(binomial(L - N, h), binomial(L, h));
    L -= h;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

double fkernel(double theta, int D, double theta_v) {
  double phi = theta - theta_v;
  double s = std::sin(0.5 * phi);
  if (std::abs(s) < 1e-8) return static_cast<double>(D) / kTwoPi;
  double n = std::sin(0.5 * D * phi);
  return (n * n) / (s * s) / (kTwoPi * D);
}

struct Simpson {
  int D;
  double theta_v;
  std::size_t evals = 0;
  std::size_t budget = 20'000'000;
  bool exhausted = false;

  double f(double x) {
    ++evals;
    return fkernel(x, D, theta_v);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth,
                 double& err) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    if (evals > budget) {
      exhausted = true;
      err += std::abs(diff) / 15.0;
      return left + right + diff / 15.0;
    }
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
      err += std::abs(diff) / 15.0;
      return left + right + diff / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
  }

  // Panel on [a, b] with tolerance share tol.
  double panel(double a, double b, double tol, double& err) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, b, fa, fm, fb, whole, tol, 48, err);
  }
};

}  // namespace

QuadratureResult integrate_window(double theta_v, int D, double a, double b, double tol) {
  if (D < 1) throw ParameterError("integrate: D must be >= 1");
  if (!(tol > 0.0)) throw ParameterError("integrate: tolerance must be positive");
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) throw ParameterError("integrate: need finite a <= b");
  if (a == b) return {};

  // Breakpoints: the removable singularity (every 2 pi shift of theta_v inside
  // the window) plus uniform panels, a few per lobe of the kernel.
  std::vector<double> cuts{a, b};
  double k0 = std::ceil((a - theta_v) / kTwoPi);
  for (double k = k0; theta_v + k * kTwoPi < b; k += 1.0) {
    double s = theta_v + k * kTwoPi;
    if (s > a) cuts.push_back(s);
  }
  std::size_t panels = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(4.0 * D * (b - a) / kTwoPi)));
  for (std::size_t i = 1; i < panels; ++i) cuts.push_back(a + (b - a) * static_cast<double>(i) / panels);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Simpson s{D, theta_v};
  QuadratureResult r;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double w = cuts[i + 1] - cuts[i];
    if (w <= 0.0) continue;
    r.value += s.panel(cuts[i], cuts[i + 1], tol * w / (b - a), err);
  }
  r.abs_error = err;
  r.evaluations = s.evals;
  if (s.exhausted || err > tol)
    throw QuadratureError("integrate: tolerance " + std::to_string(tol) + " not reached (estimate " +
                          std::to_string(err) + ")");
  return r;
}

QuadratureResult integrate_F(double theta_v, int D, double a, double b, double tol) {
  const double slack = 1e-12;
  if (a < -slack || b > kTwoPi + slack || a > b)
    throw ParameterError("integrate_F: interval must lie inside [0, 2 pi]");
  return integrate_window(theta_v, D, std::max(a, 0.0), std::min(b, kTwoPi), tol);
}

QuadratureResult bin_mass(int D, int l_v, double delta, int l) {
  if (D < 1) throw ParameterError("bin_mass: D must be >= 1");
  int lb = ((l % D) + D) % D;
  double theta_v = kTwoPi * l_v / D + delta;
  return integrate_F(theta_v, D, kTwoPi * lb / D, kTwoPi * (lb + 1) / D);
}

QuadratureResult three_bin_mass(int D, int l_v, double delta) {
  QuadratureResult total;
  for (int off = -1; off <= 1; ++off) {
    QuadratureResult r = bin_mass(D, l_v, delta, l_v + off);
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.evaluations += r.evaluations;
  }
  return total;
}

WrapResult wraparound_mass(double delta, int D, int l_v) {
  if (D < 3) throw ParameterError("wraparound_mass: D must be >= 3");
  if (l_v != 0 && l_v != D - 1) throw ParameterError("wraparound_mass: l_v must be 0 or D-1");
  if (delta < 0.0 || delta > kTwoPi / D) throw ParameterError("wraparound_mass: delta outside [0, 2 pi / D]");
  const double x = kTwoPi / D;
  double theta_v = x * l_v + delta;
  WrapResult w;
  auto add = [](QuadratureResult& acc, const QuadratureResult& r) {
    acc.value += r.value;
    acc.abs_error += r.abs_error;
    acc.evaluations += r.evaluations;
  };
  if (l_v == D - 1) {
    add(w.split, integrate_F(theta_v, D, x * (D - 2), kTwoPi));
    add(w.split, integrate_F(theta_v, D, 0.0, x));
    w.shifted = integrate_window(theta_v - kTwoPi, D, -2.0 * x, x);
  } else {
    add(w.split, integrate_F(theta_v, D, x * (D - 1), kTwoPi));
    add(w.split, integrate_F(theta_v, D, 0.0, 2.0 * x));
    w.shifted = integrate_window(theta_v, D, -x, 2.0 * x);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Taylor bound

double taylor_sin2_lower(double x) {
  if (!(std::abs(x) <= kTwoPi)) throw ParameterError("taylor_sin2_lower: x must lie in [-2 pi, 2 pi]");
  // t_1 = x^2; t_{n+1} = -t_n (2x)^2 / ((2n+1)(2n+2))
  const double q = 4.0 * x * x;
  double t = x * x;
  double sum = t;
  for (int n = 1; n < 20; ++n) {
    t *= -q / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    sum += t;
  }
  return sum;
}

namespace {

class Mp {
 public:
  explicit Mp(mpfr_prec_t p) { mpfr_init2(v, p); }
  ~Mp() { mpfr_clear(v); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  mpfr_t v;
};

// diff <- sin^2(x) - T(x), with x already set at the working precision.
void sin2_minus_taylor(mpfr_t diff, const mpfr_t x, mpfr_prec_t p) {
  Mp s(p), t(p), q(p), sum(p);
  mpfr_sin(s.v, x, MPFR_RNDN);
  mpfr_sqr(s.v, s.v, MPFR_RNDN);
  mpfr_sqr(q.v, x, MPFR_RNDN);
  mpfr_mul_ui(q.v, q.v, 4, MPFR_RNDN);
  mpfr_sqr(t.v, x, MPFR_RNDN);
  mpfr_set(sum.v, t.v, MPFR_RNDN);
  for (unsigned long n = 1; n < 20; ++n) {
    mpfr_mul(t.v, t.v, q.v, MPFR_RNDN);
    mpfr_div_ui(t.v, t.v, (2 * n + 1) * (2 * n + 2), MPFR_RNDN);
    mpfr_neg(t.v, t.v, MPFR_RNDN);
    mpfr_add(sum.v, sum.v, t.v, MPFR_RNDN);
  }
  mpfr_sub(diff, s.v, sum.v, MPFR_RNDN);
}

TaylorCheck finish(const mpfr_t diff, mpfr_prec_t p) {
  TaylorCheck c;
  c.precision_bits = static_cast<long>(p);
  c.sign = mpfr_sgn(diff);
  if (c.sign == 0) {
    c.log10_gap = -std::numeric_limits<double>::infinity();
  } else {
    Mp a(p);
    mpfr_abs(a.v, diff, MPFR_RNDN);
    mpfr_log10(a.v, a.v, MPFR_RNDN);
    c.log10_gap = mpfr_get_d(a.v, MPFR_RNDN);
  }
  return c;
}

// Bits needed to resolve the remainder 2^41 x^42 / 42! against sin^2 x ~ x^2.
mpfr_prec_t working_precision(double x) {
  double ax = std::abs(x);
  double extra = ax < 1.0 ? -40.0 * std::log2(ax) : 0.0;
  return static_cast<mpfr_prec_t>(320.0 + std::ceil(extra));
}

}  // namespace

TaylorCheck taylor_check(double x) {
  if (!(std::abs(x) <= kTwoPi)) throw ParameterError("taylor_check: x must lie in [-2 pi, 2 pi]");
  if (x == 0.0) return TaylorCheck{0, -std::numeric_limits<double>::infinity(), 0};
  mpfr_prec_t p = working_precision(x);
  Mp mx(p), diff(p);
  mpfr_set_d(mx.v, x, MPFR_RNDN);
  sin2_minus_taylor(diff.v, mx.v, p);
  return finish(diff.v, p);
}

TaylorCheck taylor_check_half_pi() {
  const mpfr_prec_t p = 512;
  Mp x(p), diff(p), s(p);
  mpfr_const_pi(x.v, MPFR_RNDN);
  mpfr_div_ui(x.v, x.v, 2, MPFR_RNDN);
  sin2_minus_taylor(diff.v, x.v, p);
  return finish(diff.v, p);
}

// ---------------------------------------------------------------------------

double chernoff_bound(double mu, double gamma, Tail tail) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("chernoff_bound: mu must be positive");
  if (tail == Tail::lower) {
    if (!(gamma > 0.0) || gamma > 1.0) throw ParameterError("chernoff_bound: lower tail needs 0 < gamma <= 1");
    return std::exp(-gamma * gamma * mu / 3.0);
  }
  if (!(gamma > 1.0)) throw ParameterError("chernoff_bound: upper tail needs gamma > 1");
  return std::exp(-gamma * mu / 3.0);
}

double rounds_threshold(int64_t rho) {
  if (rho < 2) throw ParameterError("rounds_threshold: rho must be >= 2");
  if (rho <= 1024) {
    double base = static_cast<double>(rho - 1) / static_cast<double>(rho);
    return std::pow(base, static_cast<double>(rho));
  }
  double r = static_cast<double>(rho);
  return std::exp(r * std::log1p(-1.0 / r));
}

}  // namespace qevote
