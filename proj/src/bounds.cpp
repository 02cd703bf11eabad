#include <cmath>
#include <sstream>

#include "qevote/analysis.hpp"
#include "qevote/errors.hpp"
#include "qevote/qcore.hpp"
#include "qevote/rng.hpp"

namespace qevote {

namespace {

constexpr double kFourOverPiSq = 0.40528473456935108578;
constexpr int kDeltaGrid = 128;
const int kQuadratureDims[] = {4, 8, 16, 64};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct Suite {
  std::string filter;
  bool fault;
  std::vector<BoundCheck> out;

  bool wants(const std::string& group) const { return filter.empty() || filter == group; }

  void add(const std::string& group, const std::string& name, const std::string& claim, double computed, bool pass,
           const std::string& detail = {}) {
    out.push_back(BoundCheck{name, group, claim, computed, pass, detail});
  }
};

void completeness(Suite& s) {
  for (int D : {1, 2, 4, 8, 16, 64}) {
    double v = integrate_F(0.3, D, 0.0, kTwoPi).value;
    s.add("completeness", "povm_completeness_D" + std::to_string(D), "integral over [0, 2pi] = 1 within 1e-8", v,
          std::abs(v - 1.0) < 1e-8);
  }
}

void cut_and_choose(Suite& s) {
  int mismatches = 0, cases = 0;
  for (int N = 1; N <= 5; ++N)
    for (int t = 0; t <= N; ++t)
      for (int d = 0; d <= 2; ++d) {
        ++cases;
        if (pr_win_given_bad(N, t, d) != pr_win_given_bad_binomial(N, t, d)) ++mismatches;
      }
  s.add("cut_and_choose", "product_forms_agree", "prod (t2^d+i)/(N2^d+i) equals the hypergeometric product",
        static_cast<double>(mismatches), mismatches == 0, std::to_string(cases) + " cases");

  // Grid points with eps * N integral, so that t = eps N voters are corrupted.
  int fails = 0, checked = 0;
  double worst = 1e300;
  for (int q : {1, 2, 3}) {
    for (int N = 1; N <= 12; ++N) {
      if ((q * N) % 4 != 0) continue;
      int t = q * N / 4;
      for (int d = 0; d <= 6; ++d) {
        ++checked;
        ExactRational p = pr_win_given_bad(N, t, d);
        ExactRational bound(pow(BigInt(q), static_cast<unsigned>(N)), pow(BigInt(8), static_cast<unsigned>(N)));
        if (!(p > bound)) ++fails;
        worst = std::min(worst, static_cast<double>(p / bound));
      }
    }
  }
  s.add("cut_and_choose", "exceeds_half_eps_pow_N", "pr_win_given_bad(N, eps N, d0) > (eps/2)^N", worst, fails == 0,
        std::to_string(checked) + " grid points, min ratio " + fmt(worst));

  ExactRational v = pr_win_given_bad(4, 2, 2);
  s.add("cut_and_choose", "N4_t2_d2", "pr_win_given_bad(4,2,2) > 1/256", static_cast<double>(v),
        v > ExactRational(1, 256), v.str());
}

void single_bin(Suite& s) {
  for (int D : kQuadratureDims) {
    int l_v = D / 2;
    double lo = 1e300, hi = -1e300;
    int argmin = 0, argmax = 0;
    for (int g = 0; g < kDeltaGrid; ++g) {
      double delta = (kTwoPi / D) * g / kDeltaGrid;
      double v = bin_mass(D, l_v, delta, l_v).value;
      if (v < lo) lo = v, argmin = g;
      if (v > hi) hi = v, argmax = g;
    }
    s.add("single_bin", "single_bin_min_D" + std::to_string(D), "single-bin mass >= 0.405 on the delta grid", lo,
          lo >= 0.405);
    double f0 = bin_mass(D, l_v, 0.0, l_v).value;
    s.add("single_bin", "single_bin_at_zero_D" + std::to_string(D), "F(0) >= 4/pi^2 - 1e-9", f0,
          f0 >= kFourOverPiSq - 1e-9);
    // argmin at an endpoint (g = 0 or the far end) and argmax at the midpoint.
    bool endpoints = (argmin == 0 || argmin == kDeltaGrid - 1) && argmax == kDeltaGrid / 2;
    s.add("single_bin", "delta_extremality_D" + std::to_string(D), "min at delta in {0, 2pi/D}, max at pi/D",
          static_cast<double>(argmax), endpoints,
          "argmin " + std::to_string(argmin) + ", argmax " + std::to_string(argmax));
  }
}

void three_bin(Suite& s) {
  const double target = s.fault ? 0.9363 : 0.9263;
  for (int D : {64, 256, 1024}) {
    double v = three_bin_mass(D, D / 2, 0.0).value;
    s.add("three_bin", "three_bin_at_zero_D" + std::to_string(D), "three-bin mass at delta=0 ~ " + fmt(target) +
          " within 1e-3", v, std::abs(v - target) <= 1e-3);
  }
  for (int D : kQuadratureDims) {
    double lo = 1e300;
    for (int g = 0; g < kDeltaGrid; ++g) {
      double delta = (kTwoPi / D) * g / kDeltaGrid;
      lo = std::min(lo, three_bin_mass(D, D / 2, delta).value);
    }
    s.add("three_bin", "three_bin_min_D" + std::to_string(D), "three-bin mass >= 0.9 on the delta grid", lo, lo >= 0.9);
  }
}

void wraparound(Suite& s) {
  for (int D : kQuadratureDims) {
    double lo = 1e300, gap = 0.0;
    for (int l_v : {0, D - 1})
      for (int g = 0; g < kDeltaGrid; ++g) {
        double delta = (kTwoPi / D) * g / kDeltaGrid;
        WrapResult w = wraparound_mass(delta, D, l_v);
        lo = std::min(lo, w.split.value);
        gap = std::max(gap, std::abs(w.split.value - w.shifted.value));
      }
    s.add("wraparound", "wrap_min_D" + std::to_string(D), "wrap-around three-bin mass > 0.9", lo, lo > 0.9);
    s.add("wraparound", "wrap_shift_identity_D" + std::to_string(D), "split and shifted windows agree within 1e-9",
          gap, gap < 1e-9);
    double a = wraparound_mass(0.0, D, 0).split.value;
    double b = wraparound_mass(kTwoPi / D, D, 0).split.value;
    s.add("wraparound", "wrap_symmetry_D" + std::to_string(D), "delta -> 2pi/D mirrors delta = 0 within 1e-6",
          std::abs(a - b), std::abs(a - b) < 1e-6);
  }
}

void taylor(Suite& s) {
  Rng rng(0x7a7105);
  int bad = 0, n = 0;
  double closest = 0.0;
  while (n < 10000) {
    double x = (2.0 * rng.uniform() - 1.0) * kTwoPi;
    if (x == 0.0) continue;
    ++n;
    TaylorCheck c = taylor_check(x);
    if (c.sign <= 0) ++bad;
    closest = std::min(closest, c.log10_gap);
  }
  s.add("taylor", "strict_lower_bound", "sin^2(x) > T(x) at 1e4 samples in [-2pi, 2pi]\\{0}", static_cast<double>(bad),
        bad == 0, "smallest gap 1e" + fmt(closest));
  double t0 = taylor_sin2_lower(0.0);
  s.add("taylor", "equality_at_zero", "T(0) = sin^2(0) = 0", t0, t0 == 0.0);
  TaylorCheck h = taylor_check_half_pi();
  double th = taylor_sin2_lower(kTwoPi / 4.0);
  s.add("taylor", "half_pi", "T(pi/2) < 1 and within 1e-6 of 1", th, h.sign > 0 && std::abs(th - 1.0) < 1e-6,
        "1 - T(pi/2) = 1e" + fmt(h.log10_gap));
}

void chernoff(Suite& s) {
  const double p = 0.405, thr = 0.4;
  const double gamma = 1.0 - thr / p;
  const double n = 500.0;
  double b500 = chernoff_bound(p * n, gamma, Tail::lower);
  double b1000 = chernoff_bound(p * 2 * n, gamma, Tail::lower);
  // Sample count at which the bound drops below 0.02.
  double needed = std::ceil(3.0 * std::log(50.0) / (gamma * gamma * p));
  s.add("chernoff", "lower_tail_500", "bound in (0,1) and decreasing in the sample count", b500,
        b500 > 0.0 && b500 < 1.0 && b1000 < b500,
        "exp(-g^2 p n / 3) at n=500; below 0.02 from n=" + fmt(needed));
  bool ok = true;
  double worst = 0.0;
  for (int m = 10; m <= 10000; ++m) {
    // p_w < 0.1 against threshold 0.4: (1+g) * 0.1 = 0.4
    double b = chernoff_bound(0.1 * m, 3.0, Tail::upper);
    worst = std::max(worst, b);
    if (!(b < 1.0)) ok = false;
  }
  s.add("chernoff", "upper_tail", "upper-tail bound < 1 for sample counts >= 10", worst, ok);
}

void rounds(Suite& s) {
  double r2 = rounds_threshold(2);
  s.add("rounds", "rho2_boundary", "(1-1/2)^2 = 0.25 exactly", r2, r2 == 0.25);
  bool above = true, mono = true;
  double prev = r2, minv = 1.0;
  for (int64_t rho = 3; rho <= 1000000; ++rho) {
    double v = rounds_threshold(rho);
    if (!(v > 0.25)) above = false;
    if (v < prev) mono = false;
    prev = v;
    minv = std::min(minv, v);
  }
  s.add("rounds", "rho_3_to_1e6", "(1-1/rho)^rho > 0.25 and non-decreasing", minv, above && mono);
  double r10 = rounds_threshold(10);
  s.add("rounds", "rho10", "(1-1/10)^10 ~ 0.3487", r10, std::abs(r10 - 0.3487) < 1e-4);
  s.add("rounds", "limit", "value at 1e6 below e^-1 and within 1e-6", prev,
        prev < std::exp(-1.0) && std::exp(-1.0) - prev < 1e-6);
}

}  // namespace

std::vector<std::string> bound_groups() {
  return {"completeness", "cut_and_choose", "single_bin", "three_bin", "wraparound", "taylor", "chernoff", "rounds"};
}

std::vector<BoundCheck> run_bound_suite(const std::string& filter, bool inject_fault) {
  Suite s{filter, inject_fault, {}};
  if (!filter.empty()) {
    bool known = false;
    for (const auto& g : bound_groups()) known = known || g == filter;
    if (!known) throw ParameterError("unknown bound group '" + filter + "'");
  }
  if (s.wants("completeness")) completeness(s);
  if (s.wants("cut_and_choose")) cut_and_choose(s);
  if (s.wants("single_bin")) single_bin(s);
  if (s.wants("three_bin")) three_bin(s);
  if (s.wants("wraparound")) wraparound(s);
  if (s.wants("taylor")) taylor(s);
  if (s.wants("chernoff")) chernoff(s);
  if (s.wants("rounds")) rounds(s);
  return s.out;
}

}  // namespace qevote
