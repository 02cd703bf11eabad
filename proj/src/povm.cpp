#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "qevote/errors.hpp"
#include "qevote/qcore.hpp"

namespace qevote {

namespace {

constexpr std::size_t kCells = std::size_t{1} << 16;

double kernel(double phi, int D) {
  double s = std::sin(0.5 * phi);
  if (std::abs(s) < 1e-8) return static_cast<double>(D) * D;
  double n = std::sin(0.5 * D * phi);
  return (n * n) / (s * s);
}

// CDF of phi = theta - theta_v over [0, 2 pi), one table per D.
struct Table {
  std::vector<double> cdf;  // kCells + 1 entries, cdf[0] = 0, cdf[kCells] = 1
};

std::shared_ptr<const Table> build(int D) {
  auto t = std::make_shared<Table>();
  t->cdf.resize(kCells + 1);
  const double h = kTwoPi / static_cast<double>(kCells);
  double acc = 0.0;
  double left = kernel(0.0, D);
  t->cdf[0] = 0.0;
  for (std::size_t k = 0; k < kCells; ++k) {
    double a = h * static_cast<double>(k);
    double mid = kernel(a + 0.5 * h, D);
    double right = kernel(a + h, D);
    acc += (left + 4.0 * mid + right) * h / 6.0;
    t->cdf[k + 1] = acc;
    left = right;
  }
  for (double& c : t->cdf) c /= acc;
  t->cdf[kCells] = 1.0;
  return t;
}

std::shared_ptr<const Table> table_for(int D) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Table>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(D);
  if (it != cache.end()) return it->second;
  auto t = build(D);
  cache.emplace(D, t);
  return t;
}

}  // namespace

double povm_density(double theta, int D, double theta_v) {
  if (D < 1) throw ParameterError("povm_density: D must be >= 1");
  return kernel(theta - theta_v, D) / (kTwoPi * D);
}

double povm_theta_sample(int D, double theta_v, Rng& rng) {
  if (D < 1) throw ParameterError("povm_theta_sample: D must be >= 1");
  if (!std::isfinite(theta_v)) throw ParameterError("povm_theta_sample: theta_v must be finite");
  auto t = table_for(D);
  const auto& cdf = t->cdf;
  double u = rng.uniform();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) - 1;
  k = std::min(k, kCells - 1);
  double width = cdf[k + 1] - cdf[k];
  double frac = width > 0.0 ? (u - cdf[k]) / width : 0.0;
  double phi = (static_cast<double>(k) + frac) * (kTwoPi / static_cast<double>(kCells));
  double theta = std::fmod(theta_v + phi, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return theta;
}

}  // namespace qevote
