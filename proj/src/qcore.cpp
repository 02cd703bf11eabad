#include "qevote/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qevote/errors.hpp"

namespace qevote {

namespace {

void check_norm(const PureState& s, const char* where) {
  double n = s.norm();
  if (std::abs(n - 1.0) > kNormTolerance)
    throw InternalError(std::string(where) + ": norm drifted to " + std::to_string(n));
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double total = 0.0;
  for (double p : probs) total += p;
  double u = rng.uniform() * total;
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return last;
  }
  if (last < 0) throw InternalError("measurement: all branches have zero weight");
  return last;
}

}  // namespace

std::size_t checked_dimension(const std::vector<int>& dims) {
  if (dims.empty()) throw ParameterError("state needs at least one qudit");
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 2) throw ParameterError("qudit dimension must be >= 2, got " + std::to_string(d));
    if (total > kMaxAmplitudes / static_cast<std::size_t>(d))
      throw CapacityError("state exceeds 2^22 amplitudes");
    total *= static_cast<std::size_t>(d);
  }
  return total;
}

PureState::PureState(std::vector<int> dims, std::vector<cplx> amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
  if (checked_dimension(dims_) != amps_.size())
    throw ParameterError("amplitude count does not match the product of dimensions");
  if (std::abs(norm() - 1.0) > kNormTolerance) throw ParameterError("state is not normalized");
}

PureState PureState::basis(const std::vector<int>& dims, const std::vector<int>& digits) {
  std::size_t n = checked_dimension(dims);
  if (digits.size() != dims.size()) throw IndexError("basis: digit count mismatch");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims[k]) throw IndexError("basis: digit out of range");
    idx = idx * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(digits[k]);
  }
  std::vector<cplx> a(n);
  a[idx] = 1.0;
  return PureState(dims, std::move(a));
}

PureState PureState::uniform(const std::vector<int>& dims) {
  std::size_t n = checked_dimension(dims);
  return PureState(dims, std::vector<cplx>(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
}

std::size_t PureState::stride(int qudit) const {
  if (qudit < 0 || qudit >= qudits()) throw IndexError("qudit index out of range");
  std::size_t s = 1;
  for (int k = qudits() - 1; k > qudit; --k) s *= static_cast<std::size_t>(dims_[k]);
  return s;
}

int PureState::digit(std::size_t index, int qudit) const {
  return static_cast<int>((index / stride(qudit)) % static_cast<std::size_t>(dims_[qudit]));
}

double PureState::norm() const {
  double s = 0.0;
  for (const cplx& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

PureState PureState::tensor(const PureState& other) const {
  std::vector<int> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  checked_dimension(d);
  std::vector<cplx> a;
  a.reserve(size() * other.size());
  for (const cplx& x : amps_)
    for (const cplx& y : other.amps_) a.push_back(x * y);
  return PureState(std::move(d), std::move(a));
}

double PureState::probability(int qudit, int value) const {
  std::size_t st = stride(qudit);
  if (value < 0 || value >= dims_[qudit]) throw IndexError("probability: value out of range");
  double p = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (static_cast<int>((i / st) % dims_[qudit]) == value) p += std::norm(amps_[i]);
  return p;
}

double PureState::overlap(const PureState& other) const {
  if (dims_ != other.dims_) throw ParameterError("overlap: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
  return std::abs(s);
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (n != o.n) throw ParameterError("matrix size mismatch");
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      cplx x = (*this)(i, k);
      if (x == cplx(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += x * o(k, j);
    }
  return r;
}

Matrix Matrix::adjoint() const {
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double Matrix::max_abs_diff(const Matrix& o) const {
  if (n != o.n) throw ParameterError("matrix size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
  return m;
}

bool Matrix::is_unitary(double tol) const {
  if (n == 0) return false;
  return (adjoint() * (*this)).max_abs_diff(identity(n)) <= tol;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const std::vector<cplx>& d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::diagonal_phases(const std::vector<double>& angles) {
  std::vector<cplx> d;
  d.reserve(angles.size());
  for (double t : angles) d.push_back(std::polar(1.0, t));
  return diagonal(d);
}

namespace gates {

Matrix bit_flip() {
  Matrix m(2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix y_flip() {
  Matrix m(2);
  m(0, 1) = -1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  Matrix m(2);
  m(0, 0) = h;
  m(0, 1) = h;
  m(1, 0) = h;
  m(1, 1) = -h;
  return m;
}

Matrix shift(int d, int times) {
  if (d < 2) throw ParameterError("shift: dimension must be >= 2");
  Matrix m(static_cast<std::size_t>(d));
  int t = ((times % d) + d) % d;
  for (int j = 0; j < d; ++j) m(static_cast<std::size_t>((j + t) % d), static_cast<std::size_t>(j)) = 1.0;
  return m;
}

Matrix fourier(int d) {
  if (d < 2) throw ParameterError("fourier: dimension must be >= 2");
  Matrix m(static_cast<std::size_t>(d));
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      m(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) =
          std::polar(s, kTwoPi * static_cast<double>((static_cast<long long>(j) * k) % d) / d);
  return m;
}

}  // namespace gates

PureState apply_unitary(const PureState& s, const Matrix& u, const std::vector<int>& targets) {
  if (targets.empty()) throw IndexError("apply_unitary: no targets");
  std::vector<std::size_t> strides;
  std::size_t p = 1;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    int t = targets[i];
    if (t < 0 || t >= s.qudits()) throw IndexError("apply_unitary: target out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[j] == t) throw IndexError("apply_unitary: repeated target");
    strides.push_back(s.stride(t));
    p *= static_cast<std::size_t>(s.dims()[t]);
  }
  if (u.n != p) throw UnitarityError("apply_unitary: matrix size does not match target dimension");
  if (!u.is_unitary()) throw UnitarityError("apply_unitary: matrix is not unitary within 1e-9");

  // offsets[q] = index displacement of target digit tuple q.
  std::vector<std::size_t> offsets(p, 0);
  for (std::size_t q = 0; q < p; ++q) {
    std::size_t rem = q, off = 0;
    for (std::size_t i = targets.size(); i-- > 0;) {
      std::size_t d = static_cast<std::size_t>(s.dims()[targets[i]]);
      off += (rem % d) * strides[i];
      rem /= d;
    }
    offsets[q] = off;
  }

  const std::vector<cplx>& in = s.amps();
  std::vector<cplx> out(in.size());
  std::vector<cplx> buf(p);
  for (std::size_t base = 0; base < in.size(); ++base) {
    bool is_base = true;
    for (std::size_t i = 0; i < targets.size() && is_base; ++i)
      if ((base / strides[i]) % static_cast<std::size_t>(s.dims()[targets[i]]) != 0) is_base = false;
    if (!is_base) continue;
    for (std::size_t q = 0; q < p; ++q) buf[q] = in[base + offsets[q]];
    for (std::size_t r = 0; r < p; ++r) {
      cplx acc = 0.0;
      for (std::size_t q = 0; q < p; ++q) acc += u(r, q) * buf[q];
      out[base + offsets[r]] = acc;
    }
  }
  PureState r(s.dims(), std::move(out));
  check_norm(r, "apply_unitary");
  return r;
}

PureState apply_diagonal(const PureState& s, const std::vector<cplx>& phase, int target) {
  std::size_t st = s.stride(target);
  std::size_t d = static_cast<std::size_t>(s.dims()[target]);
  if (phase.size() != d) throw UnitarityError("apply_diagonal: size mismatch");
  for (const cplx& z : phase)
    if (std::abs(std::abs(z) - 1.0) > kNormTolerance) throw UnitarityError("apply_diagonal: entry off the unit circle");
  std::vector<cplx> out = s.amps();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= phase[(i / st) % d];
  PureState r(s.dims(), std::move(out));
  check_norm(r, "apply_diagonal");
  return r;
}

const char* basis_name(Basis b) {
  switch (b) {
    case Basis::computational: return "computational";
    case Basis::fourier: return "fourier";
    case Basis::povm_theta: return "povm-theta";
    case Basis::r_pair: return "R-pair";
  }
  return "unknown";
}

std::vector<double> outcome_probabilities(const PureState& s, int target) {
  std::size_t st = s.stride(target);
  std::size_t d = static_cast<std::size_t>(s.dims()[target]);
  std::vector<double> p(d, 0.0);
  const auto& a = s.amps();
  for (std::size_t i = 0; i < a.size(); ++i) p[(i / st) % d] += std::norm(a[i]);
  return p;
}

MeasurementRecord measure_partition(const PureState& s, const std::function<int(std::size_t)>& classify,
                                    int outcomes, Basis label, Rng& rng) {
  if (outcomes < 1) throw ParameterError("measure_partition: no outcomes");
  const auto& a = s.amps();
  std::vector<int> cls(a.size());
  std::vector<double> p(static_cast<std::size_t>(outcomes), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    int c = classify(i);
    if (c < 0 || c >= outcomes) throw IndexError("measure_partition: class out of range");
    cls[i] = c;
    p[static_cast<std::size_t>(c)] += std::norm(a[i]);
  }
  int k = sample_index(p, rng);
  double scale = 1.0 / std::sqrt(p[static_cast<std::size_t>(k)]);
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (cls[i] == k) out[i] = a[i] * scale;
  PureState collapsed(s.dims(), std::move(out));
  check_norm(collapsed, "measure");
  return MeasurementRecord{k, 0.0, label, std::move(collapsed)};
}

MeasurementRecord measure_computational(const PureState& s, int target, Rng& rng) {
  std::size_t st = s.stride(target);
  std::size_t d = static_cast<std::size_t>(s.dims()[target]);
  return measure_partition(
      s, [&](std::size_t i) { return static_cast<int>((i / st) % d); }, static_cast<int>(d), Basis::computational,
      rng);
}

MeasurementRecord measure_fourier(const PureState& s, int target, Rng& rng) {
  if (target < 0 || target >= s.qudits()) throw IndexError("measure_fourier: target out of range");
  Matrix f = gates::fourier(s.dims()[target]);
  MeasurementRecord r = measure_computational(apply_unitary(s, f.adjoint(), {target}), target, rng);
  r.basis = Basis::fourier;
  r.collapsed = apply_unitary(r.collapsed, f, {target});
  return r;
}

PureState make_ghz_phase_state(int copies, int D, const std::function<double(int)>& phase) {
  if (copies < 1) throw ParameterError("make_ghz_phase_state: copies must be >= 1");
  if (D < 2) throw ParameterError("make_ghz_phase_state: D must be >= 2");
  std::vector<int> dims(static_cast<std::size_t>(copies), D);
  std::size_t n = checked_dimension(dims);
  std::size_t step = (n - 1) / static_cast<std::size_t>(D - 1);  // index of |1...1>
  std::vector<cplx> a(n);
  const double s = 1.0 / std::sqrt(static_cast<double>(D));
  for (int j = 0; j < D; ++j) a[static_cast<std::size_t>(j) * step] = std::polar(s, phase(j));
  return PureState(std::move(dims), std::move(a));
}

int grid_bin(double theta, int D) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  int j = std::clamp(static_cast<int>(std::floor(t * D / kTwoPi)), 0, D - 1);
  // Closed-left intervals against the same grid expression used elsewhere.
  if (j > 0 && t < kTwoPi * j / D) --j;
  if (j < D - 1 && t >= kTwoPi * (j + 1) / D) ++j;
  return j;
}

}  // namespace qevote
