#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "qevote/rng.hpp"

namespace qevote {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 22;
inline constexpr double kNormTolerance = 1e-9;

// Dense amplitude vector. Qudit 0 is the most significant digit of the index.
class PureState {
 public:
  PureState(std::vector<int> dims, std::vector<cplx> amps);

  static PureState basis(const std::vector<int>& dims, const std::vector<int>& digits);
  static PureState uniform(const std::vector<int>& dims);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<cplx>& amps() const { return amps_; }
  std::size_t size() const { return amps_.size(); }
  int qudits() const { return static_cast<int>(dims_.size()); }
  std::size_t stride(int qudit) const;
  int digit(std::size_t index, int qudit) const;
  double norm() const;

  PureState tensor(const PureState& other) const;

  // Probability that `qudit` reads `value` in the computational basis.
  double probability(int qudit, int value) const;

  // |<this|other>|, for states over identical dims.
  double overlap(const PureState& other) const;

 private:
  std::vector<int> dims_;
  std::vector<cplx> amps_;
};

std::size_t checked_dimension(const std::vector<int>& dims);

// Row-major square matrix.
struct Matrix {
  std::size_t n = 0;
  std::vector<cplx> a;

  Matrix() = default;
  explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_) {}
  cplx& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }

  Matrix operator*(const Matrix& o) const;
  Matrix adjoint() const;
  bool is_unitary(double tol = kNormTolerance) const;
  double max_abs_diff(const Matrix& o) const;

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const std::vector<cplx>& d);
  static Matrix diagonal_phases(const std::vector<double>& angles);
};

namespace gates {
Matrix bit_flip();                // [[0,1],[1,0]]
Matrix y_flip();                  // [[0,-1],[1,0]]
Matrix hadamard();
Matrix shift(int d, int times = 1);  // |j> -> |j+times mod d>
Matrix fourier(int d);            // F|j> = d^{-1/2} sum_k e^{+2 pi i jk/d} |k>
}  // namespace gates

PureState apply_unitary(const PureState& s, const Matrix& u, const std::vector<int>& targets);

// Multiplies amplitudes by phase[digit] on one qudit; cheaper than a full matrix.
PureState apply_diagonal(const PureState& s, const std::vector<cplx>& phase, int target);

enum class Basis { computational, fourier, povm_theta, r_pair };
const char* basis_name(Basis b);

struct MeasurementRecord {
  int64_t outcome = 0;
  double angle = 0.0;
  Basis basis = Basis::computational;
  PureState collapsed;
};

MeasurementRecord measure_computational(const PureState& s, int target, Rng& rng);

// Outcome law of F-dagger followed by a computational measurement. The collapsed
// state is rotated back, i.e. the target holds F|outcome>.
MeasurementRecord measure_fourier(const PureState& s, int target, Rng& rng);

// Projective measurement whose projectors are indexed by classify(index) in
// [0, outcomes).
MeasurementRecord measure_partition(const PureState& s, const std::function<int(std::size_t)>& classify,
                                    int outcomes, Basis label, Rng& rng);

std::vector<double> outcome_probabilities(const PureState& s, int target);

// (1/sqrt(D)) sum_j e^{i phase(j)} |j>^{copies}
PureState make_ghz_phase_state(int copies, int D, const std::function<double(int)>& phase);

// Density of the E(theta) POVM outcome for |psi(theta_v)>.
double povm_density(double theta, int D, double theta_v);

// Inverse-transform sample from povm_density; result in [0, 2 pi).
double povm_theta_sample(int D, double theta_v, Rng& rng);

// Index of the grid interval [x_j, x_{j+1}) containing theta, x_j = 2 pi j / D.
int grid_bin(double theta, int D);

}  // namespace qevote
