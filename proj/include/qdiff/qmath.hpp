// Copyright 2026 The qdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra and the quantum objects built on it:
// partial density operators, Kraus channels and bounded observables.

#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qdiff/qvar.hpp"

namespace qdiff {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kImagResidueTol = 1e-9;
inline constexpr double kKrausTol = 1e-9;

/// Largest total Hilbert-space dimension the exact simulator accepts.
inline constexpr std::size_t kDefaultMaxDimension = 1024;

bool all_finite(const ComplexMatrix& m);

/// Largest entry of |A - A^dagger|.
double hermitian_defect(const ComplexMatrix& m);

/// Smallest eigenvalue of (A + A^dagger) / 2.
double min_eigenvalue(const ComplexMatrix& m);

/// Eigenvalues of (A + A^dagger) / 2 in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// Largest |entry| of a - b. Shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix identity(std::size_t dim);

/// Kronecker product; `a` is the most significant factor.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial density operator: Hermitian, PSD, 0 <= trace <= 1.
class DensityOperator {
 public:
  /// Validates every invariant; throws NumericError on violation.
  explicit DensityOperator(ComplexMatrix mat);

  /// Skips the eigenvalue check. For states produced internally by channels
  /// that are already known to be valid.
  static DensityOperator unchecked(ComplexMatrix mat);

  /// |index><index| on a space of dimension `dim`.
  static DensityOperator basis(std::size_t dim, std::size_t index);

  /// |psi><psi|; psi must have norm <= 1.
  static DensityOperator pure(const ComplexVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }
  double trace() const { return mat_.trace().real(); }

 private:
  struct NoCheck {};
  DensityOperator(ComplexMatrix mat, NoCheck) : mat_(std::move(mat)) {}

  ComplexMatrix mat_;
};

/// Trace-non-increasing completely positive map in Kraus form.
class Superoperator {
 public:
  /// Validates shapes and sum_k E_k^dagger E_k <= I within kKrausTol.
  explicit Superoperator(std::vector<ComplexMatrix> kraus);

  static Superoperator identity(std::size_t dim);
  static Superoperator unitary(const ComplexMatrix& u);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::vector<ComplexMatrix> kraus_;
};

/// Hermitian operator with -I <= O <= I.
class Observable {
 public:
  explicit Observable(ComplexMatrix mat);

  static Observable pauli_z();
  static Observable identity(std::size_t dim);
  /// |index><index| on a space of dimension `dim`.
  static Observable projector(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

/// Returns sum_k E_k rho E_k^dagger.
DensityOperator apply_channel(const Superoperator& e, const DensityOperator& rho);

/// Heisenberg-picture dual: returns sum_k E_k^dagger o E_k.
ComplexMatrix apply_dual(const Superoperator& e, const ComplexMatrix& o);

/// tr(o * rho), requiring the imaginary part to vanish within kImagResidueTol.
double expectation(const Observable& o, const DensityOperator& rho);

/// Real part of tr(a * b) with the same imaginary-residue check.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Lifts `op` acting on `on` to the space of `within`, respecting the
/// variable order of `within`. Throws SemanticError for unknown variables and
/// DimensionError for a shape mismatch.
ComplexMatrix embed(const ComplexMatrix& op, const Register& on, const Register& within);

/// Index arithmetic for a tensor product of subsystems with given dims.
/// Local kernels below apply small operators to chosen wires without
/// materializing the embedded matrix.
class TensorShape {
 public:
  explicit TensorShape(std::vector<int> dims);

  std::size_t total() const { return total_; }
  std::size_t num_wires() const { return dims_.size(); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t stride(std::size_t wire) const { return strides_[wire]; }

  /// Product of the dims of `wires`.
  std::size_t local_dim(std::span<const int> wires) const;

  /// Offsets (relative to a base index) of the local basis states, the
  /// first wire being the most significant local factor.
  std::vector<std::size_t> local_offsets(std::span<const int> wires) const;

  /// Every global index whose digits on `wires` are all zero.
  std::vector<std::size_t> base_indices(std::span<const int> wires) const;

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_;
};

/// Precomputed index tables for one (wires, shape) pair.
struct LocalAction {
  LocalAction(const TensorShape& shape, std::span<const int> wires);

  std::size_t local_dim;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> bases;
};

/// m <- (op on wires) * m
void apply_left(ComplexMatrix& m, const ComplexMatrix& op, const LocalAction& act);
/// m <- m * (op on wires)^dagger
void apply_right_adjoint(ComplexMatrix& m, const ComplexMatrix& op, const LocalAction& act);
/// Returns op m op^dagger with op acting on the wires of `act`.
ComplexMatrix conjugate(const ComplexMatrix& m, const ComplexMatrix& op, const LocalAction& act);
/// v <- (op on wires) * v
void apply_to_vector(ComplexVector& v, const ComplexMatrix& op, const LocalAction& act);

// Random objects for property tests and the numerical validators.

/// Haar-random unitary via QR of a complex Ginibre matrix.
ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng);
/// Random full-rank density operator with trace 1.
DensityOperator random_density(std::size_t dim, std::mt19937_64& rng);
/// Random Hermitian matrix rescaled so its spectral norm is `scale` (<= 1).
Observable random_observable(std::size_t dim, std::mt19937_64& rng, double scale = 1.0);
/// Random trace-preserving channel with `num_kraus` operators.
Superoperator random_channel(std::size_t dim, std::size_t num_kraus, std::mt19937_64& rng);

}  // namespace qdiff
