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

#include "qdiff/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdiff/errors.hpp"

namespace qdiff {

// ---- registers -------------------------------------------------------------

void validate_register(const Register& reg) {
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].dim < 2) {
      throw SemanticError("variable '" + reg[i].name + "' has dimension " +
                          std::to_string(reg[i].dim) + " (need >= 2)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (reg[j].name == reg[i].name) {
        throw SemanticError("duplicate variable '" + reg[i].name + "' in register");
      }
    }
  }
}

int index_of(const Register& reg, const std::string& name) {
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool contains(const Register& reg, const std::string& name) { return index_of(reg, name) >= 0; }

std::size_t register_dim(const Register& reg) {
  std::size_t d = 1;
  for (const auto& v : reg) d *= static_cast<std::size_t>(v.dim);
  return d;
}

Register register_union(const Register& a, const Register& b) {
  Register out = a;
  for (const auto& v : b) {
    int i = index_of(out, v.name);
    if (i < 0) {
      out.push_back(v);
    } else if (out[static_cast<std::size_t>(i)].dim != v.dim) {
      throw SemanticError("variable '" + v.name + "' used with dimensions " +
                          std::to_string(out[static_cast<std::size_t>(i)].dim) + " and " +
                          std::to_string(v.dim));
    }
  }
  return out;
}

std::string register_to_string(const Register& reg) {
  std::string s = "[";
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (i) s += ",";
    s += reg[i].name;
  }
  return s + "]";
}

// ---- matrix helpers ---------------------------------------------------------

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::MatrixXcd h = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

ComplexMatrix identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(d, d);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// ---- DensityOperator --------------------------------------------------------

DensityOperator::DensityOperator(ComplexMatrix mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
    throw DimensionError("density operator must be a non-empty square matrix");
  }
  if (!all_finite(mat_)) throw NumericError("density operator has non-finite entries");
  const double herm = hermitian_defect(mat_);
  if (herm > kHermitianTol) {
    throw NumericError("density operator is not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const double lo = min_eigenvalue(mat_);
  if (lo < -kPsdTol) {
    throw NumericError("density operator is not positive semidefinite (min eigenvalue " +
                       std::to_string(lo) + ")");
  }
  const double tr = mat_.trace().real();
  if (tr < -kTraceTol || tr > 1.0 + kTraceTol) {
    throw NumericError("density operator trace " + std::to_string(tr) + " outside [0, 1]");
  }
}

DensityOperator DensityOperator::unchecked(ComplexMatrix mat) {
  return DensityOperator(std::move(mat), NoCheck{});
}

DensityOperator DensityOperator::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityOperator(std::move(m), NoCheck{});
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  return DensityOperator(ComplexMatrix(psi * psi.adjoint()));
}

// ---- Superoperator ----------------------------------------------------------

Superoperator::Superoperator(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw DimensionError("superoperator needs at least one Kraus operator");
  out_dim_ = static_cast<std::size_t>(kraus_.front().rows());
  in_dim_ = static_cast<std::size_t>(kraus_.front().cols());
  ComplexMatrix acc = ComplexMatrix::Zero(static_cast<Eigen::Index>(in_dim_), static_cast<Eigen::Index>(in_dim_));
  for (const auto& e : kraus_) {
    if (static_cast<std::size_t>(e.rows()) != out_dim_ || static_cast<std::size_t>(e.cols()) != in_dim_) {
      throw DimensionError("Kraus operators have inconsistent shapes");
    }
    if (!all_finite(e)) throw NumericError("Kraus operator has non-finite entries");
    acc += e.adjoint() * e;
  }
  // sum E^dagger E <= I  <=>  I - sum E^dagger E is PSD
  const double lo = min_eigenvalue(qdiff::identity(in_dim_) - acc);
  if (lo < -kKrausTol) {
    throw NumericError("Kraus operators are trace-increasing (sum E^dagger E exceeds I by " +
                       std::to_string(-lo) + ")");
  }
}

Superoperator Superoperator::identity(std::size_t dim) { return Superoperator({qdiff::identity(dim)}); }

Superoperator Superoperator::unitary(const ComplexMatrix& u) { return Superoperator({u}); }

// ---- Observable -------------------------------------------------------------

Observable::Observable(ComplexMatrix mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
    throw DimensionError("observable must be a non-empty square matrix");
  }
  if (!all_finite(mat_)) throw NumericError("observable has non-finite entries");
  if (hermitian_defect(mat_) > kHermitianTol) throw NumericError("observable is not Hermitian");
  const Eigen::VectorXd ev = hermitian_eigenvalues(mat_);
  if (ev.minCoeff() < -1.0 - 1e-9 || ev.maxCoeff() > 1.0 + 1e-9) {
    throw NumericError("observable eigenvalues must lie in [-1, 1]");
  }
}

Observable Observable::pauli_z() {
  ComplexMatrix z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  return Observable(std::move(z));
}

Observable Observable::identity(std::size_t dim) { return Observable(qdiff::identity(dim)); }

Observable Observable::projector(std::size_t dim, std::size_t index) {
  return Observable(DensityOperator::basis(dim, index).matrix());
}

// ---- channels and expectations ---------------------------------------------

DensityOperator apply_channel(const Superoperator& e, const DensityOperator& rho) {
  if (e.in_dim() != rho.dim()) {
    throw DimensionError("apply_channel: channel input dim " + std::to_string(e.in_dim()) +
                         " vs state dim " + std::to_string(rho.dim()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(e.out_dim()),
                                          static_cast<Eigen::Index>(e.out_dim()));
  for (const auto& k : e.kraus()) out += k * rho.matrix() * k.adjoint();
  return DensityOperator::unchecked(std::move(out));
}

ComplexMatrix apply_dual(const Superoperator& e, const ComplexMatrix& o) {
  if (static_cast<std::size_t>(o.rows()) != e.out_dim() || o.rows() != o.cols()) {
    throw DimensionError("apply_dual: operator dim does not match channel output dim");
  }
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(e.in_dim()),
                                          static_cast<Eigen::Index>(e.in_dim()));
  for (const auto& k : e.kraus()) out += k.adjoint() * o * k;
  return out;
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) throw DimensionError("trace_product: shape mismatch");
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  }
  if (std::abs(acc.imag()) > kImagResidueTol) {
    std::ostringstream os;
    os << "expectation has imaginary residue " << acc.imag();
    throw NumericError(os.str());
  }
  return acc.real();
}

double expectation(const Observable& o, const DensityOperator& rho) {
  if (o.dim() != rho.dim()) {
    throw DimensionError("expectation: observable dim " + std::to_string(o.dim()) + " vs state dim " +
                         std::to_string(rho.dim()));
  }
  return trace_product(o.matrix(), rho.matrix());
}

// ---- tensor layout ----------------------------------------------------------

TensorShape::TensorShape(std::vector<int> dims) : dims_(std::move(dims)), strides_(dims_.size()), total_(1) {
  for (std::size_t i = dims_.size(); i-- > 0;) {
    strides_[i] = total_;
    total_ *= static_cast<std::size_t>(dims_[i]);
  }
}

std::size_t TensorShape::local_dim(std::span<const int> wires) const {
  std::size_t d = 1;
  for (int w : wires) d *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(w)]);
  return d;
}

std::vector<std::size_t> TensorShape::local_offsets(std::span<const int> wires) const {
  std::vector<std::size_t> offsets{0};
  for (int w : wires) {
    const auto wi = static_cast<std::size_t>(w);
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims_[wi]));
    for (std::size_t base : offsets) {
      for (int digit = 0; digit < dims_[wi]; ++digit) {
        next.push_back(base + static_cast<std::size_t>(digit) * strides_[wi]);
      }
    }
    offsets = std::move(next);
  }
  return offsets;
}

std::vector<std::size_t> TensorShape::base_indices(std::span<const int> wires) const {
  std::vector<bool> is_target(dims_.size(), false);
  for (int w : wires) is_target[static_cast<std::size_t>(w)] = true;
  std::vector<std::size_t> bases{0};
  for (std::size_t wi = 0; wi < dims_.size(); ++wi) {
    if (is_target[wi]) continue;
    std::vector<std::size_t> next;
    next.reserve(bases.size() * static_cast<std::size_t>(dims_[wi]));
    for (std::size_t base : bases) {
      for (int digit = 0; digit < dims_[wi]; ++digit) {
        next.push_back(base + static_cast<std::size_t>(digit) * strides_[wi]);
      }
    }
    bases = std::move(next);
  }
  return bases;
}

LocalAction::LocalAction(const TensorShape& shape, std::span<const int> wires)
    : local_dim(shape.local_dim(wires)), offsets(shape.local_offsets(wires)), bases(shape.base_indices(wires)) {}

void apply_left(ComplexMatrix& m, const ComplexMatrix& op, const LocalAction& act) {
  const std::size_t d = act.local_dim;
  const auto ncols = static_cast<std::size_t>(m.cols());
  Complex* data = m.data();
  std::vector<Complex> in(d), out(d);
  for (std::size_t base : act.bases) {
    for (std::size_t c = 0; c < ncols; ++c) {
      for (std::size_t s = 0; s < d; ++s) in[s] = data[(base + act.offsets[s]) * ncols + c];
      for (std::size_t s = 0; s < d; ++s) {
        Complex acc = 0.0;
        for (std::size_t t = 0; t < d; ++t) acc += op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) * in[t];
        out[s] = acc;
      }
      for (std::size_t s = 0; s < d; ++s) data[(base + act.offsets[s]) * ncols + c] = out[s];
    }
  }
}

void apply_right_adjoint(ComplexMatrix& m, const ComplexMatrix& op, const LocalAction& act) {
  const std::size_t d = act.local_dim;
  const auto nrows = static_cast<std::size_t>(m.rows());
  const auto ncols = static_cast<std::size_t>(m.cols());
  Complex* data = m.data();
  // conj(op) cached once; (m op^dagger)(r, s) = sum_t m(r, t) conj(op(s, t))
  std::vector<Complex> opc(d * d);
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t t = 0; t < d; ++t)
      opc[s * d + t] = std::conj(op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)));
  std::vector<Complex> in(d);
  for (std::size_t r = 0; r < nrows; ++r) {
    Complex* row = data + r * ncols;
    for (std::size_t base : act.bases) {
      for (std::size_t t = 0; t < d; ++t) in[t] = row[base + act.offsets[t]];
      for (std::size_t s = 0; s < d; ++s) {
        Complex acc = 0.0;
        for (std::size_t t = 0; t < d; ++t) acc += in[t] * opc[s * d + t];
        row[base + act.offsets[s]] = acc;
      }
    }
  }
}

ComplexMatrix conjugate(const ComplexMatrix& m, const ComplexMatrix& op, const LocalAction& act) {
  ComplexMatrix out = m;
  apply_left(out, op, act);
  apply_right_adjoint(out, op, act);
  return out;
}

void apply_to_vector(ComplexVector& v, const ComplexMatrix& op, const LocalAction& act) {
  const std::size_t d = act.local_dim;
  std::vector<Complex> in(d);
  for (std::size_t base : act.bases) {
    for (std::size_t s = 0; s < d; ++s) in[s] = v(static_cast<Eigen::Index>(base + act.offsets[s]));
    for (std::size_t s = 0; s < d; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < d; ++t) acc += op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) * in[t];
      v(static_cast<Eigen::Index>(base + act.offsets[s])) = acc;
    }
  }
}

ComplexMatrix embed(const ComplexMatrix& op, const Register& on, const Register& within) {
  validate_register(on);
  validate_register(within);
  std::vector<int> wires;
  wires.reserve(on.size());
  for (const auto& v : on) {
    const int i = index_of(within, v.name);
    if (i < 0) throw SemanticError("embed: unknown variable '" + v.name + "'");
    if (within[static_cast<std::size_t>(i)].dim != v.dim) {
      throw DimensionError("embed: variable '" + v.name + "' has inconsistent dimension");
    }
    wires.push_back(i);
  }
  if (static_cast<std::size_t>(op.rows()) != register_dim(on) || op.rows() != op.cols()) {
    throw DimensionError("embed: operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                         " but register " + register_to_string(on) + " has dim " +
                         std::to_string(register_dim(on)));
  }
  std::vector<int> dims;
  for (const auto& v : within) dims.push_back(v.dim);
  TensorShape shape(dims);
  LocalAction act(shape, wires);
  ComplexMatrix out = identity(shape.total());
  apply_left(out, op, act);
  return out;
}

// ---- random objects ---------------------------------------------------------

namespace {

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(n(rng), n(rng));
  return g;
}

// Columns of Q from a QR factorization, with R's diagonal phases removed so
// the distribution is Haar.
ComplexMatrix isometry(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  Eigen::MatrixXcd g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(rows),
                                                                       static_cast<Eigen::Index>(cols));
  Eigen::MatrixXcd r = qr.matrixQR().topRows(static_cast<Eigen::Index>(cols)).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(cols); ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

}  // namespace

ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) { return isometry(dim, dim, rng); }

DensityOperator random_density(std::size_t dim, std::mt19937_64& rng) {
  ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  rho = (rho + rho.adjoint()).eval() * 0.5;
  return DensityOperator(std::move(rho));
}

Observable random_observable(std::size_t dim, std::mt19937_64& rng, double scale) {
  ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix h = (g + g.adjoint()) * 0.5;
  const Eigen::VectorXd ev = hermitian_eigenvalues(h);
  const double norm = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  h *= scale / norm;
  h = (h + h.adjoint()).eval() * 0.5;
  return Observable(std::move(h));
}

Superoperator random_channel(std::size_t dim, std::size_t num_kraus, std::mt19937_64& rng) {
  ComplexMatrix v = isometry(dim * num_kraus, dim, rng);
  std::vector<ComplexMatrix> kraus;
  const auto d = static_cast<Eigen::Index>(dim);
  for (std::size_t k = 0; k < num_kraus; ++k) {
    kraus.emplace_back(v.block(static_cast<Eigen::Index>(k) * d, 0, d, d));
  }
  return Superoperator(std::move(kraus));
}

}  // namespace qdiff
