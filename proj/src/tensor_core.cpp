// Copyright 2026 The qsn Authors
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

#include "qsn/tensor_core.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "qsn/error.hpp"

namespace qsn {

std::string_view to_string(SiteKind kind) {
  switch (kind) {
    case SiteKind::qubit: return "qubit";
    case SiteKind::boson: return "boson";
    case SiteKind::fermion: return "fermion";
  }
  return "?";
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::pauli_z: return "pauli_z";
    case GeneratorKind::number: return "number";
    case GeneratorKind::momentum: return "momentum";
  }
  return "?";
}

std::optional<SiteKind> parse_site_kind(std::string_view name) {
  if (name == "qubit") return SiteKind::qubit;
  if (name == "boson") return SiteKind::boson;
  if (name == "fermion") return SiteKind::fermion;
  return std::nullopt;
}

std::optional<GeneratorKind> parse_generator_kind(std::string_view name) {
  if (name == "pauli_z") return GeneratorKind::pauli_z;
  if (name == "number") return GeneratorKind::number;
  if (name == "momentum") return GeneratorKind::momentum;
  return std::nullopt;
}

GeneratorKind default_generator(SiteKind kind) {
  return kind == SiteKind::qubit ? GeneratorKind::pauli_z : GeneratorKind::number;
}

std::size_t default_dim_cap() {
  if (const char* env = std::getenv("QSN_DIM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultDimCap;
}

namespace {

void validate_site(const SiteSpec& s, std::size_t index) {
  const std::string where = "site " + std::to_string(index);
  bool legal = false;
  switch (s.generator) {
    case GeneratorKind::pauli_z: legal = s.kind == SiteKind::qubit; break;
    case GeneratorKind::number: legal = s.kind != SiteKind::qubit; break;
    case GeneratorKind::momentum: legal = s.kind == SiteKind::boson; break;
  }
  if (!legal) {
    fail(ErrorCode::IllegalGeneratorForSite, where + ": generator " + std::string(to_string(s.generator)) +
                                                 " not allowed on " + std::string(to_string(s.kind)) + " site");
  }
  if (s.kind == SiteKind::boson && s.truncation < 2) {
    fail(ErrorCode::TruncationTooSmall, where + ": boson truncation must be >= 2, got " + std::to_string(s.truncation));
  }
}

}  // namespace

SpaceSpec::SpaceSpec(std::vector<SiteSpec> sites, std::size_t dim_cap) : sites_(std::move(sites)) {
  if (sites_.empty()) fail(ErrorCode::InvalidArgument, "space needs at least one site");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    validate_site(sites_[i], i);
    if (sites_[i].kind != SiteKind::boson) sites_[i].truncation = 2;
  }
  strides_.assign(sites_.size(), 1);
  dim_ = 1;
  for (std::size_t i = sites_.size(); i-- > 0;) {
    strides_[i] = dim_;
    const auto d = static_cast<std::size_t>(sites_[i].local_dim());
    if (dim_ > dim_cap / d) {
      fail(ErrorCode::DimensionCapExceeded,
           "total dimension exceeds cap of " + std::to_string(dim_cap) + " amplitudes");
    }
    dim_ *= d;
  }
}

SpaceSpec SpaceSpec::uniform(std::size_t k, SiteSpec site, std::size_t dim_cap) {
  return SpaceSpec(std::vector<SiteSpec>(k, site), dim_cap);
}

bool SpaceSpec::all_diagonal_generators() const {
  for (const auto& s : sites_) {
    if (s.generator == GeneratorKind::momentum) return false;
  }
  return true;
}

StateVector::StateVector(SpaceSpec space, CVector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != space_.dim()) {
    fail(ErrorCode::DimensionMismatch, "state has " + std::to_string(amplitudes_.size()) +
                                           " amplitudes, space dimension is " + std::to_string(space_.dim()));
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    fail(ErrorCode::InvalidState, "state norm " + format_value(norm) + " differs from 1");
  }
}

DensityMatrix::DensityMatrix(SpaceSpec space, CMatrix matrix) : DensityMatrix(std::move(space), std::move(matrix), true) {}

DensityMatrix::DensityMatrix(SpaceSpec space, CMatrix matrix, bool validate)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(space_.dim());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "density matrix shape does not match space dimension " + std::to_string(n));
  }
  if (!validate) return;
  const DensityCheck c = check();
  if (c.hermiticity_error > 1e-10) fail(ErrorCode::InvalidState, "density matrix not Hermitian");
  if (c.trace_error > 1e-10) fail(ErrorCode::InvalidState, "density matrix trace differs from 1");
  if (c.min_eigenvalue < -1e-9) {
    fail(ErrorCode::InvalidState, "density matrix has eigenvalue " + format_value(c.min_eigenvalue));
  }
}

DensityMatrix DensityMatrix::unchecked(SpaceSpec space, CMatrix matrix) {
  return DensityMatrix(std::move(space), std::move(matrix), false);
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix(psi.space(), psi.projector(), false);
}

DensityCheck DensityMatrix::check() const {
  DensityCheck c;
  c.hermiticity_error = hermiticity_error(matrix_);
  c.trace_error = std::abs(matrix_.trace() - cplx(1.0, 0.0));
  const CMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

CMatrix annihilation(int d) {
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix position_quadrature(int d) {
  const CMatrix a = annihilation(d);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

CMatrix momentum_quadrature(int d) {
  const CMatrix a = annihilation(d);
  return (a - a.adjoint()) / (kI * std::sqrt(2.0));
}

LocalOperator build_generator(const SpaceSpec& space, std::size_t site) {
  if (site >= space.num_sites()) {
    fail(ErrorCode::DimensionMismatch, "site " + std::to_string(site) + " out of range");
  }
  const SiteSpec& s = space.site(site);
  const int d = s.local_dim();
  LocalOperator op;
  op.site = site;
  switch (s.generator) {
    case GeneratorKind::pauli_z:
      op.matrix = CMatrix::Zero(2, 2);
      op.matrix(0, 0) = 1.0;
      op.matrix(1, 1) = -1.0;
      op.diagonal = true;
      break;
    case GeneratorKind::number:
      op.matrix = CMatrix::Zero(d, d);
      for (int n = 0; n < d; ++n) op.matrix(n, n) = static_cast<double>(n);
      op.diagonal = true;
      break;
    case GeneratorKind::momentum:
      op.matrix = momentum_quadrature(d);
      op.diagonal = false;
      break;
  }
  return op;
}

namespace {

void check_op(const LocalOperator& op, const SpaceSpec& space) {
  if (op.site >= space.num_sites()) {
    fail(ErrorCode::DimensionMismatch, "operator site " + std::to_string(op.site) + " out of range");
  }
  const int d = space.local_dim(op.site);
  if (op.matrix.rows() != d || op.matrix.cols() != d) {
    fail(ErrorCode::DimensionMismatch, "operator is " + std::to_string(op.matrix.rows()) + "x" +
                                           std::to_string(op.matrix.cols()) + ", site dimension is " +
                                           std::to_string(d));
  }
}

}  // namespace

CMatrix embed(const LocalOperator& op, const SpaceSpec& space) {
  check_op(op, space);
  const auto n = space.dim();
  const auto stride = space.stride(op.site);
  const auto d = static_cast<std::size_t>(space.local_dim(op.site));
  CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t col = 0; col < n; ++col) {
    const auto j = static_cast<std::size_t>(space.digit(col, op.site));
    const std::size_t base = col - j * stride;
    for (std::size_t i = 0; i < d; ++i) {
      const cplx v = op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != cplx(0.0, 0.0)) {
        full(static_cast<Eigen::Index>(base + i * stride), static_cast<Eigen::Index>(col)) = v;
      }
    }
  }
  return full;
}

RVector embed_diagonal(const LocalOperator& op, const SpaceSpec& space) {
  check_op(op, space);
  if (!op.diagonal) fail(ErrorCode::NonDiagonalGenerator, "operator on site " + std::to_string(op.site) + " is not diagonal");
  const auto n = space.dim();
  RVector diag(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const int j = space.digit(k, op.site);
    diag(static_cast<Eigen::Index>(k)) = op.matrix(j, j).real();
  }
  return diag;
}

CVector apply_local(const LocalOperator& op, const SpaceSpec& space, const CVector& vec) {
  check_op(op, space);
  if (static_cast<std::size_t>(vec.size()) != space.dim()) {
    fail(ErrorCode::DimensionMismatch, "vector length does not match space dimension");
  }
  const auto n = space.dim();
  const auto stride = space.stride(op.site);
  const auto d = static_cast<std::size_t>(space.local_dim(op.site));
  CVector out = CVector::Zero(vec.size());
  if (op.diagonal) {
    for (std::size_t k = 0; k < n; ++k) {
      const int j = space.digit(k, op.site);
      out(static_cast<Eigen::Index>(k)) = op.matrix(j, j) * vec(static_cast<Eigen::Index>(k));
    }
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto j = static_cast<std::size_t>(space.digit(k, op.site));
    const std::size_t base = k - j * stride;
    const cplx v = vec(static_cast<Eigen::Index>(k));
    if (v == cplx(0.0, 0.0)) continue;
    for (std::size_t i = 0; i < d; ++i) {
      out(static_cast<Eigen::Index>(base + i * stride)) +=
          op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * v;
    }
  }
  return out;
}

CVector apply_two_site(const CMatrix& op, std::size_t site_a, std::size_t site_b, const SpaceSpec& space,
                       const CVector& vec) {
  if (site_a >= space.num_sites() || site_b >= space.num_sites() || site_a == site_b) {
    fail(ErrorCode::DimensionMismatch, "invalid site pair for two-site operator");
  }
  const auto da = static_cast<std::size_t>(space.local_dim(site_a));
  const auto db = static_cast<std::size_t>(space.local_dim(site_b));
  if (static_cast<std::size_t>(op.rows()) != da * db || op.rows() != op.cols()) {
    fail(ErrorCode::DimensionMismatch, "two-site operator shape does not match site dimensions");
  }
  if (static_cast<std::size_t>(vec.size()) != space.dim()) {
    fail(ErrorCode::DimensionMismatch, "vector length does not match space dimension");
  }
  const auto sa = space.stride(site_a);
  const auto sb = space.stride(site_b);
  CVector out = vec;
  CVector local(static_cast<Eigen::Index>(da * db));
  for (std::size_t k = 0; k < space.dim(); ++k) {
    if (space.digit(k, site_a) != 0 || space.digit(k, site_b) != 0) continue;
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t j = 0; j < db; ++j) local(static_cast<Eigen::Index>(i * db + j)) = vec(static_cast<Eigen::Index>(k + i * sa + j * sb));
    }
    const CVector mapped = op * local;
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t j = 0; j < db; ++j) out(static_cast<Eigen::Index>(k + i * sa + j * sb)) = mapped(static_cast<Eigen::Index>(i * db + j));
    }
  }
  return out;
}

namespace {

void check_square(const CMatrix& op, std::size_t dim) {
  if (static_cast<std::size_t>(op.rows()) != dim || static_cast<std::size_t>(op.cols()) != dim) {
    fail(ErrorCode::DimensionMismatch, "operator shape does not match state dimension " + std::to_string(dim));
  }
}

}  // namespace

cplx expectation(const StateVector& state, const CMatrix& op) {
  check_square(op, state.dim());
  return state.amplitudes().dot(op * state.amplitudes());
}

cplx expectation(const StateVector& state, const CMatrix& op1, const CMatrix& op2) {
  check_square(op1, state.dim());
  check_square(op2, state.dim());
  return state.amplitudes().dot(op1 * (op2 * state.amplitudes()));
}

cplx expectation(const DensityMatrix& state, const CMatrix& op) {
  check_square(op, state.dim());
  return (state.matrix() * op).trace();
}

cplx expectation(const DensityMatrix& state, const CMatrix& op1, const CMatrix& op2) {
  check_square(op1, state.dim());
  check_square(op2, state.dim());
  return (state.matrix() * op1 * op2).trace();
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_error(const CMatrix& m) { return max_abs(m - m.adjoint()); }

HermitianEigen eigendecompose_hermitian(const CMatrix& matrix, double tolerance) {
  if (matrix.rows() != matrix.cols()) fail(ErrorCode::DimensionMismatch, "eigendecomposition needs a square matrix");
  const double herr = hermiticity_error(matrix);
  if (herr > tolerance) {
    fail(ErrorCode::NotHermitian, "matrix departs from Hermiticity by " + format_value(herr));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (matrix + matrix.adjoint()));
  return {es.eigenvalues(), es.eigenvectors()};
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qsn
