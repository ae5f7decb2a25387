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

#pragma once

// Dense linear algebra over truncated tensor-product Hilbert spaces.
//
// Tensor ordering is site-0-major: the first site is the most significant
// digit of the flat basis index.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qsn/types.hpp"

namespace qsn {

enum class SiteKind { qubit, boson, fermion };
enum class GeneratorKind { pauli_z, number, momentum };

std::string_view to_string(SiteKind kind);
std::string_view to_string(GeneratorKind kind);
std::optional<SiteKind> parse_site_kind(std::string_view name);
std::optional<GeneratorKind> parse_generator_kind(std::string_view name);

// Default generator for a site kind: pauli_z on qubits, number otherwise.
GeneratorKind default_generator(SiteKind kind);

struct SiteSpec {
  SiteKind kind = SiteKind::qubit;
  GeneratorKind generator = GeneratorKind::pauli_z;
  int truncation = 2;  // boson only; qubits and fermions are always 2

  static SiteSpec qubit() { return {SiteKind::qubit, GeneratorKind::pauli_z, 2}; }
  static SiteSpec fermion() { return {SiteKind::fermion, GeneratorKind::number, 2}; }
  static SiteSpec boson(int d, GeneratorKind g = GeneratorKind::number) {
    return {SiteKind::boson, g, d};
  }

  int local_dim() const { return kind == SiteKind::boson ? truncation : 2; }

  bool operator==(const SiteSpec&) const = default;
};

inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;

// Dimension cap, overridable through the QSN_DIM_CAP environment variable.
std::size_t default_dim_cap();

class SpaceSpec {
 public:
  SpaceSpec() = default;

  // Throws IllegalGeneratorForSite, TruncationTooSmall or DimensionCapExceeded.
  explicit SpaceSpec(std::vector<SiteSpec> sites, std::size_t dim_cap = default_dim_cap());

  static SpaceSpec uniform(std::size_t k, SiteSpec site, std::size_t dim_cap = default_dim_cap());

  std::size_t num_sites() const { return sites_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<SiteSpec>& sites() const { return sites_; }
  const SiteSpec& site(std::size_t i) const { return sites_.at(i); }
  int local_dim(std::size_t i) const { return sites_.at(i).local_dim(); }

  // Product of local dimensions of the sites after `i`.
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  // Local basis index of site `i` inside flat index `flat`.
  int digit(std::size_t flat, std::size_t i) const {
    return static_cast<int>((flat / strides_[i]) % static_cast<std::size_t>(sites_[i].local_dim()));
  }

  bool all_diagonal_generators() const;

  bool operator==(const SpaceSpec& other) const { return sites_ == other.sites_; }

 private:
  std::vector<SiteSpec> sites_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 1;
};

class StateVector {
 public:
  // Throws InvalidState unless the amplitudes have unit norm within 1e-12.
  StateVector(SpaceSpec space, CVector amplitudes);

  const SpaceSpec& space() const { return space_; }
  const CVector& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  CMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  SpaceSpec space_;
  CVector amplitudes_;
};

struct DensityCheck {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

class DensityMatrix {
 public:
  // Validated construction: Hermitian within 1e-10, unit trace within 1e-10,
  // minimum eigenvalue >= -1e-9. Throws InvalidState otherwise.
  DensityMatrix(SpaceSpec space, CMatrix matrix);

  // Skips the positivity check. Used for first-order channel outputs whose
  // slightly negative eigenvalues are kept and reported.
  static DensityMatrix unchecked(SpaceSpec space, CMatrix matrix);

  static DensityMatrix from_pure(const StateVector& psi);

  const SpaceSpec& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  DensityCheck check() const;

 private:
  DensityMatrix(SpaceSpec space, CMatrix matrix, bool validate);

  SpaceSpec space_;
  CMatrix matrix_;
};

struct LocalOperator {
  std::size_t site = 0;
  CMatrix matrix;
  bool diagonal = false;
};

// Local generator of `site` as declared in the space.
LocalOperator build_generator(const SpaceSpec& space, std::size_t site);

// Truncated single-mode ladder and quadrature matrices.
// x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)).
CMatrix annihilation(int d);
CMatrix position_quadrature(int d);
CMatrix momentum_quadrature(int d);

// Full-space operator acting as `op` on its site and identity elsewhere.
CMatrix embed(const LocalOperator& op, const SpaceSpec& space);

// Diagonal of an embedded diagonal operator. Throws NonDiagonalGenerator.
RVector embed_diagonal(const LocalOperator& op, const SpaceSpec& space);

// Applies a local operator to a full-space vector without forming the
// embedded matrix.
CVector apply_local(const LocalOperator& op, const SpaceSpec& space, const CVector& vec);

// Applies a d_a*d_b square matrix on the pair (site_a, site_b), ordered
// with site_a as the major index of the pair.
CVector apply_two_site(const CMatrix& op, std::size_t site_a, std::size_t site_b,
                       const SpaceSpec& space, const CVector& vec);

cplx expectation(const StateVector& state, const CMatrix& op);
cplx expectation(const StateVector& state, const CMatrix& op1, const CMatrix& op2);
cplx expectation(const DensityMatrix& state, const CMatrix& op);
cplx expectation(const DensityMatrix& state, const CMatrix& op1, const CMatrix& op2);

struct HermitianEigen {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors;  // columns
};

// Throws NotHermitian when the input departs from Hermiticity by more than
// `tolerance` (max-abs elementwise).
HermitianEigen eigendecompose_hermitian(const CMatrix& matrix, double tolerance = 1e-10);

double max_abs(const CMatrix& m);
double hermiticity_error(const CMatrix& m);

// Sum of absolute eigenvalues of (a - b) / 2.
double trace_distance(const CMatrix& a, const CMatrix& b);

}  // namespace qsn
