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

// Gaussian (mean + covariance) backend for bosonic modes.
//
// Phase-space vectors are site-major: (x_1, p_1, x_2, p_2, ...). The
// covariance is the symmetrized second moment, vacuum cov = I/2.

#include <cstddef>
#include <optional>
#include <vector>

#include "qsn/probe_library.hpp"
#include "qsn/tensor_core.hpp"

namespace qsn {

enum class Quadrature { x, p };

struct GaussianState {
  RVector mean;
  RMatrix cov;

  static GaussianState vacuum(std::size_t modes);
  std::size_t modes() const { return static_cast<std::size_t>(mean.size() / 2); }
};

RMatrix symplectic_form(std::size_t modes);

// Smallest eigenvalue of cov + i Omega / 2.
double uncertainty_margin(const GaussianState& state);

// Throws InvalidState on shape errors or uncertainty margin below -1e-9.
void require_physical(const GaussianState& state);

// Total occupation (Tr cov - K)/2 + |mean|^2/2.
double total_occupation(const GaussianState& state);

// x -> e^{-r} x, p -> e^{r} p on one mode.
GaussianState squeeze(const GaussianState& state, std::size_t site, double r);

// Phase-space matrix of a beam-splitter network, matching the Fock-space
// action of beam_splitter_unitary on every layer.
RMatrix passive_symplectic(std::size_t modes, const PassiveNetwork& network);

GaussianState passive_mix(const GaussianState& state, const PassiveNetwork& network);

// Throws NotSymplectic unless S is orthogonal and symplectic within 1e-10.
GaussianState passive_mix(const GaussianState& state, const RMatrix& S);

// Real orthogonal mode change applied identically to x and p. Row I of W
// becomes the collective mode carried by local mode I.
RMatrix collective_mode_symplectic(const RMatrix& W);

// Gaussian displacements generated by the momenta: adds V to the x block.
GaussianState random_displacement(const GaussianState& state, const RMatrix& V);

// Variance of sum_i w_i q_i. Throws InvalidArgument unless |w| = 1 within 1e-10.
double collective_variance(const GaussianState& state, const RVector& w, Quadrature quadrature);

// cov(p_i, p_j), the generator matrix for momentum generators.
RMatrix momentum_generator_matrix(const GaussianState& state);

// First and second quadrature moments of a Fock-truncated state on boson
// sites. Throws NonBosonicSite.
GaussianState moments_from_fock(const DensityMatrix& rho);

// Orthonormal DCT-II matrix; row 0 is the uniform vector.
RMatrix dct_orthonormal(std::size_t k);

struct AdvantageRow {
  std::size_t parameter = 0;
  double f_ent = 0.0;
  double f_sep = 0.0;
  double ratio = 0.0;
  double sep_bound = 0.0;  // 8 (nbar + 1/2)
  double ent_bound = 0.0;  // 8 (q_I + 1/2) with q_I the quanta given to mode I
  double ideal_ratio = 0.0;  // K / n
};

struct AdvantageReport {
  std::size_t modes = 0;
  std::size_t parameters = 0;
  double nbar = 0.0;
  RMatrix W;
  std::vector<double> allocation;
  std::vector<AdvantageRow> rows;
};

// Entangled strategy: the first n collective modes (rows of W) squeezed with
// allocation[I] quanta, equal K nbar / n by default. Separable strategy:
// every local mode squeezed with nbar quanta. Both QFIs use the diagonal
// 4 w_I^T H w_I with H = cov(p_i, p_j). Throws InvalidArgument.
AdvantageReport multiparam_advantage_report(std::size_t k, std::size_t n, double nbar,
                                            std::vector<double> allocation = {},
                                            std::optional<RMatrix> W = std::nullopt);

}  // namespace qsn
