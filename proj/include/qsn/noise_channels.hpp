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

// Correlated noise channels on dense density matrices.
//
// Three routes are provided: the weak-noise (first-order) expansion, the
// closed-form Gaussian average for diagonal generators, and a numerical
// average over random unitaries (quadrature or sampling). The generators are
// those declared by the state's SpaceSpec, one per site.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "qsn/tensor_core.hpp"

namespace qsn {

// Smallest eigenvalue of a real symmetric matrix.
double min_eigenvalue_symmetric(const RMatrix& m);

// Throws PSDViolation (naming the offending eigenvalue) unless `m` is
// square, symmetric within 1e-12 and has no eigenvalue below -tol.
void require_symmetric_psd(const RMatrix& m, std::string_view name, double tol = 1e-10);

class NoiseModel {
 public:
  struct Factor {
    double g = 0.0;
    RMatrix v;
  };

  static NoiseModel from_covariance(RMatrix V);
  static NoiseModel factored(double g, RMatrix v);

  NoiseModel with_background(RMatrix sigma) const;
  // Same v and background with a new strength. Factored models only.
  NoiseModel with_strength(double g) const;

  const RMatrix& covariance() const { return V_; }
  const std::optional<Factor>& factor() const { return factor_; }
  const std::optional<RMatrix>& background() const { return background_; }
  // V plus the background, the covariance the channels actually apply.
  RMatrix total_covariance() const;
  std::size_t num_sites() const { return static_cast<std::size_t>(V_.rows()); }

 private:
  NoiseModel() = default;

  RMatrix V_;
  std::optional<Factor> factor_;
  std::optional<RMatrix> background_;
};

struct ChannelInfo {
  std::string method;
  double weak_noise_parameter = 0.0;  // Tr[V H] on the input
  bool weak_noise_warning = false;
  double min_eigenvalue = 0.0;
  int quadrature_points = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;
  int noise_rank = 0;
  double weight_sum = 1.0;
  double leakage = 0.0;
};

struct ChannelOutput {
  DensityMatrix state;
  ChannelInfo info;
};

// Centered generator covariance on a mixed state (real part).
RMatrix generator_covariance(const DensityMatrix& rho);

struct FirstOrderOptions {
  double weak_noise_guard = 0.1;
};

// rho + sum_ij V_ij (h_i rho h_j - {h_i h_j, rho}/2). Negative eigenvalues
// are kept and reported through info.min_eigenvalue.
ChannelOutput apply_first_order(const DensityMatrix& rho, const NoiseModel& model, FirstOrderOptions options = {});

// Elementwise exp(-d^T V d / 2) decay in the joint eigenbasis. Throws
// NonDiagonalGenerator for momentum generators.
ChannelOutput apply_exact_diagonal(const DensityMatrix& rho, const NoiseModel& model);

struct GaussHermiteMethod {
  int points = 40;
  int max_dims = 4;
  std::size_t max_evaluations = 4'000'000;
};

struct MonteCarloMethod {
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
};

// Two-point law +/- sqrt(r) b_k along each of the r factor columns of V,
// matching the covariance but not the fourth moments.
struct SignedPairMethod {};

using OracleMethod = std::variant<GaussHermiteMethod, MonteCarloMethod, SignedPairMethod>;

// Numerical average of U_l rho U_l^dag over l ~ N(0, V). Momentum sites use
// truncated displacement operators; the lost trace is reported as leakage
// and the output is renormalized.
ChannelOutput apply_random_unitary_oracle(const DensityMatrix& rho, const NoiseModel& model,
                                          const OracleMethod& method = GaussHermiteMethod{});

// Gaussian random displacements for momentum generators. Throws
// TruncationLeakage when more than `leakage_tol` trace leaves the truncation.
ChannelOutput apply_displacement_exact(const DensityMatrix& rho, const NoiseModel& model, int points = 40,
                                       double leakage_tol = 1e-8);

// <m|D(alpha)|n> for real alpha on levels 0..d-1.
CMatrix displacement_matrix(int d, double alpha);

}  // namespace qsn
