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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "qsn/noise_channels.hpp"
#include "qsn/tensor_core.hpp"

namespace qsn {

// K x K centered second moments of the local generators on a pure probe.
struct GeneratorMatrix {
  RMatrix H;
  std::uint64_t fingerprint = 0;
};

// Throws NonCommutingGenerators if the raw moment matrix carries an
// imaginary part above 1e-10 or asymmetry above 1e-8.
GeneratorMatrix generator_matrix(const StateVector& psi);

std::uint64_t state_fingerprint(const CVector& amplitudes);

// 4 Tr[v H].
double qfi_single(const GeneratorMatrix& H, const RMatrix& v);

// Collective fluctuation parametrization of V' = W V W^T:
// xi_I = sqrt(V'_II), C_IJ = V'_IJ / (xi_I xi_J).
struct CollectiveParameters {
  RVector xi;
  RMatrix correlation;
};

CollectiveParameters collective_parameters(const RMatrix& V, const RMatrix& W);

// Diagonal 4 w_I^T H w_I, off-diagonal 8 C_IJ w_I^T H w_J. Rows of W are the
// collective directions. Throws NotOrthogonal.
RMatrix qfi_matrix_multi(const GeneratorMatrix& H, const RMatrix& W, const RMatrix& C);

// sum_I F_II xi_I^2 + sum_{I<J} F_IJ xi_I xi_J. Each unordered pair enters
// once, which is the pairing the off-diagonal factor 8 is defined against.
double multi_quadratic_form(const RMatrix& F, const RVector& xi);

// Rank-one factorization v = Tr[v] u u^T from the dominant eigenvector, sign
// fixed so the largest-magnitude component is positive. Throws NotRankOne.
struct RankOneFactor {
  double trace = 0.0;
  RVector direction;
};

RankOneFactor rank_one_factor(const RMatrix& v, double tolerance = 1e-10);

// (g^2 Tr v / (g^2 Tr v + s^2)) 4 Tr[v H] with s^2 = u^T Sigma u.
double qfi_rayleigh_single(double g, const RMatrix& v, const RMatrix& sigma, const GeneratorMatrix& H);

// (4 xi_I^2 / (sigma_I^2 + xi_I^2)) (W H W^T)_II for each I.
RVector qfi_rayleigh_multi(const RVector& xi, const RVector& sigma, const RMatrix& W, const GeneratorMatrix& H);

struct FidelityResult {
  double value = 0.0;
  double floored_mass = 0.0;  // negative eigenvalue mass set to zero under square roots
};

// Uhlmann fidelity; falls back to the overlap when either argument is pure.
FidelityResult fidelity_detailed(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const StateVector& psi, const DensityMatrix& sigma);

using ChannelFamily = std::function<DensityMatrix(double)>;

struct QfiOracleOptions {
  std::optional<double> delta;  // default max(1e-4, g0/10)
  double eigen_floor = 1e-12;
  double max_step_disagreement = 0.05;
};

struct QfiOracleResult {
  double value = 0.0;       // Richardson-extrapolated derivative
  double coarse = 0.0;      // step delta
  double fine = 0.0;        // step delta/2
  double delta = 0.0;
  double floored_mass = 0.0;
};

// Mixed-state QFI 2 sum |<k|d rho|l>|^2 / (l_k + l_l) with a central
// finite-difference derivative. Throws DegenerateDerivative when the two
// step sizes disagree by more than max_step_disagreement.
QfiOracleResult qfi_oracle(const ChannelFamily& channel, double g0, QfiOracleOptions options = {});

// (dp0/dg)^2 (1/p0 + 1/(1-p0)) with central differences of relative step
// 1e-4. Throws ProbabilityOutOfRange.
double cfi_binary(const std::function<double(double)>& p0_of_g, double g0);

struct QfiReport {
  double analytic = 0.0;
  double oracle = 0.0;
  double deviation = 0.0;
  double g = 0.0;
  double trace_vH = 0.0;
  int truncation = 0;
  std::string method;
};

double relative_deviation(double analytic, double oracle);

}  // namespace qsn
