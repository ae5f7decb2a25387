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

// Echo sensing: prepare the probe, apply the noise channel, undo the
// preparation and project onto the initial product state. The preparation
// unitary cancels around the projector, so probabilities are computed as
// the overlap <psi|Phi(psi)|psi>; echo_circuit_equivalence checks that.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsn/noise_channels.hpp"
#include "qsn/tensor_core.hpp"

namespace qsn {

enum class EchoBackend { first_order, exact };

std::string_view to_string(EchoBackend backend);
std::optional<EchoBackend> parse_echo_backend(std::string_view name);

// Channel output under the chosen backend: apply_first_order, or the exact
// diagonal decay / Gaussian displacement average.
DensityMatrix apply_echo_channel(const DensityMatrix& rho, const NoiseModel& model, EchoBackend backend);

struct EchoProbabilities {
  double p0 = 1.0;
  double p1 = 0.0;
};

// p1 is computed directly (not as 1 - p0) so it keeps full relative
// precision at weak noise.
EchoProbabilities echo_probabilities(const StateVector& probe, const NoiseModel& model, EchoBackend backend);

// p1(g) for a fixed probe and direction v.
//   first_order: p1 = g^2 Tr[v H]
//   exact, two equal-weight branches: p1 = (1 - exp(-2 g^2 Tr[v H] kappa)) / 2
//   otherwise: tabulated through echo_probabilities and inverted by bisection
class EchoModel {
 public:
  enum class Form { first_order, two_branch, numerical };

  // Throws ValidationError unless the model is factored without background,
  // ZeroTraceVH when Tr[v H] vanishes.
  EchoModel(const StateVector& probe, const NoiseModel& model, EchoBackend backend);

  EchoBackend backend() const { return backend_; }
  Form form() const { return form_; }
  double trace_vH() const { return trace_vH_; }
  double kappa() const { return kappa_; }
  // Largest g the inversion searches; p1 saturates (or reaches one) there.
  double g_max() const { return g_max_; }

  double p1(double g) const;
  double p0(double g) const { return 1.0 - p1(g); }

  // Smallest g with p1(g) >= p, or nullopt when p is beyond the reachable range.
  std::optional<double> invert(double p) const;

  // Fisher information of one shot, (dp1/dg)^2 / (p1 (1 - p1)), with its
  // g -> 0 limit 4 dp1/d(g^2).
  double fisher_per_shot(double g) const;

 private:
  EchoBackend backend_;
  Form form_ = Form::numerical;
  double trace_vH_ = 0.0;
  double kappa_ = 1.0;
  double g_max_ = 0.0;
  std::function<double(double)> numeric_;
};

struct MleOptions {
  bool allow_saturation = false;  // flag and return g_max instead of throwing
  double z = 1.96;                // Wilson interval quantile
};

struct MleResult {
  double g_hat = 0.0;
  double variance = 0.0;  // inverse observed Fisher information of nu shots
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool saturated = false;
};

// Throws SaturatedCounts when the click fraction cannot be inverted and
// saturation is not allowed.
MleResult mle_estimate(std::uint64_t k1, std::uint64_t nu, const EchoModel& model, MleOptions options = {});

// First-order inversion g = sqrt(k1 / (nu Tr[v H])). Throws ZeroTraceVH and
// SaturatedCounts.
MleResult mle_estimate(std::uint64_t k1, std::uint64_t nu, double trace_vH, MleOptions options = {});

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z);

// Per-repetition seed derived from (master seed, repetition index).
std::uint64_t repetition_seed(std::uint64_t master, std::uint64_t index);

// k1 ~ Binomial(nu, p1), deterministic in (seed, nu, p1).
std::uint64_t sample_clicks(double p1, std::uint64_t nu, std::uint64_t seed);

struct EchoRun {
  std::string probe;
  EchoBackend backend = EchoBackend::exact;
  double g_true = 0.0;
  std::uint64_t nu = 0;
  std::uint64_t seed = 0;
  double p1_model = 0.0;
  std::uint64_t k1 = 0;
  MleResult estimate;
};

EchoRun run_echo(const EchoModel& model, std::string probe_label, double g_true, std::uint64_t nu,
                 std::uint64_t seed, MleOptions options = {});

// `repetitions` runs seeded by repetition_seed(master, r), in index order.
std::vector<EchoRun> run_echo_repetitions(const EchoModel& model, const std::string& probe_label, double g_true,
                                          std::uint64_t nu, std::uint64_t master_seed, std::size_t repetitions,
                                          MleOptions options = {}, std::size_t threads = 1);

struct Gate {
  std::string name;
  std::vector<std::size_t> sites;  // one or two sites, first is the major index
  CMatrix matrix;
};

using Circuit = std::vector<Gate>;

Gate hadamard(std::size_t site);
Gate cnot(std::size_t control, std::size_t target);
Gate custom_gate(std::string name, std::vector<std::size_t> sites, CMatrix matrix);

// H on site 0 followed by a CNOT cascade 0->1->...->K-1.
Circuit ghz_preparation_circuit(std::size_t k);

CVector apply_circuit(const Circuit& circuit, const SpaceSpec& space, CVector vec);
CVector apply_circuit_inverse(const Circuit& circuit, const SpaceSpec& space, CVector vec);

struct EquivalenceReport {
  double preparation_error = 0.0;  // |U|0> - e^{i t} psi| at the best phase t
  double direct_p0 = 0.0;
  double circuit_p0 = 0.0;
  double deviation = 0.0;
  bool equal = false;
};

// Compares <psi|Phi(psi)|psi> with <0|U^dag Phi(U|0><0|U^dag) U|0>. Throws
// CircuitProbeMismatch when U|0> differs from the probe by more than `tol`.
EquivalenceReport echo_circuit_equivalence(const Circuit& circuit, const StateVector& probe, const NoiseModel& model,
                                           EchoBackend backend, double tol = 1e-10);

}  // namespace qsn
