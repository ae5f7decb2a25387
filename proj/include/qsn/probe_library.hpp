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

#include <optional>
#include <string_view>
#include <vector>

#include "qsn/tensor_core.hpp"

namespace qsn {

enum class ProbeFamily {
  product_plus,
  qubit_ghz,
  product_zeroN,
  boson_ghz,
  fermion_ghz,
  fock_product,
  squeezed_vacuum_product,
  custom,
};

std::string_view to_string(ProbeFamily family);
std::optional<ProbeFamily> parse_probe_family(std::string_view name);

struct ProbeSpec {
  ProbeFamily family = ProbeFamily::qubit_ghz;
  int photons = 1;                  // N for boson_ghz and product_zeroN
  double nbar = 0.0;                // squeezed_vacuum_product
  std::vector<int> occupations;     // fock_product, one per site
  CVector amplitudes;               // custom
};

// Throws ValidationError for incompatible family/space combinations,
// OddFermionCount, TruncationTooSmall and TailMassTooLarge.
StateVector build_probe(const ProbeSpec& spec, const SpaceSpec& space);

// Squeeze parameter r with sinh^2 r = nbar.
double squeeze_parameter(double nbar);

// Fock amplitudes of single-mode squeezed vacuum, anti-squeezed in p,
// for levels 0..d-1 (not renormalized).
RVector squeezed_vacuum_amplitudes(double nbar, int d);

// Smallest truncation whose discarded tail mass is below `tail`.
int squeezed_vacuum_truncation(double nbar, double tail = 1e-10, int max_d = 4096);

// Two-mode mixer exp[theta (e^{i phi} a^dag b - e^{-i phi} a b^dag)] between
// `mode_a` and `mode_b`.
struct BeamSplitter {
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;
  double theta = 0.0;
  double phi = 0.0;
};

using PassiveNetwork = std::vector<BeamSplitter>;

// Fock-space matrix of one beam splitter on a d x d two-mode space.
CMatrix beam_splitter_unitary(int d, double theta, double phi);

struct PassiveResult {
  StateVector state;
  double max_leakage = 0.0;  // largest per-layer mass in sectors not closed under truncation
};

// Throws NonBosonicSite, ValidationError (unequal truncations) and
// TruncationLeakage when a layer sees more than `leakage_tol` mass outside
// the number sectors that fit in the truncation.
PassiveResult apply_passive_network(const StateVector& state, const PassiveNetwork& network,
                                    double leakage_tol = 1e-8);

// Random network of `layers` beam splitters on distinct mode pairs.
template <class Rng>
PassiveNetwork random_passive_network(std::size_t modes, std::size_t layers, Rng& rng);

struct Occupation {
  std::vector<double> per_site;
  double mean = 0.0;
};

Occupation mean_occupation(const StateVector& state);

// Variance of the network-average number operator sum_i n_i / K.
double average_number_variance(const StateVector& state);

}  // namespace qsn

#include <random>

namespace qsn {

template <class Rng>
PassiveNetwork random_passive_network(std::size_t modes, std::size_t layers, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, modes - 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  PassiveNetwork net;
  net.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    BeamSplitter bs;
    bs.mode_a = pick(rng);
    do {
      bs.mode_b = pick(rng);
    } while (bs.mode_b == bs.mode_a);
    bs.theta = angle(rng);
    bs.phi = angle(rng);
    net.push_back(bs);
  }
  return net;
}

}  // namespace qsn
