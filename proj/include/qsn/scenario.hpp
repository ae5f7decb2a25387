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

// Scenario files: TOML documents describing one task. Loading is strict;
// unknown keys are errors, every default the loader fills in is recorded.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsn/echo_protocol.hpp"
#include "qsn/probe_library.hpp"
#include "qsn/tensor_core.hpp"

namespace qsn {

enum class Task { qfi, qfi_multi, echo, sweep_K, rayleigh, nogo_passive, cv_advantage };
enum class NoisePattern { max_correlated, identity, custom };
enum class OracleChannel { exact, quadrature, monte_carlo };

std::string_view to_string(Task task);
std::string_view to_string(NoisePattern pattern);
std::string_view to_string(OracleChannel channel);
std::optional<Task> parse_task(std::string_view name);

struct SpaceConfig {
  SiteSpec site = SiteSpec::qubit();  // template for uniform spaces
  std::size_t sites = 2;
  std::vector<SiteSpec> per_site;      // non-empty overrides the template
  bool auto_truncation = true;         // boson truncation derived from the probe
};

struct NoiseConfig {
  std::vector<double> g{1e-3};
  NoisePattern pattern = NoisePattern::max_correlated;
  RMatrix v;                      // custom pattern only; others expand per K
  std::vector<double> sigma2;     // parallel background strengths (rayleigh)
  std::optional<RMatrix> background;
};

struct MethodConfig {
  EchoBackend backend = EchoBackend::exact;
  bool oracle = true;
  OracleChannel oracle_channel = OracleChannel::exact;
  int quadrature_points = 40;
  std::size_t samples = 100'000;  // monte_carlo oracle
  std::uint64_t shots = 1'000'000;
  std::size_t seeds = 200;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool allow_saturation = true;
};

struct SweepConfig {
  std::size_t k_min = 2;
  std::size_t k_max = 6;
  ProbeFamily entangled = ProbeFamily::qubit_ghz;
  ProbeFamily separable = ProbeFamily::product_plus;
};

struct MultiConfig {
  std::string w = "identity";  // identity, dct or custom
  RMatrix W;
};

struct CvConfig {
  std::size_t modes = 4;
  std::size_t parameters = 2;
  double nbar = 100.0;
  std::vector<double> allocation;  // empty: equal split of K nbar
};

struct NogoConfig {
  std::size_t networks = 20;
  std::size_t layers = 6;
};

struct Scenario {
  std::string name;
  Task task = Task::qfi;
  std::string output;
  bool plots = false;
  SpaceConfig space;
  ProbeSpec probe;
  NoiseConfig noise;
  MethodConfig method;
  SweepConfig sweep;
  MultiConfig multi;
  CvConfig cv;
  NogoConfig nogo;

  std::filesystem::path source;
  std::vector<std::string> defaults_filled;
};

// Throws ParseError (with line and column), ValidationError naming the
// field, and PSDViolation for matrices that fail the PSD check.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view text, std::string_view source_name = "<string>");

// Fully resolved scenario as TOML and JSON; loading the TOML reproduces it.
std::string resolved_toml(const Scenario& s);
std::string resolved_json(const Scenario& s);

// Space for K sites built from the template (or the per-site list).
SpaceSpec build_space(const Scenario& s, std::optional<std::size_t> k = std::nullopt);

// v for K sites: K u u^T with uniform u, the identity, or the custom matrix.
RMatrix build_v(const Scenario& s, std::size_t k);

// Collective directions for qfi_multi: identity, orthonormal DCT or custom.
RMatrix build_w(const Scenario& s, std::size_t k);

std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace qsn
