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

#include "qsn/echo_protocol.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "qsn/error.hpp"
#include "qsn/metrology_engine.hpp"
#include "qsn/parallel.hpp"

namespace qsn {

std::string_view to_string(EchoBackend backend) {
  return backend == EchoBackend::first_order ? "first_order" : "exact";
}

std::optional<EchoBackend> parse_echo_backend(std::string_view name) {
  if (name == "first_order") return EchoBackend::first_order;
  if (name == "exact") return EchoBackend::exact;
  return std::nullopt;
}

DensityMatrix apply_echo_channel(const DensityMatrix& rho, const NoiseModel& model, EchoBackend backend) {
  if (backend == EchoBackend::first_order) return apply_first_order(rho, model).state;
  if (rho.space().all_diagonal_generators()) return apply_exact_diagonal(rho, model).state;
  return apply_displacement_exact(rho, model).state;
}

namespace {

// Support of the probe in the computational basis with weights |psi_a|^2 and
// the generator eigenvalues at each support point.
struct Support {
  std::vector<double> weight;
  RMatrix eigen;  // support size x K
};

Support probe_support(const StateVector& probe) {
  const SpaceSpec& space = probe.space();
  const CVector& amps = probe.amplitudes();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index a = 0; a < amps.size(); ++a) {
    if (std::norm(amps(a)) > 0.0) idx.push_back(a);
  }
  const auto k = static_cast<Eigen::Index>(space.num_sites());
  Support s{{}, RMatrix(static_cast<Eigen::Index>(idx.size()), k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const RVector diag = embed_diagonal(build_generator(space, static_cast<std::size_t>(i)), space);
    for (std::size_t r = 0; r < idx.size(); ++r) s.eigen(static_cast<Eigen::Index>(r), i) = diag(idx[r]);
  }
  for (Eigen::Index a : idx) s.weight.push_back(std::norm(amps(a)));
  return s;
}

double exact_diagonal_p1(const Support& s, const RMatrix& V) {
  const RMatrix g = s.eigen * V * s.eigen.transpose();
  double p1 = 0.0;
  const auto n = static_cast<Eigen::Index>(s.weight.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double x = 0.5 * (g(a, a) + g(b, b)) - g(a, b);
      p1 += 2.0 * s.weight[static_cast<std::size_t>(a)] * s.weight[static_cast<std::size_t>(b)] * -std::expm1(-x);
    }
  }
  return p1;
}

}  // namespace

EchoProbabilities echo_probabilities(const StateVector& probe, const NoiseModel& model, EchoBackend backend) {
  if (model.num_sites() != probe.space().num_sites()) {
    fail(ErrorCode::DimensionMismatch, "noise model and probe have different site counts");
  }
  const RMatrix V = model.total_covariance();
  double p1 = 0.0;
  if (backend == EchoBackend::first_order) {
    p1 = (V * generator_matrix(probe).H).trace();
  } else if (probe.space().all_diagonal_generators()) {
    p1 = exact_diagonal_p1(probe_support(probe), V);
  } else {
    const DensityMatrix out = apply_displacement_exact(DensityMatrix::from_pure(probe), model).state;
    const CVector& psi = probe.amplitudes();
    p1 = 1.0 - psi.dot(out.matrix() * psi).real();
  }
  return {1.0 - p1, p1};
}

EchoModel::EchoModel(const StateVector& probe, const NoiseModel& model, EchoBackend backend) : backend_(backend) {
  if (!model.factor()) fail(ErrorCode::ValidationError, "echo estimation needs a factored noise model g^2 v");
  if (model.background()) fail(ErrorCode::ValidationError, "echo estimation does not model a background covariance");
  const RMatrix v = model.factor()->v;
  trace_vH_ = (v * generator_matrix(probe).H).trace();
  if (!(trace_vH_ > 1e-15)) fail(ErrorCode::ZeroTraceVH, "Tr[v H] = " + format_value(trace_vH_) + " leaves g unidentifiable");

  if (backend == EchoBackend::first_order) {
    form_ = Form::first_order;
    g_max_ = 1.0 / std::sqrt(trace_vH_);
    return;
  }
  if (probe.space().all_diagonal_generators()) {
    const Support s = probe_support(probe);
    if (s.weight.size() == 2 && std::abs(s.weight[0] - s.weight[1]) < 1e-12) {
      const RVector d = (s.eigen.row(0) - s.eigen.row(1)).transpose();
      form_ = Form::two_branch;
      kappa_ = 0.5 * d.dot(v * d) / (2.0 * trace_vH_);
      // p1 within 1e-12 of its plateau 1/2
      g_max_ = std::sqrt(std::log(1e12) / (2.0 * trace_vH_ * kappa_));
      return;
    }
  }
  form_ = Form::numerical;
  g_max_ = 3.0 / std::sqrt(trace_vH_);
  numeric_ = [probe, v, backend](double g) {
    return echo_probabilities(probe, NoiseModel::factored(std::abs(g), v), backend).p1;
  };
}

double EchoModel::p1(double g) const {
  switch (form_) {
    case Form::first_order: return g * g * trace_vH_;
    case Form::two_branch: return -0.5 * std::expm1(-2.0 * g * g * trace_vH_ * kappa_);
    case Form::numerical: return numeric_(g);
  }
  return 0.0;
}

std::optional<double> EchoModel::invert(double p) const {
  if (p <= 0.0) return 0.0;
  switch (form_) {
    case Form::first_order:
      if (p >= 1.0) return std::nullopt;
      return std::sqrt(p / trace_vH_);
    case Form::two_branch:
      if (p >= 0.5) return std::nullopt;
      return std::sqrt(-std::log1p(-2.0 * p) / (2.0 * trace_vH_ * kappa_));
    case Form::numerical: {
      if (p >= p1(g_max_)) return std::nullopt;
      double lo = 0.0;
      double hi = g_max_;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p1(mid) < p ? lo : hi) = mid;
      }
      return hi;
    }
  }
  return std::nullopt;
}

double EchoModel::fisher_per_shot(double g) const {
  g = std::abs(g);
  switch (form_) {
    case Form::first_order: return 4.0 * trace_vH_ / (1.0 - g * g * trace_vH_);
    case Form::two_branch: {
      const double c = 2.0 * trace_vH_ * kappa_;
      if (g == 0.0) return 2.0 * c;
      const double p = -0.5 * std::expm1(-c * g * g);
      const double dp = c * g * std::exp(-c * g * g);
      return dp * dp / (p * (1.0 - p));
    }
    case Form::numerical: {
      const double floor = 1e-4 * g_max_;
      if (g < floor) return 4.0 * p1(floor) / (floor * floor);
      const double h = 1e-4 * g;
      const double p = p1(g);
      const double dp = (p1(g + h) - p1(g - h)) / (2.0 * h);
      return dp * dp / (p * (1.0 - p));
    }
  }
  return 0.0;
}

WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

template <class Invert, class Fisher>
MleResult estimate(std::uint64_t k1, std::uint64_t nu, double g_max, const Invert& invert, const Fisher& fisher,
                   const MleOptions& options) {
  if (nu == 0) fail(ErrorCode::InvalidArgument, "nu must be at least 1");
  if (k1 > nu) fail(ErrorCode::InvalidArgument, "k1 exceeds nu");
  const double p_hat = static_cast<double>(k1) / static_cast<double>(nu);
  const std::optional<double> g = k1 == nu ? std::nullopt : invert(p_hat);
  const WilsonInterval ci = wilson_interval(k1, nu, options.z);
  MleResult out;
  out.ci_lo = invert(ci.lo).value_or(g_max);
  out.ci_hi = invert(ci.hi).value_or(g_max);
  if (!g) {
    if (!options.allow_saturation) {
      fail(ErrorCode::SaturatedCounts, std::to_string(k1) + " of " + std::to_string(nu) + " clicks cannot be inverted");
    }
    out.g_hat = g_max;
    out.saturated = true;
    out.variance = std::numeric_limits<double>::infinity();
    return out;
  }
  out.g_hat = *g;
  out.variance = 1.0 / (static_cast<double>(nu) * fisher(*g));
  return out;
}

}  // namespace

MleResult mle_estimate(std::uint64_t k1, std::uint64_t nu, const EchoModel& model, MleOptions options) {
  return estimate(
      k1, nu, model.g_max(), [&](double p) { return model.invert(p); },
      [&](double g) { return model.fisher_per_shot(g); }, options);
}

MleResult mle_estimate(std::uint64_t k1, std::uint64_t nu, double trace_vH, MleOptions options) {
  if (!(trace_vH > 0.0)) fail(ErrorCode::ZeroTraceVH, "Tr[v H] must be positive");
  auto invert = [&](double p) -> std::optional<double> {
    if (p >= 1.0) return std::nullopt;
    return std::sqrt(std::max(p, 0.0) / trace_vH);
  };
  auto fisher = [&](double g) { return 4.0 * trace_vH / (1.0 - g * g * trace_vH); };
  return estimate(k1, nu, 1.0 / std::sqrt(trace_vH), invert, fisher, options);
}

std::uint64_t repetition_seed(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::uint64_t sample_clicks(double p1, std::uint64_t nu, std::uint64_t seed) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) fail(ErrorCode::ProbabilityOutOfRange, "p1 = " + format_value(p1));
  if (p1 == 0.0 || nu == 0) return 0;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::binomial_distribution<long long> draw(static_cast<long long>(nu), p1);
  return static_cast<std::uint64_t>(draw(rng));
}

EchoRun run_echo(const EchoModel& model, std::string probe_label, double g_true, std::uint64_t nu, std::uint64_t seed,
                 MleOptions options) {
  if (nu == 0) fail(ErrorCode::InvalidArgument, "nu must be at least 1");
  EchoRun run;
  run.probe = std::move(probe_label);
  run.backend = model.backend();
  run.g_true = g_true;
  run.nu = nu;
  run.seed = seed;
  run.p1_model = model.p1(g_true);
  run.k1 = sample_clicks(run.p1_model, nu, seed);
  run.estimate = mle_estimate(run.k1, nu, model, options);
  return run;
}

std::vector<EchoRun> run_echo_repetitions(const EchoModel& model, const std::string& probe_label, double g_true,
                                          std::uint64_t nu, std::uint64_t master_seed, std::size_t repetitions,
                                          MleOptions options, std::size_t threads) {
  std::vector<EchoRun> runs(repetitions);
  parallel_for(repetitions, threads, [&](std::size_t r) {
    runs[r] = run_echo(model, probe_label, g_true, nu, repetition_seed(master_seed, r), options);
  });
  return runs;
}

Gate hadamard(std::size_t site) {
  CMatrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return {"h", {site}, h / std::sqrt(2.0)};
}

Gate cnot(std::size_t control, std::size_t target) {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return {"cnot", {control, target}, m};
}

Gate custom_gate(std::string name, std::vector<std::size_t> sites, CMatrix matrix) {
  if (sites.empty() || sites.size() > 2) fail(ErrorCode::InvalidArgument, "gates act on one or two sites");
  const double err = (matrix.adjoint() * matrix - CMatrix::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff();
  if (matrix.rows() != matrix.cols() || err > 1e-10) fail(ErrorCode::InvalidArgument, "gate " + name + " is not unitary");
  return {std::move(name), std::move(sites), std::move(matrix)};
}

Circuit ghz_preparation_circuit(std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "GHZ circuit needs at least one site");
  Circuit c{hadamard(0)};
  for (std::size_t i = 0; i + 1 < k; ++i) c.push_back(cnot(i, i + 1));
  return c;
}

namespace {

CVector apply_gate(const Gate& gate, const SpaceSpec& space, const CVector& vec, bool inverse) {
  const CMatrix m = inverse ? CMatrix(gate.matrix.adjoint()) : gate.matrix;
  std::size_t expected = 1;
  for (std::size_t s : gate.sites) {
    if (s >= space.num_sites()) fail(ErrorCode::InvalidArgument, "gate " + gate.name + " targets a missing site");
    expected *= static_cast<std::size_t>(space.local_dim(s));
  }
  if (static_cast<std::size_t>(m.rows()) != expected) {
    fail(ErrorCode::DimensionMismatch, "gate " + gate.name + " does not match the local dimensions");
  }
  if (gate.sites.size() == 1) return apply_local({gate.sites[0], m, false}, space, vec);
  return apply_two_site(m, gate.sites[0], gate.sites[1], space, vec);
}

}  // namespace

CVector apply_circuit(const Circuit& circuit, const SpaceSpec& space, CVector vec) {
  for (const Gate& g : circuit) vec = apply_gate(g, space, vec, false);
  return vec;
}

CVector apply_circuit_inverse(const Circuit& circuit, const SpaceSpec& space, CVector vec) {
  for (auto it = circuit.rbegin(); it != circuit.rend(); ++it) vec = apply_gate(*it, space, vec, true);
  return vec;
}

EquivalenceReport echo_circuit_equivalence(const Circuit& circuit, const StateVector& probe, const NoiseModel& model,
                                           EchoBackend backend, double tol) {
  const SpaceSpec& space = probe.space();
  const auto dim = static_cast<Eigen::Index>(space.dim());
  CVector zero = CVector::Zero(dim);
  zero(0) = 1.0;

  EquivalenceReport report;
  const CVector prepared = apply_circuit(circuit, space, zero);
  const cplx overlap = probe.amplitudes().dot(prepared);
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
  report.preparation_error = (prepared - phase * probe.amplitudes()).norm();
  if (report.preparation_error > tol) {
    fail(ErrorCode::CircuitProbeMismatch,
         "circuit output differs from the probe by " + format_value(report.preparation_error));
  }

  const DensityMatrix direct = apply_echo_channel(DensityMatrix::from_pure(probe), model, backend);
  report.direct_p0 = probe.amplitudes().dot(direct.matrix() * probe.amplitudes()).real();

  const DensityMatrix encoded = apply_echo_channel(DensityMatrix::from_pure(StateVector(space, prepared)), model, backend);
  // U^dag rho U, built column by column, then the <0|.|0> element
  CMatrix left(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) left.col(c) = apply_circuit_inverse(circuit, space, encoded.matrix().col(c));
  CMatrix both(dim, dim);
  const CMatrix left_adj = left.adjoint();
  for (Eigen::Index c = 0; c < dim; ++c) both.col(c) = apply_circuit_inverse(circuit, space, left_adj.col(c));
  report.circuit_p0 = both.adjoint()(0, 0).real();

  report.deviation = std::abs(report.direct_p0 - report.circuit_p0);
  report.equal = report.deviation <= tol;
  return report;
}

}  // namespace qsn
