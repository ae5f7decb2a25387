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

#include <random>

#include "oracles.hpp"
#include "qsn/cv_gaussian.hpp"
#include "qsn/metrology_engine.hpp"
#include "qsn/noise_channels.hpp"
#include "qsn/probe_library.hpp"
#include "test_util.hpp"

using namespace qsn;

namespace {

DensityMatrix qubit_probe(ProbeFamily family, int k) {
  const SpaceSpec space = SpaceSpec::uniform(static_cast<std::size_t>(k), SiteSpec::qubit());
  return DensityMatrix::from_pure(build_probe({family}, space));
}

DensityMatrix random_mixed(const SpaceSpec& space, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(space.dim());
  CMatrix a = CMatrix::Zero(n, n);
  for (int r = 0; r < 3; ++r) {
    const CVector v = oracle::random_state(n, rng);
    a += v * v.adjoint() * (r + 1.0);
  }
  return DensityMatrix(space, a / a.trace().real());
}

DensityMatrix fock_state(int d, int n, GeneratorKind g = GeneratorKind::momentum) {
  const SpaceSpec space = SpaceSpec::uniform(1, SiteSpec::boson(d, g));
  return DensityMatrix::from_pure(StateVector(space, oracle::basis(d, n)));
}

}  // namespace

TEST_SUITE("noise_channels") {

TEST_CASE("model validation") {
  RMatrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_QSN_ERROR(NoiseModel::from_covariance(bad), ErrorCode::PSDViolation);
  CHECK_QSN_ERROR(NoiseModel::factored(0.1, bad), ErrorCode::PSDViolation);
  RMatrix asym(2, 2);
  asym << 1.0, 0.1, 0.0, 1.0;
  CHECK_QSN_ERROR(NoiseModel::from_covariance(asym), ErrorCode::PSDViolation);
  const NoiseModel m = NoiseModel::factored(0.2, RMatrix::Ones(2, 2));
  CHECK(max_abs(m.covariance() - 0.04 * RMatrix::Ones(2, 2)) < 1e-15);
  CHECK(m.with_strength(0.5).covariance()(0, 1) == doctest::Approx(0.25));
  CHECK_QSN_ERROR(NoiseModel::from_covariance(RMatrix::Identity(2, 2)).with_strength(0.1), ErrorCode::ValidationError);
  CHECK_QSN_ERROR(apply_first_order(qubit_probe(ProbeFamily::qubit_ghz, 3), m), ErrorCode::DimensionMismatch);
}

TEST_CASE("zero covariance is the identity channel") {
  std::mt19937_64 rng(5);
  const SpaceSpec space = SpaceSpec::uniform(2, SiteSpec::qubit());
  const DensityMatrix rho = random_mixed(space, rng);
  const NoiseModel zero = NoiseModel::from_covariance(RMatrix::Zero(2, 2));
  CHECK(max_abs(apply_first_order(rho, zero).state.matrix() - rho.matrix()) == 0.0);
  CHECK(max_abs(apply_exact_diagonal(rho, zero).state.matrix() - rho.matrix()) == 0.0);
  CHECK(max_abs(apply_random_unitary_oracle(rho, zero).state.matrix() - rho.matrix()) < 1e-15);
  const DensityMatrix vac = fock_state(6, 0);
  CHECK(max_abs(apply_displacement_exact(vac, NoiseModel::from_covariance(RMatrix::Zero(1, 1))).state.matrix() -
                vac.matrix()) < 1e-15);
}

TEST_CASE("single qubit dephasing") {
  const DensityMatrix plus = qubit_probe(ProbeFamily::product_plus, 1);
  for (double s : {1e-3, 0.02, 0.3}) {
    RMatrix v(1, 1);
    v << s;
    const NoiseModel m = NoiseModel::from_covariance(v);
    CHECK(apply_first_order(plus, m).state.matrix()(0, 1).real() == doctest::Approx(0.5 * (1 - 2 * s)).epsilon(1e-14));
    CHECK(apply_exact_diagonal(plus, m).state.matrix()(0, 1).real() ==
          doctest::Approx(0.5 * std::exp(-2 * s)).epsilon(1e-14));
  }
}

TEST_CASE("GHZ coherence under correlated noise") {
  for (int k = 2; k <= 5; ++k) {
    const DensityMatrix ghz = qubit_probe(ProbeFamily::qubit_ghz, k);
    const double g = 0.05;
    const NoiseModel m = NoiseModel::factored(g, oracle::all_ones(k));
    const CMatrix out = apply_exact_diagonal(ghz, m).state.matrix();
    const Eigen::Index last = (Eigen::Index{1} << k) - 1;
    CHECK(out(0, last).real() == doctest::Approx(0.5 * std::exp(-2 * g * g * k * k)).epsilon(1e-13));
    const CMatrix ref = oracle::dephase(ghz.matrix(), oracle::qubit_eigs(k), m.covariance());
    CHECK(max_abs(out - ref) < 1e-14);
  }
}

TEST_CASE("first-order fidelity of GHZ K=2") {
  const DensityMatrix ghz = qubit_probe(ProbeFamily::qubit_ghz, 2);
  const StateVector psi = build_probe({ProbeFamily::qubit_ghz}, SpaceSpec::uniform(2, SiteSpec::qubit()));
  for (double g : {1e-3, 3e-3, 1e-2}) {
    const ChannelOutput out = apply_first_order(ghz, NoiseModel::factored(g, oracle::all_ones(2)));
    CHECK(out.info.weak_noise_parameter == doctest::Approx(4 * g * g));
    const double f = fidelity(psi, out.state);
    CHECK(std::abs(f - (1 - 4 * g * g)) <= 20 * std::pow(g, 4));
  }
}

TEST_CASE("weak-noise guard flags large noise") {
  const DensityMatrix ghz = qubit_probe(ProbeFamily::qubit_ghz, 2);
  CHECK_FALSE(apply_first_order(ghz, NoiseModel::factored(0.1, oracle::all_ones(2))).info.weak_noise_warning);
  CHECK(apply_first_order(ghz, NoiseModel::factored(0.2, oracle::all_ones(2))).info.weak_noise_warning);
  CHECK_FALSE(apply_first_order(ghz, NoiseModel::factored(0.2, oracle::all_ones(2)), {0.5}).info.weak_noise_warning);
}

TEST_CASE("channels preserve trace and hermiticity") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const SpaceSpec space(std::vector<SiteSpec>{SiteSpec::qubit(), SiteSpec::boson(3), SiteSpec::fermion()});
    const DensityMatrix rho = random_mixed(space, rng);
    const NoiseModel m = NoiseModel::from_covariance(0.05 * oracle::random_psd(3, rng));
    std::vector<ChannelOutput> outs = {apply_first_order(rho, m), apply_exact_diagonal(rho, m),
                                       apply_random_unitary_oracle(rho, m, GaussHermiteMethod{12}),
                                       apply_random_unitary_oracle(rho, m, MonteCarloMethod{200, 3}),
                                       apply_random_unitary_oracle(rho, m, SignedPairMethod{})};
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const CMatrix& out = outs[i].state.matrix();
      CHECK(std::abs(out.trace() - 1.0) <= 1e-10);
      CHECK(hermiticity_error(out) == 0.0);
      if (i > 0) CHECK(oracle::min_eig(out) >= -1e-9);
    }
  }
}

TEST_CASE("exact diagonal composition") {
  std::mt19937_64 rng(11);
  const SpaceSpec space = SpaceSpec::uniform(3, SiteSpec::boson(3));
  const DensityMatrix rho = random_mixed(space, rng);
  for (int trial = 0; trial < 5; ++trial) {
    const RMatrix v1 = 0.1 * oracle::random_psd(3, rng);
    const RMatrix v2 = 0.1 * oracle::random_psd(3, rng, 1);
    const DensityMatrix once = apply_exact_diagonal(rho, NoiseModel::from_covariance(v1)).state;
    const CMatrix twice = apply_exact_diagonal(once, NoiseModel::from_covariance(v2)).state.matrix();
    const CMatrix joint = apply_exact_diagonal(rho, NoiseModel::from_covariance(v1 + v2)).state.matrix();
    CHECK(max_abs(twice - joint) < 1e-14);
  }
}

TEST_CASE("exact diagonal needs diagonal generators") {
  const DensityMatrix vac = fock_state(4, 0);
  CHECK_QSN_ERROR(apply_exact_diagonal(vac, NoiseModel::from_covariance(RMatrix::Identity(1, 1))),
                  ErrorCode::NonDiagonalGenerator);
  CHECK_QSN_ERROR(apply_displacement_exact(qubit_probe(ProbeFamily::product_plus, 1),
                                           NoiseModel::from_covariance(RMatrix::Identity(1, 1))),
                  ErrorCode::ValidationError);
}

TEST_CASE("first-order positivity defect scales quadratically") {
  for (int k : {2, 3}) {
    const DensityMatrix rho = qubit_probe(ProbeFamily::product_plus, k);
    std::vector<double> eps, defect;
    for (double s : {1e-4, 1e-3, 1e-2}) {
      const ChannelOutput out = apply_first_order(rho, NoiseModel::factored(std::sqrt(s), oracle::all_ones(k)));
      CHECK(out.info.min_eigenvalue < 0.0);
      CHECK(out.info.min_eigenvalue == doctest::Approx(oracle::min_eig(out.state.matrix())).epsilon(1e-6));
      eps.push_back(out.info.weak_noise_parameter);
      defect.push_back(-out.info.min_eigenvalue);
    }
    CHECK(std::abs(oracle::loglog_slope(eps, defect) - 2.0) <= 0.1);
  }
}

TEST_CASE("first-order remainder scales quadratically") {
  std::mt19937_64 rng(3);
  const std::vector<DensityMatrix> probes = {qubit_probe(ProbeFamily::qubit_ghz, 3),
                                             qubit_probe(ProbeFamily::product_plus, 3),
                                             random_mixed(SpaceSpec::uniform(2, SiteSpec::boson(3)), rng)};
  for (const DensityMatrix& rho : probes) {
    const auto k = static_cast<int>(rho.space().num_sites());
    const RMatrix v = oracle::random_psd(k, rng);
    std::vector<double> eps, dist;
    for (double g2 : {1e-5, 1e-4, 1e-3}) {
      const NoiseModel m = NoiseModel::factored(std::sqrt(g2), v);
      const ChannelOutput first = apply_first_order(rho, m);
      const ChannelOutput exact = apply_exact_diagonal(rho, m);
      eps.push_back(first.info.weak_noise_parameter);
      dist.push_back(trace_distance(first.state.matrix(), exact.state.matrix()));
    }
    CHECK(std::abs(oracle::loglog_slope(eps, dist) - 2.0) <= 0.1);
  }
}

TEST_CASE("matched signed-pair law agrees with first order") {
  std::mt19937_64 rng(8);
  const DensityMatrix rho = qubit_probe(ProbeFamily::product_plus, 3);
  const RMatrix v = oracle::random_psd(3, rng);
  std::vector<double> eps, dist;
  for (double g2 : {1e-5, 1e-4, 1e-3}) {
    const NoiseModel m = NoiseModel::factored(std::sqrt(g2), v);
    const ChannelOutput pair = apply_random_unitary_oracle(rho, m, SignedPairMethod{});
    const ChannelOutput first = apply_first_order(rho, m);
    eps.push_back(first.info.weak_noise_parameter);
    dist.push_back(trace_distance(pair.state.matrix(), first.state.matrix()));
    CHECK(dist.back() <= 10 * eps.back() * eps.back());
  }
  CHECK(std::abs(oracle::loglog_slope(eps, dist) - 2.0) <= 0.1);
}

TEST_CASE("Gauss-Hermite oracle matches the exact diagonal channel") {
  std::mt19937_64 rng(21);
  const std::vector<SpaceSpec> spaces = {SpaceSpec::uniform(2, SiteSpec::qubit()),
                                         SpaceSpec::uniform(2, SiteSpec::boson(4)),
                                         SpaceSpec(std::vector<SiteSpec>{SiteSpec::fermion(), SiteSpec::boson(3)})};
  for (const SpaceSpec& space : spaces) {
    const DensityMatrix rho = random_mixed(space, rng);
    const NoiseModel m = NoiseModel::from_covariance(0.2 * oracle::random_psd(2, rng));
    const ChannelOutput gh = apply_random_unitary_oracle(rho, m, GaussHermiteMethod{40});
    CHECK(gh.info.quadrature_points == 40);
    CHECK(std::abs(gh.info.weight_sum - 1.0) <= 1e-12);
    CHECK(max_abs(gh.state.matrix() - apply_exact_diagonal(rho, m).state.matrix()) <= 1e-8);
  }
}

TEST_CASE("Monte Carlo oracle is reproducible and converges") {
  std::mt19937_64 rng(4);
  const DensityMatrix rho = qubit_probe(ProbeFamily::qubit_ghz, 2);
  const NoiseModel m = NoiseModel::from_covariance(0.1 * oracle::random_psd(2, rng));
  const ChannelOutput a = apply_random_unitary_oracle(rho, m, MonteCarloMethod{20000, 9});
  const ChannelOutput b = apply_random_unitary_oracle(rho, m, MonteCarloMethod{20000, 9});
  CHECK(max_abs(a.state.matrix() - b.state.matrix()) == 0.0);
  CHECK(a.info.samples == 20000);
  CHECK(a.info.seed == 9);
  CHECK(max_abs(a.state.matrix() - apply_exact_diagonal(rho, m).state.matrix()) <= 0.02);
}

TEST_CASE("Gauss-Hermite budget") {
  const DensityMatrix rho = qubit_probe(ProbeFamily::product_plus, 5);
  CHECK_QSN_ERROR(apply_random_unitary_oracle(rho, NoiseModel::from_covariance(0.01 * RMatrix::Identity(5, 5))),
                  ErrorCode::BudgetExceeded);
  // rank one needs a single quadrature dimension
  CHECK(apply_random_unitary_oracle(rho, NoiseModel::factored(0.1, oracle::all_ones(5))).info.noise_rank == 1);
}

TEST_CASE("displacement channel on vacuum") {
  for (double s2 : {1e-3, 0.05, 0.3}) {
    const DensityMatrix vac = fock_state(24, 0);
    RMatrix v(1, 1);
    v << s2;
    const ChannelOutput out = apply_displacement_exact(vac, NoiseModel::from_covariance(v));
    CHECK(out.info.leakage <= 1e-8);
    const GaussianState fock = moments_from_fock(out.state);
    const GaussianState gauss = random_displacement(GaussianState::vacuum(1), v);
    CHECK(fock.cov(0, 0) == doctest::Approx(0.5 + s2).epsilon(1e-9));
    CHECK(fock.cov(1, 1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(max_abs(fock.cov - gauss.cov) <= 1e-6);
    CHECK(fock.mean.norm() <= 1e-12);

    // the generic oracle on the same input gives the same state
    const ChannelOutput generic = apply_random_unitary_oracle(vac, NoiseModel::from_covariance(v));
    CHECK(max_abs(generic.state.matrix() - out.state.matrix()) <= 1e-14);
  }
}

TEST_CASE("displacement matrix matches the padded exponential") {
  for (double alpha : {0.1, 0.7, -1.2}) {
    const CMatrix d = displacement_matrix(8, alpha);
    const CMatrix ref = oracle::displacement(8, alpha);
    CHECK(max_abs(d.topLeftCorner(6, 6) - ref.topLeftCorner(6, 6)) <= 1e-10);
  }
}

TEST_CASE("displacement leakage guard") {
  const DensityMatrix top = fock_state(4, 3);
  RMatrix v(1, 1);
  v << 0.5;
  CHECK_QSN_ERROR(apply_displacement_exact(top, NoiseModel::from_covariance(v)), ErrorCode::TruncationLeakage);
}

TEST_CASE("displaced single photon fidelity") {
  const DensityMatrix one = fock_state(24, 1);
  const StateVector psi(one.space(), oracle::basis(24, 1));
  std::vector<double> s2s = {1e-4, 1e-3}, loss;
  for (double s2 : s2s) {
    RMatrix v(1, 1);
    v << s2;
    const double f = fidelity(psi, apply_displacement_exact(one, NoiseModel::from_covariance(v)).state);
    CHECK(1.0 - f == doctest::Approx(1.5 * s2).epsilon(0.01));
  }
}

}
