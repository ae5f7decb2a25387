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
#include "qsn/probe_library.hpp"
#include "test_util.hpp"

using namespace qsn;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Two-mode beam splitter by creation-operator substitution:
// a^dag -> c a^dag - e^{-i phi} s b^dag, b^dag -> c b^dag + e^{i phi} s a^dag.
// Columns are exact for input sectors m + n < d.
CMatrix beam_splitter_oracle(int d, double theta, double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx e = std::polar(1.0, phi);
  const cplx aa = c, ab = -std::conj(e) * s;  // image of a^dag
  const cplx ba = e * s, bb = c;               // image of b^dag
  CMatrix u = CMatrix::Zero(d * d, d * d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; m + n < d; ++n) {
      for (int k = 0; k <= m; ++k) {
        for (int l = 0; l <= n; ++l) {
          const int pa = k + l;
          const int pb = (m - k) + (n - l);
          const cplx coef = std::tgamma(m + 1.0) / (factorial(k) * factorial(m - k)) * std::tgamma(n + 1.0) /
                            (factorial(l) * factorial(n - l)) * std::pow(aa, k) * std::pow(ab, m - k) *
                            std::pow(ba, l) * std::pow(bb, n - l);
          u(pa * d + pb, m * d + n) += coef * std::sqrt(factorial(pa) * factorial(pb) / (factorial(m) * factorial(n)));
        }
      }
    }
  }
  return u;
}

StateVector random_low_sector_state(const SpaceSpec& space, int max_total, std::mt19937_64& rng) {
  CVector v = oracle::random_state(static_cast<Eigen::Index>(space.dim()), rng);
  for (std::size_t k = 0; k < space.dim(); ++k) {
    int total = 0;
    for (std::size_t i = 0; i < space.num_sites(); ++i) total += space.digit(k, i);
    if (total > max_total) v(static_cast<Eigen::Index>(k)) = 0.0;
  }
  return StateVector(space, v.normalized());
}

}  // namespace

TEST_SUITE("probe_library") {

TEST_CASE("qubit families") {
  const SpaceSpec q2 = SpaceSpec::uniform(2, SiteSpec::qubit());
  const StateVector ghz = build_probe({ProbeFamily::qubit_ghz}, q2);
  CVector expect(4);
  expect << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  CHECK((ghz.amplitudes() - expect).norm() < 1e-15);
  for (int k = 1; k <= 6; ++k) {
    const SpaceSpec q = SpaceSpec::uniform(static_cast<std::size_t>(k), SiteSpec::qubit());
    CHECK((build_probe({ProbeFamily::qubit_ghz}, q).amplitudes() - oracle::ghz(k)).norm() < 1e-14);
    CHECK((build_probe({ProbeFamily::product_plus}, q).amplitudes() - oracle::plus_product(k)).norm() < 1e-14);
  }
}

TEST_CASE("boson families") {
  const SpaceSpec b = SpaceSpec::uniform(2, SiteSpec::boson(3));
  ProbeSpec spec{ProbeFamily::boson_ghz, 2};
  const StateVector ghz = build_probe(spec, b);
  CVector expect = CVector::Zero(9);
  expect(0) = expect(8) = 1.0 / std::sqrt(2.0);
  CHECK((ghz.amplitudes() - expect).norm() < 1e-15);

  ProbeSpec zero_n{ProbeFamily::product_zeroN, 2};
  CVector local = CVector::Zero(3);
  local(0) = local(2) = 1.0 / std::sqrt(2.0);
  CHECK((build_probe(zero_n, b).amplitudes() - oracle::kron(local, local)).norm() < 1e-15);

  ProbeSpec fock{ProbeFamily::fock_product};
  fock.occupations = {2, 1};
  CHECK(std::abs(build_probe(fock, b).amplitudes()(7) - 1.0) < 1e-15);

  CHECK_QSN_ERROR(build_probe(spec, SpaceSpec::uniform(2, SiteSpec::boson(2))), ErrorCode::TruncationTooSmall);
  CHECK_QSN_ERROR(build_probe(spec, SpaceSpec::uniform(2, SiteSpec::qubit())), ErrorCode::ValidationError);
  CHECK_QSN_ERROR(build_probe({ProbeFamily::qubit_ghz}, b), ErrorCode::ValidationError);
}

TEST_CASE("fermion GHZ parity") {
  const SpaceSpec f2 = SpaceSpec::uniform(2, SiteSpec::fermion());
  const StateVector ghz = build_probe({ProbeFamily::fermion_ghz}, f2);
  CHECK((ghz.amplitudes() - oracle::ghz(2)).norm() < 1e-15);
  CHECK_QSN_ERROR(build_probe({ProbeFamily::fermion_ghz}, SpaceSpec::uniform(3, SiteSpec::fermion())),
                  ErrorCode::OddFermionCount);
  const Occupation occ = mean_occupation(ghz);
  CHECK(occ.per_site[0] == doctest::Approx(0.5));
  CHECK(occ.per_site[1] == doctest::Approx(0.5));
}

TEST_CASE("mean occupation") {
  const SpaceSpec b = SpaceSpec::uniform(3, SiteSpec::boson(3));
  const Occupation ghz = mean_occupation(build_probe({ProbeFamily::boson_ghz, 2}, b));
  for (double n : ghz.per_site) CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ghz.mean == doctest::Approx(1.0).epsilon(1e-14));
  ProbeSpec vac{ProbeFamily::fock_product};
  vac.occupations = {0, 0, 0};
  CHECK(mean_occupation(build_probe(vac, b)).mean == 0.0);
}

TEST_CASE("squeezed vacuum") {
  const double nbar = 1.0;
  const int d = squeezed_vacuum_truncation(nbar);
  const RVector c = squeezed_vacuum_amplitudes(nbar, d);
  CHECK(1.0 - c.squaredNorm() < 1e-10);
  CHECK(1.0 - squeezed_vacuum_amplitudes(nbar, d - 1).squaredNorm() >= 1e-10);
  for (Eigen::Index k = 1; k < c.size(); k += 2) CHECK(c(k) == 0.0);

  const SpaceSpec space = SpaceSpec::uniform(1, SiteSpec::boson(d, GeneratorKind::momentum));
  ProbeSpec spec{ProbeFamily::squeezed_vacuum_product};
  spec.nbar = nbar;
  const StateVector psi = build_probe(spec, space);
  CHECK(std::abs(psi.amplitudes().norm() - 1.0) < 1e-12);
  const CMatrix p = oracle::momentum(d);
  const CMatrix x = oracle::position(d);
  const double var_p = (psi.amplitudes().adjoint() * p * p * psi.amplitudes())(0).real();
  const double var_x = (psi.amplitudes().adjoint() * x * x * psi.amplitudes())(0).real();
  CHECK(var_p == doctest::Approx(oracle::var_p_squeezed(nbar)).epsilon(1e-8));
  CHECK(var_p == doctest::Approx(2.9142).epsilon(1e-4));
  CHECK(var_x == doctest::Approx(1.0 / (4.0 * oracle::var_p_squeezed(nbar))).epsilon(1e-7));
  CHECK(mean_occupation(psi).mean == doctest::Approx(nbar).epsilon(1e-8));

  CHECK_QSN_ERROR(build_probe(spec, SpaceSpec::uniform(1, SiteSpec::boson(8))), ErrorCode::TailMassTooLarge);
  CHECK_QSN_ERROR(squeezed_vacuum_truncation(1e6, 1e-10, 64), ErrorCode::TailMassTooLarge);
}

TEST_CASE("every probe is normalized") {
  const std::vector<std::pair<ProbeSpec, SpaceSpec>> cases = {
      {{ProbeFamily::product_plus}, SpaceSpec::uniform(5, SiteSpec::qubit())},
      {{ProbeFamily::qubit_ghz}, SpaceSpec::uniform(7, SiteSpec::qubit())},
      {{ProbeFamily::boson_ghz, 3}, SpaceSpec::uniform(3, SiteSpec::boson(4))},
      {{ProbeFamily::product_zeroN, 2}, SpaceSpec::uniform(3, SiteSpec::boson(5))},
      {{ProbeFamily::fermion_ghz}, SpaceSpec::uniform(4, SiteSpec::fermion())},
      {{ProbeFamily::squeezed_vacuum_product, 1, 0.5}, SpaceSpec::uniform(2, SiteSpec::boson(squeezed_vacuum_truncation(0.5)))},
  };
  for (const auto& [spec, space] : cases) {
    CHECK(std::abs(build_probe(spec, space).amplitudes().norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("beam splitter matches the substitution oracle") {
  for (int d : {2, 3, 5}) {
    for (auto [theta, phi] : {std::pair{0.3, 0.0}, std::pair{1.1, 0.7}, std::pair{M_PI / 4, -2.0}}) {
      const CMatrix u = beam_splitter_unitary(d, theta, phi);
      const CMatrix ref = beam_splitter_oracle(d, theta, phi);
      for (int m = 0; m < d; ++m) {
        for (int n = 0; m + n < d; ++n) CHECK((u.col(m * d + n) - ref.col(m * d + n)).norm() < 1e-12);
      }
      CHECK(max_abs(u.adjoint() * u - CMatrix::Identity(d * d, d * d)) < 1e-12);
    }
  }
}

TEST_CASE("50:50 beam splitter on one photon") {
  const SpaceSpec b = SpaceSpec::uniform(2, SiteSpec::boson(3));
  ProbeSpec one{ProbeFamily::fock_product};
  one.occupations = {1, 0};
  const double phi = 0.4;
  const PassiveResult r = apply_passive_network(build_probe(one, b), {{0, 1, M_PI / 4, phi}});
  CVector expect = CVector::Zero(9);
  expect(3) = 1.0 / std::sqrt(2.0);                           // |10>
  expect(1) = -std::polar(1.0, -phi) / std::sqrt(2.0);        // |01>
  CHECK((r.state.amplitudes() - expect).norm() < 1e-12);
}

TEST_CASE("identity network and vacuum invariance") {
  std::mt19937_64 rng(9);
  const SpaceSpec b = SpaceSpec::uniform(3, SiteSpec::boson(4));
  const StateVector psi = random_low_sector_state(b, 3, rng);
  CHECK((apply_passive_network(psi, {}).state.amplitudes() - psi.amplitudes()).norm() == 0.0);
  ProbeSpec vac{ProbeFamily::fock_product};
  vac.occupations = {0, 0, 0};
  const StateVector vacuum = build_probe(vac, b);
  const PassiveNetwork net = random_passive_network(3, 10, rng);
  CHECK((apply_passive_network(vacuum, net).state.amplitudes() - vacuum.amplitudes()).norm() < 1e-12);
}

TEST_CASE("passive networks conserve Var(n_avg)") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const SpaceSpec b = SpaceSpec::uniform(3, SiteSpec::boson(5));
    const StateVector psi = random_low_sector_state(b, 4, rng);
    const PassiveNetwork net = random_passive_network(3, 8, rng);
    const PassiveResult r = apply_passive_network(psi, net);
    CHECK(std::abs(average_number_variance(r.state) - average_number_variance(psi)) <= 1e-10);
    CHECK(r.max_leakage < 1e-20);
  }
}

TEST_CASE("passive network guards") {
  const SpaceSpec b = SpaceSpec::uniform(2, SiteSpec::boson(3));
  ProbeSpec full{ProbeFamily::fock_product};
  full.occupations = {2, 1};
  CHECK_QSN_ERROR(apply_passive_network(build_probe(full, b), {{0, 1, 0.3, 0.0}}), ErrorCode::TruncationLeakage);
  const SpaceSpec q = SpaceSpec::uniform(2, SiteSpec::qubit());
  CHECK_QSN_ERROR(apply_passive_network(build_probe({ProbeFamily::qubit_ghz}, q), {{0, 1, 0.3, 0.0}}),
                  ErrorCode::NonBosonicSite);
}

}
