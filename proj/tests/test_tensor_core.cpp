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

#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "qsn/tensor_core.hpp"
#include "test_util.hpp"

using namespace qsn;

TEST_SUITE("tensor_core") {

TEST_CASE("site validation") {
  CHECK_QSN_ERROR(SpaceSpec({SiteSpec{SiteKind::qubit, GeneratorKind::momentum, 2}}), ErrorCode::IllegalGeneratorForSite);
  CHECK_QSN_ERROR(SpaceSpec({SiteSpec{SiteKind::qubit, GeneratorKind::number, 2}}), ErrorCode::IllegalGeneratorForSite);
  CHECK_QSN_ERROR(SpaceSpec({SiteSpec{SiteKind::boson, GeneratorKind::pauli_z, 3}}), ErrorCode::IllegalGeneratorForSite);
  CHECK_QSN_ERROR(SpaceSpec({SiteSpec{SiteKind::fermion, GeneratorKind::momentum, 2}}), ErrorCode::IllegalGeneratorForSite);
  CHECK_QSN_ERROR(SpaceSpec({SiteSpec::boson(1)}), ErrorCode::TruncationTooSmall);
  CHECK_NOTHROW(SpaceSpec({SiteSpec::boson(2, GeneratorKind::momentum), SiteSpec::fermion(), SiteSpec::qubit()}));
}

TEST_CASE("dimension cap") {
  CHECK(SpaceSpec::uniform(20, SiteSpec::qubit()).dim() == (std::size_t{1} << 20));
  CHECK_QSN_ERROR(SpaceSpec::uniform(21, SiteSpec::qubit()), ErrorCode::DimensionCapExceeded);
  CHECK_QSN_ERROR(SpaceSpec::uniform(3, SiteSpec::boson(10), 999), ErrorCode::DimensionCapExceeded);
  CHECK(SpaceSpec::uniform(3, SiteSpec::boson(10), 1000).dim() == 1000);
}

TEST_CASE("dimension cap from environment") {
  ::setenv("QSN_DIM_CAP", "64", 1);
  CHECK(default_dim_cap() == 64);
  CHECK_QSN_ERROR(SpaceSpec::uniform(7, SiteSpec::qubit()), ErrorCode::DimensionCapExceeded);
  ::unsetenv("QSN_DIM_CAP");
  CHECK(default_dim_cap() == kDefaultDimCap);
}

TEST_CASE("state and density validation") {
  const SpaceSpec q1 = SpaceSpec::uniform(1, SiteSpec::qubit());
  CVector bad(2);
  bad << 1.0, 1e-5;
  CHECK_QSN_ERROR(StateVector(q1, bad), ErrorCode::InvalidState);
  CHECK_QSN_ERROR(StateVector(q1, CVector::Ones(3).normalized()), ErrorCode::DimensionMismatch);

  CMatrix rho(2, 2);
  rho << 0.5, 0.1, 0.1, 0.5;
  CHECK_NOTHROW(DensityMatrix(q1, rho));
  CMatrix neg(2, 2);
  neg << 1.1, 0.0, 0.0, -0.1;
  CHECK_QSN_ERROR(DensityMatrix(q1, neg), ErrorCode::InvalidState);
  CMatrix nonherm = rho;
  nonherm(0, 1) = 0.2;
  CHECK_QSN_ERROR(DensityMatrix(q1, nonherm), ErrorCode::InvalidState);
  CHECK_QSN_ERROR(DensityMatrix(q1, 2.0 * rho), ErrorCode::InvalidState);
  CHECK(DensityMatrix::unchecked(q1, neg).check().min_eigenvalue == doctest::Approx(-0.1));
}

TEST_CASE("build_generator examples") {
  const SpaceSpec q = SpaceSpec::uniform(1, SiteSpec::qubit());
  const LocalOperator z = build_generator(q, 0);
  CHECK(z.diagonal);
  CHECK(max_abs(z.matrix - oracle::pauli_z()) == 0.0);

  const SpaceSpec b3 = SpaceSpec::uniform(1, SiteSpec::boson(3));
  const LocalOperator n = build_generator(b3, 0);
  CHECK(n.diagonal);
  CHECK(max_abs(n.matrix - oracle::number(3)) == 0.0);

  const SpaceSpec m2 = SpaceSpec::uniform(1, SiteSpec::boson(2, GeneratorKind::momentum));
  const LocalOperator p = build_generator(m2, 0);
  CHECK_FALSE(p.diagonal);
  // [[0, i/sqrt2], [-i/sqrt2, 0]] up to overall sign
  CHECK(p.matrix(0, 0) == cplx(0.0));
  CHECK(std::abs(std::abs(p.matrix(0, 1).imag()) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(p.matrix(0, 1) + p.matrix(1, 0)) < 1e-15);
  CHECK(max_abs(p.matrix - oracle::momentum(2)) < 1e-15);

  CHECK_QSN_ERROR(build_generator(q, 1), ErrorCode::DimensionMismatch);
}

TEST_CASE("embed examples") {
  const SpaceSpec q1 = SpaceSpec::uniform(1, SiteSpec::qubit());
  CHECK(max_abs(embed(build_generator(q1, 0), q1) - oracle::pauli_z()) == 0.0);

  const SpaceSpec q2 = SpaceSpec::uniform(2, SiteSpec::qubit());
  const CMatrix z0 = embed(build_generator(q2, 0), q2);
  const CMatrix z1 = embed(build_generator(q2, 1), q2);
  RVector d0(4), d1(4);
  d0 << 1, 1, -1, -1;
  d1 << 1, -1, 1, -1;
  CHECK(max_abs(z0 - CMatrix(d0.cast<cplx>().asDiagonal())) == 0.0);
  CHECK(max_abs(z1 - CMatrix(d1.cast<cplx>().asDiagonal())) == 0.0);
  CHECK((embed_diagonal(build_generator(q2, 1), q2) - d1).cwiseAbs().maxCoeff() == 0.0);

  CHECK_QSN_ERROR(embed(LocalOperator{0, CMatrix::Identity(3, 3), false}, q2), ErrorCode::DimensionMismatch);
}

TEST_CASE("embed matches the Kronecker oracle and preserves spectra") {
  std::mt19937_64 rng(11);
  const SpaceSpec space({SiteSpec::qubit(), SiteSpec::boson(3), SiteSpec::fermion()});
  const std::vector<int> dims{2, 3, 2};
  for (std::size_t site = 0; site < 3; ++site) {
    const int d = dims[site];
    CMatrix a = CMatrix::Zero(d, d);
    std::normal_distribution<double> n;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
    }
    const CMatrix h = a + a.adjoint();
    const CMatrix full = embed({site, h, false}, space);
    CHECK(max_abs(full - oracle::embed(h, site, dims)) < 1e-14);
    CHECK(hermiticity_error(full) == 0.0);

    const RVector local = Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues();
    const RVector global = eigendecompose_hermitian(full).eigenvalues;
    const auto mult = static_cast<Eigen::Index>(space.dim()) / d;
    for (Eigen::Index i = 0; i < global.size(); ++i) CHECK(std::abs(global(i) - local(i / mult)) < 1e-12);
  }
}

TEST_CASE("apply_local and apply_two_site agree with dense products") {
  std::mt19937_64 rng(5);
  const SpaceSpec space({SiteSpec::boson(3), SiteSpec::qubit(), SiteSpec::boson(2)});
  const std::vector<int> dims{3, 2, 2};
  const CVector psi = oracle::random_state(static_cast<Eigen::Index>(space.dim()), rng);
  for (std::size_t site = 0; site < 3; ++site) {
    const CMatrix op = oracle::random_state(dims[site] * dims[site], rng).reshaped(dims[site], dims[site]);
    CHECK((apply_local({site, op, false}, space, psi) - oracle::embed(op, site, dims) * psi).norm() < 1e-13);
  }
  // pair (0, 2) with site 0 as the major index
  const CMatrix pair = oracle::random_state(36, rng).reshaped(6, 6);
  CMatrix full = CMatrix::Zero(12, 12);
  for (Eigen::Index r = 0; r < 12; ++r) {
    for (Eigen::Index c = 0; c < 12; ++c) {
      const Eigen::Index a_r = r / 4, q_r = (r / 2) % 2, b_r = r % 2;
      const Eigen::Index a_c = c / 4, q_c = (c / 2) % 2, b_c = c % 2;
      if (q_r == q_c) full(r, c) = pair(a_r * 2 + b_r, a_c * 2 + b_c);
    }
  }
  CHECK((apply_two_site(pair, 0, 2, space, psi) - full * psi).norm() < 1e-13);
}

TEST_CASE("expectation examples") {
  const SpaceSpec q1 = SpaceSpec::uniform(1, SiteSpec::qubit());
  const StateVector plus(q1, oracle::plus_product(1));
  CHECK(std::abs(expectation(plus, embed(build_generator(q1, 0), q1))) < 1e-15);

  const SpaceSpec q2 = SpaceSpec::uniform(2, SiteSpec::qubit());
  const StateVector ghz(q2, oracle::ghz(2));
  const CMatrix z0 = embed(build_generator(q2, 0), q2);
  const CMatrix z1 = embed(build_generator(q2, 1), q2);
  CHECK(std::abs(expectation(ghz, z0, z1) - 1.0) < 1e-15);
  CHECK(std::abs(expectation(DensityMatrix::from_pure(ghz), z0, z1) - 1.0) < 1e-15);

  const SpaceSpec b4 = SpaceSpec::uniform(1, SiteSpec::boson(4));
  const StateVector fock2(b4, oracle::basis(4, 2));
  CHECK(std::abs(expectation(fock2, embed(build_generator(b4, 0), b4)) - 2.0) < 1e-15);
  CHECK_QSN_ERROR(expectation(fock2, CMatrix::Identity(3, 3)), ErrorCode::DimensionMismatch);
}

TEST_CASE("Hermitian expectations are real and commuting moments symmetric") {
  std::mt19937_64 rng(23);
  const SpaceSpec space({SiteSpec::boson(3), SiteSpec::boson(3, GeneratorKind::momentum), SiteSpec::qubit()});
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector psi(space, oracle::random_state(static_cast<Eigen::Index>(space.dim()), rng));
    std::vector<CMatrix> ops;
    for (std::size_t i = 0; i < 3; ++i) ops.push_back(embed(build_generator(space, i), space));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(expectation(psi, ops[i]).imag()) < 1e-10);
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        const cplx ij = expectation(psi, ops[i], ops[j]);
        const cplx ji = expectation(psi, ops[j], ops[i]);
        CHECK(std::abs(ij - ji) < 1e-12);
      }
    }
  }
}

TEST_CASE("eigendecompose_hermitian") {
  CMatrix z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  CMatrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  for (const CMatrix& m : {z, x}) {
    const HermitianEigen e = eigendecompose_hermitian(m);
    CHECK(e.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = oracle::random_state(64, rng).reshaped(8, 8);
    const CMatrix h = a + a.adjoint();
    const HermitianEigen e = eigendecompose_hermitian(h);
    const CMatrix rebuilt = e.eigenvectors * e.eigenvalues.cast<cplx>().asDiagonal() * e.eigenvectors.adjoint();
    CHECK(max_abs(rebuilt - h) <= 1e-10);
    CHECK(max_abs(e.eigenvectors.adjoint() * e.eigenvectors - CMatrix::Identity(8, 8)) <= 1e-10);
    for (Eigen::Index i = 1; i < 8; ++i) CHECK(e.eigenvalues(i - 1) <= e.eigenvalues(i));
  }
  CMatrix bad = x;
  bad(0, 1) = 2.0;
  CHECK_QSN_ERROR(eigendecompose_hermitian(bad), ErrorCode::NotHermitian);
}

TEST_CASE("trace distance") {
  const SpaceSpec q1 = SpaceSpec::uniform(1, SiteSpec::qubit());
  const CMatrix a = oracle::basis(2, 0) * oracle::basis(2, 0).adjoint();
  const CMatrix b = oracle::basis(2, 1) * oracle::basis(2, 1).adjoint();
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == 0.0);
}

}
