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

#include "qsn/noise_channels.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qsn/error.hpp"
#include "qsn/quadrature.hpp"

namespace qsn {

double min_eigenvalue_symmetric(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_symmetric_psd(const RMatrix& m, std::string_view name, double tol) {
  if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, std::string(name) + " must be square");
  const double asym = m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    fail(ErrorCode::PSDViolation, std::string(name) + " is not symmetric (max asymmetry " + format_value(asym) + ")");
  }
  const double ev = min_eigenvalue_symmetric(m);
  if (ev < -tol) {
    std::ostringstream os;
    os.precision(17);
    os << name << " is not positive semidefinite: eigenvalue " << ev;
    fail(ErrorCode::PSDViolation, os.str());
  }
}

NoiseModel NoiseModel::from_covariance(RMatrix V) {
  require_symmetric_psd(V, "V");
  NoiseModel m;
  m.V_ = std::move(V);
  return m;
}

NoiseModel NoiseModel::factored(double g, RMatrix v) {
  if (!(g >= 0.0)) fail(ErrorCode::ValidationError, "noise strength g must be >= 0");
  require_symmetric_psd(v, "v");
  NoiseModel m;
  m.V_ = g * g * v;
  m.factor_ = Factor{g, std::move(v)};
  return m;
}

NoiseModel NoiseModel::with_background(RMatrix sigma) const {
  require_symmetric_psd(sigma, "background");
  if (sigma.rows() != V_.rows()) fail(ErrorCode::DimensionMismatch, "background size differs from V");
  NoiseModel m = *this;
  m.background_ = std::move(sigma);
  return m;
}

NoiseModel NoiseModel::with_strength(double g) const {
  if (!factor_) fail(ErrorCode::ValidationError, "with_strength needs a factored noise model");
  NoiseModel m = factored(g, factor_->v);
  m.background_ = background_;
  return m;
}

RMatrix NoiseModel::total_covariance() const { return background_ ? RMatrix(V_ + *background_) : V_; }

namespace {

// Rounding leaves ~1e-17 asymmetry; averaging with the adjoint removes it exactly.
CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

void check_model(const DensityMatrix& rho, const NoiseModel& model) {
  if (model.num_sites() != rho.space().num_sites()) {
    fail(ErrorCode::DimensionMismatch, "noise model covers " + std::to_string(model.num_sites()) +
                                           " sites, state has " + std::to_string(rho.space().num_sites()));
  }
}

// Columns are the embedded diagonals of the local generators.
RMatrix generator_diagonals(const SpaceSpec& space) {
  RMatrix e(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.num_sites()));
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    e.col(static_cast<Eigen::Index>(i)) = embed_diagonal(build_generator(space, i), space);
  }
  return e;
}

// X_ab = d_ab^T V d_ab / 2 with d_ab = e(a) - e(b).
RMatrix decay_exponents(const RMatrix& diagonals, const RMatrix& V) {
  const RMatrix g = diagonals * V * diagonals.transpose();
  const RVector gd = g.diagonal();
  return 0.5 * (gd.replicate(1, gd.size()) + gd.transpose().replicate(gd.size(), 1)) - g;
}

ChannelInfo base_info(const DensityMatrix& rho, const NoiseModel& model, std::string method) {
  ChannelInfo info;
  info.method = std::move(method);
  info.weak_noise_parameter = (model.total_covariance() * generator_covariance(rho)).trace();
  return info;
}

}  // namespace

RMatrix generator_covariance(const DensityMatrix& rho) {
  const SpaceSpec& space = rho.space();
  const auto k = static_cast<Eigen::Index>(space.num_sites());
  RMatrix h(k, k);
  if (space.all_diagonal_generators()) {
    const RMatrix e = generator_diagonals(space);
    const RVector p = rho.matrix().diagonal().real();
    const RVector mean = e.transpose() * p;
    h = e.transpose() * p.asDiagonal() * e - mean * mean.transpose();
    return h;
  }
  std::vector<CMatrix> ops;
  for (Eigen::Index i = 0; i < k; ++i) ops.push_back(embed(build_generator(space, static_cast<std::size_t>(i)), space));
  RVector mean(k);
  for (Eigen::Index i = 0; i < k; ++i) mean(i) = expectation(rho, ops[static_cast<std::size_t>(i)]).real();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      h(i, j) = expectation(rho, ops[static_cast<std::size_t>(i)], ops[static_cast<std::size_t>(j)]).real() - mean(i) * mean(j);
    }
  }
  return 0.5 * (h + h.transpose());
}

ChannelOutput apply_first_order(const DensityMatrix& rho, const NoiseModel& model, FirstOrderOptions options) {
  check_model(rho, model);
  const SpaceSpec& space = rho.space();
  const RMatrix V = model.total_covariance();
  ChannelInfo info = base_info(rho, model, "first_order");
  info.weak_noise_warning = info.weak_noise_parameter > options.weak_noise_guard;

  CMatrix out;
  if (space.all_diagonal_generators()) {
    const RMatrix x = decay_exponents(generator_diagonals(space), V);
    out = rho.matrix().cwiseProduct((1.0 - x.array()).matrix().cast<cplx>());
  } else {
    // V = sum_k mu_k u_k u_k^T turns the double sum into one jump operator per mode.
    Eigen::SelfAdjointEigenSolver<RMatrix> es(V);
    std::vector<CMatrix> ops;
    for (std::size_t i = 0; i < space.num_sites(); ++i) ops.push_back(embed(build_generator(space, i), space));
    out = rho.matrix();
    for (Eigen::Index m = 0; m < V.rows(); ++m) {
      const double mu = es.eigenvalues()(m);
      if (mu == 0.0) continue;
      CMatrix jump = CMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
      for (Eigen::Index i = 0; i < V.rows(); ++i) jump += es.eigenvectors()(i, m) * ops[static_cast<std::size_t>(i)];
      const CMatrix j2 = jump * jump;
      out += mu * (jump * rho.matrix() * jump - 0.5 * (j2 * rho.matrix() + rho.matrix() * j2));
    }
  }
  DensityMatrix state = DensityMatrix::unchecked(space, hermitian_part(out));
  info.min_eigenvalue = state.check().min_eigenvalue;
  return {std::move(state), info};
}

ChannelOutput apply_exact_diagonal(const DensityMatrix& rho, const NoiseModel& model) {
  check_model(rho, model);
  const SpaceSpec& space = rho.space();
  if (!space.all_diagonal_generators()) {
    fail(ErrorCode::NonDiagonalGenerator, "exact closed form needs pauli_z or number generators");
  }
  ChannelInfo info = base_info(rho, model, "exact_diagonal");
  const RMatrix x = decay_exponents(generator_diagonals(space), model.total_covariance());
  CMatrix out = rho.matrix().cwiseProduct((-x.array()).exp().matrix().cast<cplx>());
  DensityMatrix state = DensityMatrix::unchecked(space, hermitian_part(out));
  info.min_eigenvalue = state.check().min_eigenvalue;
  return {std::move(state), info};
}

CMatrix displacement_matrix(int d, double alpha) {
  CMatrix dm(d, d);
  const double x = alpha * alpha;
  const double pref = std::exp(-0.5 * x);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      const int lo = std::min(m, n);
      const int hi = std::max(m, n);
      const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)));
      const double base = m >= n ? alpha : -alpha;
      const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(hi - lo), x);
      dm(m, n) = ratio * std::pow(base, hi - lo) * pref * lag;
    }
  }
  return dm;
}

namespace {

// V = B B^T restricted to its nonzero spectrum.
RMatrix noise_factor(const RMatrix& V) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(V);
  const RVector& mu = es.eigenvalues();
  if (mu.size() > 0 && mu.minCoeff() < -1e-10) {
    fail(ErrorCode::CholeskyFailure, "covariance has eigenvalue " + format_value(mu.minCoeff()));
  }
  const double scale = mu.size() > 0 ? std::max(mu.maxCoeff(), 0.0) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > 1e-14 * scale && mu(i) > 0.0) keep.push_back(i);
  }
  RMatrix b(V.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    b.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(mu(keep[c]));
  }
  return b;
}

// Accumulates w * U_l rho U_l^dag for translations l.
class RandomUnitaryAccumulator {
 public:
  explicit RandomUnitaryAccumulator(const DensityMatrix& rho) : rho_(rho), space_(rho.space()) {
    diagonal_ = space_.all_diagonal_generators();
    const auto n = static_cast<Eigen::Index>(space_.dim());
    acc_ = CMatrix::Zero(n, n);
    if (diagonal_) diagonals_ = generator_diagonals(space_);
  }

  void add(const RVector& lambda, double weight) {
    weight_sum_ += weight;
    ++evaluations_;
    if (diagonal_) {
      const RVector phase = diagonals_ * lambda;
      const CVector u = (phase.cast<cplx>() * cplx(0.0, -1.0)).array().exp().matrix();
      acc_ += weight * (u * u.adjoint()).cwiseProduct(rho_.matrix());
      return;
    }
    const CMatrix u = full_unitary(lambda);
    const CMatrix mapped = u * rho_.matrix() * u.adjoint();
    leakage_ += weight * (1.0 - mapped.trace().real());
    acc_ += weight * mapped;
  }

  double weight_sum() const { return weight_sum_; }
  double leakage() const { return leakage_; }
  std::size_t evaluations() const { return evaluations_; }

  CMatrix result() const {
    const cplx tr = acc_.trace();
    return acc_ / tr.real();
  }

 private:
  CMatrix local_unitary(std::size_t site, double lambda) const {
    const SiteSpec& s = space_.site(site);
    const int d = s.local_dim();
    if (s.generator == GeneratorKind::momentum) {
      // exp(-i l p) = D(l / sqrt 2) shifts x by l.
      return displacement_matrix(d, lambda / std::sqrt(2.0)).cast<cplx>();
    }
    const LocalOperator h = build_generator(space_, site);
    CMatrix u = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) u(j, j) = std::exp(cplx(0.0, -lambda * h.matrix(j, j).real()));
    return u;
  }

  CMatrix full_unitary(const RVector& lambda) const {
    CMatrix u = CMatrix::Ones(1, 1);
    for (std::size_t i = 0; i < space_.num_sites(); ++i) {
      const CMatrix l = local_unitary(i, lambda(static_cast<Eigen::Index>(i)));
      CMatrix next(u.rows() * l.rows(), u.cols() * l.cols());
      for (Eigen::Index a = 0; a < u.rows(); ++a) {
        for (Eigen::Index b = 0; b < u.cols(); ++b) {
          next.block(a * l.rows(), b * l.cols(), l.rows(), l.cols()) = u(a, b) * l;
        }
      }
      u = std::move(next);
    }
    return u;
  }

  const DensityMatrix& rho_;
  const SpaceSpec& space_;
  bool diagonal_ = false;
  RMatrix diagonals_;
  CMatrix acc_;
  double weight_sum_ = 0.0;
  double leakage_ = 0.0;
  std::size_t evaluations_ = 0;
};

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

ChannelOutput apply_random_unitary_oracle(const DensityMatrix& rho, const NoiseModel& model, const OracleMethod& method) {
  check_model(rho, model);
  const RMatrix b = noise_factor(model.total_covariance());
  const auto rank = static_cast<int>(b.cols());
  RandomUnitaryAccumulator acc(rho);
  ChannelInfo info = base_info(rho, model, "");
  info.noise_rank = rank;

  if (const auto* gh = std::get_if<GaussHermiteMethod>(&method)) {
    info.method = "gauss_hermite";
    info.quadrature_points = gh->points;
    if (rank > gh->max_dims) {
      fail(ErrorCode::BudgetExceeded, "Gauss-Hermite over " + std::to_string(rank) + " noise dimensions exceeds limit " +
                                          std::to_string(gh->max_dims));
    }
    const GaussHermiteRule rule = gauss_hermite_normal(gh->points);
    std::size_t total = 1;
    for (int r = 0; r < rank; ++r) {
      total *= static_cast<std::size_t>(gh->points);
      if (total > gh->max_evaluations) fail(ErrorCode::BudgetExceeded, "Gauss-Hermite grid exceeds evaluation budget");
    }
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    RVector z(rank);
    for (std::size_t t = 0; t < total; ++t) {
      double w = 1.0;
      for (int r = 0; r < rank; ++r) {
        z(r) = rule.nodes(idx[static_cast<std::size_t>(r)]);
        w *= rule.weights(idx[static_cast<std::size_t>(r)]);
      }
      acc.add(b * z, w);
      for (int r = 0; r < rank; ++r) {
        if (++idx[static_cast<std::size_t>(r)] < gh->points) break;
        idx[static_cast<std::size_t>(r)] = 0;
      }
    }
    if (std::abs(acc.weight_sum() - 1.0) > 1e-12) {
      fail(ErrorCode::BudgetExceeded, "quadrature weights sum to " + format_value(acc.weight_sum()));
    }
  } else if (const auto* mc = std::get_if<MonteCarloMethod>(&method)) {
    info.method = "monte_carlo";
    info.samples = mc->samples;
    info.seed = mc->seed;
    if (mc->samples == 0) fail(ErrorCode::ValidationError, "Monte Carlo needs at least one sample");
    const double w = 1.0 / static_cast<double>(mc->samples);
    RVector z(rank);
    for (std::size_t s = 0; s < mc->samples; ++s) {
      std::mt19937_64 rng(sample_seed(mc->seed, s));
      std::normal_distribution<double> normal;
      for (int r = 0; r < rank; ++r) z(r) = normal(rng);
      acc.add(b * z, w);
    }
  } else {
    info.method = "signed_pair";
    if (rank == 0) {
      acc.add(RVector::Zero(model.total_covariance().rows()), 1.0);
    } else {
      const double w = 1.0 / (2.0 * rank);
      const double scale = std::sqrt(static_cast<double>(rank));
      for (int r = 0; r < rank; ++r) {
        acc.add(scale * b.col(r), w);
        acc.add(-scale * b.col(r), w);
      }
    }
  }

  info.evaluations = acc.evaluations();
  info.weight_sum = acc.weight_sum();
  info.leakage = acc.leakage();
  DensityMatrix state = DensityMatrix::unchecked(rho.space(), hermitian_part(acc.result()));
  info.min_eigenvalue = state.check().min_eigenvalue;
  return {std::move(state), info};
}

ChannelOutput apply_displacement_exact(const DensityMatrix& rho, const NoiseModel& model, int points,
                                       double leakage_tol) {
  const SpaceSpec& space = rho.space();
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    if (space.site(i).generator != GeneratorKind::momentum) {
      fail(ErrorCode::ValidationError, "displacement channel needs momentum generators on every site");
    }
  }
  GaussHermiteMethod gh;
  gh.points = points;
  ChannelOutput out = apply_random_unitary_oracle(rho, model, gh);
  out.info.method = "displacement_exact";
  if (out.info.leakage > leakage_tol) {
    fail(ErrorCode::TruncationLeakage, "displacement channel leaked " + format_value(out.info.leakage) +
                                           " trace out of the Fock truncation");
  }
  return out;
}

}  // namespace qsn
