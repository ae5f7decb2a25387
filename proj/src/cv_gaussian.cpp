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

#include "qsn/cv_gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsn/error.hpp"
#include "qsn/noise_channels.hpp"

namespace qsn {

GaussianState GaussianState::vacuum(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  return {RVector::Zero(n), 0.5 * RMatrix::Identity(n, n)};
}

RMatrix symplectic_form(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  RMatrix omega = RMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    omega(i, i + 1) = 1.0;
    omega(i + 1, i) = -1.0;
  }
  return omega;
}

double uncertainty_margin(const GaussianState& state) {
  const CMatrix m = state.cov.cast<cplx>() + 0.5 * kI * symplectic_form(state.modes()).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void require_physical(const GaussianState& state) {
  const Eigen::Index n = state.mean.size();
  if (n % 2 != 0 || state.cov.rows() != n || state.cov.cols() != n) {
    fail(ErrorCode::InvalidState, "Gaussian state needs a 2K mean and a 2K x 2K covariance");
  }
  if ((state.cov - state.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::InvalidState, "covariance is not symmetric");
  }
  const double margin = uncertainty_margin(state);
  if (margin < -1e-9) fail(ErrorCode::InvalidState, "uncertainty relation violated by " + format_value(margin));
}

double total_occupation(const GaussianState& state) {
  return 0.5 * (state.cov.trace() - static_cast<double>(state.modes())) + 0.5 * state.mean.squaredNorm();
}

namespace {

GaussianState transform(const GaussianState& state, const RMatrix& S) {
  return {S * state.mean, S * state.cov * S.transpose()};
}

void check_site(const GaussianState& state, std::size_t site) {
  if (site >= state.modes()) {
    fail(ErrorCode::InvalidArgument, "mode " + std::to_string(site) + " out of range");
  }
}

}  // namespace

GaussianState squeeze(const GaussianState& state, std::size_t site, double r) {
  check_site(state, site);
  RMatrix S = RMatrix::Identity(state.cov.rows(), state.cov.cols());
  const auto i = static_cast<Eigen::Index>(2 * site);
  S(i, i) = std::exp(-r);
  S(i + 1, i + 1) = std::exp(r);
  return transform(state, S);
}

RMatrix passive_symplectic(std::size_t modes, const PassiveNetwork& network) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  RMatrix S = RMatrix::Identity(n, n);
  auto put = [](RMatrix& m, Eigen::Index row, Eigen::Index col, cplx c) {
    m(row, col) = c.real();
    m(row, col + 1) = -c.imag();
    m(row + 1, col) = c.imag();
    m(row + 1, col + 1) = c.real();
  };
  for (const BeamSplitter& bs : network) {
    if (bs.mode_a >= modes || bs.mode_b >= modes || bs.mode_a == bs.mode_b) {
      fail(ErrorCode::InvalidArgument, "beam splitter needs two distinct modes in range");
    }
    // <a> -> cos t <a> + e^{i phi} sin t <b>, <b> -> -e^{-i phi} sin t <a> + cos t <b>
    const double c = std::cos(bs.theta);
    const double s = std::sin(bs.theta);
    const cplx e = std::polar(1.0, bs.phi);
    RMatrix layer = RMatrix::Identity(n, n);
    const auto a = static_cast<Eigen::Index>(2 * bs.mode_a);
    const auto b = static_cast<Eigen::Index>(2 * bs.mode_b);
    put(layer, a, a, c);
    put(layer, a, b, e * s);
    put(layer, b, a, -std::conj(e) * s);
    put(layer, b, b, c);
    S = layer * S;
  }
  return S;
}

GaussianState passive_mix(const GaussianState& state, const PassiveNetwork& network) {
  return transform(state, passive_symplectic(state.modes(), network));
}

GaussianState passive_mix(const GaussianState& state, const RMatrix& S) {
  const Eigen::Index n = state.cov.rows();
  if (S.rows() != n || S.cols() != n) fail(ErrorCode::DimensionMismatch, "S must match the phase-space dimension");
  const RMatrix omega = symplectic_form(state.modes());
  const double symp = (S * omega * S.transpose() - omega).cwiseAbs().maxCoeff();
  const double orth = (S * S.transpose() - RMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (symp > 1e-10) fail(ErrorCode::NotSymplectic, "S Omega S^T departs from Omega by " + format_value(symp));
  if (orth > 1e-10) fail(ErrorCode::NotSymplectic, "S is symplectic but not passive (orthogonality error " + format_value(orth) + ")");
  return transform(state, S);
}

RMatrix collective_mode_symplectic(const RMatrix& W) {
  const Eigen::Index k = W.rows();
  if (W.cols() != k) fail(ErrorCode::NotOrthogonal, "W must be square");
  const double err = (W * W.transpose() - RMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (err > 1e-10) fail(ErrorCode::NotOrthogonal, "W W^T departs from identity by " + format_value(err));
  // q_new = W^T q_old on both quadratures, so sum_i W_Ii q_new_i = q_old_I.
  RMatrix S = RMatrix::Zero(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      S(2 * i, 2 * j) = W(j, i);
      S(2 * i + 1, 2 * j + 1) = W(j, i);
    }
  }
  return S;
}

GaussianState random_displacement(const GaussianState& state, const RMatrix& V) {
  const auto k = static_cast<Eigen::Index>(state.modes());
  if (V.rows() != k || V.cols() != k) fail(ErrorCode::DimensionMismatch, "V must be K x K");
  require_symmetric_psd(V, "V");
  GaussianState out = state;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) out.cov(2 * i, 2 * j) += V(i, j);
  }
  return out;
}

double collective_variance(const GaussianState& state, const RVector& w, Quadrature quadrature) {
  const auto k = static_cast<Eigen::Index>(state.modes());
  if (w.size() != k) fail(ErrorCode::DimensionMismatch, "w must have one entry per mode");
  if (std::abs(w.norm() - 1.0) > 1e-10) fail(ErrorCode::InvalidArgument, "w must be a unit vector");
  const Eigen::Index q = quadrature == Quadrature::x ? 0 : 1;
  double var = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) var += w(i) * w(j) * state.cov(2 * i + q, 2 * j + q);
  }
  return var;
}

RMatrix momentum_generator_matrix(const GaussianState& state) {
  const auto k = static_cast<Eigen::Index>(state.modes());
  RMatrix h(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) h(i, j) = state.cov(2 * i + 1, 2 * j + 1);
  }
  return h;
}

GaussianState moments_from_fock(const DensityMatrix& rho) {
  const SpaceSpec& space = rho.space();
  const std::size_t k = space.num_sites();
  std::vector<CMatrix> ops;
  ops.reserve(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    if (space.site(i).kind != SiteKind::boson) fail(ErrorCode::NonBosonicSite, "site " + std::to_string(i) + " is not a boson");
    const int d = space.local_dim(i);
    ops.push_back(embed({i, position_quadrature(d), false}, space));
    ops.push_back(embed({i, momentum_quadrature(d), false}, space));
  }
  const auto n = static_cast<Eigen::Index>(2 * k);
  GaussianState out{RVector(n), RMatrix(n, n)};
  std::vector<CMatrix> weighted;
  weighted.reserve(ops.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    weighted.push_back(rho.matrix() * ops[static_cast<std::size_t>(a)]);
    out.mean(a) = weighted.back().trace().real();
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      // Tr[rho r_a r_b] symmetrized
      const cplx ab = (weighted[static_cast<std::size_t>(a)] * ops[static_cast<std::size_t>(b)]).trace();
      const double sym = ab.real();
      out.cov(a, b) = sym - out.mean(a) * out.mean(b);
      out.cov(b, a) = out.cov(a, b);
    }
  }
  return out;
}

RMatrix dct_orthonormal(std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  RMatrix c(n, n);
  for (Eigen::Index row = 0; row < n; ++row) {
    const double scale = std::sqrt((row == 0 ? 1.0 : 2.0) / static_cast<double>(k));
    for (Eigen::Index col = 0; col < n; ++col) {
      c(row, col) = scale * std::cos(std::numbers::pi * static_cast<double>((2 * col + 1) * row) / (2.0 * static_cast<double>(k)));
    }
  }
  return c;
}

AdvantageReport multiparam_advantage_report(std::size_t k, std::size_t n, double nbar, std::vector<double> allocation,
                                            std::optional<RMatrix> W) {
  if (k == 0 || n == 0 || n > k) fail(ErrorCode::InvalidArgument, "need 1 <= n <= K");
  if (!(nbar >= 0.0)) fail(ErrorCode::InvalidArgument, "nbar must be non-negative");
  const double total = static_cast<double>(k) * nbar;
  if (allocation.empty()) allocation.assign(n, total / static_cast<double>(n));
  if (allocation.size() != n) fail(ErrorCode::InvalidArgument, "allocation needs one entry per estimated parameter");
  double sum = 0.0;
  for (double q : allocation) {
    if (!(q >= 0.0)) fail(ErrorCode::InvalidArgument, "allocation entries must be non-negative");
    sum += q;
  }
  if (std::abs(sum - total) > 1e-9 * std::max(1.0, total)) {
    fail(ErrorCode::InvalidArgument, "allocation must spend the total occupation K*nbar = " + format_value(total));
  }

  AdvantageReport report;
  report.modes = k;
  report.parameters = n;
  report.nbar = nbar;
  report.W = W ? *W : dct_orthonormal(k);
  report.allocation = allocation;

  GaussianState ent = GaussianState::vacuum(k);
  for (std::size_t i = 0; i < n; ++i) ent = squeeze(ent, i, squeeze_parameter(allocation[i]));
  ent = transform(ent, collective_mode_symplectic(report.W));

  GaussianState sep = GaussianState::vacuum(k);
  for (std::size_t i = 0; i < k; ++i) sep = squeeze(sep, i, squeeze_parameter(nbar));

  const RMatrix h_ent = momentum_generator_matrix(ent);
  const RMatrix h_sep = momentum_generator_matrix(sep);
  for (std::size_t i = 0; i < n; ++i) {
    const RVector w = report.W.row(static_cast<Eigen::Index>(i)).transpose();
    AdvantageRow row;
    row.parameter = i;
    row.f_ent = 4.0 * w.dot(h_ent * w);
    row.f_sep = 4.0 * w.dot(h_sep * w);
    row.ratio = row.f_ent / row.f_sep;
    row.sep_bound = 8.0 * (nbar + 0.5);
    row.ent_bound = 8.0 * (allocation[i] + 0.5);
    row.ideal_ratio = static_cast<double>(k) / static_cast<double>(n);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace qsn
