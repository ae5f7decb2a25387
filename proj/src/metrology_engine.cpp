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

#include "qsn/metrology_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>

#include "qsn/error.hpp"

namespace qsn {

std::uint64_t state_fingerprint(const CVector& amplitudes) {
  const std::string_view bytes(reinterpret_cast<const char*>(amplitudes.data()),
                               static_cast<std::size_t>(amplitudes.size()) * sizeof(cplx));
  return static_cast<std::uint64_t>(std::hash<std::string_view>{}(bytes));
}

GeneratorMatrix generator_matrix(const StateVector& psi) {
  const SpaceSpec& space = psi.space();
  const auto k = static_cast<Eigen::Index>(space.num_sites());
  const CVector& amps = psi.amplitudes();
  std::vector<CVector> acted;
  acted.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) acted.push_back(apply_local(build_generator(space, static_cast<std::size_t>(i)), space, amps));

  RVector mean(k);
  RMatrix h(k, k);
  double imag_residue = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const cplx m = amps.dot(acted[static_cast<std::size_t>(i)]);
    imag_residue = std::max(imag_residue, std::abs(m.imag()));
    mean(i) = m.real();
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      // <psi|h_i h_j|psi> = <h_i psi|h_j psi>
      const cplx m = acted[static_cast<std::size_t>(i)].dot(acted[static_cast<std::size_t>(j)]);
      imag_residue = std::max(imag_residue, std::abs(m.imag()));
      h(i, j) = m.real() - mean(i) * mean(j);
    }
  }
  if (imag_residue > 1e-10) {
    fail(ErrorCode::NonCommutingGenerators, "generator moments carry imaginary part " + format_value(imag_residue));
  }
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) fail(ErrorCode::NonCommutingGenerators, "generator matrix asymmetry " + format_value(asym));
  return {0.5 * (h + h.transpose()), state_fingerprint(amps)};
}

namespace {

void check_square(const RMatrix& m, Eigen::Index k, std::string_view name) {
  if (m.rows() != k || m.cols() != k) {
    fail(ErrorCode::DimensionMismatch, std::string(name) + " must be " + std::to_string(k) + "x" + std::to_string(k));
  }
}

void require_orthogonal(const RMatrix& W) {
  if (W.rows() != W.cols()) fail(ErrorCode::NotOrthogonal, "W must be square");
  const double err = (W * W.transpose() - RMatrix::Identity(W.rows(), W.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-10) fail(ErrorCode::NotOrthogonal, "W W^T departs from identity by " + format_value(err));
}

}  // namespace

double qfi_single(const GeneratorMatrix& H, const RMatrix& v) {
  check_square(v, H.H.rows(), "v");
  require_symmetric_psd(v, "v");
  return 4.0 * (v * H.H).trace();
}

CollectiveParameters collective_parameters(const RMatrix& V, const RMatrix& W) {
  require_orthogonal(W);
  check_square(V, W.rows(), "V");
  const RMatrix vp = W * V * W.transpose();
  const Eigen::Index k = vp.rows();
  CollectiveParameters out{RVector(k), RMatrix::Identity(k, k)};
  for (Eigen::Index i = 0; i < k; ++i) out.xi(i) = std::sqrt(std::max(vp(i, i), 0.0));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double denom = out.xi(i) * out.xi(j);
      const double c = denom > 0.0 ? std::clamp(0.5 * (vp(i, j) + vp(j, i)) / denom, -1.0, 1.0) : 0.0;
      out.correlation(i, j) = c;
      out.correlation(j, i) = c;
    }
  }
  return out;
}

RMatrix qfi_matrix_multi(const GeneratorMatrix& H, const RMatrix& W, const RMatrix& C) {
  require_orthogonal(W);
  const Eigen::Index k = W.rows();
  check_square(H.H, k, "H");
  check_square(C, k, "C");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(C(i, i) - 1.0) > 1e-12) fail(ErrorCode::ValidationError, "correlation matrix needs unit diagonal");
    for (Eigen::Index j = 0; j < k; ++j) {
      if (std::abs(C(i, j) - C(j, i)) > 1e-12) fail(ErrorCode::ValidationError, "correlation matrix must be symmetric");
      if (std::abs(C(i, j)) > 1.0 + 1e-12) fail(ErrorCode::ValidationError, "correlation coefficient exceeds 1");
    }
  }
  const RMatrix rotated = W * H.H * W.transpose();
  RMatrix F(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) F(i, j) = i == j ? 4.0 * rotated(i, i) : 8.0 * C(i, j) * rotated(i, j);
  }
  return F;
}

double multi_quadratic_form(const RMatrix& F, const RVector& xi) {
  if (F.rows() != xi.size() || F.cols() != xi.size()) fail(ErrorCode::DimensionMismatch, "F and xi sizes differ");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    sum += F(i, i) * xi(i) * xi(i);
    for (Eigen::Index j = i + 1; j < xi.size(); ++j) sum += F(i, j) * xi(i) * xi(j);
  }
  return sum;
}

RankOneFactor rank_one_factor(const RMatrix& v, double tolerance) {
  require_symmetric_psd(v, "v");
  Eigen::SelfAdjointEigenSolver<RMatrix> es(v);
  const Eigen::Index top = v.rows() - 1;
  RVector u = es.eigenvectors().col(top);
  Eigen::Index arg = 0;
  u.cwiseAbs().maxCoeff(&arg);
  if (u(arg) < 0.0) u = -u;
  const double lead = es.eigenvalues()(top);
  const double residual = (v - lead * u * u.transpose()).cwiseAbs().maxCoeff();
  if (residual > tolerance * std::max(1.0, std::abs(lead))) {
    fail(ErrorCode::NotRankOne, "v is not rank one (residual " + format_value(residual) + ")");
  }
  return {v.trace(), u};
}

double qfi_rayleigh_single(double g, const RMatrix& v, const RMatrix& sigma, const GeneratorMatrix& H) {
  check_square(v, H.H.rows(), "v");
  check_square(sigma, H.H.rows(), "Sigma");
  require_symmetric_psd(sigma, "Sigma");
  const RankOneFactor f = rank_one_factor(v);
  const double s2 = f.direction.dot(sigma * f.direction);
  const double uncursed = 4.0 * (v * H.H).trace();
  if (s2 <= 0.0) return uncursed;
  const double signal = g * g * f.trace;
  return signal / (signal + s2) * uncursed;
}

RVector qfi_rayleigh_multi(const RVector& xi, const RVector& sigma, const RMatrix& W, const GeneratorMatrix& H) {
  require_orthogonal(W);
  const Eigen::Index k = W.rows();
  check_square(H.H, k, "H");
  if (xi.size() != k || sigma.size() != k) fail(ErrorCode::DimensionMismatch, "xi and sigma need one entry per row of W");
  const RMatrix rotated = W * H.H * W.transpose();
  RVector out(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (xi(i) < 0.0 || sigma(i) < 0.0) fail(ErrorCode::ValidationError, "xi and sigma must be non-negative");
    const double x2 = xi(i) * xi(i);
    const double s2 = sigma(i) * sigma(i);
    out(i) = s2 == 0.0 ? 4.0 * rotated(i, i) : 4.0 * x2 / (s2 + x2) * rotated(i, i);
  }
  return out;
}

namespace {

bool is_pure(const CMatrix& m) { return std::abs((m * m).trace().real() - 1.0) < 1e-12; }

CVector dominant_vector(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  return es.eigenvectors().col(m.rows() - 1);
}

}  // namespace

FidelityResult fidelity_detailed(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "fidelity arguments live on different spaces");
  FidelityResult out;
  if (is_pure(rho.matrix()) || is_pure(sigma.matrix())) {
    const bool rho_pure = is_pure(rho.matrix());
    const CVector psi = dominant_vector(rho_pure ? rho.matrix() : sigma.matrix());
    const CMatrix& other = rho_pure ? sigma.matrix() : rho.matrix();
    out.value = std::clamp(psi.dot(other * psi).real(), 0.0, 1.0);
    return out;
  }
  const HermitianEigen er = eigendecompose_hermitian(rho.matrix(), 1e-8);
  RVector roots(er.eigenvalues.size());
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    const double l = er.eigenvalues(i);
    if (l < 0.0) out.floored_mass += -l;
    roots(i) = std::sqrt(std::max(l, 0.0));
  }
  const CMatrix sqrt_rho = er.eigenvectors * roots.cast<cplx>().asDiagonal() * er.eigenvectors.adjoint();
  const CMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  const HermitianEigen ei = eigendecompose_hermitian(inner, 1e-8);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ei.eigenvalues.size(); ++i) {
    const double l = ei.eigenvalues(i);
    if (l < 0.0) out.floored_mass += -l;
    sum += std::sqrt(std::max(l, 0.0));
  }
  out.value = std::clamp(sum * sum, 0.0, 1.0);
  return out;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) { return fidelity_detailed(rho, sigma).value; }

double fidelity(const StateVector& psi, const DensityMatrix& sigma) {
  if (psi.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "fidelity arguments live on different spaces");
  return std::clamp(psi.amplitudes().dot(sigma.matrix() * psi.amplitudes()).real(), 0.0, 1.0);
}

namespace {

double sld_sum(const HermitianEigen& eig, const CMatrix& derivative, double floor) {
  const CMatrix a = eig.eigenvectors.adjoint() * derivative * eig.eigenvectors;
  const Eigen::Index n = a.rows();
  double sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lk = std::max(eig.eigenvalues(k), 0.0);
    for (Eigen::Index l = 0; l < n; ++l) {
      const double denom = lk + std::max(eig.eigenvalues(l), 0.0);
      if (denom < floor) continue;
      sum += std::norm(a(k, l)) / denom;
    }
  }
  return 2.0 * sum;
}

}  // namespace

QfiOracleResult qfi_oracle(const ChannelFamily& channel, double g0, QfiOracleOptions options) {
  QfiOracleResult out;
  out.delta = options.delta.value_or(std::max(1e-4, std::abs(g0) / 10.0));
  const double h = out.delta;
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "oracle step must be positive");

  const DensityMatrix rho = channel(g0);
  const HermitianEigen eig = eigendecompose_hermitian(rho.matrix(), 1e-8);
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) < 0.0) out.floored_mass += -eig.eigenvalues(i);
  }
  const CMatrix coarse = (channel(g0 + h).matrix() - channel(g0 - h).matrix()) / (2.0 * h);
  const CMatrix fine = (channel(g0 + h / 2).matrix() - channel(g0 - h / 2).matrix()) / h;
  const CMatrix richardson = (4.0 * fine - coarse) / 3.0;

  out.coarse = sld_sum(eig, coarse, options.eigen_floor);
  out.fine = sld_sum(eig, fine, options.eigen_floor);
  out.value = sld_sum(eig, richardson, options.eigen_floor);
  const double scale = std::max(std::abs(out.fine), 1e-300);
  if (std::abs(out.coarse - out.fine) / scale > options.max_step_disagreement && std::abs(out.coarse - out.fine) > 1e-12) {
    fail(ErrorCode::DegenerateDerivative, "oracle values at step " + format_value(h) + " and " + format_value(h / 2) +
                                              " disagree: " + format_value(out.coarse) + " vs " +
                                              format_value(out.fine));
  }
  return out;
}

double cfi_binary(const std::function<double(double)>& p0_of_g, double g0) {
  const double h = g0 != 0.0 ? 1e-4 * std::abs(g0) : 1e-4;
  const double p = p0_of_g(g0);
  const double up = p0_of_g(g0 + h);
  const double down = p0_of_g(g0 - h);
  for (double q : {p, up, down}) {
    if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::ProbabilityOutOfRange, "p0 = " + format_value(q) + " outside (0, 1)");
  }
  const double dp = (up - down) / (2.0 * h);
  return dp * dp * (1.0 / p + 1.0 / (1.0 - p));
}

double relative_deviation(double analytic, double oracle) {
  return std::abs(analytic - oracle) / std::max(analytic, 1e-15);
}

}  // namespace qsn
