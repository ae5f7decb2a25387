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

#include "qsn/probe_library.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qsn/error.hpp"

namespace qsn {

std::string_view to_string(ProbeFamily family) {
  switch (family) {
    case ProbeFamily::product_plus: return "product_plus";
    case ProbeFamily::qubit_ghz: return "qubit_ghz";
    case ProbeFamily::product_zeroN: return "product_zeroN";
    case ProbeFamily::boson_ghz: return "boson_ghz";
    case ProbeFamily::fermion_ghz: return "fermion_ghz";
    case ProbeFamily::fock_product: return "fock_product";
    case ProbeFamily::squeezed_vacuum_product: return "squeezed_vacuum_product";
    case ProbeFamily::custom: return "custom";
  }
  return "?";
}

std::optional<ProbeFamily> parse_probe_family(std::string_view name) {
  for (auto f : {ProbeFamily::product_plus, ProbeFamily::qubit_ghz, ProbeFamily::product_zeroN, ProbeFamily::boson_ghz,
                 ProbeFamily::fermion_ghz, ProbeFamily::fock_product, ProbeFamily::squeezed_vacuum_product,
                 ProbeFamily::custom}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

double squeeze_parameter(double nbar) { return std::asinh(std::sqrt(nbar)); }

RVector squeezed_vacuum_amplitudes(double nbar, int d) {
  if (nbar < 0.0) fail(ErrorCode::InvalidArgument, "squeezed vacuum needs nbar >= 0");
  const double r = squeeze_parameter(nbar);
  const double t = std::tanh(r);
  RVector c = RVector::Zero(d);
  double amp = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 0; n < d; n += 2) {
    c(n) = amp;
    const double m = n + 2;
    amp *= -t * std::sqrt(m * (m - 1.0)) / m;
  }
  return c;
}

int squeezed_vacuum_truncation(double nbar, double tail, int max_d) {
  for (int d = 2; d <= max_d; ++d) {
    const RVector c = squeezed_vacuum_amplitudes(nbar, d);
    if (1.0 - c.squaredNorm() < tail) return d;
  }
  fail(ErrorCode::TailMassTooLarge, "squeezed vacuum with nbar=" + format_value(nbar) +
                                        " needs truncation beyond " + std::to_string(max_d));
}

namespace {

void require_kind(const SpaceSpec& space, SiteKind kind, ProbeFamily family) {
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    if (space.site(i).kind != kind) {
      fail(ErrorCode::ValidationError, std::string(to_string(family)) + " requires " + std::string(to_string(kind)) +
                                           " sites; site " + std::to_string(i) + " is " +
                                           std::string(to_string(space.site(i).kind)));
    }
  }
}

// Tensor product of per-site local vectors.
CVector product_state(const SpaceSpec& space, const std::vector<CVector>& locals) {
  CVector out = CVector::Ones(1);
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    const CVector& l = locals[i];
    CVector next(out.size() * l.size());
    for (Eigen::Index a = 0; a < out.size(); ++a) {
      for (Eigen::Index b = 0; b < l.size(); ++b) next(a * l.size() + b) = out(a) * l(b);
    }
    out = std::move(next);
  }
  return out;
}

// Flat index of the basis state with every site at local level `level`.
std::size_t uniform_index(const SpaceSpec& space, int level) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < space.num_sites(); ++i) idx += static_cast<std::size_t>(level) * space.stride(i);
  return idx;
}

CVector two_branch(const SpaceSpec& space, int level) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(space.dim()));
  const double s = 1.0 / std::sqrt(2.0);
  v(0) = s;
  v(static_cast<Eigen::Index>(uniform_index(space, level))) = s;
  return v;
}

void require_photons(const SpaceSpec& space, int n) {
  if (n < 1) fail(ErrorCode::ValidationError, "photon number N must be >= 1");
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    if (space.site(i).truncation <= n) {
      fail(ErrorCode::TruncationTooSmall, "site " + std::to_string(i) + " truncation " +
                                              std::to_string(space.site(i).truncation) + " cannot hold N=" +
                                              std::to_string(n));
    }
  }
}

}  // namespace

StateVector build_probe(const ProbeSpec& spec, const SpaceSpec& space) {
  const std::size_t k = space.num_sites();
  switch (spec.family) {
    case ProbeFamily::product_plus: {
      require_kind(space, SiteKind::qubit, spec.family);
      CVector plus = CVector::Constant(2, 1.0 / std::sqrt(2.0));
      return StateVector(space, product_state(space, std::vector<CVector>(k, plus)));
    }
    case ProbeFamily::qubit_ghz:
      require_kind(space, SiteKind::qubit, spec.family);
      return StateVector(space, two_branch(space, 1));
    case ProbeFamily::fermion_ghz:
      require_kind(space, SiteKind::fermion, spec.family);
      if (k % 2 != 0) {
        fail(ErrorCode::OddFermionCount, "fermion_ghz needs an even number of modes, got " + std::to_string(k));
      }
      return StateVector(space, two_branch(space, 1));
    case ProbeFamily::boson_ghz:
      require_kind(space, SiteKind::boson, spec.family);
      require_photons(space, spec.photons);
      return StateVector(space, two_branch(space, spec.photons));
    case ProbeFamily::product_zeroN: {
      require_kind(space, SiteKind::boson, spec.family);
      require_photons(space, spec.photons);
      std::vector<CVector> locals;
      for (std::size_t i = 0; i < k; ++i) {
        CVector l = CVector::Zero(space.local_dim(i));
        l(0) = 1.0 / std::sqrt(2.0);
        l(spec.photons) = 1.0 / std::sqrt(2.0);
        locals.push_back(l);
      }
      return StateVector(space, product_state(space, locals));
    }
    case ProbeFamily::fock_product: {
      if (spec.occupations.size() != k) {
        fail(ErrorCode::ValidationError, "fock_product needs one occupation per site");
      }
      std::vector<CVector> locals;
      for (std::size_t i = 0; i < k; ++i) {
        if (space.site(i).kind == SiteKind::qubit) {
          fail(ErrorCode::ValidationError, "fock_product requires boson or fermion sites");
        }
        const int n = spec.occupations[i];
        if (n < 0 || n >= space.local_dim(i)) {
          fail(ErrorCode::TruncationTooSmall, "occupation " + std::to_string(n) + " does not fit site " +
                                                  std::to_string(i));
        }
        CVector l = CVector::Zero(space.local_dim(i));
        l(n) = 1.0;
        locals.push_back(l);
      }
      return StateVector(space, product_state(space, locals));
    }
    case ProbeFamily::squeezed_vacuum_product: {
      require_kind(space, SiteKind::boson, spec.family);
      std::vector<CVector> locals;
      for (std::size_t i = 0; i < k; ++i) {
        const int d = space.local_dim(i);
        RVector c = squeezed_vacuum_amplitudes(spec.nbar, d);
        const double tail = 1.0 - c.squaredNorm();
        if (tail >= 1e-10) {
          fail(ErrorCode::TailMassTooLarge, "squeezed vacuum nbar=" + format_value(spec.nbar) + " loses " +
                                                std::to_string(tail) + " mass at truncation " + std::to_string(d) +
                                                "; needs " + std::to_string(squeezed_vacuum_truncation(spec.nbar)));
        }
        c /= c.norm();
        locals.push_back(c.cast<cplx>());
      }
      return StateVector(space, product_state(space, locals));
    }
    case ProbeFamily::custom:
      if (static_cast<std::size_t>(spec.amplitudes.size()) != space.dim()) {
        fail(ErrorCode::DimensionMismatch, "custom amplitudes have length " + std::to_string(spec.amplitudes.size()) +
                                               ", space dimension is " + std::to_string(space.dim()));
      }
      return StateVector(space, spec.amplitudes);
  }
  fail(ErrorCode::ValidationError, "unknown probe family");
}

CMatrix beam_splitter_unitary(int d, double theta, double phi) {
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  CMatrix gen = CMatrix::Zero(n, n);
  const cplx e = std::polar(1.0, phi);
  // a^dag b |na, nb> = sqrt((na+1) nb) |na+1, nb-1>
  for (int na = 0; na + 1 < d; ++na) {
    for (int nb = 1; nb < d; ++nb) {
      const double amp = std::sqrt(static_cast<double>(na + 1) * nb);
      const Eigen::Index from = static_cast<Eigen::Index>(na) * d + nb;
      const Eigen::Index to = static_cast<Eigen::Index>(na + 1) * d + (nb - 1);
      gen(to, from) += theta * e * amp;
      gen(from, to) -= theta * std::conj(e) * amp;
    }
  }
  return gen.exp();
}

PassiveResult apply_passive_network(const StateVector& state, const PassiveNetwork& network, double leakage_tol) {
  const SpaceSpec& space = state.space();
  const int d = space.local_dim(0);
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    if (space.site(i).kind != SiteKind::boson) {
      fail(ErrorCode::NonBosonicSite, "passive networks act on bosonic modes; site " + std::to_string(i) + " is " +
                                          std::string(to_string(space.site(i).kind)));
    }
    if (space.local_dim(i) != d) fail(ErrorCode::ValidationError, "passive networks need equal truncations");
  }
  CVector amps = state.amplitudes();
  double max_leak = 0.0;
  for (const auto& bs : network) {
    if (bs.mode_a >= space.num_sites() || bs.mode_b >= space.num_sites() || bs.mode_a == bs.mode_b) {
      fail(ErrorCode::ValidationError, "beam splitter modes out of range");
    }
    double leak = 0.0;
    for (std::size_t k = 0; k < space.dim(); ++k) {
      if (space.digit(k, bs.mode_a) + space.digit(k, bs.mode_b) >= d) leak += std::norm(amps(static_cast<Eigen::Index>(k)));
    }
    if (leak > leakage_tol) {
      fail(ErrorCode::TruncationLeakage, "beam splitter on modes (" + std::to_string(bs.mode_a) + "," +
                                             std::to_string(bs.mode_b) + ") sees " + format_value(leak) +
                                             " mass outside the truncation");
    }
    max_leak = std::max(max_leak, leak);
    amps = apply_two_site(beam_splitter_unitary(d, bs.theta, bs.phi), bs.mode_a, bs.mode_b, space, amps);
  }
  amps /= amps.norm();
  return {StateVector(space, std::move(amps)), max_leak};
}

Occupation mean_occupation(const StateVector& state) {
  const SpaceSpec& space = state.space();
  Occupation occ;
  const RVector probs = state.amplitudes().cwiseAbs2();
  for (std::size_t i = 0; i < space.num_sites(); ++i) {
    if (space.site(i).kind == SiteKind::qubit) {
      fail(ErrorCode::ValidationError, "occupation is defined for boson and fermion sites only");
    }
    double n = 0.0;
    for (std::size_t k = 0; k < space.dim(); ++k) n += probs(static_cast<Eigen::Index>(k)) * space.digit(k, i);
    occ.per_site.push_back(n);
    occ.mean += n;
  }
  occ.mean /= static_cast<double>(space.num_sites());
  return occ;
}

double average_number_variance(const StateVector& state) {
  const SpaceSpec& space = state.space();
  const RVector probs = state.amplitudes().cwiseAbs2();
  const double k = static_cast<double>(space.num_sites());
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t idx = 0; idx < space.dim(); ++idx) {
    double total = 0.0;
    for (std::size_t i = 0; i < space.num_sites(); ++i) total += space.digit(idx, i);
    total /= k;
    m1 += probs(static_cast<Eigen::Index>(idx)) * total;
    m2 += probs(static_cast<Eigen::Index>(idx)) * total * total;
  }
  return m2 - m1 * m1;
}

}  // namespace qsn
