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

#include "qsn/quadrature.hpp"

#include <cmath>

#include "qsn/error.hpp"

namespace qsn {

GaussHermiteRule gauss_hermite_normal(int points) {
  if (points < 1) fail(ErrorCode::InvalidArgument, "Gauss-Hermite needs at least one point");
  RMatrix jacobi = RMatrix::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(jacobi);
  GaussHermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = es.eigenvectors().row(0).array().square();
  return rule;
}

}  // namespace qsn
